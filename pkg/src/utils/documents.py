"""
Output documents.

Pydantic models for everything the CLI emits, with JSON via
model_dump_json and fixed-column CSV with floats at 17 significant digits.
"""

import csv
import io
from typing import Literal

from pydantic import BaseModel, Field

from src.diffusions.extremes import CdfEvaluation


class CdfRecord(BaseModel):
    value: float
    raw: float
    error_estimate: float
    N: int
    T: float
    geometry: dict[str, float]

    @classmethod
    def from_evaluation(cls, evaluation: CdfEvaluation) -> "CdfRecord":
        return cls(**evaluation.to_dict())


class EvalDocument(BaseModel):
    command: Literal["eval"] = "eval"
    process: str
    tol: float
    evaluation: CdfRecord


class TableRow(BaseModel):
    arg: float
    value: float
    error_estimate: float


class TableDocument(BaseModel):
    command: Literal["table"] = "table"
    process: str
    N: int
    T: float
    axis: str
    fixed: dict[str, float] = Field(default_factory=dict)
    tol: float
    rows: list[TableRow]


class McCompareRow(BaseModel):
    arg: float
    analytic: float
    empirical: float
    ci_half_width: float
    inside_ci: bool


class McCompareDocument(BaseModel):
    command: Literal["mc-compare"] = "mc-compare"
    process: str
    N: int
    T: float
    axis: str
    fixed: dict[str, float] = Field(default_factory=dict)
    seed: int
    steps: int
    samples: int
    attempted: int
    acceptance_rate: float
    coverage: float
    rows: list[McCompareRow]


class MomentRow(BaseModel):
    m: float
    analytic: float | None
    from_cdf: float
    relative_difference: float | None


class MomentsDocument(BaseModel):
    command: Literal["moments"] = "moments"
    process: str
    N: int
    T: float
    rows: list[MomentRow]


class SelfTestCheck(BaseModel):
    name: str
    passed: bool
    detail: str = ""


class SelfTestDocument(BaseModel):
    command: Literal["self-test"] = "self-test"
    passed: int
    failed: int
    checks: list[SelfTestCheck]


Document = EvalDocument | TableDocument | McCompareDocument | MomentsDocument | SelfTestDocument

DOCUMENTS: dict[str, type[BaseModel]] = {
    "eval": EvalDocument,
    "table": TableDocument,
    "mc-compare": McCompareDocument,
    "moments": MomentsDocument,
    "self-test": SelfTestDocument,
}


def document_schema(name: str) -> dict:
    """JSON schema of the document a command emits."""
    try:
        model = DOCUMENTS[name]
    except KeyError:
        raise ValueError(f"no output document for command {name!r}") from None
    return model.model_json_schema()


# =============================================================================
# Serialization
# =============================================================================

def _cell(value: float | int | bool | str | None) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _csv(header: list[str], rows: list[list]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def to_csv(document: Document) -> str:
    if isinstance(document, EvalDocument):
        ev = document.evaluation
        return _csv(["value", "raw", "error_estimate"], [[ev.value, ev.raw, ev.error_estimate]])
    if isinstance(document, TableDocument):
        return _csv(
            ["arg", "value", "error_estimate"],
            [[r.arg, r.value, r.error_estimate] for r in document.rows],
        )
    if isinstance(document, McCompareDocument):
        return _csv(
            ["arg", "analytic", "empirical", "ci_half_width", "inside_ci"],
            [[r.arg, r.analytic, r.empirical, r.ci_half_width, r.inside_ci] for r in document.rows],
        )
    if isinstance(document, MomentsDocument):
        return _csv(
            ["m", "analytic", "from_cdf", "relative_difference"],
            [[r.m, r.analytic, r.from_cdf, r.relative_difference] for r in document.rows],
        )
    return _csv(
        ["check", "passed", "detail"],
        [[c.name, c.passed, c.detail] for c in document.checks],
    )


def to_json(document: Document) -> str:
    return document.model_dump_json(indent=2) + "\n"


def render(document: Document, output_format: str) -> str:
    return to_json(document) if output_format == "json" else to_csv(document)
