"""
Tests for output documents and their serialization.
"""

import csv
import io
import json

import pytest

from src.diffusions.extremes import cdf_bessel_H
from src.utils.documents import (
    CdfRecord,
    EvalDocument,
    McCompareDocument,
    McCompareRow,
    MomentRow,
    MomentsDocument,
    SelfTestCheck,
    SelfTestDocument,
    TableDocument,
    TableRow,
    document_schema,
    render,
    to_csv,
    to_json,
)

# =============================================================================
# Fixtures
# =============================================================================

@pytest.fixture
def table_document():
    """A three-row r-sweep of the bridge law."""
    return TableDocument(
        process="bridge",
        N=2,
        T=1.0,
        axis="r",
        fixed={"ell": 8.0},
        tol=1e-12,
        rows=[
            TableRow(arg=0.5, value=0.1234567890123456789, error_estimate=1e-13),
            TableRow(arg=1.0, value=0.5, error_estimate=0.0),
            TableRow(arg=1.5, value=0.9, error_estimate=2e-14),
        ],
    )


@pytest.fixture
def compare_document():
    """A two-row Monte Carlo comparison."""
    return McCompareDocument(
        process="bessel",
        N=1,
        T=1.0,
        axis="h",
        seed=0,
        steps=256,
        samples=1000,
        attempted=1200,
        acceptance_rate=1000 / 1200,
        coverage=0.5,
        rows=[
            McCompareRow(arg=1.0, analytic=0.18, empirical=0.17, ci_half_width=0.03, inside_ci=True),
            McCompareRow(arg=2.0, analytic=0.9, empirical=0.7, ci_half_width=0.03, inside_ci=False),
        ],
    )


class TestJson:
    """Tests for JSON documents."""

    def test_round_trip_is_byte_identical(self, table_document):
        """Parsing and re-serializing reproduces the same bytes."""
        text = to_json(table_document)
        assert to_json(TableDocument.model_validate_json(text)) == text

    def test_eval_document(self):
        """An evaluation document carries the command and the record."""
        record = CdfRecord.from_evaluation(cdf_bessel_H(1, 1.0, 1.0))
        document = EvalDocument(process="bessel", tol=1e-12, evaluation=record)
        data = json.loads(to_json(document))
        assert data["command"] == "eval"
        assert data["evaluation"]["geometry"]["right"] == 1.0
        assert data["evaluation"]["value"] == pytest.approx(0.1779232, abs=5e-8)

    def test_floats_round_trip_exactly(self, table_document):
        """Floats survive JSON without loss."""
        data = json.loads(to_json(table_document))
        assert data["rows"][0]["value"] == table_document.rows[0].value

    def test_schema(self):
        """Each command has a schema; unknown names are rejected."""
        schema = document_schema("mc-compare")
        assert "coverage" in schema["properties"]
        assert "checks" in document_schema("self-test")["properties"]
        with pytest.raises(ValueError):
            document_schema("plot")


class TestCsv:
    """Tests for CSV documents."""

    def _rows(self, text):
        return list(csv.reader(io.StringIO(text)))

    def test_table_columns(self, table_document):
        """Fixed header and 17 significant digits."""
        rows = self._rows(to_csv(table_document))
        assert rows[0] == ["arg", "value", "error_estimate"]
        assert len(rows) == 4
        assert float(rows[1][1]) == table_document.rows[0].value
        assert rows[2][1] == "0.5"

    def test_booleans(self, compare_document):
        """inside_ci is written as true or false."""
        rows = self._rows(to_csv(compare_document))
        assert rows[0] == ["arg", "analytic", "empirical", "ci_half_width", "inside_ci"]
        assert [r[4] for r in rows[1:]] == ["true", "false"]

    def test_missing_values(self):
        """A missing analytic moment is an empty cell."""
        document = MomentsDocument(
            process="meander",
            N=2,
            T=1.0,
            rows=[MomentRow(m=2.0, analytic=None, from_cdf=3.1, relative_difference=None)],
        )
        rows = self._rows(to_csv(document))
        assert rows[1] == ["2", "", "3.1000000000000001", ""]

    def test_self_test(self):
        """Self-test rows name the check."""
        document = SelfTestDocument(
            passed=1, failed=0, checks=[SelfTestCheck(name="scaling", passed=True, detail="ok")]
        )
        assert self._rows(to_csv(document)) == [["check", "passed", "detail"], ["scaling", "true", "ok"]]

    def test_render_dispatch(self, table_document):
        """render picks the format."""
        assert render(table_document, "csv").startswith("arg,value")
        assert render(table_document, "json").startswith("{")
