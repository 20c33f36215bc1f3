"""
Configuration

Environment-backed settings (loaded from .env) and the validated
RunConfig consumed by the CLI.
"""

import math
import os
from enum import Enum
from typing import Literal

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator, model_validator

from src.errors import InputError

# Load environment variables
load_dotenv()

# Library default for every `tol` parameter
DEFAULT_TOL = 1e-12

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
DEBUG = os.getenv("DEBUG", "false").lower() == "true"
DEFAULT_WORKERS = int(os.getenv("NONCOLL_WORKERS", "1"))

# Closed-form laws are supported up to this many particles
MAX_CLOSED_FORM_N = 10
# Chamber-integral ratio formulas
MAX_CHAMBER_N = 3
# Monte Carlo oracle
MAX_MC_N = 4


def resolve_tolerance(flag: float | None = None) -> float:
    """
    Resolve the tolerance for a run.

    Precedence: explicit flag, then NONCOLL_TOL, then DEFAULT_TOL.
    """
    if flag is not None:
        tol = flag
    else:
        raw = os.getenv("NONCOLL_TOL")
        if raw is None or raw.strip() == "":
            return DEFAULT_TOL
        try:
            tol = float(raw)
        except ValueError as exc:
            raise InputError(f"NONCOLL_TOL is not a number: {raw!r}") from exc
    if not (tol > 0 and math.isfinite(tol)):
        raise InputError(f"tolerance must be positive and finite, got {tol}")
    return tol


# =============================================================================
# Run configuration
# =============================================================================

class Command(str, Enum):
    EVAL = "eval"
    TABLE = "table"
    MC_COMPARE = "mc-compare"
    MOMENTS = "moments"
    SELF_TEST = "self-test"


class Process(str, Enum):
    BRIDGE = "bridge"
    MOTION = "motion"
    BESSEL = "bessel"
    MEANDER = "meander"
    WIDTH = "width"
    GENERAL_AB_A = "general-ab-a"
    GENERAL_AR_A = "general-ar-a"
    GENERAL_AB_C = "general-ab-c"
    GENERAL_AR_C = "general-ar-c"

    @property
    def is_general(self) -> bool:
        return self.value.startswith("general")

    @property
    def free_end(self) -> bool:
        return self.value.startswith("general-ar")


# Grid axes each process can sweep
PROCESS_AXES: dict[Process, tuple[str, ...]] = {
    Process.BRIDGE: ("r", "ell"),
    Process.MOTION: ("r", "ell"),
    Process.BESSEL: ("h",),
    Process.MEANDER: ("h",),
    Process.WIDTH: ("w",),
    Process.GENERAL_AB_A: ("r", "ell"),
    Process.GENERAL_AR_A: ("r", "ell"),
    Process.GENERAL_AB_C: ("h",),
    Process.GENERAL_AR_C: ("h",),
}


class GridSpec(BaseModel):
    """An evenly spaced sweep of one geometric argument."""

    axis: Literal["ell", "r", "h", "w"]
    start: float
    stop: float
    count: int = Field(ge=1)

    @model_validator(mode="after")
    def _check_range(self) -> "GridSpec":
        if not (0 < self.start <= self.stop):
            raise ValueError("grid needs 0 < min <= max")
        return self

    def points(self) -> list[float]:
        if self.count == 1:
            return [self.start]
        step = (self.stop - self.start) / (self.count - 1)
        return [self.start + i * step for i in range(self.count)]


class RunConfig(BaseModel):
    """Validated configuration of one CLI invocation."""

    command: Command
    process: Process = Process.BESSEL
    N: int = Field(default=1, ge=1)
    T: float = Field(default=1.0, gt=0)
    ell: float | None = Field(default=None, gt=0)
    r: float | None = Field(default=None, gt=0)
    h: float | None = Field(default=None, gt=0)
    w: float | None = Field(default=None, gt=0)
    grid: GridSpec | None = None
    start: list[float] | None = None
    end: list[float] | None = None
    tol: float = Field(default=DEFAULT_TOL, gt=0)
    seed: int = Field(default=0, ge=0)
    samples: int = Field(default=100_000, ge=1)
    steps: int = Field(default=256, ge=64)
    workers: int = Field(default=DEFAULT_WORKERS, ge=1)
    moment_orders: list[float] = Field(default_factory=lambda: [2.0, 4.0])
    output_format: Literal["csv", "json"] = "csv"
    output_path: str | None = None

    @field_validator("steps")
    @classmethod
    def _steps_power_of_two(cls, value: int) -> int:
        if value & (value - 1):
            raise ValueError("steps must be a power of two")
        return value

    @field_validator("moment_orders")
    @classmethod
    def _orders_above_one(cls, value: list[float]) -> list[float]:
        if not value or any(m <= 1 for m in value):
            raise ValueError("moment orders must all exceed 1")
        return value

    @model_validator(mode="after")
    def _check_command(self) -> "RunConfig":
        if self.command in (Command.MOMENTS, Command.SELF_TEST):
            return self
        limit = MAX_MC_N if self.command is Command.MC_COMPARE else MAX_CLOSED_FORM_N
        if self.N > limit:
            raise ValueError(f"N={self.N} exceeds the supported range N <= {limit}")
        if self.command is Command.TABLE:
            if self.grid is None or self.grid.count < 2:
                raise ValueError("table needs --grid with count >= 2")
        if self.command is Command.MC_COMPARE and self.samples < 100:
            raise ValueError("mc-compare needs --samples >= 100")
        if self.grid is not None and self.grid.axis not in PROCESS_AXES[self.process]:
            raise ValueError(
                f"axis {self.grid.axis!r} is not defined for process {self.process.value!r}"
            )
        swept = self.grid.axis if self.grid is not None else None
        if self.command in (Command.EVAL, Command.TABLE):
            for name in self.required_geometry():
                if name in ("ell", "r") or name == swept:
                    continue
                if getattr(self, name) is None:
                    raise ValueError(f"--process {self.process.value} needs --{name}")
        return self

    @model_validator(mode="after")
    def _check_endpoints(self) -> "RunConfig":
        process = self.process
        if not process.is_general:
            if self.start is not None or self.end is not None:
                raise ValueError(f"--process {process.value} starts and ends at the origin")
            return self
        if self.command is Command.MC_COMPARE:
            raise ValueError("mc-compare samples the processes started at the origin")
        if self.start is None:
            raise ValueError(f"--process {process.value} needs --start")
        if process.free_end and self.end is not None:
            raise ValueError(f"--process {process.value} has a free right endpoint")
        if not process.free_end and self.end is None:
            raise ValueError(f"--process {process.value} needs --end")
        for name in ("start", "end"):
            coords = getattr(self, name)
            if coords is not None and len(coords) != self.N:
                raise ValueError(f"--{name} has {len(coords)} coordinates, N={self.N}")
        return self

    def required_geometry(self) -> tuple[str, ...]:
        if PROCESS_AXES[self.process] == ("r", "ell"):
            return ("ell", "r")
        return PROCESS_AXES[self.process]

    def geometry_value(self, name: str) -> float:
        """Fixed geometric argument, defaulting one-sided lengths to 8*sqrt(T)."""
        value = getattr(self, name)
        if value is None:
            if name in ("ell", "r"):
                return 8.0 * math.sqrt(self.T)
            raise InputError(f"--{name} is required")
        return float(value)
