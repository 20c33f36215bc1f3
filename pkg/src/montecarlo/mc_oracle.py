"""
Monte Carlo oracle

Rejection sampling of discretized noncolliding Brownian systems on a grid
of `steps` intervals, independent of the theta/pfaffian formulas.

Singular starts at the origin are handled through exact entrance laws
(matrix ensembles, see entrance.py) and dyadic refinement. On a segment
pinned at the origin and at x after time τ, the configuration at τ/2 is
drawn exactly from its conditional law (an ensemble with external source
x/2 and variance τ/4); the independent Brownian bridges over [τ/2, τ] are
then redrawn until they do not collide, and the segment [0, τ/2] is
refined the same way. Free right ends start from the entrance law at T/2
and keep the free paths over [T/2, T] that survive. Every interval is
also subjected to the Brownian-bridge crossing correction, and the
extremes between grid points are sampled exactly given the grid values.

Samples come in batches of BATCH_SIZE, batch b driven by its own Philox
stream, so an ensemble depends only on (seed, target, steps).
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum
from functools import partial

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.config import MAX_MC_N
from src.diffusions.extremes import ProcessKind, ProcessTag
from src.diffusions.kernels import Chamber
from src.errors import AcceptanceTooLow, DimensionTooLarge, DomainError, StatisticUndefined
from src.montecarlo import entrance
from src.utils.concurrency import run_in_threads

logger = logging.getLogger(__name__)

BATCH_SIZE = 1024
MIN_STEPS = 64
# A stage giving up: this many proposals at an acceptance rate below MIN_ACCEPTANCE
MAX_STAGE_ATTEMPTS = 10**7
MIN_ACCEPTANCE = 1e-6
# Candidate paths simulated per round of a stage
MAX_ROUND_PROPOSALS = 2**13
# Two-sided 99% normal quantile
Z_99 = 2.576

LIMIT_TAGS = (
    ProcessTag.BRIDGE_AA,
    ProcessTag.MOTION_AR,
    ProcessTag.BESSEL_CC,
    ProcessTag.MEANDER_CR,
)


class Statistic(str, Enum):
    L = "L"
    R = "R"
    H = "H"
    W = "W"


# =============================================================================
# Results
# =============================================================================

@dataclass(frozen=True)
class PathEnsemble:
    """Accepted samples: per-sample extremes and the configuration at T/2."""

    tag: ProcessTag
    N: int
    T: float
    steps: int
    accepted: int
    attempted: int
    lows: NDArray[np.float64] = field(repr=False)
    highs: NDArray[np.float64] = field(repr=False)
    midpoints: NDArray[np.float64] = field(repr=False)

    @property
    def dt(self) -> float:
        return self.T / self.steps

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempted if self.attempted else 0.0

    def statistic(self, statistic: Statistic) -> NDArray[np.float64]:
        """L = min of the bottom path, R = max of the top path, H = R (type C), W = R - L."""
        type_c = self.tag.chamber is Chamber.TYPE_C
        if statistic is Statistic.H:
            if not type_c:
                raise StatisticUndefined(f"H is defined for type C processes, not {self.tag.value}")
            return self.highs
        if type_c:
            raise StatisticUndefined(f"{statistic.value} is defined for type A processes only")
        if statistic is Statistic.L:
            return self.lows
        if statistic is Statistic.R:
            return self.highs
        return self.highs - self.lows

    def records(self) -> list[dict[str, float]]:
        if self.tag.chamber is Chamber.TYPE_C:
            return [{"H": float(h)} for h in self.highs]
        return [
            {"L": float(lo), "R": float(hi), "W": float(hi - lo)}
            for lo, hi in zip(self.lows, self.highs, strict=True)
        ]

    def summary(self) -> dict:
        return {
            "process": self.tag.value,
            "N": self.N,
            "T": self.T,
            "steps": self.steps,
            "accepted": self.accepted,
            "attempted": self.attempted,
            "acceptance_rate": self.acceptance_rate,
        }


@dataclass(frozen=True)
class EmpiricalCdf:
    """Empirical probabilities on a grid with 99% normal-approximation half-widths."""

    grid: NDArray[np.float64]
    estimates: NDArray[np.float64]
    half_widths: NDArray[np.float64]
    n_samples: int

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.tolist(),
            "estimates": self.estimates.tolist(),
            "half_widths": self.half_widths.tolist(),
            "n_samples": self.n_samples,
        }


def _binomial(hits: NDArray[np.bool_], grid: NDArray[np.float64]) -> EmpiricalCdf:
    n = hits.shape[0]
    if n == 0:
        raise DomainError("empty ensemble")
    p = hits.mean(axis=0)
    half = Z_99 * np.sqrt(p * (1.0 - p) / n)
    return EmpiricalCdf(grid, p, half, n)


def empirical_cdf(
    ensemble: PathEnsemble, statistic: Statistic, grid: ArrayLike
) -> EmpiricalCdf:
    """Fraction of samples with the statistic below each grid point."""
    values = ensemble.statistic(statistic)
    points = np.asarray(grid, dtype=float).reshape(-1)
    return _binomial(values[:, None] < points[None, :], points)


def empirical_joint_lr(ensemble: PathEnsemble, ells: ArrayLike, rs: ArrayLike) -> EmpiricalCdf:
    """
    P(-ℓ < L, R < r) at the paired points (ℓ_i, r_i).

    The grid of the result is the swept coordinate: r when ℓ is fixed,
    ℓ otherwise.
    """
    lows = ensemble.statistic(Statistic.L)
    highs = ensemble.statistic(Statistic.R)
    ell_arr, r_arr = np.broadcast_arrays(
        np.asarray(ells, dtype=float).reshape(-1), np.asarray(rs, dtype=float).reshape(-1)
    )
    hits = (lows[:, None] > -ell_arr[None, :]) & (highs[:, None] < r_arr[None, :])
    grid = r_arr if np.ptp(ell_arr) == 0 else ell_arr
    return _binomial(hits, np.array(grid, dtype=float))


# =============================================================================
# Batch sampler
# =============================================================================

Proposal = Callable[[NDArray[np.intp]], tuple[NDArray[np.bool_], dict[str, NDArray[np.float64]]]]


class _BatchSampler:
    """Draws one batch of accepted samples from a single random stream."""

    def __init__(
        self,
        tag: ProcessTag,
        n: int,
        T: float,
        steps: int,
        rng: np.random.Generator,
        reflect: bool,
    ) -> None:
        self.tag = tag
        self.n = n
        self.T = T
        self.steps = steps
        self.dt = T / steps
        self.rng = rng
        self.reflect = reflect
        self.type_c = tag.chamber is Chamber.TYPE_C
        self.attempted = 0

    # -- random inputs, mirrored under reflection ---------------------------

    def _normals(self, k: int, m: int) -> NDArray[np.float64]:
        z = self.rng.standard_normal((k, m, self.n))
        return -z[..., ::-1] if self.reflect else z

    def _pair_uniforms(self, k: int, m: int) -> NDArray[np.float64]:
        u = self.rng.random((k, m, self.n - 1))
        return u[..., ::-1] if self.reflect else u

    def _extreme_uniforms(self, k: int, m: int) -> NDArray[np.float64]:
        # [..., 0] drives the bottom minimum, [..., 1] the top maximum
        u = self.rng.random((k, m, 2))
        return u[..., ::-1] if self.reflect else u

    def _from_origin(self, k: int, sigma2: float) -> NDArray[np.float64]:
        if self.type_c:
            return entrance.class_ci(self.rng, k, self.n, sigma2)
        return entrance.goe_type(self.rng, k, self.n, sigma2, self.reflect)

    def _midpoint(
        self, k: int, sigma2: float, source: NDArray[np.float64] | None = None
    ) -> NDArray[np.float64]:
        if self.type_c:
            return entrance.class_c(self.rng, k, self.n, sigma2, source)
        return entrance.gue(self.rng, k, self.n, sigma2, self.reflect, source)

    # -- paths ---------------------------------------------------------------

    def _free_paths(self, start: NDArray[np.float64], m: int) -> NDArray[np.float64]:
        steps = self._normals(start.shape[0], m) * math.sqrt(self.dt)
        return np.concatenate([start[:, None, :], start[:, None, :] + np.cumsum(steps, axis=1)], axis=1)

    def _bridge_paths(
        self, start: NDArray[np.float64], end: NDArray[np.float64], m: int
    ) -> NDArray[np.float64]:
        """B_k = start + W_k + (k/m)(end - start - W_m) on k = 0..m."""
        k = start.shape[0]
        walk = np.zeros((k, m + 1, self.n))
        walk[:, 1:] = np.cumsum(self._normals(k, m) * math.sqrt(self.dt), axis=1)
        frac = np.arange(m + 1, dtype=float) / m
        paths = start[:, None, :] + walk + frac[None, :, None] * (end - start - walk[:, -1])[:, None, :]
        paths[:, -1] = end
        return paths

    def _admissible(self, paths: NDArray[np.float64]) -> NDArray[np.bool_]:
        """Grid noncollision (and positivity) plus per-interval crossing rejection."""
        k, points, _ = paths.shape
        m = points - 1
        gaps = np.diff(paths, axis=2)
        ok = np.all(gaps > 0, axis=(1, 2))
        # gap of two independent motions has variance 2 per unit time
        crossing = np.exp(-np.clip(gaps[:, :-1] * gaps[:, 1:], 0.0, None) / self.dt)
        ok &= np.all(self._pair_uniforms(k, m) >= crossing, axis=(1, 2))
        if self.type_c:
            bottom = paths[..., 0]
            ok &= np.all(bottom > 0, axis=1)
            wall = np.exp(-2.0 * np.clip(bottom[:, :-1] * bottom[:, 1:], 0.0, None) / self.dt)
            ok &= np.all(self.rng.random((k, m)) >= wall, axis=1)
        return ok

    def _interval_extremes(
        self, paths: NDArray[np.float64]
    ) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Exact Brownian-bridge extremes between grid points, given the grid values."""
        k, points, _ = paths.shape
        u = self._extreme_uniforms(k, points - 1)
        spread = -2.0 * self.dt * np.log1p(-u)
        bottom, top = paths[..., 0], paths[..., -1]
        a, b = bottom[:, :-1], bottom[:, 1:]
        lows = 0.5 * (a + b - np.sqrt((b - a) ** 2 + spread[..., 0]))
        a, b = top[:, :-1], top[:, 1:]
        highs = 0.5 * (a + b + np.sqrt((b - a) ** 2 + spread[..., 1]))
        return lows.min(axis=1), highs.max(axis=1)

    # -- rejection loop ------------------------------------------------------

    def _until_accepted(self, count: int, propose: Proposal, stage: str) -> dict[str, NDArray[np.float64]]:
        """
        Fill `count` slots with accepted proposals.

        Each round proposes `copies` candidates per pending slot, sized from
        the acceptance observed so far, and a slot keeps its first accepted
        candidate.
        """
        pending = np.arange(count)
        results: dict[str, NDArray[np.float64]] = {}
        attempts = 0
        hits = 0
        copies = 1
        while pending.size:
            idx = np.repeat(pending, copies)
            ok, payload = propose(idx)
            attempts += idx.size
            self.attempted += idx.size
            hits += int(ok.sum())
            slots, first = np.unique(idx[ok], return_index=True)
            chosen = np.flatnonzero(ok)[first]
            for name, values in payload.items():
                if name not in results:
                    results[name] = np.empty((count, *values.shape[1:]))
                results[name][slots] = values[chosen]
            pending = np.setdiff1d(pending, slots, assume_unique=True)
            if attempts >= MAX_STAGE_ATTEMPTS and hits / attempts < MIN_ACCEPTANCE:
                raise AcceptanceTooLow(
                    f"{self.tag.value} {stage}: {hits} of {attempts} proposals accepted"
                )
            if pending.size:
                wanted = math.ceil(2.0 * attempts / max(hits, 1))
                copies = max(1, min(wanted, MAX_ROUND_PROPOSALS // pending.size))
        logger.debug("%s %s: %d accepted of %d", self.tag.value, stage, count, attempts)
        return results

    def _pinned_segment(
        self, end: NDArray[np.float64], n_steps: int
    ) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Extremes of the segment from the origin to `end` over n_steps grid intervals."""
        k = end.shape[0]
        lows = np.full(k, np.inf)
        highs = np.full(k, -np.inf)
        target = end
        while n_steps > 1:
            half = n_steps // 2
            tau = n_steps * self.dt
            mid = self._midpoint(k, 0.25 * tau, 0.5 * target)
            anchor = target

            def propose(
                idx: NDArray[np.intp], mid: NDArray[np.float64] = mid,
                anchor: NDArray[np.float64] = anchor, half: int = half,
            ) -> tuple[NDArray[np.bool_], dict[str, NDArray[np.float64]]]:
                paths = self._bridge_paths(mid[idx], anchor[idx], half)
                ok = self._admissible(paths)
                lo, hi = self._interval_extremes(paths)
                return ok, {"low": lo, "high": hi}

            res = self._until_accepted(k, propose, f"pinned/{n_steps}")
            lows = np.minimum(lows, res["low"])
            highs = np.maximum(highs, res["high"])
            target = mid
            n_steps = half

        first = np.stack([np.zeros_like(target), target], axis=1)
        lo, hi = self._interval_extremes(first)
        return np.minimum(lows, lo), np.maximum(highs, hi)

    def run(self, count: int) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
        half = self.steps // 2
        if self.tag in (ProcessTag.BRIDGE_AA, ProcessTag.BESSEL_CC):
            mid = self._midpoint(count, self.T / 4.0)
            self.attempted += count
            lo_left, hi_left = self._pinned_segment(mid, half)
            # right half: pinned at the origin after time reversal
            lo_right, hi_right = self._pinned_segment(mid, half)
            return np.minimum(lo_left, lo_right), np.maximum(hi_left, hi_right), mid

        def propose(
            idx: NDArray[np.intp],
        ) -> tuple[NDArray[np.bool_], dict[str, NDArray[np.float64]]]:
            mid = self._from_origin(idx.size, 0.5 * self.T)
            paths = self._free_paths(mid, half)
            ok = self._admissible(paths)
            lo, hi = self._interval_extremes(paths)
            return ok, {"mid": mid, "low": lo, "high": hi}

        res = self._until_accepted(count, propose, "free end")
        lo, hi = self._pinned_segment(res["mid"], half)
        return np.minimum(lo, res["low"]), np.maximum(hi, res["high"]), res["mid"]


def batch_generator(seed: int, batch: int) -> np.random.Generator:
    """Counter-based stream of batch `batch` under `seed`."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(batch,))))


def _run_batch(
    tag: ProcessTag, n: int, T: float, steps: int, seed: int, reflect: bool, batch: int
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64], int]:
    sampler = _BatchSampler(tag, n, T, steps, batch_generator(seed, batch), reflect)
    lows, highs, mids = sampler.run(BATCH_SIZE)
    return lows, highs, mids, sampler.attempted


# =============================================================================
# Public API
# =============================================================================

def sample_bridge_ensemble(
    kind: ProcessKind | ProcessTag,
    N: int,
    T: float,
    steps: int,
    target_accepted: int,
    seed: int,
    *,
    workers: int = 1,
    reflect: bool = False,
) -> PathEnsemble:
    """
    Sample `target_accepted` paths of a limit process and record their extremes.

    `reflect=True` (type A only) mirrors every random input, giving the
    ensemble of -X with the same seed: L and R swap roles with a sign.
    """
    tag = kind.tag if isinstance(kind, ProcessKind) else ProcessTag(kind)
    if tag not in LIMIT_TAGS:
        raise DomainError(f"the oracle samples the limit processes, not {tag.value}")
    if not 1 <= N <= MAX_MC_N:
        raise DimensionTooLarge(f"the oracle supports 1 <= N <= {MAX_MC_N}, got {N}")
    if not T > 0:
        raise DomainError(f"T must be positive, got {T}")
    if steps < MIN_STEPS or steps & (steps - 1):
        raise DomainError(f"steps must be a power of two >= {MIN_STEPS}, got {steps}")
    if target_accepted < 1:
        raise DomainError("target_accepted must be at least 1")
    if reflect and tag.chamber is Chamber.TYPE_C:
        raise DomainError("reflection applies to type A processes only")

    n_batches = math.ceil(target_accepted / BATCH_SIZE)
    calls = [partial(_run_batch, tag, N, T, steps, seed, reflect, b) for b in range(n_batches)]
    batches = run_in_threads(calls, workers)

    lows = np.concatenate([b[0] for b in batches])[:target_accepted]
    highs = np.concatenate([b[1] for b in batches])[:target_accepted]
    mids = np.concatenate([b[2] for b in batches])[:target_accepted]
    attempted = sum(b[3] for b in batches)
    ensemble = PathEnsemble(tag, N, T, steps, target_accepted, attempted, lows, highs, mids)
    logger.debug(
        "%s N=%d: %d samples, acceptance %.3g", tag.value, N, target_accepted, ensemble.acceptance_rate
    )
    return ensemble
