"""
Dense determinants and pfaffians

Small dense matrices only (the distribution formulas assemble at most
11x11 systems). Both evaluations work in log space after exact
power-of-two equilibration, since entries of one matrix can span many
orders of magnitude.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.errors import DomainError, NotAntisymmetric, OddDimension

logger = logging.getLogger(__name__)

# Relative tolerance of the antisymmetry check at construction
ANTISYMMETRY_RTOL = 1e-14


def _power_of_two(scale: NDArray[np.float64]) -> NDArray[np.float64]:
    """Nearest powers of two to 1/scale; zero scales map to 1."""
    safe = np.where(scale > 0, scale, 1.0)
    return np.exp2(-np.round(np.log2(safe)))


# =============================================================================
# Antisymmetric matrices
# =============================================================================

@dataclass(frozen=True)
class AntisymmetricMatrix:
    """A real matrix with A = -A^T, stored exactly antisymmetrized."""

    entries: NDArray[np.float64]

    @classmethod
    def from_array(cls, matrix: ArrayLike) -> "AntisymmetricMatrix":
        a = np.array(matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise NotAntisymmetric(f"expected a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise DomainError("matrix entries must be finite")
        scale = float(np.max(np.abs(a))) if a.size else 0.0
        defect = float(np.max(np.abs(a + a.T))) if a.size else 0.0
        if defect > ANTISYMMETRY_RTOL * max(scale, np.finfo(float).tiny):
            raise NotAntisymmetric(f"|A + A^T| = {defect:.3e} exceeds tolerance")
        entries = 0.5 * (a - a.T)
        entries.setflags(write=False)
        return cls(entries)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])


def pad_skew(core: ArrayLike, border: ArrayLike) -> AntisymmetricMatrix:
    """
    Bring an N x N antisymmetric core to even dimension.

    Even N returns the core itself. Odd N appends `border` as the last
    column, -border as the last row and a zero corner.
    """
    matrix = AntisymmetricMatrix.from_array(core)
    n = matrix.dim
    if n % 2 == 0:
        return matrix
    edge = np.asarray(border, dtype=float).reshape(-1)
    if edge.shape != (n,):
        raise DomainError(f"border must have length {n}, got {edge.shape[0]}")
    padded = np.zeros((n + 1, n + 1))
    padded[:n, :n] = matrix.entries
    padded[:n, n] = edge
    padded[n, :n] = -edge
    return AntisymmetricMatrix.from_array(padded)


# =============================================================================
# Determinant
# =============================================================================

def log_determinant(matrix: ArrayLike) -> tuple[float, float]:
    """
    (sign, log|det M|) by LU with partial pivoting.

    Rows and then columns are scaled by powers of two before factoring; the
    scaling is undone exactly in the logarithm. A singular matrix gives
    (0.0, -inf).
    """
    m = np.array(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"determinant needs a square matrix, got shape {m.shape}")
    if m.shape[0] == 0:
        return 1.0, 0.0
    row = _power_of_two(np.max(np.abs(m), axis=1))
    m *= row[:, None]
    col = _power_of_two(np.max(np.abs(m), axis=0))
    m *= col[None, :]
    sign, logabs = np.linalg.slogdet(m)
    if sign == 0:
        return 0.0, -math.inf
    shift = float(np.sum(np.log(row)) + np.sum(np.log(col)))
    return float(sign), float(logabs) - shift


def determinant(matrix: ArrayLike) -> float:
    sign, logabs = log_determinant(matrix)
    if sign == 0.0:
        return 0.0
    return sign * math.exp(logabs)


# =============================================================================
# Pfaffian
# =============================================================================

def _parlett_reid(a: NDArray[np.float64]) -> tuple[float, float]:
    """
    Skew-symmetric LTL^T reduction with column pivoting, in place.

    Pivoting swaps rows and columns k+1 and kp simultaneously, which flips
    the sign of the pfaffian.
    """
    n = a.shape[0]
    sign = 1.0
    log_abs = 0.0
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1 :, k])))
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            sign = -sign
        pivot = a[k, k + 1]
        if pivot == 0.0:
            return 0.0, -math.inf
        sign *= math.copysign(1.0, pivot)
        log_abs += math.log(abs(pivot))
        if k + 2 < n:
            tau = a[k, k + 2 :] / pivot
            col = a[k + 2 :, k + 1].copy()
            a[k + 2 :, k + 2 :] += np.outer(tau, col) - np.outer(col, tau)
    return sign, log_abs


def log_pfaffian(matrix: AntisymmetricMatrix | ArrayLike) -> tuple[float, float]:
    """
    (sign, log|Pf A|) for an antisymmetric matrix of even dimension.

    Sign convention: Pf [[0, a], [-a, 0]] = a. A symmetric power-of-two
    scaling D A D is applied first; Pf(DAD) = det(D) Pf(A).
    """
    if not isinstance(matrix, AntisymmetricMatrix):
        matrix = AntisymmetricMatrix.from_array(matrix)
    n = matrix.dim
    if n % 2:
        raise OddDimension(f"pfaffian needs an even dimension, got {n}")
    if n == 0:
        return 1.0, 0.0
    a = matrix.entries.copy()
    d = _power_of_two(np.sqrt(np.max(np.abs(a), axis=1)))
    a *= d[:, None]
    a *= d[None, :]
    sign, log_abs = _parlett_reid(a)
    if sign == 0.0:
        return 0.0, -math.inf
    return sign, log_abs - float(np.sum(np.log(d)))


def pfaffian(matrix: AntisymmetricMatrix | ArrayLike) -> float:
    """Pf A = (1/(n/2)!) Σ_σ sgn(σ) Π a_{σ(2k-1)σ(2k)}, via Parlett-Reid."""
    sign, log_abs = log_pfaffian(matrix)
    if sign == 0.0:
        return 0.0
    return sign * math.exp(log_abs)


# =============================================================================
# First-order error propagation
# =============================================================================

def determinant_sensitivity(matrix: ArrayLike, entry_errors: ArrayLike) -> float:
    """
    Bound on |det(M + dM) - det(M)| to first order, given |dM| <= entry_errors.

    Uses |d det| <= |det| Σ |M^{-1}_{ji}| |dM_{ij}|; a singular M falls back
    to Hadamard's bound on the cofactors.
    """
    m = np.asarray(matrix, dtype=float)
    err = np.broadcast_to(np.abs(np.asarray(entry_errors, dtype=float)), m.shape)
    if not np.any(err):
        return 0.0
    sign, logabs = log_determinant(m)
    if sign != 0.0:
        try:
            inverse = np.linalg.inv(m)
        except np.linalg.LinAlgError:
            pass
        else:
            if np.all(np.isfinite(inverse)):
                return float(math.exp(logabs) * np.sum(np.abs(inverse.T) * err))
    row_norms = np.linalg.norm(m, axis=1)
    total = 0.0
    for i in range(m.shape[0]):
        others = float(np.prod(np.delete(row_norms, i)))
        total += others * float(np.sum(err[i]))
    return total


def pfaffian_sensitivity(
    matrix: AntisymmetricMatrix | ArrayLike, entry_errors: ArrayLike
) -> float:
    """First-order bound on the change of Pf A: |dPf| <= ½ |Pf| Σ |A^{-1}_{ji}| |dA_{ij}|."""
    if not isinstance(matrix, AntisymmetricMatrix):
        matrix = AntisymmetricMatrix.from_array(matrix)
    a = matrix.entries
    err = np.broadcast_to(np.abs(np.asarray(entry_errors, dtype=float)), a.shape)
    if not np.any(err):
        return 0.0
    sign, log_abs = log_pfaffian(matrix)
    if sign != 0.0:
        try:
            inverse = np.linalg.inv(a)
        except np.linalg.LinAlgError:
            pass
        else:
            if np.all(np.isfinite(inverse)):
                return float(0.5 * math.exp(log_abs) * np.sum(np.abs(inverse.T) * err))
    # Pf^2 = det
    return math.sqrt(determinant_sensitivity(a, err))
