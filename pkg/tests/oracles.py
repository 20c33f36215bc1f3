"""
Brute-force reference implementations used by the tests.

Slow but independent of the library code: exact rationals, enumeration
and plain Riemann sums.
"""

import math
from collections.abc import Callable
from fractions import Fraction

import numpy as np
from scipy.linalg import schur
from scipy.special import eval_hermite


def hermite_exact(k: int, x: Fraction) -> Fraction:
    """H_k(x) = k! Σ_m (-1)^m (2x)^{k-2m} / (m! (k-2m)!) in exact arithmetic."""
    total = Fraction(0)
    for m in range(k // 2 + 1):
        total += Fraction((-1) ** m, math.factorial(m) * math.factorial(k - 2 * m)) * (2 * x) ** (
            k - 2 * m
        )
    return math.factorial(k) * total


def pfaffian_by_pairings(a: np.ndarray) -> float:
    """Expansion along the first row, i.e. the signed sum over perfect pairings."""
    n = a.shape[0]
    if n == 0:
        return 1.0
    if n % 2:
        return 0.0
    total = 0.0
    rest = list(range(1, n))
    for pos, j in enumerate(rest):
        keep = [i for i in rest if i != j]
        minor = a[np.ix_(keep, keep)]
        total += (-1) ** pos * a[0, j] * pfaffian_by_pairings(minor)
    return total


def pfaffian_schur(a: np.ndarray) -> float:
    """Pf(Q B Q^T) = det(Q) Pf(B) with B the block-diagonal real Schur form."""
    b, q = schur(a, output="real")
    value = float(np.linalg.det(q))
    for i in range(0, a.shape[0], 2):
        value *= b[i, i + 1]
    return value


def cofactor_determinant(m: np.ndarray) -> float:
    n = m.shape[0]
    if n == 1:
        return float(m[0, 0])
    total = 0.0
    for j in range(n):
        minor = np.delete(np.delete(m, 0, axis=0), j, axis=1)
        total += (-1) ** j * m[0, j] * cofactor_determinant(minor)
    return total


def riemann_sum_simplex(
    g: Callable[[np.ndarray, np.ndarray], np.ndarray], a: float, b: float, n: int = 800
) -> float:
    """Midpoint rule for ∫∫_{a<x1<x2<b} g after mapping the simplex onto the unit square."""
    s = (np.arange(n) + 0.5) / n
    ss, tt = np.meshgrid(s, s, indexing="ij")
    x1 = a + ss * (b - a)
    x2 = x1 + tt * (b - x1)
    jac = (b - a) * (b - x1)
    return float(np.sum(g(x1, x2) * jac) / (n * n))


def theta_wide_window(k: int, u: float, v: float, n_max: int = 400) -> float:
    """Θ_k(u, v) summed over |n| <= n_max with scipy's Hermite polynomials."""
    n = np.arange(-n_max, n_max + 1, dtype=float)
    z = u * n + v
    weights = np.exp(-z * z)
    mask = weights > 0
    return float(math.fsum(eval_hermite(k, z[mask]) * weights[mask]))


def riemann_sum_rectangle(
    g: Callable[[np.ndarray, np.ndarray], np.ndarray],
    x_range: tuple[float, float],
    y_range: tuple[float, float],
    n: int = 800,
) -> float:
    """Midpoint rule for ∫∫ g over a rectangle on an n × n grid."""
    (a, b), (c, d) = x_range, y_range
    s = (np.arange(n) + 0.5) / n
    xs, ys = np.meshgrid(a + s * (b - a), c + s * (d - c), indexing="ij")
    return float(np.sum(g(xs, ys)) * (b - a) * (d - c) / (n * n))
