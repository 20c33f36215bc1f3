"""
Matrix-ensemble entrance laws

Eigenvalues of Gaussian random matrices, drawn in stacked batches, give
exact samples of the configuration laws the sampler needs:

- goe_type:  ∝ e^{-|x|²/2σ²} |Δ(x)|          (type A, from the origin)
- gue:       ∝ e^{-|x|²/2σ²} Δ(x)²           (bridge marginal)
- class_ci:  ∝ e^{-|x|²/2σ²} |Δ(x²)| Π x     (type C, from the origin)
- class_c:   ∝ e^{-|x|²/2σ²} Δ(x²)² Π x²     (Bessel-bridge marginal)

gue and class_c also take a `source` a of shape (count, N), added to the
matrix as diag(a) (type A) or diag(a, -a) (type C). Their eigenvalue laws
become

- gue:       ∝ e^{-|x|²/2σ²} Δ(x) det[e^{x_i a_j/σ²}] / Δ(a)
- class_c:   ∝ e^{-|x|²/2σ²} Δ(x²) Π x det[sinh(x_i a_j/σ²)] / (Δ(a²) Π a)

which with σ² = τ/4 and a = x_end/2 is the law at τ/2 of a segment
pinned at the origin and at x_end after time τ.

All return ascending configurations of shape (count, N). With
`reflect=True` the type A laws (goe_type, gue) return x ↦ -x reversed,
the mirror image of the draw made from the same random numbers; a source
is then given in the mirrored coordinates too.
"""

import numpy as np
from numpy.typing import NDArray


def _symmetric(rng: np.random.Generator, count: int, n: int, sigma2: float) -> NDArray[np.float64]:
    """Real symmetric: diagonal N(0, σ²), off-diagonal N(0, σ²/2)."""
    g = rng.standard_normal((count, n, n))
    upper = np.triu(g, k=1) * np.sqrt(0.5 * sigma2)
    diag = np.einsum("bii->bi", g) * np.sqrt(sigma2)
    return upper + np.swapaxes(upper, 1, 2) + diag[:, :, None] * np.eye(n)


def _hermitian(rng: np.random.Generator, count: int, n: int, sigma2: float) -> NDArray[np.complex128]:
    """Complex Hermitian: diagonal N(0, σ²), real and imaginary off-diagonal parts N(0, σ²/2)."""
    real = _symmetric(rng, count, n, sigma2)
    imag = np.triu(rng.standard_normal((count, n, n)), k=1) * np.sqrt(0.5 * sigma2)
    return real + 1j * (imag - np.swapaxes(imag, 1, 2))


def _complex_symmetric(
    rng: np.random.Generator, count: int, n: int, sigma2: float
) -> NDArray[np.complex128]:
    """Complex symmetric: diagonal parts N(0, σ²), off-diagonal parts N(0, σ²/2)."""
    real = _symmetric(rng, count, n, sigma2)
    imag = _symmetric(rng, count, n, sigma2)
    return real + 1j * imag


def _mirror(values: NDArray[np.float64], reflect: bool) -> NDArray[np.float64]:
    return -values[..., ::-1] if reflect else values


def _diagonal(source: NDArray[np.float64] | None, count: int, n: int) -> NDArray[np.float64]:
    if source is None:
        return np.zeros((count, n, n))
    values = np.broadcast_to(np.asarray(source, dtype=float), (count, n))
    return values[:, :, None] * np.eye(n)


def goe_type(
    rng: np.random.Generator, count: int, n: int, sigma2: float, reflect: bool = False
) -> NDArray[np.float64]:
    return _mirror(np.linalg.eigvalsh(_symmetric(rng, count, n, sigma2)), reflect)


def gue(
    rng: np.random.Generator,
    count: int,
    n: int,
    sigma2: float,
    reflect: bool = False,
    source: NDArray[np.float64] | None = None,
) -> NDArray[np.float64]:
    matrix = _hermitian(rng, count, n, sigma2)
    if source is not None:
        # the source is shifted in unmirrored coordinates; _mirror is an involution
        matrix = matrix + _diagonal(_mirror(np.asarray(source, dtype=float), reflect), count, n)
    return _mirror(np.linalg.eigvalsh(matrix), reflect)


def class_ci(rng: np.random.Generator, count: int, n: int, sigma2: float) -> NDArray[np.float64]:
    """Positive half of the spectrum of [[A, B], [B, -A]] with A, B real symmetric."""
    a = _symmetric(rng, count, n, sigma2)
    b = _symmetric(rng, count, n, sigma2)
    block = np.block([[a, b], [b, -a]])
    return np.linalg.eigvalsh(block)[:, n:]


def class_c(
    rng: np.random.Generator,
    count: int,
    n: int,
    sigma2: float,
    source: NDArray[np.float64] | None = None,
) -> NDArray[np.float64]:
    """Positive half of the spectrum of [[A + D, B], [B̄, -Aᵀ - D]], A Hermitian, B complex symmetric."""
    a = _hermitian(rng, count, n, sigma2) + _diagonal(source, count, n)
    b = _complex_symmetric(rng, count, n, sigma2)
    block = np.block([[a, b], [np.conj(b), -np.swapaxes(a, 1, 2)]])
    return np.linalg.eigvalsh(block)[:, n:]
