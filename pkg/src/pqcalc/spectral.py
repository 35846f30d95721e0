"""Singular values, Schatten norms, and approximation numbers.

A derivative operator at level N acts on p^N coordinates; its full singular
value decomposition is cheap at desk scale, so the dense SVD is the baseline
route whenever the dense matrix exists.  Beyond the dense cap only the top
singular value is available, through seeded power iteration on the normal
operator.  Approximation numbers follow the shifted convention
s_n = sigma_{n+1}, so s_0 is the operator norm and s_rank is the first zero
for a finite-rank operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .operators import DerivativeOperator

__all__ = [
    "CLAMP_RATIO",
    "SingularSpectrum",
    "singular_values",
    "schatten_norm",
    "approximation_number",
    "operator_norm_power_iteration",
]

# Singular values smaller than this fraction of sigma_1 are float dust from
# the SVD of an exactly rank-deficient matrix; they are zeroed before any
# ell^q sum so that q < 1 quasi-norms are not polluted.
CLAMP_RATIO = 1e-13


@dataclass(eq=False)
class SingularSpectrum:
    """Descending singular values of one operator, with its (p, level) tag."""

    p: int
    level: int
    sigma: np.ndarray

    def __post_init__(self):
        sig = np.asarray(self.sigma, dtype=float)
        if sig.ndim != 1:
            raise ValueError("sigma must be one-dimensional")
        if not np.all(np.isfinite(sig)):
            raise ValueError("non-finite singular values")
        if np.any(sig < 0):
            raise ValueError("negative singular values")
        if np.any(sig[:-1] < sig[1:]):
            raise ValueError("singular values must be sorted descending")
        self.sigma = sig

    @property
    def dimension(self) -> int:
        return self.sigma.size

    def clamped(self) -> np.ndarray:
        """Values with dust below CLAMP_RATIO * sigma_1 zeroed."""
        sig = self.sigma.copy()
        if sig.size and sig[0] > 0:
            sig[sig < CLAMP_RATIO * sig[0]] = 0.0
        return sig

    def numerical_rank(self) -> int:
        return int(np.count_nonzero(self.clamped()))


def singular_values(D: DerivativeOperator) -> SingularSpectrum:
    """Full SVD spectrum of a derivative operator (dense route)."""
    if D.matrix is None:
        raise ValueError(
            "dense matrix unavailable at this level; only "
            "operator_norm_power_iteration works matrix-free"
        )
    if not np.all(np.isfinite(D.matrix)):
        raise ValueError("operator matrix has non-finite entries")
    sigma = np.linalg.svd(D.matrix, compute_uv=False)
    return SingularSpectrum(D.p, D.level, sigma)


def schatten_norm(spec: SingularSpectrum, q: float) -> float:
    """(sum sigma_i^q)^(1/q); q = inf gives the operator norm sigma_1."""
    if not q > 0:
        raise ValueError("Schatten exponent must be positive")
    sig = spec.clamped()
    if sig.size == 0:
        return 0.0
    if math.isinf(q):
        return float(sig[0])
    nonzero = sig[sig > 0]
    if nonzero.size == 0:
        return 0.0
    return float(np.sum(nonzero**q) ** (1.0 / q))


def approximation_number(spec: SingularSpectrum, n: int) -> float:
    """s_n = distance to the rank-n operators = sigma_{n+1}; 0 past the end."""
    if n < 0:
        raise ValueError("approximation number index must be >= 0")
    if n >= spec.dimension:
        return 0.0
    return float(spec.sigma[n])


def operator_norm_power_iteration(
    D: DerivativeOperator,
    iters: int = 500,
    seed: int = 0,
    tol: float = 1e-12,
) -> float:
    """Estimate sigma_1 by power iteration on D^H D from a seeded start.

    Works on matrix-free operators.  Raises RuntimeError when the estimate
    has not stabilized to `tol` relative change within `iters` steps.
    """
    if iters < 1:
        raise ValueError("need at least one iteration")
    rng = np.random.default_rng(seed)
    size = D.size
    v = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(iters):
        w = D.apply_adjoint(D.apply(v))
        lam = np.linalg.norm(w)
        # below this the image of a unit vector is FFT roundoff, not signal
        if lam <= 1e-28:
            return 0.0
        previous, estimate = estimate, math.sqrt(lam)
        v = w / lam
        if abs(estimate - previous) <= tol * max(estimate, 1.0):
            return estimate
    raise RuntimeError(f"power iteration did not stabilize in {iters} steps")
