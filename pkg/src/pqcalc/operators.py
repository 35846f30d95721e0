"""The Hilbert symmetry operator S and the commutator derivative df = [M_f, S].

Everything acts in coordinates on the character basis, rows and columns in
DFT-bin order.  The authoritative definition of S is spectral: it multiplies
the coefficient at each dual class by the sign of that class (so constants
are annihilated).  A convolution form of S against the kernel
K(z) = sgn(z)/|z|_p is kept as an independent oracle; its normalization
constant is calibrated on a probe character rather than assumed.

The derivative of f is the commutator of multiplication-by-f with S; its
matrix entry at (row beta, column alpha) is fhat(beta - alpha) times
(sgn(alpha) - sgn(beta)).  Columns realize the closed-form action on single
characters, which is what every rank and spectrum test leans on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .function_space import (
    FourierSpectrum,
    LocallyConstantFn,
    character,
    fft_radix_p,
    fourier_coefficients,
    sgn_table,
)
from .padic_core import Prime, PruferElement, dual_index, legendre_symbol, prufer_reduce

__all__ = [
    "DENSE_CAP",
    "HilbertOperator",
    "DerivativeOperator",
    "hilbert_operator",
    "hilbert_apply",
    "hilbert_matrix",
    "kernel_values",
    "hilbert_kernel_apply",
    "calibrate_kernel_gamma",
    "gauss_sum",
    "reference_gamma",
    "multiplication_matrix",
    "derivative_matrix",
    "derivative_apply",
    "derivative_appliers",
    "character_derivative",
    "exact_rows_from_spectrum",
    "exact_rank",
    "numerical_rank",
]

# Above this many basis elements, dense p^N x p^N storage is refused and the
# matrix-free path must be used instead.
DENSE_CAP = 2000


def _check_dense(p: int, level: int) -> int:
    size = int(p) ** level
    if size > DENSE_CAP:
        raise ValueError(
            f"dense storage of a {size}x{size} operator exceeds the cap {DENSE_CAP}; "
            "use the matrix-free path"
        )
    return size


@lru_cache(maxsize=8)
def _diff_index(p: int, level: int) -> np.ndarray:
    # entry [s, t] = (s - t) mod p^level: the bin of (class s) - (class t)
    size = p**level
    t = np.arange(size, dtype=np.int64)
    out = (t[:, None] - t[None, :]) % size
    out.setflags(write=False)
    return out


# ---------------------------------------------------------------------------
# the symmetry operator


@dataclass(eq=False)
class HilbertOperator:
    """Diagonal sign operator at a fixed level; entry 0 (zero class) is 0."""

    p: int
    level: int
    diagonal: np.ndarray

    def apply(self, spec: FourierSpectrum) -> FourierSpectrum:
        if (spec.p, spec.level) != (self.p, self.level):
            raise ValueError("spectrum level does not match the operator")
        return FourierSpectrum(self.p, self.level, self.diagonal * spec.coeffs)


def hilbert_operator(p: int, level: int) -> HilbertOperator:
    return HilbertOperator(int(Prime(p)), level, sgn_table(p, level))


def hilbert_apply(spec: FourierSpectrum) -> FourierSpectrum:
    """Multiply each coefficient by the sign of its class (zero class -> 0)."""
    return FourierSpectrum(spec.p, spec.level, sgn_table(spec.p, spec.level) * spec.coeffs)


def hilbert_matrix(p: int, level: int) -> np.ndarray:
    _check_dense(p, level)
    return np.diag(sgn_table(p, level).astype(np.float64))


# ---------------------------------------------------------------------------
# kernel-convolution oracle for S


@lru_cache(maxsize=None)
def kernel_values(p: int, level: int) -> np.ndarray:
    """K on coset representatives: K(z) = sgn(z)/|z|_p, with K(0) left at 0.

    sgn and the norm of an integer representative z = p^v * u read off its
    leading digit u mod p and valuation v; both are determined by z mod p^level
    whenever z is nonzero mod p^level.
    """
    p = int(Prime(p))
    size = p**level
    out = np.zeros(size, dtype=np.float64)
    for z in range(1, size):
        v, u = 0, z
        while u % p == 0:
            u //= p
            v += 1
        out[z] = legendre_symbol(u % p, p) * p**v
    out.setflags(write=False)
    return out


def hilbert_kernel_apply(
    f: LocallyConstantFn, level: int, gamma: complex = 1.0
) -> LocallyConstantFn:
    """Convolution form of S at resolution `level`, scaled by 1/gamma.

    (Sf)(x) = gamma^-1 * p^-level * sum over cosets y != x of K(x-y) f(y);
    omitting the y = x coset realizes the principal value.  Oracle route:
    independent of the spectral definition and of the fast transform.
    """
    if f.level > level:
        raise ValueError("function is finer than the requested resolution")
    size = _check_dense(f.p, level)
    vals = f.promote(level).values
    K = kernel_values(f.p, level)
    conv = K[_diff_index(f.p, level)] @ vals
    return LocallyConstantFn(f.p, level, conv / (gamma * size))


def gauss_sum(p: int) -> complex:
    """Quadratic character sum over one period, sum_t (t|p) e^(2 pi i t / p)."""
    p = int(Prime(p))
    t = np.arange(1, p)
    signs = np.array([legendre_symbol(int(x), p) for x in t])
    return complex(np.sum(signs * np.exp(2j * np.pi * t / p)))


def reference_gamma(p: int) -> complex:
    """Literature normalization of the kernel form: sqrt(p), or i sqrt(p) for p = 3 mod 4."""
    p = int(Prime(p))
    return complex(np.sqrt(p)) if p % 4 == 1 else 1j * complex(np.sqrt(p))


def calibrate_kernel_gamma(
    p: int, level: int, probe: PruferElement | None = None
) -> complex:
    """Measure the oracle's normalization on one probe character.

    Applies the uncalibrated convolution to the probe and divides the
    resulting coefficient by the expected sign.  The value is then held fixed
    for agreement tests on every other character.
    """
    p = int(Prime(p))
    if probe is None:
        probe = prufer_reduce(1, 1, p)
    if probe.is_zero:
        raise ValueError("probe must be a nonzero class")
    if probe.norm > p**level:
        raise ValueError("probe is not resolved at this level")
    out = hilbert_kernel_apply(character(probe, level), level, gamma=1.0)
    coeff = fourier_coefficients(out)[dual_index(probe, level)]
    return complex(coeff / probe.sgn)


# ---------------------------------------------------------------------------
# the derivative operator


@dataclass(eq=False)
class DerivativeOperator:
    """df = [M_f, S] at a fixed level, rows/columns in dual-enumeration order.

    `matrix` is the dense representation when the size cap allows it, else
    None.  `exact_rows` is a sparse Gaussian-integer representation (one dict
    per row mapping column -> (re, im)), present only when the source
    spectrum was exact; it feeds `exact_rank`.  `apply`/`apply_adjoint` act
    on raw coefficient vectors and are always available.
    """

    p: int
    level: int
    spectrum: FourierSpectrum | None
    matrix: np.ndarray | None
    exact_rows: list | None
    apply: callable
    apply_adjoint: callable

    @property
    def size(self) -> int:
        return self.p**self.level


def multiplication_matrix(spec: FourierSpectrum, level: int) -> np.ndarray:
    """Dense matrix of multiplication by f in character coordinates."""
    if level < spec.level:
        raise ValueError("level cannot be coarser than the spectrum")
    _check_dense(spec.p, level)
    coeffs = spec.promote(level).coeffs if level > spec.level else spec.coeffs
    return coeffs[_diff_index(spec.p, level)]


def _appliers_from_values(values: np.ndarray, p: int, level: int):
    """Matrix-free action of [M_f, S] on raw coefficient vectors.

    Multiplication by f is a synthesis / pointwise multiply / analysis round
    trip (exact: the dual classes at a fixed level form a group); S is a
    diagonal sign multiply.  Cost O(p^level * level) per application.
    """
    size = p**level
    sgn = sgn_table(p, level).astype(np.float64)
    conj_values = np.conj(values)

    def mult(vec: np.ndarray, fvals: np.ndarray) -> np.ndarray:
        side = fft_radix_p(vec, p, sign=+1)
        return fft_radix_p(side * fvals, p, sign=-1) / size

    def apply(vec: np.ndarray) -> np.ndarray:
        return mult(sgn * vec, values) - sgn * mult(vec, values)

    def apply_adjoint(vec: np.ndarray) -> np.ndarray:
        # (df)^H = -[M_conj(f), S]
        return sgn * mult(vec, conj_values) - mult(sgn * vec, conj_values)

    return apply, apply_adjoint


def derivative_matrix(spec: FourierSpectrum, level: int) -> DerivativeOperator:
    """Dense derivative operator for the function with the given spectrum.

    Entry (row s, column t) is fhat at bin (s - t) times (sgn of column class
    minus sgn of row class); the diagonal vanishes, and so does every entry
    joining classes of equal sign.
    """
    if level < spec.level:
        raise ValueError("level cannot be coarser than the spectrum")
    _check_dense(spec.p, level)
    p = spec.p
    coeffs = spec.promote(level).coeffs if level > spec.level else spec.coeffs
    sgn = sgn_table(p, level).astype(np.float64)
    dense = coeffs[_diff_index(p, level)] * (sgn[None, :] - sgn[:, None])
    values = fft_radix_p(coeffs, p, sign=+1)
    apply, apply_adjoint = _appliers_from_values(values, p, level)
    return DerivativeOperator(
        p=p,
        level=level,
        spectrum=FourierSpectrum(p, level, coeffs.copy()),
        matrix=dense,
        exact_rows=None,
        apply=apply,
        apply_adjoint=apply_adjoint,
    )


def derivative_operator_matrix_free(f: LocallyConstantFn, level: int) -> DerivativeOperator:
    """Derivative operator without dense storage, for sizes past the cap."""
    if f.level > level:
        raise ValueError("function is finer than the requested level")
    values = f.promote(level).values
    apply, apply_adjoint = _appliers_from_values(values, f.p, level)
    return DerivativeOperator(
        p=f.p,
        level=level,
        spectrum=None,
        matrix=None,
        exact_rows=None,
        apply=apply,
        apply_adjoint=apply_adjoint,
    )


def derivative_apply(f: LocallyConstantFn, v: FourierSpectrum, level: int) -> FourierSpectrum:
    """Matrix-free (df)v: two multiplication round trips and two sign multiplies."""
    if f.p != v.p:
        raise ValueError("operand primes differ")
    if f.level > level or v.level > level:
        raise ValueError("operands are finer than the requested level")
    values = f.promote(level).values
    vec = v.promote(level).coeffs if v.level < level else v.coeffs
    apply, _ = _appliers_from_values(values, f.p, level)
    return FourierSpectrum(f.p, level, apply(vec))


def character_derivative(a: PruferElement, level: int | None = None) -> DerivativeOperator:
    """Derivative of a single character, with exact integer entries attached.

    Column t carries one entry at row (t + bin of a): the sign of the column
    class minus the sign of the shifted class.  These integers feed
    `exact_rank`; the dense float matrix is attached when the cap allows.
    """
    n = a.level if level is None else level
    if n < a.level:
        raise ValueError("level cannot resolve the character")
    p = a.p
    size = p**n
    shift = dual_index(a, n)
    sgn = sgn_table(p, n)
    rows: list[dict[int, tuple[int, int]]] = [dict() for _ in range(size)]
    for t in range(size):
        s = (t + shift) % size
        entry = int(sgn[t]) - int(sgn[s])
        if entry:
            rows[s][t] = (entry, 0)
    spec = FourierSpectrum.from_entries(p, n, [(a, 1.0)])
    dense_op = derivative_matrix(spec, n) if size <= DENSE_CAP else derivative_operator_matrix_free(character(a, n), n)
    return DerivativeOperator(
        p=p,
        level=n,
        spectrum=dense_op.spectrum,
        matrix=dense_op.matrix,
        exact_rows=rows,
        apply=dense_op.apply,
        apply_adjoint=dense_op.apply_adjoint,
    )


def exact_rows_from_spectrum(
    entries: dict[int, tuple[Fraction, Fraction]], p: int, level: int
) -> list[dict[int, tuple[int, int]]]:
    """Sparse Gaussian-integer rows of the derivative for an exact spectrum.

    `entries` maps DFT bin -> (re, im) as Fractions.  A common denominator is
    cleared first; scaling the whole matrix by a nonzero rational does not
    change its rank.
    """
    p = int(Prime(p))
    size = p**level
    denom = 1
    for re, im in entries.values():
        for part in (Fraction(re).denominator, Fraction(im).denominator):
            denom = denom * part // math.gcd(denom, part)
    scaled = {
        b % size: (int(Fraction(re) * denom), int(Fraction(im) * denom))
        for b, (re, im) in entries.items()
        if (re, im) != (0, 0)
    }
    sgn = sgn_table(p, level)
    rows: list[dict[int, tuple[int, int]]] = [dict() for _ in range(size)]
    for b, (re, im) in scaled.items():
        for t in range(size):
            s = (t + b) % size
            factor = int(sgn[t]) - int(sgn[s])
            if factor:
                old = rows[s].get(t, (0, 0))
                rows[s][t] = (old[0] + re * factor, old[1] + im * factor)
    for r in rows:
        for t in [t for t, v in r.items() if v == (0, 0)]:
            del r[t]
    return rows


# ---------------------------------------------------------------------------
# exact rank via fraction-free elimination over Z[i]


def _gmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gsub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _gdiv(a, b):
    # exact division in Z[i]; the elimination guarantees divisibility
    nb = b[0] * b[0] + b[1] * b[1]
    re = a[0] * b[0] + a[1] * b[1]
    im = a[1] * b[0] - a[0] * b[1]
    if re % nb or im % nb:
        raise ArithmeticError("inexact division in fraction-free elimination")
    return (re // nb, im // nb)


def _gaussian_rank(rows: list[dict[int, tuple[int, int]]]) -> int:
    """Rank of a sparse matrix over Z[i] by fraction-free (two-term) elimination.

    Fully pivoted: each step picks the nonzero entry with the smallest
    Gaussian norm inside the sparsest row, which keeps growth down and, for
    generalized permutation matrices, produces no fill at all.  Python ints
    absorb any intermediate growth exactly.
    """
    active = [dict(r) for r in rows if r]
    rank = 0
    prev = (1, 0)
    while active:
        best = None
        for ri, row in enumerate(active):
            for c, v in row.items():
                key = (len(row), v[0] * v[0] + v[1] * v[1])
                if best is None or key < best[0]:
                    best = (key, ri, c)
        _, ri, c = best
        pivot_row = active.pop(ri)
        piv = pivot_row[c]
        rank += 1
        remaining = []
        for row in active:
            a = row.pop(c, (0, 0))
            if a == (0, 0):
                new = {d: _gdiv(_gmul(e, piv), prev) for d, e in row.items()}
            else:
                new = {}
                for d in set(row) | set(pivot_row):
                    if d == c:
                        continue
                    e = row.get(d, (0, 0))
                    b = pivot_row.get(d, (0, 0))
                    val = _gdiv(_gsub(_gmul(e, piv), _gmul(a, b)), prev)
                    if val != (0, 0):
                        new[d] = val
            if new:
                remaining.append(new)
        active = remaining
        prev = piv
    return rank


def exact_rank(D: DerivativeOperator) -> int:
    """Matrix rank over exact arithmetic; no floating-point thresholds involved."""
    if D.exact_rows is None:
        raise ValueError(
            "operator carries no exact representation; build it from an exact "
            "spectrum or use numerical_rank"
        )
    return _gaussian_rank(D.exact_rows)


def numerical_rank(D: DerivativeOperator, tol: float | None = None) -> int:
    """Count singular values above tol * sigma_max (default tol = 1e-10 * p^level)."""
    if D.matrix is None:
        raise ValueError("numerical rank needs the dense matrix; size exceeds the cap")
    sv = np.linalg.svd(D.matrix, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    if tol is None:
        tol = 1e-10 * D.size
    return int(np.count_nonzero(sv > tol * sv[0]))
