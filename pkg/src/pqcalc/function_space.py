"""Locally constant functions on the p-adic integers and their Fourier analysis.

A function constant on cosets of p^n Z_p is stored as a complex vector of
length p^n: entry j is the value on the coset j + p^n Z_p.  Its Fourier
coefficients are indexed by the dual classes of norm <= p^n in DFT-bin
order (see `enumerate_dual`): bin t holds the coefficient of the character
attached to t/p^n.  The forward transform carries the 1/p^n weight of the
normalized Haar measure; the inverse transform is an unweighted sum.

The transform itself is a radix-p Cooley-Tukey recursion written against
numpy; `dft_naive` keeps the quadratic-time definition alive as an
independent reference route and must never be replaced by a call into the
fast path.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .padic_core import Prime, PruferElement, dual_index, enumerate_dual, parse_prufer

__all__ = [
    "LocallyConstantFn",
    "FourierSpectrum",
    "evaluate_character",
    "character",
    "indicator",
    "log_norm",
    "random_values",
    "random_spectrum",
    "builtin_function",
    "fft_radix_p",
    "dft_naive",
    "fourier_forward",
    "fourier_inverse",
    "fourier_coefficients",
    "from_fourier",
    "conditional_expectation",
    "lebesgue_norm",
    "promote",
    "sgn_table",
    "norm_table",
]


# ---------------------------------------------------------------------------
# transforms


@lru_cache(maxsize=None)
def _butterfly(p: int, sign: int) -> np.ndarray:
    # p x p DFT matrix Omega[s, r] = exp(sign * 2*pi*i * s*r / p)
    s = np.arange(p).reshape(-1, 1)
    r = np.arange(p).reshape(1, -1)
    return np.exp(sign * 2j * np.pi * s * r / p)


@lru_cache(maxsize=None)
def _twiddle(p: int, size: int, sign: int) -> np.ndarray:
    # T[r, u] = exp(sign * 2*pi*i * r*u / size) for r < p, u < size/p
    m = size // p
    r = np.arange(p).reshape(-1, 1)
    u = np.arange(m).reshape(1, -1)
    return np.exp(sign * 2j * np.pi * r * u / size)


def _fft_core(x: np.ndarray, p: int, sign: int) -> np.ndarray:
    n = x.shape[-1]
    if n == 1:
        return x.copy()
    if n == p:
        return x @ _butterfly(p, sign).T
    m = n // p
    # decimate in time: column r collects indices congruent to r mod p
    sub = np.moveaxis(x.reshape(x.shape[:-1] + (m, p)), -1, -2)
    sub = _fft_core(sub, p, sign)
    sub = sub * _twiddle(p, n, sign)
    # recombine: X[s*m + u] = sum_r Omega[s, r] * sub[r, u]
    out = np.einsum("sr,...ru->...su", _butterfly(p, sign), sub)
    return out.reshape(x.shape[:-1] + (n,))


def fft_radix_p(x: np.ndarray, p: int, sign: int = -1) -> np.ndarray:
    """Unnormalized transform sum_j x[j] exp(sign*2*pi*i*j*k/N) along the last axis.

    N = x.shape[-1] must be a power of the odd prime p.
    """
    p = int(Prime(p))
    if sign not in (-1, 1):
        raise ValueError("sign must be -1 or +1")
    n = x.shape[-1]
    size = 1
    while size < n:
        size *= p
    if size != n:
        raise ValueError(f"length {n} is not a power of {p}")
    return _fft_core(np.asarray(x, dtype=np.complex128), p, sign)


def dft_naive(x: np.ndarray, sign: int = -1) -> np.ndarray:
    """Quadratic-time transform from the definition.  Reference route only."""
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[-1]
    j = np.arange(n).reshape(-1, 1)
    k = np.arange(n).reshape(1, -1)
    w = np.exp(sign * 2j * np.pi * j * k / n)
    return x @ w


# ---------------------------------------------------------------------------
# dual-enumeration lookup tables


@lru_cache(maxsize=None)
def sgn_table(p: int, level: int) -> np.ndarray:
    """Sign of each dual class in DFT-bin order; entry 0 (zero class) is 0."""
    out = np.array([a.sgn for a in enumerate_dual(p, level)], dtype=np.int8)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def norm_table(p: int, level: int) -> np.ndarray:
    """Norm of each dual class in DFT-bin order; entry 0 is 0."""
    out = np.array([a.norm for a in enumerate_dual(p, level)], dtype=np.int64)
    out.setflags(write=False)
    return out


# ---------------------------------------------------------------------------
# the function type


@dataclass(eq=False)
class LocallyConstantFn:
    """Function constant on cosets of p^level Z_p, sampled one value per coset."""

    p: int
    level: int
    values: np.ndarray

    def __post_init__(self):
        self.p = int(Prime(self.p))
        if self.level < 0:
            raise ValueError("level must be >= 0")
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != (self.p**self.level,):
            raise ValueError(
                f"expected {self.p ** self.level} values at level {self.level}, got shape {v.shape}"
            )
        self.values = v

    @property
    def size(self) -> int:
        return self.values.size

    def promote(self, new_level: int) -> "LocallyConstantFn":
        """Re-express at a finer level; pointwise values are unchanged."""
        if new_level < self.level:
            raise ValueError("promote only increases the level")
        if new_level == self.level:
            return LocallyConstantFn(self.p, self.level, self.values.copy())
        reps = self.p ** (new_level - self.level)
        # coset j' at the finer level sits inside coset (j' mod p^level)
        return LocallyConstantFn(self.p, new_level, np.tile(self.values, reps))

    def __add__(self, other):
        f, g = _align(self, other)
        return LocallyConstantFn(f.p, f.level, f.values + g.values)

    def __sub__(self, other):
        f, g = _align(self, other)
        return LocallyConstantFn(f.p, f.level, f.values - g.values)

    def __mul__(self, other):
        if isinstance(other, LocallyConstantFn):
            f, g = _align(self, other)
            return LocallyConstantFn(f.p, f.level, f.values * g.values)
        return LocallyConstantFn(self.p, self.level, self.values * other)

    __rmul__ = __mul__

    def conj(self) -> "LocallyConstantFn":
        return LocallyConstantFn(self.p, self.level, np.conj(self.values))

    def inner(self, other: "LocallyConstantFn") -> complex:
        """L^2 pairing against the normalized Haar measure."""
        f, g = _align(self, other)
        return complex(np.vdot(g.values, f.values) / f.size)

    def norm_inf(self) -> float:
        return float(np.max(np.abs(self.values)))

    def norm_q(self, q: float) -> float:
        """L^q norm for the Haar probability measure; q = inf gives the sup norm."""
        if q == np.inf:
            return self.norm_inf()
        if q < 1:
            raise ValueError("q must satisfy q >= 1 (or q = inf)")
        return float((np.mean(np.abs(self.values) ** q)) ** (1.0 / q))


def _align(f: LocallyConstantFn, g: LocallyConstantFn) -> tuple[LocallyConstantFn, LocallyConstantFn]:
    if not isinstance(g, LocallyConstantFn):
        raise TypeError(f"expected LocallyConstantFn, got {type(g).__name__}")
    if f.p != g.p:
        raise ValueError("cannot combine functions over different primes")
    n = max(f.level, g.level)
    return f.promote(n), g.promote(n)


def lebesgue_norm(f: LocallyConstantFn, q: float) -> float:
    """L^q norm of f against the Haar probability measure (q in [1, inf])."""
    return f.norm_q(q)


def promote(f: LocallyConstantFn, new_level: int) -> LocallyConstantFn:
    return f.promote(new_level)


# ---------------------------------------------------------------------------
# spectra


@dataclass(eq=False)
class FourierSpectrum:
    """Dual-side view of a level-n function: one coefficient per class of norm <= p^n.

    Stored densely in DFT-bin order; mapping-style access by PruferElement is
    provided on top.  A class absent from `items()` has coefficient zero.
    """

    p: int
    level: int
    coeffs: np.ndarray

    def __post_init__(self):
        self.p = int(Prime(self.p))
        if self.level < 0:
            raise ValueError("level must be >= 0")
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != (self.p**self.level,):
            raise ValueError(
                f"expected {self.p ** self.level} coefficients at level {self.level}, got shape {c.shape}"
            )
        self.coeffs = c

    @property
    def size(self) -> int:
        return self.coeffs.size

    def __getitem__(self, a: PruferElement) -> complex:
        if a.norm > self.p**self.level:
            return 0.0 + 0.0j
        return complex(self.coeffs[dual_index(a, self.level)])

    def items(self, tol: float = 0.0):
        """(class, coefficient) pairs with |coefficient| > tol, in bin order."""
        elems = enumerate_dual(self.p, self.level)
        for t, c in enumerate(self.coeffs):
            if abs(c) > tol:
                yield elems[t], complex(c)

    def promote(self, new_level: int) -> "FourierSpectrum":
        """Same coefficients viewed at a finer level (new bins are zero)."""
        if new_level < self.level:
            raise ValueError("promote only increases the level")
        out = np.zeros(self.p**new_level, dtype=np.complex128)
        step = self.p ** (new_level - self.level)
        # class t/p^level occupies bin t*step at the finer level
        out[::step] = self.coeffs
        return FourierSpectrum(self.p, new_level, out)

    @classmethod
    def from_entries(cls, p: int, level: int, entries) -> "FourierSpectrum":
        """Build from (class, coefficient) pairs; classes may repeat (summed)."""
        coeffs = np.zeros(int(p) ** level, dtype=np.complex128)
        for a, c in entries:
            if isinstance(a, str):
                a = parse_prufer(a, p)
            coeffs[dual_index(a, level)] += c
        return cls(p, level, coeffs)


def fourier_coefficients(f: LocallyConstantFn) -> np.ndarray:
    """Raw coefficient vector in DFT-bin order, with the 1/p^n weight."""
    return fft_radix_p(f.values, f.p, sign=-1) / f.size


def from_fourier(p: int, level: int, coeffs: np.ndarray) -> LocallyConstantFn:
    """Rebuild a function from a raw coefficient vector (unweighted character sum)."""
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    if coeffs.shape != (int(p) ** level,):
        raise ValueError(f"expected {int(p) ** level} coefficients at level {level}")
    return LocallyConstantFn(p, level, fft_radix_p(coeffs, p, sign=+1))


def fourier_forward(f: LocallyConstantFn) -> FourierSpectrum:
    """Analysis: pair f against every character of norm <= p^level."""
    return FourierSpectrum(f.p, f.level, fourier_coefficients(f))


def fourier_inverse(spec: FourierSpectrum) -> LocallyConstantFn:
    """Synthesis: finite character sum with the spectrum's coefficients."""
    return from_fourier(spec.p, spec.level, spec.coeffs)


def conditional_expectation(f: LocallyConstantFn, k: int) -> LocallyConstantFn:
    """Average over cosets of p^k Z_p, returned at the original level.

    Equivalently: keep only dual coefficients of norm <= p^k.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if k >= f.level:
        return LocallyConstantFn(f.p, f.level, f.values.copy())
    block = f.p**k
    means = f.values.reshape(-1, block).mean(axis=0)
    return LocallyConstantFn(f.p, f.level, np.tile(means, f.size // block))


# ---------------------------------------------------------------------------
# builtin functions


def evaluate_character(a: PruferElement, j: int, level: int) -> complex:
    """Value of the character attached to `a` on the coset j + p^level Z_p."""
    if a.norm > a.p**level:
        raise ValueError(f"class of norm {a.norm} is not constant on level-{level} cosets")
    if a.is_zero:
        return 1.0 + 0.0j
    return complex(np.exp(2j * np.pi * a.num * (j % a.p**a.level) / a.p**a.level))


def character(a: PruferElement, level: int | None = None) -> LocallyConstantFn:
    """The character x -> exp(2*pi*i*a*x), sampled at `level` (default: the class level)."""
    n = a.level if level is None else level
    if n < a.level:
        raise ValueError(f"level {n} cannot resolve a class of norm {a.norm}")
    t = dual_index(a, n)
    j = np.arange(a.p**n)
    return LocallyConstantFn(a.p, n, np.exp(2j * np.pi * t * j / (a.p**n)))


def indicator(p: int, coset: int, disk_level: int, level: int | None = None) -> LocallyConstantFn:
    """Indicator of the disk coset + p^disk_level Z_p."""
    p = int(Prime(p))
    if disk_level < 0:
        raise ValueError("disk_level must be >= 0")
    n = disk_level if level is None else level
    if n < disk_level:
        raise ValueError("sampling level cannot be coarser than the disk")
    vals = np.where(np.arange(p**n) % p**disk_level == coset % p**disk_level, 1.0, 0.0)
    return LocallyConstantFn(p, n, vals)


def log_norm(p: int, level: int) -> LocallyConstantFn:
    """Base-p logarithm of the norm, truncated at the sampling level.

    The coset of 0 gets the boundary value -level.
    """
    p = int(Prime(p))
    vals = np.empty(p**level, dtype=np.complex128)
    for j in range(p**level):
        if j == 0:
            vals[j] = -level
        else:
            v, jj = 0, j
            while jj % p == 0:
                jj //= p
                v += 1
            vals[j] = -v
    return LocallyConstantFn(p, level, vals)


def random_values(p: int, level: int, seed, dist: str = "unit_disk") -> LocallyConstantFn:
    """Independent samples drawn uniformly from the complex unit disk."""
    if dist != "unit_disk":
        raise ValueError(f"unknown distribution {dist!r}")
    rng = np.random.default_rng(seed)
    n = int(Prime(p)) ** level
    r = np.sqrt(rng.uniform(size=n))
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    return LocallyConstantFn(p, level, r * np.exp(1j * theta))


def random_spectrum(p: int, level: int, gamma: float, seed) -> LocallyConstantFn:
    """Random function with dual coefficients norm(a)^(-gamma) * CN(0,1), zero mean.

    Coefficients are drawn in DFT-bin order so the draw is reproducible for a
    fixed seed regardless of how the result is used afterwards.
    """
    rng = np.random.default_rng(seed)
    p = int(Prime(p))
    size = p**level
    z = (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2.0)
    coeffs = np.zeros(size, dtype=np.complex128)
    norms = norm_table(p, level).astype(np.float64)
    nonzero = norms > 0
    coeffs[nonzero] = norms[nonzero] ** (-gamma) * z[nonzero]
    return from_fourier(p, level, coeffs)


_BUILTIN_KINDS = ("character", "indicator", "log_norm", "random_values", "random_spectrum")


def builtin_function(kind: str, params: dict, p: int, level: int) -> LocallyConstantFn:
    """Construct one of the named test-function families at the given resolution."""
    params = dict(params or {})
    if kind == "character":
        a = params.pop("a")
        if isinstance(a, str):
            a = parse_prufer(a, p)
        f = character(a, level=level)
    elif kind == "indicator":
        coset = int(params.pop("coset"))
        disk_level = int(params.pop("disk_level", level))
        f = indicator(p, coset, disk_level, level=level)
    elif kind == "log_norm":
        f = log_norm(p, level)
    elif kind == "random_values":
        seed = params.pop("seed")
        dist = params.pop("dist", "unit_disk")
        f = random_values(p, level, seed, dist)
    elif kind == "random_spectrum":
        seed = params.pop("seed")
        gamma = float(params.pop("gamma", 1.0))
        f = random_spectrum(p, level, gamma, seed)
    else:
        raise ValueError(f"unknown builtin kind {kind!r}; expected one of {_BUILTIN_KINDS}")
    if params:
        raise ValueError(f"unused parameters for builtin {kind!r}: {sorted(params)}")
    return f
