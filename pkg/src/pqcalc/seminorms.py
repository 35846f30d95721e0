"""Sobolev, BMO/VMO, and Besov seminorms on locally constant functions.

Every evaluator here is an exact finite computation, not a sampled estimate:
a function constant on level-m cosets has finitely many disks, shifts, and
smoothing differences that matter, and the tails vanish identically.  The
BMO seminorm enumerates every disk of every radius; the Besov seminorm comes
in two independent forms (a smoothing-difference sum and a shift-integral
sum) whose agreement is an equivalence-of-seminorms experiment, so the two
implementations deliberately share no code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .function_space import (
    FourierSpectrum,
    LocallyConstantFn,
    conditional_expectation,
    norm_table,
)

__all__ = [
    "SeminormReport",
    "sobolev_half_norm",
    "disk_mean",
    "bmo_oscillation_sequence",
    "bmo_seminorm",
    "besov_seminorm_discrete",
    "besov_seminorm_integral",
    "besov_bmo_refined_sequence",
    "seminorm_report",
]


def sobolev_half_norm(fhat: FourierSpectrum) -> float:
    """Square root of the norm-weighted coefficient energy.

    The zero class has norm 0, so constants land in the kernel.
    """
    norms = norm_table(fhat.p, fhat.level).astype(np.float64)
    return float(np.sqrt(np.sum(norms * np.abs(fhat.coeffs) ** 2)))


def disk_mean(f: LocallyConstantFn, coset: int, k: int) -> complex:
    """Mean of f over the disk of radius p^-k around the integer coset.

    For k up to the resolution level this is the exact average over the
    level-m cosets inside the disk; finer k just reads off the single value
    the function takes there.
    """
    if k < 0:
        raise ValueError("disk exponent must be >= 0")
    size = f.p**f.level
    if k <= f.level:
        if not 0 <= coset < f.p**k:
            raise ValueError("coset representative outside range")
        return complex(f.values[coset :: f.p**k].mean())
    if not 0 <= coset < f.p**k:
        raise ValueError("coset representative outside range")
    return complex(f.values[coset % size])


def bmo_oscillation_sequence(f: LocallyConstantFn) -> list[float]:
    """M_n for n = 0..level: the largest mean oscillation on small disks.

    M_n maxes the mean absolute deviation over every disk of measure at most
    p^-n.  Disks finer than the resolution level carry zero deviation, so
    the last entry is exactly 0 and the sequence certifies VMO membership.
    """
    m = f.level
    values = f.values
    per_scale = []
    for k in range(m + 1):
        # columns of this reshape are exactly the level-k disks
        grid = values.reshape(f.p ** (m - k), f.p**k)
        dev = np.abs(grid - grid.mean(axis=0)).mean(axis=0)
        per_scale.append(float(dev.max()) if dev.size else 0.0)
    # suffix maximum: M_n looks at every scale k >= n
    out = [0.0] * (m + 1)
    running = 0.0
    for k in range(m, -1, -1):
        running = max(running, per_scale[k])
        out[k] = running
    return out


def bmo_seminorm(f: LocallyConstantFn) -> float:
    """sup_n M_n, attained at n = 0 since the sequence is nonincreasing."""
    return bmo_oscillation_sequence(f)[0]


def _check_lebesgue_exponent(q) -> None:
    if not (q >= 1):
        raise ValueError("Lebesgue exponent must satisfy q >= 1")


def besov_seminorm_discrete(f: LocallyConstantFn, q, r, s: float) -> float:
    """Smoothing-difference form: (sum_n (p^(ns) ||f - E_n f||_q)^r)^(1/r).

    E_n is conditional expectation onto level-n resolution; terms vanish
    once n reaches the level of f, so the sum is finite and exact.  r = inf
    takes the sup of the terms; q = inf is allowed here (and only here).
    """
    _check_lebesgue_exponent(q)
    if not (r >= 1):
        raise ValueError("summation exponent must satisfy r >= 1")
    if not s > 0:
        raise ValueError("smoothness must be positive")
    terms = []
    for n in range(f.level + 1):
        diff = f - conditional_expectation(f, n)
        terms.append(float(f.p) ** (n * s) * diff.norm_q(q))
    if math.isinf(r):
        return max(terms)
    return float(sum(t**r for t in terms) ** (1.0 / r))


def besov_seminorm_integral(f: LocallyConstantFn, q: float, r: float, s: float) -> float:
    """Shift-integral form, evaluated exactly as a sum over shift cosets.

    Shifting by any point of the coset j + p^m Z_p moves f the same way, so
    the integral over nonzero shifts collapses to p^m - 1 terms weighted by
    p^(-m) * p^(v(j)(sr+1)) with v the valuation of j.  Shifts inside the
    innermost disk do not move f at all and contribute nothing.  Both
    exponents must be finite in this form.
    """
    _check_lebesgue_exponent(q)
    if math.isinf(q):
        raise ValueError("shift-integral form needs a finite Lebesgue exponent")
    if not (r >= 1) or math.isinf(r):
        raise ValueError("shift-integral form needs a finite summation exponent >= 1")
    if not s > 0:
        raise ValueError("smoothness must be positive")
    m = f.level
    size = f.p**m
    total = 0.0
    for j in range(1, size):
        v = 0
        jj = j
        while jj % f.p == 0:
            jj //= f.p
            v += 1
        shifted = np.roll(f.values, j)
        diff_norm = LocallyConstantFn(f.p, m, shifted - f.values).norm_q(q)
        total += float(f.p) ** (v * (s * r + 1) - m) * diff_norm**r
    return float(total ** (1.0 / r))


def besov_bmo_refined_sequence(f: LocallyConstantFn, q: float) -> float:
    """(sum_n (p^(n/q) ||f - E_n f||_BMO)^q)^(1/q), a BMO-flavored Besov sum."""
    _check_lebesgue_exponent(q)
    if math.isinf(q):
        raise ValueError("refined sequence needs a finite exponent")
    total = 0.0
    for n in range(f.level + 1):
        diff = f - conditional_expectation(f, n)
        total += (float(f.p) ** (n / q) * bmo_seminorm(diff)) ** q
    return float(total ** (1.0 / q))


@dataclass(eq=False)
class SeminormReport:
    """All seminorm readings for one function, ready for serialization."""

    p: int
    level: int
    sobolev_half: float
    bmo: float
    vmo_sequence: list[float]
    besov: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        def enc(x):
            return "inf" if isinstance(x, float) and math.isinf(x) else x

        rows = [
            {
                "q": enc(q),
                "r": enc(r),
                "s": s,
                "discrete": vals["discrete"],
                "integral": vals["integral"],
            }
            for (q, r, s), vals in sorted(
                self.besov.items(), key=lambda item: tuple(map(str, item[0]))
            )
        ]
        return {
            "sobolev_half": self.sobolev_half,
            "bmo": self.bmo,
            "vmo_sequence": list(self.vmo_sequence),
            "besov": rows,
        }


def seminorm_report(
    f: LocallyConstantFn,
    fhat: FourierSpectrum,
    besov_params: list[tuple] = (),
) -> SeminormReport:
    """Evaluate every seminorm once and collect the results."""
    besov = {}
    for q, r, s in besov_params:
        integral = None
        if not (math.isinf(q) or math.isinf(r)):
            integral = besov_seminorm_integral(f, q, r, s)
        besov[(q, r, s)] = {
            "discrete": besov_seminorm_discrete(f, q, r, s),
            "integral": integral,
        }
    return SeminormReport(
        p=f.p,
        level=f.level,
        sobolev_half=sobolev_half_norm(fhat),
        bmo=bmo_seminorm(f),
        vmo_sequence=bmo_oscillation_sequence(f),
        besov=besov,
    )
