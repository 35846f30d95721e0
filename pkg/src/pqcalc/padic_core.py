"""Exact arithmetic on the discrete dual of the p-adic integers.

Frequencies live in Q_p/Z_p (the quasi-cyclic group of p-power roots of
unity): every class has a unique reduced representative m/p^n with either
(m, n) = (0, 0) or 0 < m < p^n and p not dividing m.  The norm of a nonzero
class is p^n, the norm of the zero class is 0.  The sign of a nonzero class
is the Legendre symbol of its leading digit; the zero class has sign 0.
Only odd primes are supported.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

__all__ = [
    "Prime",
    "PruferElement",
    "legendre_symbol",
    "prufer_reduce",
    "prufer_add",
    "prufer_neg",
    "prufer_norm",
    "sgn",
    "enumerate_dual",
    "parse_prufer",
]


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class Prime(int):
    """An odd prime modulus.  Construction validates primality and p != 2."""

    def __new__(cls, p):
        p = int(p)
        if p < 3 or p % 2 == 0 or not _is_prime(p):
            raise ValueError(f"modulus must be an odd prime >= 3, got {p}")
        return super().__new__(cls, p)


@lru_cache(maxsize=None)
def _legendre_table(p: int) -> tuple[int, ...]:
    # Euler's criterion on each residue; cached per prime.
    Prime(p)
    half = (p - 1) // 2
    out = [0] * p
    for t in range(1, p):
        e = pow(t, half, p)
        out[t] = 1 if e == 1 else -1
    return tuple(out)


def legendre_symbol(t: int, p: int) -> int:
    """Legendre symbol (t|p): 0 if p | t, +1 for quadratic residues, -1 otherwise."""
    return _legendre_table(int(p))[t % int(p)]


@dataclass(frozen=True)
class PruferElement:
    """Reduced class m/p^n mod 1.  The zero class is (num, level) = (0, 0)."""

    p: int
    num: int
    level: int

    def __post_init__(self):
        if self.num == 0:
            if self.level != 0:
                raise ValueError("zero class must be stored as (0, 0)")
        else:
            if not (0 < self.num < self.p ** self.level) or self.num % self.p == 0:
                raise ValueError(
                    f"{self.num}/{self.p}^{self.level} is not reduced"
                )

    @property
    def is_zero(self) -> bool:
        return self.num == 0

    @property
    def norm(self) -> int:
        """p^level for nonzero classes, 0 for the zero class."""
        return 0 if self.num == 0 else self.p ** self.level

    @property
    def sgn(self) -> int:
        """Legendre symbol of the leading digit; 0 on the zero class."""
        if self.num == 0:
            return 0
        return legendre_symbol(self.num % self.p, self.p)

    def __add__(self, other: "PruferElement") -> "PruferElement":
        if not isinstance(other, PruferElement):
            return NotImplemented
        if self.p != other.p:
            raise ValueError("cannot add classes over different primes")
        n = max(self.level, other.level)
        m = self.num * self.p ** (n - self.level) + other.num * self.p ** (n - other.level)
        return prufer_reduce(m, n, self.p)

    def __neg__(self) -> "PruferElement":
        if self.num == 0:
            return self
        return PruferElement(self.p, self.p ** self.level - self.num, self.level)

    def __sub__(self, other: "PruferElement") -> "PruferElement":
        return self + (-other)

    def __str__(self) -> str:
        if self.num == 0:
            return "0"
        return f"{self.num}/{self.p ** self.level}"


def prufer_reduce(m: int, n: int, p: int) -> PruferElement:
    """Reduced representative of (m mod p^n)/p^n as a class mod 1."""
    if n < 0:
        raise ValueError("level must be >= 0")
    p = int(p)
    m %= p ** n
    if m == 0:
        return PruferElement(p, 0, 0)
    while m % p == 0:
        m //= p
        n -= 1
    return PruferElement(p, m, n)


def prufer_add(a: PruferElement, b: PruferElement) -> PruferElement:
    return a + b


def prufer_neg(a: PruferElement) -> PruferElement:
    return -a


def prufer_norm(a: PruferElement) -> int:
    return a.norm


def sgn(a: PruferElement) -> int:
    return a.sgn


@lru_cache(maxsize=None)
def enumerate_dual(p: int, level: int) -> tuple[PruferElement, ...]:
    """All classes of norm <= p^level, ordered by DFT bin: index t maps to t/p^level.

    Index 0 is the zero class; the ordering fixes matrix row/column layout
    everywhere downstream.
    """
    p = int(Prime(p))
    if level < 0:
        raise ValueError("level must be >= 0")
    return tuple(prufer_reduce(t, level, p) for t in range(p ** level))


def dual_index(a: PruferElement, level: int) -> int:
    """DFT bin of a class inside the level-`level` enumeration."""
    if a.level > level:
        raise ValueError(f"norm of {a} exceeds p^{level}")
    return a.num * a.p ** (level - a.level)


def parse_prufer(text: str, p: int) -> PruferElement:
    """Parse the textual form "m/p^n" (denominator written out, e.g. "2/9"); "0" is the zero class."""
    p = int(Prime(p))
    s = text.strip()
    if s in ("0", "0/1"):
        return PruferElement(p, 0, 0)
    try:
        num_s, den_s = s.split("/")
        m, den = int(num_s), int(den_s)
    except ValueError:
        raise ValueError(f"malformed class {text!r}; expected \"m/p^n\" or \"0\"") from None
    n = 0
    d = den
    while d % p == 0:
        d //= p
        n += 1
    if d != 1 or den == 1 or m <= 0:
        raise ValueError(f"{text!r} is not a reduced class over p={p}")
    return prufer_reduce(m, n, p)
