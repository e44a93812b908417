"""Truncated p-adic integers and rational reduction.

Everything here works at a single absolute precision ``N``: a value is a
residue modulo ``p**N``.  Rationals are plain :class:`fractions.Fraction`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil

from .errors import CtxMismatch, NotAUnit, NotPIntegral, NotPrime

BigRational = Fraction


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def require_prime(p: int) -> None:
    if not isinstance(p, int) or not is_prime(p):
        raise NotPrime(f"p must be prime, got {p!r}")


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def int_val(n: int, p: int, cap: int | None = None) -> int:
    """Largest k with p**k | n.  ``n == 0`` gives ``cap`` (required then)."""
    if n == 0:
        if cap is None:
            raise ValueError("valuation of 0 needs a cap")
        return cap
    k = 0
    while n % p == 0:
        n //= p
        k += 1
        if cap is not None and k >= cap:
            return cap
    return k


def rational_val(q: Fraction, p: int) -> int:
    if q == 0:
        raise ValueError("valuation of 0 is infinite")
    return int_val(q.numerator, p) - int_val(q.denominator, p)


def default_precision(p: int, l: int, m: int) -> int:
    """Absolute precision used when none is given.

    The deepest congruence checked has pi-depth at most m(p-1)+1, so e*N must
    clear it with some slack.  N >= l keeps traces meaningful modulo p**l.
    """
    e = p ** (l - 1) * (p - 1)
    return max(ceil((m * (p - 1) + 4) / e) + 2, l)


@dataclass(frozen=True)
class PadicInt:
    p: int
    N: int
    residue: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("precision N must be positive")
        object.__setattr__(self, "residue", self.residue % self.p**self.N)

    @property
    def modulus(self) -> int:
        return self.p**self.N

    def _coerce(self, other) -> int:
        if isinstance(other, PadicInt):
            if other.p != self.p or other.N != self.N:
                raise CtxMismatch(f"mixing Z/{self.p}^{self.N} with Z/{other.p}^{other.N}")
            return other.residue
        if isinstance(other, int):
            return other
        return NotImplemented

    def _new(self, r: int) -> PadicInt:
        return PadicInt(self.p, self.N, r)

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.residue + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.residue - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(o - self.residue)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.residue * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self._new(-self.residue)

    def __pow__(self, k: int):
        if k < 0:
            return unit_inverse(self) ** (-k)
        return self._new(pow(self.residue, k, self.modulus))

    def __eq__(self, other):
        if isinstance(other, int):
            return (self.residue - other) % self.modulus == 0
        if isinstance(other, PadicInt):
            return (self.p, self.N, self.residue) == (other.p, other.N, other.residue)
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.N, self.residue))

    def __int__(self):
        return self.residue

    def valuation(self) -> int:
        return val_p(self)

    def __repr__(self):
        return f"PadicInt({self.residue} mod {self.p}^{self.N})"


def val_p(x: PadicInt) -> int:
    """p-adic valuation of x, reported as N for zero."""
    return int_val(x.residue, x.p, cap=x.N)


def unit_inverse(x: PadicInt) -> PadicInt:
    if x.residue % x.p == 0:
        raise NotAUnit(f"{x} is not a unit")
    return PadicInt(x.p, x.N, pow(x.residue, -1, x.modulus))


def reduce_rational(q: Fraction | int, p: int, N: int) -> PadicInt:
    q = Fraction(q)
    if q.denominator % p == 0:
        raise NotPIntegral(f"{q} has negative {p}-adic valuation")
    mod = p**N
    return PadicInt(p, N, q.numerator * pow(q.denominator, -1, mod))


def reduce_rational_int(q: Fraction, p: int, mod: int) -> int:
    """Raw-integer variant of :func:`reduce_rational` for hot loops."""
    if q.denominator % p == 0:
        raise NotPIntegral(f"{q} has negative {p}-adic valuation")
    return q.numerator * pow(q.denominator, -1, mod) % mod
