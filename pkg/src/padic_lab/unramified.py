"""Finite fields F_{p^m} and the unramified ring O_m / p^N.

Both rings are polynomial quotients by the same monic ``f`` of degree m: over
F_p for the field and over Z/p^N (with ``f`` lifted coefficient-wise) for the
unramified ring.  Elements are immutable tuples of coefficients, lowest
degree first.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product
from pathlib import Path

from .errors import CtxMismatch, NoConvergence, OutOfRange, TraceNotRational, UsageError
from .padic import PadicInt, int_val, prime_factors, require_prime


def _poly_mulmod(a, b, f, mod):
    """Product of two length-m coefficient tuples modulo (f, mod); f is monic
    and given by its m low coefficients."""
    m = len(f)
    prod = [0] * (2 * m - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    prod[i + j] += ai * bj
    for d in range(2 * m - 2, m - 1, -1):
        c = prod[d]
        if c:
            base = d - m
            for i, fi in enumerate(f):
                if fi:
                    prod[base + i] -= c * fi
    return tuple(c % mod for c in prod[:m])


def _divides(g, f, p):
    """Whether monic g (full coefficient list, low first) divides monic f over F_p."""
    r = list(f)
    dg = len(g) - 1
    for d in range(len(r) - 1, dg - 1, -1):
        c = r[d] % p
        if c:
            for i, gi in enumerate(g):
                r[d - dg + i] -= c * gi
    return all(c % p == 0 for c in r[:dg])


def is_irreducible(coeffs, p: int) -> bool:
    """Irreducibility of the monic polynomial X^m + sum coeffs[i] X^i over F_p,
    by trial division with every monic polynomial of degree <= m/2."""
    m = len(coeffs)
    f = [c % p for c in coeffs] + [1]
    for d in range(1, m // 2 + 1):
        for low in product(range(p), repeat=d):
            if _divides(list(low) + [1], f, p):
                return False
    return True


def lex_least_irreducible(p: int, m: int) -> tuple[int, ...]:
    for coeffs in product(range(p), repeat=m):
        if is_irreducible(coeffs, p):
            return coeffs
    raise AssertionError("an irreducible polynomial of every degree exists")


class FqCtx:
    """The field F_{p^m} = F_p[X]/(f) together with a fixed generator of its
    multiplicative group."""

    def __init__(self, p: int, m: int, defining_poly=None):
        require_prime(p)
        if m < 1:
            raise OutOfRange("m must be >= 1")
        self.p = p
        self.m = m
        self.q = p**m
        if defining_poly is None:
            poly = lex_least_irreducible(p, m)
        else:
            poly = tuple(int(c) % p for c in defining_poly)
            if len(poly) != m:
                raise UsageError(f"defining polynomial needs {m} low coefficients")
            if not is_irreducible(poly, p):
                raise UsageError(f"X^{m} + {poly} is not irreducible over F_{p}")
        self.poly = poly
        self._key = (p, m, poly)
        self.generator = self._find_generator()
        self._log = None

    def __eq__(self, other):
        return isinstance(other, FqCtx) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"FqCtx(p={self.p}, m={self.m}, poly={self.poly})"

    def _find_generator(self) -> FqElem:
        order = self.q - 1
        cofactors = [order // r for r in prime_factors(order)]
        for coeffs in product(range(self.p), repeat=self.m):
            x = FqElem(self, coeffs)
            if x.is_zero():
                continue
            if all(x**c != self.one for c in cofactors):
                return x
        raise AssertionError("F_q^* is cyclic")

    @property
    def zero(self) -> FqElem:
        return FqElem(self, (0,) * self.m)

    @property
    def one(self) -> FqElem:
        return self.scalar(1)

    def scalar(self, c: int) -> FqElem:
        return FqElem(self, (c % self.p,) + (0,) * (self.m - 1))

    def elem(self, coeffs) -> FqElem:
        return FqElem(self, tuple(int(c) % self.p for c in coeffs))

    def from_int(self, k: int) -> FqElem:
        """Inverse of :meth:`FqElem.to_int` (base-p digits are coefficients)."""
        if not 0 <= k < self.q:
            raise OutOfRange(f"{k} does not encode an element of F_{self.q}")
        coeffs = []
        for _ in range(self.m):
            k, r = divmod(k, self.p)
            coeffs.append(r)
        return FqElem(self, tuple(coeffs))

    def elements(self):
        """All elements, in lexicographic coefficient order."""
        for coeffs in product(range(self.p), repeat=self.m):
            yield FqElem(self, coeffs)

    def discrete_log(self, x: FqElem) -> int:
        if self._log is None:
            log, y = {}, self.one
            for j in range(self.q - 1):
                log[y] = j
                y = y * self.generator
            self._log = log
        return self._log[x]

    def trace(self, x: FqElem) -> int:
        total, y = self.zero, x
        for _ in range(self.m):
            total = total + y
            y = y**self.p
        if any(total.coeffs[1:]):
            raise TraceNotRational(f"field trace of {x} left F_p")
        return total.coeffs[0]


class FqElem:
    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: FqCtx, coeffs):
        self.ctx = ctx
        self.coeffs = tuple(coeffs)

    def _check(self, other):
        if not isinstance(other, FqElem):
            return False
        if other.ctx is not self.ctx and other.ctx != self.ctx:
            raise CtxMismatch("elements of different finite fields")
        return True

    def __add__(self, other):
        if isinstance(other, int):
            other = self.ctx.scalar(other)
        self._check(other)
        p = self.ctx.p
        return FqElem(self.ctx, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.ctx.p
        return FqElem(self.ctx, tuple(-a % p for a in self.coeffs))

    def __sub__(self, other):
        if isinstance(other, int):
            other = self.ctx.scalar(other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            p = self.ctx.p
            return FqElem(self.ctx, tuple(a * other % p for a in self.coeffs))
        self._check(other)
        return FqElem(self.ctx, _poly_mulmod(self.coeffs, other.coeffs, self.ctx.poly, self.ctx.p))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result, base = self.ctx.one, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> FqElem:
        if self.is_zero():
            raise ZeroDivisionError("0 has no inverse in a field")
        return self ** (self.ctx.q - 2)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_int(self) -> int:
        return sum(c * self.ctx.p**i for i, c in enumerate(self.coeffs))

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ctx.scalar(other)
        if not isinstance(other, FqElem):
            return NotImplemented
        return self.coeffs == other.coeffs and (other.ctx is self.ctx or other.ctx == self.ctx)

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"FqElem{self.coeffs}"


def build_field(p: int, m: int, defining_poly=None) -> FqCtx:
    return _build_field(p, m, None if defining_poly is None else tuple(defining_poly))


@lru_cache(maxsize=None)
def _build_field(p, m, defining_poly):
    return FqCtx(p, m, defining_poly)


def load_poly_override(path) -> tuple[int, int, tuple[int, ...]]:
    """Read ``p m c_0 ... c_{m-1}`` (optionally followed by the leading 1).

    Whitespace separated; ``#`` starts a comment.
    """
    tokens = []
    for line in Path(path).read_text().splitlines():
        tokens.extend(line.split("#", 1)[0].split())
    try:
        nums = [int(t) for t in tokens]
    except ValueError as exc:
        raise UsageError(f"malformed polynomial file {path}: {exc}") from None
    if len(nums) < 3:
        raise UsageError(f"polynomial file {path} is too short")
    p, m, coeffs = nums[0], nums[1], nums[2:]
    if len(coeffs) == m + 1:
        if coeffs[-1] != 1:
            raise UsageError("defining polynomial must be monic")
        coeffs = coeffs[:-1]
    if len(coeffs) != m:
        raise UsageError(f"expected {m} coefficients for degree {m}, got {len(coeffs)}")
    return p, m, tuple(coeffs)


class UnramRing:
    """O_m / p^N realised as (Z/p^N)[X]/(f) with f the lift of the field's
    defining polynomial."""

    def __init__(self, fq: FqCtx, N: int):
        if N < 1:
            raise OutOfRange("precision N must be positive")
        self.fq = fq
        self.p = fq.p
        self.m = fq.m
        self.N = N
        self.mod = fq.p**N
        self.f = fq.poly
        self._key = (fq._key, N)
        self._frob_powers = None

    def __eq__(self, other):
        return isinstance(other, UnramRing) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"UnramRing(p={self.p}, m={self.m}, N={self.N})"

    def elem(self, coeffs) -> UnramElem:
        mod = self.mod
        return UnramElem(self, tuple(int(c) % mod for c in coeffs))

    def scalar(self, c) -> UnramElem:
        return UnramElem(self, (int(c) % self.mod,) + (0,) * (self.m - 1))

    @property
    def zero(self) -> UnramElem:
        return UnramElem(self, (0,) * self.m)

    @property
    def one(self) -> UnramElem:
        return self.scalar(1)

    @property
    def gen(self) -> UnramElem:
        """Residue class of X."""
        if self.m == 1:
            return self.scalar(-self.f[0])
        return self.elem((0, 1) + (0,) * (self.m - 2))

    def lift(self, x: FqElem) -> UnramElem:
        """Coefficient-wise lift (not the Teichmuller lift)."""
        return UnramElem(self, x.coeffs)

    def evaluate_f(self, r: UnramElem) -> tuple[UnramElem, UnramElem]:
        """(f(r), f'(r))."""
        m = self.m
        full = list(self.f) + [1]
        val, der = self.zero, self.zero
        for i in range(m, -1, -1):
            der = der * r + val
            val = val * r + full[i]
        return val, der

    def frobenius_powers(self) -> tuple[UnramElem, ...]:
        """Images of 1, X, ..., X^{m-1} under the Frobenius lift."""
        if self._frob_powers is None:
            r = self.gen**self.p
            for _ in range(4 * self.N.bit_length() + 8):
                val, der = self.evaluate_f(r)
                step = val * der.inverse()
                if step.is_zero():
                    break
                r = r - step
            else:
                raise NoConvergence("Hensel lift of the Frobenius image did not settle")
            powers, y = [], self.one
            for _ in range(self.m):
                powers.append(y)
                y = y * r
            self._frob_powers = tuple(powers)
        return self._frob_powers


class UnramElem:
    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: UnramRing, coeffs):
        self.ring = ring
        self.coeffs = coeffs

    def _other(self, other):
        if isinstance(other, int):
            return self.ring.scalar(other)
        if isinstance(other, PadicInt):
            return self.ring.scalar(other.residue)
        if not isinstance(other, UnramElem):
            return None
        if other.ring is not self.ring and other.ring != self.ring:
            raise CtxMismatch("elements of different unramified rings")
        return other

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        mod = self.ring.mod
        return UnramElem(self.ring, tuple((a + b) % mod for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        mod = self.ring.mod
        return UnramElem(self.ring, tuple(-a % mod for a in self.coeffs))

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        mod = self.ring.mod
        return UnramElem(self.ring, tuple((a - b) % mod for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            mod = self.ring.mod
            return UnramElem(self.ring, tuple(a * other % mod for a in self.coeffs))
        o = self._other(other)
        if o is None:
            return NotImplemented
        return UnramElem(self.ring, _poly_mulmod(self.coeffs, o.coeffs, self.ring.f, self.ring.mod))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result, base = self.ring.one, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        o = self._other(other) if not isinstance(other, UnramElem) else other
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs and (o.ring is self.ring or o.ring == self.ring)

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"UnramElem{self.coeffs} mod {self.ring.p}^{self.ring.N}"

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def valuation(self) -> int:
        """min over coordinates; the power basis is an integral basis."""
        N = self.ring.N
        return min(int_val(c, self.ring.p, cap=N) for c in self.coeffs)

    def reduce(self) -> FqElem:
        return self.ring.fq.elem(self.coeffs)

    def inverse(self) -> UnramElem:
        x0 = self.reduce()
        if x0.is_zero():
            raise ZeroDivisionError(f"{self} is not a unit")
        y = self.ring.lift(x0.inverse())
        two = self.ring.scalar(2)
        for _ in range(self.ring.N.bit_length() + 2):
            y = y * (two - self * y)
        return y

    def frobenius(self) -> UnramElem:
        powers = self.ring.frobenius_powers()
        mod = self.ring.mod
        out = [0] * self.ring.m
        for c, img in zip(self.coeffs, powers):
            if c:
                for i, v in enumerate(img.coeffs):
                    out[i] += c * v
        return UnramElem(self.ring, tuple(v % mod for v in out))

    def trace(self) -> PadicInt:
        return trace(self)

    def with_precision(self, ring: UnramRing) -> UnramElem:
        if ring.fq != self.ring.fq:
            raise CtxMismatch("different residue fields")
        if ring.N > self.ring.N:
            raise UsageError("cannot raise precision of a truncated element")
        return ring.elem(self.coeffs)


@lru_cache(maxsize=None)
def unram_ring(fq: FqCtx, N: int) -> UnramRing:
    return UnramRing(fq, N)


def frobenius(x: UnramElem) -> UnramElem:
    return x.frobenius()


def trace(x: UnramElem) -> PadicInt:
    """Sum of the m Frobenius conjugates, as a scalar."""
    total, y = x.ring.zero, x
    for _ in range(x.ring.m):
        total = total + y
        y = y.frobenius()
    if any(total.coeffs[1:]):
        raise TraceNotRational(f"trace of {x} has non-scalar part {total.coeffs}")
    return PadicInt(x.ring.p, x.ring.N, total.coeffs[0])


def teichmuller(x: FqElem, N: int | UnramRing) -> UnramElem:
    """Teichmuller representative: the root of T^{q} = T reducing to x."""
    ring = N if isinstance(N, UnramRing) else unram_ring(x.ctx, N)
    if x.is_zero():
        return ring.zero
    q = ring.fq.q
    y = ring.lift(x)
    for _ in range(4 * ring.N.bit_length() + 8):
        yq = y ** (q - 2)
        step = (yq * y - 1) * ((yq * (q - 1)).inverse())
        if step.is_zero():
            return y
        y = y - step
    raise NoConvergence("Teichmuller Newton iteration did not settle")


@lru_cache(maxsize=None)
def teich_powers(fq: FqCtx, N: int) -> tuple[UnramElem, ...]:
    """zeta^j for j = 0 .. q-2 where zeta is the Teichmuller lift of the
    field generator."""
    ring = unram_ring(fq, N)
    zeta = teichmuller(fq.generator, ring)
    out, y = [], ring.one
    for _ in range(fq.q - 1):
        out.append(y)
        y = y * zeta
    return tuple(out)


def teich_lift(x: FqElem, N: int) -> UnramElem:
    """Table-backed Teichmuller lift (same value as :func:`teichmuller`)."""
    if x.is_zero():
        return unram_ring(x.ctx, N).zero
    return teich_powers(x.ctx, N)[x.ctx.discrete_log(x)]
