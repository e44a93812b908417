"""Truncated Witt vectors over F_{p^m} (additive structure only).

The addition polynomials P_k come from the ghost-component recursion

    p^k P_k = w_k(X) + w_k(Y) - sum_{j<k} p^j P_j^{p^{k-j}},
    w_k(X) = sum_{j<=k} p^j X_j^{p^{k-j}},

computed with integer coefficients; divisibility by p^k is asserted, not
assumed.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CtxMismatch, GuardExceeded, IntegralityViolation, OutOfRange, TraceNotRational
from .padic import require_prime
from .unramified import FqCtx, FqElem, build_field, unram_ring

MAX_LEVEL = 5
MAX_WEIGHT = 125

_BITS = 12  # exponent field width in packed monomials
_MASK = (1 << _BITS) - 1


# -- packed sparse polynomials (internal) --------------------------------------
def _pmul(a: dict, b: dict) -> dict:
    out: dict = {}
    get = out.get
    for ea, ca in a.items():
        for eb, cb in b.items():
            k = ea + eb
            out[k] = get(k, 0) + ca * cb
    return {k: v for k, v in out.items() if v}


def _ppow(a: dict, n: int) -> dict:
    result = {0: 1}
    while n:
        if n & 1:
            result = _pmul(result, a)
        n >>= 1
        if n:
            a = _pmul(a, a)
    return result


def _padd(a: dict, b: dict, scale: int = 1) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + scale * v
    return {k: v for k, v in out.items() if v}


def _unpack(key: int, nvars: int) -> tuple[int, ...]:
    return tuple((key >> (_BITS * i)) & _MASK for i in range(nvars))


def _var(i: int, e: int = 1) -> int:
    return e << (_BITS * i)


class IntPoly:
    """Multivariate polynomial with integer coefficients.

    ``terms`` is a tuple of (exponent tuple, coefficient) pairs in canonical
    order: total degree descending, then exponent tuple descending.
    """

    __slots__ = ("names", "terms")

    def __init__(self, names, terms):
        self.names = tuple(names)
        items = [(tuple(e), int(c)) for e, c in dict(terms).items() if c]
        items.sort(key=lambda t: (sum(t[0]), t[0]), reverse=True)
        self.terms = tuple(items)

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __eq__(self, other):
        return isinstance(other, IntPoly) and self.names == other.names and self.terms == other.terms

    def __hash__(self):
        return hash((self.names, self.terms))

    def __len__(self):
        return len(self.terms)

    def degrees(self) -> set[int]:
        return {sum(e) for e, _ in self.terms}

    def is_homogeneous(self, degree: int) -> bool:
        return self.degrees() <= {degree}

    def weights(self, var_weights) -> set[int]:
        return {sum(w * a for w, a in zip(var_weights, e)) for e, _ in self.terms}

    def specialize(self, keep, names=None) -> IntPoly:
        """Set every variable not in ``keep`` (indices) to zero."""
        keep = list(keep)
        out: dict = {}
        for e, c in self.terms:
            if any(a for i, a in enumerate(e) if i not in keep):
                continue
            k = tuple(e[i] for i in keep)
            out[k] = out.get(k, 0) + c
        return IntPoly(names or [self.names[i] for i in keep], out)

    def evaluate(self, values, one, reduce_coeff=None):
        """Evaluate at ``values`` (anything supporting + * and ** by ints).

        ``reduce_coeff`` maps each integer coefficient first (e.g. mod p)."""
        total = None
        cache: dict = {}
        for e, c in self.terms:
            if reduce_coeff is not None:
                c = reduce_coeff(c)
                if not c:
                    continue
            term = one
            for i, a in enumerate(e):
                if a:
                    key = (i, a)
                    if key not in cache:
                        cache[key] = values[i] ** a
                    term = term * cache[key]
            term = term * c
            total = term if total is None else total + term
        return one * 0 if total is None else total

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            mono = "*".join(
                n if a == 1 else f"{n}^{a}" for n, a in zip(self.names, e) if a
            )
            mag = abs(c)
            body = mono if mono and mag == 1 else (f"{mag}*{mono}" if mono else str(mag))
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    __repr__ = __str__


def _check_guard(p: int, l: int) -> None:
    require_prime(p)
    if l < 1:
        raise OutOfRange("Witt length must be >= 1")
    if l > MAX_LEVEL or p ** (l - 1) > MAX_WEIGHT:
        raise GuardExceeded(
            f"addition polynomials for p={p}, l={l} are too large (need l <= {MAX_LEVEL}, "
            f"p^(l-1) <= {MAX_WEIGHT})"
        )


@lru_cache(maxsize=None)
def addition_polys(p: int, l: int) -> tuple[IntPoly, ...]:
    """[P_0, ..., P_{l-1}] in variables X_0..X_{l-1}, Y_0..Y_{l-1}."""
    _check_guard(p, l)
    names = [f"X_{i}" for i in range(l)] + [f"Y_{i}" for i in range(l)]
    keep = list(range(l)) + list(range(MAX_LEVEL, MAX_LEVEL + l))
    out = []
    for P in _ghost_recursion(p, l):
        terms = {}
        for key, c in P.items():
            ex = _unpack(key, 2 * MAX_LEVEL)
            terms[tuple(ex[i] for i in keep)] = c
        out.append(IntPoly(names, terms))
    return tuple(out)


# packed layout: X_j at field j, Y_j at field MAX_LEVEL + j
_WEIGHT_FIELDS = 2 * MAX_LEVEL


@lru_cache(maxsize=None)
def _ghost_recursion(p: int, l: int) -> tuple[dict, ...]:
    polys = list(_ghost_recursion(p, l - 1)) if l > 1 else []
    k = l - 1
    total: dict = {}
    for j in range(k + 1):
        for base in (0, MAX_LEVEL):
            key = _var(base + j, p ** (k - j))
            total[key] = total.get(key, 0) + p**j
    for j in range(k):
        total = _padd(total, _ppow(polys[j], p ** (k - j)), -(p**j))
    pk = p**k
    for c in total.values():
        if c % pk:
            raise IntegralityViolation(f"P_{k} for p={p} has non-integral coefficient {c}/{pk}")
    Pk = {key: c // pk for key, c in total.items()}
    weights = [p**j for j in range(MAX_LEVEL)] * 2
    for key in Pk:
        w = sum(wt * a for wt, a in zip(weights, _unpack(key, _WEIGHT_FIELDS)))
        if w != pk:
            raise IntegralityViolation(f"P_{k} for p={p} is not isobaric: weight {w} != {pk}")
    polys.append(Pk)
    return tuple(polys)


def s_polys(p: int, K: int) -> tuple[IntPoly, ...]:
    """[S_0, ..., S_K] with S_k(X, Y) = P_k(X, 0, ..., 0, Y, 0, ..., 0)."""
    P = addition_polys(p, K + 1)
    out = []
    for k, Pk in enumerate(P):
        S = Pk.specialize([0, K + 1], names=["X", "Y"])
        if not S.is_homogeneous(p**k):
            raise IntegralityViolation(f"S_{k} for p={p} is not homogeneous of degree {p**k}")
        out.append(S)
    return tuple(out)


@lru_cache(maxsize=None)
def _reduced_terms(p: int, l: int) -> tuple:
    """Per component: [(coefficient mod p, exponent tuple)], zero terms dropped."""
    out = []
    for P in addition_polys(p, l):
        out.append(tuple((c % p, e) for e, c in P.terms if c % p))
    return tuple(out)


@dataclass(frozen=True)
class WittVector:
    fq: FqCtx
    l: int
    comps: tuple

    def __post_init__(self):
        if len(self.comps) != self.l:
            raise OutOfRange(f"expected {self.l} components, got {len(self.comps)}")

    @property
    def p(self) -> int:
        return self.fq.p

    def __add__(self, other: WittVector) -> WittVector:
        return witt_add(self, other)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def encode(self) -> int:
        q = self.fq.q
        return sum(c.to_int() * q**k for k, c in enumerate(self.comps))

    def __repr__(self):
        return "W(" + ", ".join(str(c.coeffs[0] if self.fq.m == 1 else c.coeffs) for c in self.comps) + ")"


def witt_vector(fq: FqCtx, comps) -> WittVector:
    comps = tuple(c if isinstance(c, FqElem) else fq.scalar(c) if isinstance(c, int) else fq.elem(c) for c in comps)
    return WittVector(fq, len(comps), comps)


def witt_zero(fq: FqCtx, l: int) -> WittVector:
    return WittVector(fq, l, (fq.zero,) * l)


def witt_decode(fq: FqCtx, l: int, code: int) -> WittVector:
    comps = []
    for _ in range(l):
        code, r = divmod(code, fq.q)
        comps.append(fq.from_int(r))
    return WittVector(fq, l, tuple(comps))


def witt_vectors(fq: FqCtx, l: int):
    """All of W_l(F_q) in encoding order."""
    for code in range(fq.q**l):
        yield witt_decode(fq, l, code)


def within_guard(p: int, l: int) -> bool:
    return l <= MAX_LEVEL and p ** (l - 1) <= MAX_WEIGHT


def witt_add(u: WittVector, v: WittVector) -> WittVector:
    """Componentwise P_k(u, v).  Lengths past the polynomial guard go
    through :func:`witt_add_ghost`, which computes the same values."""
    if u.l != v.l or u.fq != v.fq:
        raise CtxMismatch("Witt vectors of different shapes")
    fq, l = u.fq, u.l
    if not within_guard(fq.p, l):
        return witt_add_ghost(u, v)
    values = u.comps + v.comps
    one = fq.one
    cache: dict = {}
    out = []
    for terms in _reduced_terms(fq.p, l):
        acc = fq.zero
        for c, e in terms:
            t = one
            for i, a in enumerate(e):
                if a:
                    key = (i, a)
                    if key not in cache:
                        cache[key] = values[i] ** a
                    t = t * cache[key]
            acc = acc + (t if c == 1 else t * c)
        out.append(acc)
    return WittVector(fq, l, tuple(out))


def _ghost_digits(lifts_x, lifts_y, p: int, l: int, one, digit):
    """Witt sum components from the ghost recursion modulo p^l.

    ``lifts_*`` are lifts of the components to a ring mod p^l.  Only z_j mod p
    enters p^j z_j^(p^(k-j)) mod p^(k+1), so each new component is recovered
    from the ghost sums by one exact division by p^k.  ``digit(w, k)`` divides
    a lift by p^k and reduces it mod p, returning the component and its lift.
    """
    # px[i] = x_i^(p^(k-i)) and likewise py, powered[j] = z_j^(p^(k-j))
    comps, px, py, powered = [], [], [], []
    for k in range(l):
        px = [x**p for x in px] + [lifts_x[k]]
        py = [y**p for y in py] + [lifts_y[k]]
        powered = [z**p for z in powered]
        num = one * 0
        for i in range(k + 1):
            num = num + (px[i] + py[i]) * p**i
        for j in range(k):
            num = num - powered[j] * p**j
        comp, lift = digit(num, k)
        comps.append(comp)
        powered.append(lift)
    return comps


def witt_add_ghost(u: WittVector, v: WittVector) -> WittVector:
    """Witt addition through the ghost components of arbitrary lifts.

    Needs no addition polynomials, so it works at every length."""
    if u.l != v.l or u.fq != v.fq:
        raise CtxMismatch("Witt vectors of different shapes")
    fq, l, p = u.fq, u.l, u.fq.p
    ring = unram_ring(fq, l)

    def digit(w, k):
        pk = p**k
        if any(c % pk for c in w.coeffs):
            raise IntegralityViolation(f"ghost sum not divisible by p^{k}")
        comp = fq.elem(c // pk for c in w.coeffs)
        return comp, ring.lift(comp)

    comps = _ghost_digits([ring.lift(c) for c in u.comps], [ring.lift(c) for c in v.comps],
                          p, l, ring.one, digit)
    return WittVector(fq, l, tuple(comps))


def witt_frobenius(u: WittVector) -> WittVector:
    p = u.fq.p
    return WittVector(u.fq, u.l, tuple(c**p for c in u.comps))


def witt_trace(u: WittVector) -> WittVector:
    """Sum of the m Frobenius conjugates, returned over the prime field."""
    fq = u.fq
    total, y = u, witt_frobenius(u)
    for _ in range(fq.m - 1):
        total = witt_add(total, y)
        y = witt_frobenius(y)
    if any(any(c.coeffs[1:]) for c in total.comps):
        raise TraceNotRational(f"Witt trace of {u} left W_l(F_p)")
    fp = build_field(fq.p, 1)
    return WittVector(fp, u.l, tuple(fp.scalar(c.coeffs[0]) for c in total.comps))


@lru_cache(maxsize=None)
def _increment_terms(p: int, l: int) -> tuple:
    """P_k(X, (1, 0, ..., 0)) mod p as [(coefficient, X exponents)] per k."""
    out = []
    for P in addition_polys(p, l):
        acc: dict = {}
        for e, c in P.terms:
            if any(e[l + 1:]):
                continue
            acc[e[:l]] = (acc.get(e[:l], 0) + c) % p
        out.append(tuple((c, e) for e, c in sorted(acc.items(), reverse=True) if c))
    return tuple(out)


@lru_cache(maxsize=None)
def _int_tables(p: int, l: int) -> tuple[tuple, dict]:
    """n -> witt_from_int(n) by repeated addition of (1, 0, ..., 0) over F_p."""
    fp = build_field(p, 1)
    forward, acc = [], (0,) * l
    if within_guard(p, l):
        polys = _increment_terms(p, l)

        def step(acc):
            return tuple(sum(c * _monomial(acc, e, p) for c, e in terms) % p for terms in polys)
    else:
        unit = WittVector(fp, l, (fp.one,) + (fp.zero,) * (l - 1))

        def step(acc):
            w = witt_add_ghost(WittVector(fp, l, tuple(fp.scalar(c) for c in acc)), unit)
            return tuple(c.coeffs[0] for c in w.comps)
    for _ in range(p**l):
        forward.append(WittVector(fp, l, tuple(fp.scalar(c) for c in acc)))
        acc = step(acc)
    if any(acc):
        raise AssertionError(f"(1,0,...,0) does not have order p^{l}")
    backward = {w.comps: n for n, w in enumerate(forward)}
    if len(backward) != p**l:
        raise AssertionError("witt_from_int is not injective")
    return tuple(forward), backward


def _monomial(values, exps, p) -> int:
    out = 1
    for v, a in zip(values, exps):
        if a:
            out = out * pow(v, a, p) % p
    return out


def witt_from_int(n: int, p: int, l: int) -> WittVector:
    require_prime(p)
    if l < 1:
        raise OutOfRange("Witt length must be >= 1")
    return _int_tables(p, l)[0][n % p**l]


def witt_to_int(u: WittVector) -> int:
    if u.fq.m != 1:
        raise CtxMismatch("witt_to_int needs a vector over the prime field")
    return _int_tables(u.fq.p, u.l)[1][u.comps]


def witt_addition_table(p: int, m: int, l: int, fq: FqCtx | None = None, method: str = "ghost") -> np.ndarray:
    """Full addition table of W_l(F_{p^m}) on encoded vectors.

    Entry [a, b] is the encoding of decode(a) + decode(b).  ``method`` picks
    the ghost recursion (any length) or the reduced addition polynomials
    (inside the guard); both run on all pairs at once with numpy.
    """
    fq = fq or build_field(p, m)
    if method == "ghost":
        return _table_ghost(fq, l)
    if method == "polys":
        _check_guard(p, l)
        return _table_polys(fq, l)
    raise OutOfRange(f"unknown method {method!r}")


_CHUNK_PAIRS = 1 << 20


def _table_ghost(fq: FqCtx, l: int) -> np.ndarray:
    """Ghost recursion on all pairs.  Every power z^(p^s) that occurs has z a
    single component in F_q, so those lifts come from lookup tables and each
    pair only costs gathers and additions."""
    p, m, q = fq.p, fq.m, fq.q
    n, mod = q**l, p**l
    ring = unram_ring(fq, l)
    # pw[s, c] = coefficients of lift(c)^(p^s) mod p^l
    pw = np.zeros((l, q, m), dtype=np.int64)
    for c in range(q):
        x = ring.lift(fq.from_int(c))
        pw[0, c] = x.coeffs
        for s_ in range(1, l):
            x = x**p
            pw[s_, c] = x.coeffs
    codes = np.arange(n, dtype=np.int64)
    comp = [(codes // q**i) % q for i in range(l)]
    # ghost[k][a] = sum_i p^i lift(a_i)^(p^(k-i)), one (n, m) array per k
    ghost = []
    for k in range(l):
        g = np.zeros((n, m), dtype=np.int64)
        for i in range(k + 1):
            g = (g + p**i * pw[k - i][comp[i]]) % mod
        ghost.append(g)
    # sums below stay under (l + 2) p^l * mod
    dtype = np.int32 if (l + 2) * mod * mod < 2**31 else np.int64
    pw = pw.astype(dtype)
    ghost = [g.astype(dtype) for g in ghost]
    weights = np.array([p**j for j in range(m)], dtype=np.int64)
    table = np.empty((n, n), dtype=np.int64)
    rows_per_chunk = max(1, _CHUNK_PAIRS // n)
    for start in range(0, n, rows_per_chunk):
        stop = min(n, start + rows_per_chunk)
        out = np.zeros((stop - start, n), dtype=np.int64)
        digits = []
        for k in range(l):
            num = ghost[k][start:stop, None, :] + ghost[k][None, :, :]
            for j, z in enumerate(digits):
                num -= p**j * pw[k - j][z]
            if p == 2:
                num &= mod - 1
            else:
                num %= mod
            if k:
                pk = p**k
                if np.any(num % pk):
                    raise IntegralityViolation(f"ghost sum not divisible by p^{k}")
                num //= pk
            num %= p
            z = num[..., 0].astype(np.int64)
            for j in range(1, m):
                z += num[..., j] * weights[j]
            digits.append(z)
            out += z * q**k
        table[start:stop] = out
    return table


def _table_polys(fq: FqCtx, l: int) -> np.ndarray:
    p, q, n = fq.p, fq.q, fq.q**l
    elems = [fq.from_int(i) for i in range(q)]
    add = np.array([[(x + y).to_int() for y in elems] for x in elems], dtype=np.int32)
    mul = np.array([[(x * y).to_int() for y in elems] for x in elems], dtype=np.int32)
    maxexp = p ** (l - 1)
    pw = np.array([[(x**a).to_int() for a in range(maxexp + 1)] for x in elems], dtype=np.int32)
    one = fq.one.to_int()

    codes = np.arange(n, dtype=np.int64)
    comps = [((codes // q**k) % q).astype(np.int32) for k in range(l)]
    lhs = [np.repeat(c, n) for c in comps]
    rhs = [np.tile(c, n) for c in comps]
    values = lhs + rhs
    table = np.zeros(n * n, dtype=np.int64)
    for k, terms in enumerate(_reduced_terms(p, l)):
        acc = np.zeros(n * n, dtype=np.int32)
        for c, e in terms:
            mono = None
            for i, a in enumerate(e):
                if a:
                    factor = pw[values[i], a]
                    mono = factor if mono is None else mul[mono, factor]
            if mono is None:
                mono = np.full(n * n, one, dtype=np.int32)
            for _ in range(c):
                acc = add[acc, mono]
        table += acc.astype(np.int64) * q**k
    return table.reshape(n, n)
