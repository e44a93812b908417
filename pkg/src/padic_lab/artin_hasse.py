"""Artin-Hasse series, its exponential E(X), Newton polygons, and the
compatible roots pi_0, pi_1, ..., pi_l of AH.

Root selection
--------------
The top root pi_l is pinned as the solution of E(x) = Y with x = Y - 1 mod
pi^2.  E has p-integral coefficients and E' is a unit on the maximal ideal,
so Newton's method on E(x) - Y converges from Y - 1 like a Hensel lift.  Any
such x is a root of AH, because AH(x) = log E(x) = log Y = 0; this is then
re-checked independently by Newton-polishing x against the truncated AH
polynomial and measuring the residual.  Lower roots are obtained by descent:
pi_{j-1} is the AH root found by Newton from pi_j^p.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import ceil, isqrt, log2

import numpy as np

from .cyclotomic import CycloCtx, CycloElem, cyclo_ctx
from .errors import IntegralityViolation, NoConvergence, UsageError, ZeroSeries
from .padic import PadicInt, int_val, rational_val, reduce_rational, require_prime


@dataclass(frozen=True)
class TruncSeries:
    coeffs: tuple
    p: int

    @property
    def D(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n):
        return self.coeffs[n]


def ah_series(p: int, D: int) -> TruncSeries:
    require_prime(p)
    if D < 1:
        raise UsageError("truncation degree must be >= 1")
    coeffs = [Fraction(0)] * (D + 1)
    k, i = 1, 0
    while k <= D:
        coeffs[k] = Fraction(1, p**i)
        k *= p
        i += 1
    return TruncSeries(tuple(coeffs), p)


_E_CACHE: dict[int, list[Fraction]] = {}


def e_rational(p: int, D: int) -> tuple[Fraction, ...]:
    """Coefficients e_0..e_D of E(X) = exp(AH(X)) as exact rationals.

    E' = AH' E with AH'(X) = sum X^{p^i - 1} gives n e_n = sum_i e_{n - p^i}.
    Each coefficient is checked to be p-integral.
    """
    require_prime(p)
    coeffs = _E_CACHE.setdefault(p, [Fraction(1)])
    for n in range(len(coeffs), D + 1):
        s, k = Fraction(0), 1
        while k <= n:
            s += coeffs[n - k]
            k *= p
        c = s / n
        if c.denominator % p == 0:
            raise IntegralityViolation(f"e_{n} = {c} is not {p}-integral")
        coeffs.append(c)
    return tuple(coeffs[: D + 1])


def e_coeffs(p: int, D: int, N: int) -> list[PadicInt]:
    return [reduce_rational(c, p, N) for c in e_rational(p, D)]


def e_residues(p: int, D: int, mod: int) -> list[int]:
    return [c.numerator * pow(c.denominator, -1, mod) % mod for c in e_rational(p, D)]


@dataclass(frozen=True)
class NewtonPolygon:
    segments: tuple  # of (slope: Fraction, length: int)
    vertices: tuple  # of (degree, valuation)

    def root_valuations(self) -> list[Fraction]:
        out = []
        for slope, length in self.segments:
            out.extend([-slope] * length)
        return out

    def as_json(self) -> list:
        return [{"slope": str(s), "length": n} for s, n in self.segments]


def _coeff_val(c, p):
    if isinstance(c, PadicInt):
        return None if c.residue == 0 else Fraction(int_val(c.residue, p))
    c = Fraction(c)
    return None if c == 0 else Fraction(rational_val(c, p))


def newton_polygon(s, p: int | None = None) -> NewtonPolygon:
    """Lower convex hull of the points (n, v_p(c_n)) over nonzero c_n."""
    if isinstance(s, TruncSeries):
        coeffs, p = s.coeffs, s.p
    else:
        coeffs = list(s)
        if p is None:
            raise UsageError("prime needed for a bare coefficient list")
    pts = [(n, v) for n, c in enumerate(coeffs) if (v := _coeff_val(c, p)) is not None]
    if not pts:
        raise ZeroSeries("Newton polygon of the zero series")
    hull: list = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] unless it lies strictly below the chord to pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    segs = tuple(
        (Fraction(y2 - y1) / (x2 - x1), x2 - x1) for (x1, y1), (x2, y2) in zip(hull, hull[1:])
    )
    return NewtonPolygon(segs, tuple((x, y) for x, y in hull))


def ah_truncation_exponent(p: int, e: int, N: int) -> int:
    """Smallest K with p^K / e - K >= N: AH terms past X^{p^K} vanish mod p^N
    at points of valuation >= 1/e."""
    K = 0
    while Fraction(p**K, e) - K < N:
        K += 1
    return K


def _unit_inverse(u: CycloElem) -> CycloElem:
    ctx = u.ctx
    if ctx.pi_valuation(u) != 0:
        raise ZeroDivisionError("not a unit")
    y = ctx.one
    two = ctx.from_int(2)
    # y_0 = 1 is correct mod pi; each step doubles the pi-adic depth
    for _ in range((ctx.e * ctx.N).bit_length() + 1):
        y = y * (two - u * y)
    return y


def _ah_step(x: CycloElem, K: int) -> CycloElem:
    """Newton update AH_K(x) / AH_K'(x) for the truncated AH polynomial.

    Computed as (p^K AH_K(x)) / AH_K'(x) and then divided by p^K, so the
    result is only known modulo p^{N-K}."""
    ctx, p = x.ctx, x.ctx.p
    scaled, der = ctx.zero, ctx.zero
    pw, dpw = x, ctx.one  # x^{p^i} and x^{p^i - 1}
    for i in range(K + 1):
        scaled = scaled + pw * p ** (K - i)
        der = der + dpw
        if i < K:
            dpw = dpw * pw ** (p - 1)
            pw = pw**p
    ds = scaled * _unit_inverse(der)
    pk = p**K
    if any(c % pk for c in ds.coeffs):
        raise NoConvergence("Artin-Hasse Newton step left the ring of integers")
    return CycloElem(ctx, tuple(c // pk for c in ds.coeffs))


def ah_residual_depth(x: CycloElem, K: int) -> int:
    """p-adic valuation of AH_K(x), capped by the known precision N - K."""
    ctx, p = x.ctx, x.ctx.p
    scaled, pw = ctx.zero, x
    for i in range(K + 1):
        scaled = scaled + pw * p ** (K - i)
        pw = pw**p
    v = min(int_val(c, p, cap=ctx.N) for c in scaled.coeffs)
    return v - K


def _newton_on_ah(x: CycloElem, K: int, stop_depth: int, budget: int) -> tuple[CycloElem, int]:
    ctx = x.ctx
    for it in range(1, budget + 1):
        d = _ah_step(x, K)
        x = x - d
        if ctx.pi_valuation(d) > stop_depth:
            return x, it
    raise NoConvergence(f"AH Newton did not converge within {budget} steps")


def _eval_poly(coeffs: list[int], x: CycloElem) -> CycloElem:
    """sum coeffs[n] x^n by baby steps / giant steps (Paterson-Stockmeyer):
    about 2 sqrt(deg) ring products; the rest are integer combinations."""
    ctx = x.ctx
    if not coeffs:
        return ctx.zero
    k = max(1, isqrt(len(coeffs)))
    powers = [ctx.one]
    for _ in range(k):
        powers.append(powers[-1] * x)
    giant = powers.pop()
    nblocks = -(-len(coeffs) // k)
    scal = np.zeros((nblocks, k), dtype=object)
    for n, c in enumerate(coeffs):
        scal[n // k, n % k] = c
    blocks = scal @ np.array([pw.coeffs for pw in powers], dtype=object)
    mod = ctx.mod
    acc = ctx.zero
    for row in blocks[::-1]:
        acc = acc * giant + CycloElem(ctx, tuple(int(c) % mod for c in row))
    return acc


def _solve_e_equals(target: CycloElem, start: CycloElem, D: int) -> CycloElem:
    """Newton/Hensel for E(x) = target, E truncated at degree D."""
    ctx = target.ctx
    ecs = e_residues(ctx.p, D, ctx.mod)
    x = start
    depth = 1  # pi-adic accuracy of x
    for _ in range(4 * (ctx.e * ctx.N).bit_length() + 8):
        # terms of degree n have pi-valuation >= n, so a step that at most
        # doubles the accuracy only needs degrees up to about 2 * depth
        top = min(D, 2 * depth + 2)
        val = _eval_poly(ecs[: top + 1], x)
        der = _eval_poly([n * c for n, c in enumerate(ecs[: top + 1])][1:], x)
        d = (val - target) * _unit_inverse(der)
        x = x - d
        if d.is_zero():
            if top == D:
                return x
            depth = D
        else:
            depth = max(depth, ctx.pi_valuation(d))
    raise NoConvergence("Hensel lift of E(x) = Y did not settle")


@dataclass(frozen=True)
class PiSystem:
    """Compatible roots pi_0 = 0, pi_1, ..., pi_l of AH in the pure
    cyclotomic ring of level l (pi_j lives in Q_p(Y^{p^{l-j}}))."""

    ctx: CycloCtx
    pis: tuple
    K: int
    work_precision: int
    iterations: tuple
    ah_residual: tuple  # p-adic depth of AH_K(pi_j) at work precision
    info: dict = field(default_factory=dict, compare=False)

    @property
    def top(self) -> CycloElem:
        return self.pis[-1]

    def level(self, j: int) -> CycloElem:
        return self.pis[j]

    def embedded(self, ctx: CycloCtx) -> tuple:
        return tuple(ctx.embed(z) for z in self.pis)


def pi_root(ctx: CycloCtx, K: int | None = None) -> PiSystem:
    return build_pi_system(ctx.p, ctx.l, ctx.N, K)


def build_pi_system(p: int, l: int, N: int, K: int | None = None) -> PiSystem:
    require_prime(p)
    e = p ** (l - 1) * (p - 1)
    if K is None:
        K = ah_truncation_exponent(p, e, N)
    if Fraction(p**K, e) - K < N:
        raise UsageError(f"AH truncation p^{K} too short for precision {N}")
    return _build_pi_system(p, l, N, K)


@lru_cache(maxsize=None)
def _build_pi_system(p: int, l: int, N: int, K: int) -> PiSystem:
    e = p ** (l - 1) * (p - 1)
    M = N + K + 2
    work = cyclo_ctx(p, l, 1, M)
    budget = 4 * ceil(log2(e * N)) + 8
    stop = e * (N - 1)

    x = _solve_e_equals(work.Y, work.pi_hat, e * M)
    x, its = _newton_on_ah(x, K, stop, budget)
    roots, iterations = [x], [its]
    for _ in range(l - 1):
        x, its = _newton_on_ah(roots[-1] ** p, K, stop, budget)
        roots.append(x)
        iterations.append(its)
    roots.reverse()
    iterations.reverse()
    residual = tuple(ah_residual_depth(r, K) for r in roots)

    target = cyclo_ctx(p, l, 1, N)
    pis = (target.zero,) + tuple(r.with_precision(target) for r in roots)
    top = pis[-1]
    if target.pi_valuation(top) != 1:
        raise NoConvergence("pi_l does not have pi-valuation 1")
    if not target.congruent_mod_pi(top, target.pi_hat, 2):
        raise NoConvergence("pi_l is not congruent to Y - 1 mod pi^2")
    for r in residual:
        if r < N - 1:
            raise NoConvergence(f"AH residual depth {r} < N - 1 = {N - 1}")
    return PiSystem(target, pis, K, M, (0,) + tuple(iterations), (None,) + residual)


def compat_depth(pi_upper: CycloElem, pi_lower: CycloElem) -> int:
    """pi-valuation of pi_upper^p - pi_lower in the ambient context."""
    return pi_upper.ctx.pi_valuation(pi_upper ** pi_upper.ctx.p - pi_lower)


def _required_depth(ctx: CycloCtx, level: int | None, strong: bool) -> int:
    """Depth of p (times pi_level when strong) in units of the ambient
    uniformizer.  pi_level has valuation p^{l - level} there."""
    level = ctx.l if level is None else level
    if not 1 <= level <= ctx.l:
        raise UsageError(f"level {level} outside 1..{ctx.l}")
    return ctx.e + (ctx.p ** (ctx.l - level) if strong else 0)


def pi_compat_check(pi_upper: CycloElem, pi_lower: CycloElem, level: int | None = None) -> bool:
    """pi_{j-1} = pi_j^p mod p*pi_j, for pi_upper = pi_j with j = ``level``
    (default: the context level, where the depth is e + 1)."""
    ctx = pi_upper.ctx
    return ctx.congruent_mod_pi(pi_upper**ctx.p, pi_lower, _required_depth(ctx, level, True))


def pi_compat_weak(pi_upper: CycloElem, pi_lower: CycloElem, level: int | None = None) -> bool:
    """The weaker congruence modulo p."""
    ctx = pi_upper.ctx
    return ctx.congruent_mod_pi(pi_upper**ctx.p, pi_lower, _required_depth(ctx, level, False))
