"""Gauss sums of level l over the Teichmueller units of F_{p^m}, and the
Stickelberger-type congruence

    G(chi^-a, psi_{l,m}) = -pi_l^s(a) / p(a)   mod pi_l^(s(a)+1).

chi is only ever evaluated on Teichmueller units, where chi(zeta^j) = zeta^j.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import product
from math import factorial, prod

from .cyclotomic import CycloElem
from .errors import CheckFailed, CrossCheckMismatch, LemmaViolation, OutOfRange, PrecisionExhausted
from .padic import require_prime
from .splitting import SplittingContext, psi_lm_product
from .unramified import teich_powers
from .witt import WittVector


@dataclass(frozen=True)
class DigitData:
    a: int
    digits: tuple
    s_a: int
    p_a: int


def digit_stats(a: int, p: int, m: int) -> DigitData:
    require_prime(p)
    if not 0 <= a <= p**m - 2:
        raise OutOfRange(f"a = {a} outside [0, {p**m - 2}]")
    digits, r = [], a
    for _ in range(m):
        r, d = divmod(r, p)
        digits.append(d)
    return DigitData(a, tuple(digits), sum(digits), prod(factorial(d) for d in digits))


def summand_exponents(sc: SplittingContext) -> list[int]:
    """Exponent of psi_{l,m}(zeta^j) = Y^(t_star * Tr(zeta^j)) for j = 0..q-2."""
    if sc.N < sc.l:
        raise PrecisionExhausted(f"traces mod p^{sc.l} need N >= {sc.l}")
    order, t_star = sc.ctx.order, sc.table.t_star
    return [t_star * (z.trace().residue % order) % order for z in teich_powers(sc.fq, sc.N)]


def check_summand_paths(sc: SplittingContext) -> int:
    """Compare the trace exponent of each summand with the snapped product
    prod_i theta_l(x^(p^i)); returns the number of summands checked."""
    zero = sc.fq.zero
    g = sc.fq.generator
    x = sc.fq.one
    for j, t in enumerate(summand_exponents(sc)):
        w = WittVector(sc.fq, sc.l, (x,) + (zero,) * (sc.l - 1))
        got = psi_lm_product(sc, w)
        if got != t:
            raise CrossCheckMismatch(f"summand j={j}: trace path Y^{t}, product path Y^{got}")
        x = x * g
    return sc.fq.q - 1


def gauss_sum(sc: SplittingContext, a: int) -> CycloElem:
    """sum over j of zeta^(-a j) * psi_{l,m}(zeta^j)."""
    digit_stats(a, sc.p, sc.m)
    ctx = sc.ctx
    q1 = sc.fq.q - 1
    zetas = teich_powers(sc.fq, sc.N)
    total = ctx.zero
    for j, t in enumerate(summand_exponents(sc)):
        total = total + ctx.y_power(t).scale(zetas[(-a * j) % q1])
    return total


def _tuples_up_to(m: int, depth: int):
    """All (n_0, ..., n_{m-1}) with sum <= depth, depth first."""
    cur = [0] * m

    def rec(i, left):
        if i == m:
            yield tuple(cur)
            return
        for n in range(left + 1):
            cur[i] = n
            yield from rec(i + 1, left - n)
        cur[i] = 0

    yield from rec(0, depth)


def gauss_via_coefficients(sc: SplittingContext, a: int, depth_target: int) -> CycloElem:
    """(q - 1) * sum of lambda_{n_0} ... lambda_{n_{m-1}} over tuples with
    sum p^i n_i = a mod q - 1 and sum n_i <= depth_target.  Omitted tuples
    have pi-valuation > depth_target."""
    digit_stats(a, sc.p, sc.m)
    ctx = sc.ctx
    if depth_target > ctx.e * (sc.N - 1):
        raise PrecisionExhausted(f"depth {depth_target} exceeds e*(N-1) = {ctx.e * (sc.N - 1)}")
    lam = sc.series[sc.l].coeffs
    if depth_target >= len(lam):
        raise PrecisionExhausted("theta series too short for this depth")
    q1 = sc.fq.q - 1
    weights = [sc.p**i for i in range(sc.m)]
    total = ctx.zero
    for ns in _tuples_up_to(sc.m, depth_target):
        if sum(w * n for w, n in zip(weights, ns)) % q1 != a:
            continue
        term = ctx.one
        for n in ns:
            if n:
                term = term * lam[n]
        total = total + term
    return total * q1


@dataclass
class GaussSumReport:
    p: int
    l: int
    m: int
    a: int
    s_a: int
    p_a: int
    v_pi_G: int
    required: int
    delta_depth: int
    delta_depth_zeta: int
    passed: bool
    N: int
    D: int
    K: int
    elapsed: float = field(default=0.0, compare=False)

    FIELDS = ("p", "l", "m", "a", "s_a", "p_a", "v_pi_G", "required",
              "delta_depth", "delta_depth_zeta", "pass", "N", "D", "K")

    def as_row(self) -> list:
        return [self.p, self.l, self.m, self.a, self.s_a, self.p_a, self.v_pi_G, self.required,
                self.delta_depth, self.delta_depth_zeta, self.passed, self.N, self.D, self.K]

    def as_json(self) -> dict:
        """Fixed field order; the run time is left out so output is reproducible."""
        return dict(zip(self.FIELDS, self.as_row()))


def stickelberger_check(sc: SplittingContext, a: int, raise_on_failure: bool = True) -> GaussSumReport:
    start = time.perf_counter()
    dd = digit_stats(a, sc.p, sc.m)
    ctx, s = sc.ctx, dd.s_a
    if ctx.cap < s + 2:
        raise PrecisionExhausted(f"e*N = {ctx.cap} < s(a) + 2 = {s + 2}")
    G = gauss_sum(sc, a)
    delta = G * dd.p_a + sc.pis[sc.l] ** s
    zeta_minus_one = ctx.y_power(sc.table.t_star) - 1
    delta_zeta = G * dd.p_a + zeta_minus_one**s
    v_G = ctx.pi_valuation(G)
    d1, d2 = ctx.pi_valuation(delta), ctx.pi_valuation(delta_zeta)
    ok = d1 >= s + 1 and d2 >= s + 1 and v_G == s
    report = GaussSumReport(sc.p, sc.l, sc.m, a, s, dd.p_a, v_G, s + 1, d1, d2, ok,
                            sc.N, sc.D, sc.K, time.perf_counter() - start)
    if not ok and raise_on_failure:
        raise CheckFailed(f"congruence fails for (p, l, m, a) = {(sc.p, sc.l, sc.m, a)}", report)
    return report


def sweep(sc: SplittingContext) -> list[GaussSumReport]:
    """stickelberger_check for every a in [0, q-2], in order."""
    return [stickelberger_check(sc, a, raise_on_failure=False) for a in range(sc.fq.q - 1)]


@dataclass(frozen=True)
class DigitLemmaReport:
    p: int
    m: int
    bound: int
    tuples_checked: int
    equality_tuples: int
    violations: tuple
    passed: bool

    def as_json(self) -> dict:
        return {
            "p": self.p,
            "m": self.m,
            "bound": self.bound,
            "tuples_checked": self.tuples_checked,
            "equality_tuples": self.equality_tuples,
            "violations": len(self.violations),
            "pass": self.passed,
        }


def digit_lemma_oracle(p: int, m: int, bound: int, raise_on_failure: bool = True) -> DigitLemmaReport:
    """Brute force: for n_i in [0, bound] with sum p^i n_i = a mod p^m - 1,
    sum n_i >= s(a), with equality only at the base-p digits of a."""
    require_prime(p)
    if m < 1:
        raise OutOfRange("m must be >= 1")
    if bound < p - 1:
        raise OutOfRange(f"bound must be >= p - 1 = {p - 1}")
    q1 = p**m - 1
    stats = [digit_stats(a, p, m) for a in range(q1)]
    weights = [p**i for i in range(m)]
    checked = equal = 0
    seen_equal = [0] * q1
    violations = []
    for ns in product(range(bound + 1), repeat=m):
        a = sum(w * n for w, n in zip(weights, ns)) % q1
        checked += 1
        dd, total = stats[a], sum(ns)
        if total < dd.s_a or (total == dd.s_a and ns != dd.digits):
            violations.append((a, ns))
        elif total == dd.s_a:
            equal += 1
            seen_equal[a] += 1
    violations.extend((a, stats[a].digits) for a in range(q1) if seen_equal[a] != 1)
    report = DigitLemmaReport(p, m, bound, checked, equal, tuple(violations), not violations)
    if violations and raise_on_failure:
        raise LemmaViolation(f"digit lemma fails: {violations[:3]}", report)
    return report
