"""Splitting functions of level l.

theta_j(X) = E(pi_j X) for j <= l, the product Theta_l(X_0, ..., X_{l-1}) =
theta_l(X_0) theta_{l-1}(X_1) ... theta_1(X_{l-1}), the additive characters
they represent, and audits of their character laws.

All evaluations happen at Teichmueller points, which are integral, so the
coefficient bound v_pi(lambda_n) >= n alone controls truncation error.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial

import numpy as np

from .artin_hasse import build_pi_system, e_residues
from .cyclotomic import CycloCtx, CycloElem, cyclo_ctx
from .errors import (
    AuditFailure,
    CrossCheckMismatch,
    IntegralityViolation,
    OutOfRange,
    TruncationTooShort,
)
from .padic import default_precision, require_prime
from .unramified import FqCtx, FqElem, UnramElem, build_field, teichmuller
from .witt import (
    WittVector,
    s_polys,
    witt_add,
    witt_decode,
    witt_from_int,
    witt_to_int,
    witt_trace,
)

EXHAUSTIVE_PAIRS = 2**16
SAMPLED_PAIRS = 2**12
DEFAULT_SEED = 20240601


@dataclass(frozen=True)
class ThetaSeries:
    """lambda_n = e_n pi_level^n, n = 0..D, stored in the level-l context.

    ``step`` is the pi-valuation of pi_level there: p^(l - level)."""

    ctx: CycloCtx
    level: int
    coeffs: tuple
    step: int

    @property
    def D(self) -> int:
        return len(self.coeffs) - 1


def _pi_levels(ctx: CycloCtx, K: int | None = None) -> tuple:
    """pi_0, ..., pi_l embedded into ``ctx``."""
    system = build_pi_system(ctx.p, ctx.l, ctx.N, K)
    return tuple(ctx.embed(z) for z in system.pis)


def theta_series(ctx: CycloCtx, level: int, D: int | None = None, K: int | None = None) -> ThetaSeries:
    if not 1 <= level <= ctx.l:
        raise OutOfRange(f"level {level} outside 1..{ctx.l}")
    p = ctx.p
    step = p ** (ctx.l - level)
    if D is None:
        D = -(-ctx.cap // step)
    pi = _pi_levels(ctx, K)[level]
    ecs = e_residues(p, D, ctx.mod)
    coeffs, pw = [], ctx.one
    for n in range(D + 1):
        coeffs.append(pw * ecs[n])
        pw = pw * pi
    if coeffs[0] != ctx.one:
        raise IntegralityViolation("lambda_0 != 1")
    for n, lam in enumerate(coeffs):
        if ctx.pi_valuation(lam) < min(n * step, ctx.cap):
            raise IntegralityViolation(f"v_pi(lambda_{n}) below {n * step}")
        if n <= p - 1 and lam * factorial(n) != pi**n:
            raise IntegralityViolation(f"lambda_{n} * {n}! != pi^{n}")
    return ThetaSeries(ctx, level, tuple(coeffs), step)


def theta_eval(series: ThetaSeries, t: UnramElem | FqElem | int) -> CycloElem:
    """sum_{n <= D} lambda_n t^n for an integral point t of the unramified ring."""
    ctx = series.ctx
    if series.D * series.step < ctx.cap:
        raise TruncationTooShort(
            f"D = {series.D} leaves terms of pi-valuation < e*N = {ctx.cap}"
        )
    if isinstance(t, FqElem):
        t = teichmuller(t, ctx.ring)
    elif isinstance(t, int):
        t = ctx.ring.scalar(t)
    m, mod = ctx.m, ctx.mod
    # powers of t as coefficient lists
    tp = []
    if m == 1:
        t0, cur = t.coeffs[0], 1
        for _ in range(series.D + 1):
            tp.append((cur,))
            cur = cur * t0 % mod
    else:
        cur = ctx.ring.one
        for _ in range(series.D + 1):
            tp.append(cur.coeffs)
            cur = cur * t
    # lambda_n lies in Z_p[zeta]: only the X^0 coefficient of each row is used
    kind, bits, mats = _lambda_matrix(series)
    if kind == "object":
        out = mats[0] @ np.array(tp, dtype=object)
        return CycloElem(ctx, tuple(int(c) % mod for c in out.reshape(-1)))
    tpa = np.array(tp, dtype=np.int64)
    acc = np.zeros((ctx.e, m), dtype=np.int64)
    for limb in mats:  # most significant first
        acc = ((acc << bits) + (limb @ tpa) % mod) % mod
    return CycloElem(ctx, tuple(acc.reshape(-1).tolist()))


_LAMBDA_MATRICES: dict = {}


def _lambda_matrix(series: ThetaSeries) -> tuple:
    """The e x (D+1) matrix of X^0 coefficients of lambda_n (cached).

    Entries are split into limbs of ``bits`` bits so each limb product with
    the powers of t, summed over n, stays inside int64; object dtype is the
    fallback for moduli too wide for that."""
    key = id(series)
    hit = _LAMBDA_MATRICES.get(key)
    if hit is not None and hit[0] is series:
        return hit[1]
    ctx = series.ctx
    rows = [[lam.coeffs[i * ctx.m] for lam in series.coeffs] for i in range(ctx.e)]
    mod_bits = (ctx.mod - 1).bit_length()
    bits = min(62 - mod_bits - (series.D + 1).bit_length(), mod_bits)
    if bits < 8 or mod_bits + bits > 62:
        entry = ("object", 0, [np.array(rows, dtype=object)])
    else:
        nlimbs = -(-mod_bits // bits)
        mask = (1 << bits) - 1
        mats = [np.array([[(c >> (k * bits)) & mask for c in r] for r in rows], dtype=np.int64)
                for k in reversed(range(nlimbs))]
        entry = ("limbs", bits, mats)
    _LAMBDA_MATRICES[key] = (series, entry)
    return entry


@dataclass(frozen=True)
class CharacterTable:
    """The canonical zeta = theta_l(1) = Y^t_star and psi_l(c) = Y^(t_star c)."""

    ctx: CycloCtx
    t_star: int
    ladder: tuple  # snapped exponents of theta_j(1), j = 1..l, in level-l units

    def psi(self, c: int) -> int:
        return self.t_star * c % self.ctx.order

    def value(self, c: int) -> CycloElem:
        return self.ctx.y_power(self.psi(c))


class SplittingContext:
    """Everything needed to evaluate the level-l splitting function over
    F_{p^m} at precision N: the pi system, theta series for every level,
    the canonical character table, and value caches."""

    def __init__(self, p: int, l: int, m: int = 1, N: int | None = None, D: int | None = None,
                 K: int | None = None, fq: FqCtx | None = None):
        require_prime(p)
        if l < 1 or m < 1:
            raise OutOfRange("l and m must be >= 1")
        self.p, self.l, self.m = p, l, m
        self.N = N if N is not None else default_precision(p, l, m)
        self.fq = fq if fq is not None else build_field(p, m)
        self.ctx = cyclo_ctx(p, l, m, self.N, self.fq)
        self.pi_system = build_pi_system(p, l, self.N, K)
        self.K = self.pi_system.K
        self.pis = _pi_levels(self.ctx, K)
        self.D = D if D is not None else self.ctx.cap
        self.series = {
            j: theta_series(self.ctx, j, -(-self.D // p ** (l - j)), self.K) for j in range(1, l + 1)
        }
        self._theta_cache: dict = {}
        self._big_cache: dict = {}
        self._table = None

    @property
    def e(self) -> int:
        return self.ctx.e

    def theta(self, level: int, x: FqElem) -> CycloElem:
        """theta_level at the Teichmueller lift of x (cached)."""
        key = (level, x)
        val = self._theta_cache.get(key)
        if val is None:
            val = self._theta_cache[key] = theta_eval(self.series[level], x)
        return val

    def big_theta(self, comps) -> CycloElem:
        """Theta_l at the Teichmueller lifts of comps (FqElem components)."""
        key = tuple(comps)
        val = self._big_cache.get(key)
        if val is None:
            val = self.ctx.one
            for k, x in enumerate(key):
                if not x.is_zero():
                    val = val * self.theta(self.l - k, x)
            self._big_cache[key] = val
        return val

    @property
    def table(self) -> CharacterTable:
        if self._table is None:
            self._table = canonical_zeta(self)
        return self._table


@lru_cache(maxsize=None)
def splitting_context(p: int, l: int, m: int = 1, N: int | None = None, D: int | None = None,
                      K: int | None = None) -> SplittingContext:
    return SplittingContext(p, l, m, N, D, K)


def canonical_zeta(sc: SplittingContext) -> CharacterTable:
    ctx = sc.ctx
    one = sc.fq.one
    ladder = tuple(ctx.snap_root_of_unity(sc.theta(j, one)) for j in range(1, sc.l + 1))
    order = ctx.order
    for j in range(1, sc.l):
        # theta_{j+1}(1)^p = theta_j(1)
        if ladder[j] * sc.p % order != ladder[j - 1]:
            raise CrossCheckMismatch(f"theta_{j + 1}(1)^p != theta_{j}(1): ladder {ladder}")
    t_star = ladder[-1]
    if t_star % sc.p == 0:
        raise CrossCheckMismatch(f"theta_l(1) = Y^{t_star} is not primitive")
    return CharacterTable(ctx, t_star, ladder)


def big_theta_eval(sc: SplittingContext, lift) -> CycloElem:
    """theta_l(t_0) theta_{l-1}(t_1) ... theta_1(t_{l-1}) for Teichmueller
    elements (or 0) t_k of the unramified ring."""
    if len(lift) != sc.l:
        raise OutOfRange(f"need {sc.l} entries, got {len(lift)}")
    val = sc.ctx.one
    for k, t in enumerate(lift):
        if not t.is_zero():
            val = val * theta_eval(sc.series[sc.l - k], t)
    return val


def _frobenius_orbit(x: WittVector) -> list:
    p, out, cur = x.fq.p, [], x.comps
    for _ in range(x.fq.m):
        out.append(cur)
        cur = tuple(c**p for c in cur)
    return out


def psi_lm_product(sc: SplittingContext, x: WittVector) -> int:
    """Exponent of prod_i Theta_l(F^i x-hat), by snapping."""
    val = sc.ctx.one
    for comps in _frobenius_orbit(x):
        val = val * sc.big_theta(comps)
    return sc.ctx.snap_root_of_unity(val)


def psi_lm(sc: SplittingContext, x: WittVector) -> int:
    """Exponent t with psi_{l,m}(x) = Y^t.  The product of Theta_l over the
    Frobenius orbit is checked against psi_l of the Witt trace."""
    if x.fq != sc.fq or x.l != sc.l:
        raise OutOfRange("Witt vector does not match the splitting context")
    via_product = psi_lm_product(sc, x)
    via_trace = sc.table.psi(witt_to_int(witt_trace(x)))
    if via_product != via_trace:
        raise CrossCheckMismatch(
            f"psi_lm({x}): product form gives Y^{via_product}, trace form gives Y^{via_trace}"
        )
    return via_product


def psi_l_theta(sc: SplittingContext, c: int) -> int:
    """Exponent of Theta_l at the lift of witt_from_int(c), by snapping."""
    w = witt_from_int(c, sc.p, sc.l)
    return sc.ctx.snap_root_of_unity(sc.big_theta(tuple(sc.fq.scalar(x.coeffs[0]) for x in w.comps)))


@dataclass
class AuditReport:
    p: int
    l: int
    m: int
    pairs_checked: int
    min_depth_observed: int
    passed: bool
    exhaustive: bool
    seed: int | None = None
    required_depth: int = 0
    N: int = 0
    failures: list = field(default_factory=list)

    def as_json(self) -> dict:
        return {
            "p": self.p,
            "l": self.l,
            "m": self.m,
            "pairs_checked": self.pairs_checked,
            "min_depth_observed": self.min_depth_observed,
            "pass": self.passed,
            "exhaustive": self.exhaustive,
            "seed": self.seed,
            "required_depth": self.required_depth,
            "N": self.N,
        }


def audit_pairs(size: int, seed: int = DEFAULT_SEED) -> tuple[list, bool]:
    """Index pairs for an audit over ``size`` elements, sorted."""
    total = size * size
    if total <= EXHAUSTIVE_PAIRS:
        return [(i, j) for i in range(size) for j in range(size)], True
    rng = random.Random(seed)
    return sorted((rng.randrange(size), rng.randrange(size)) for _ in range(SAMPLED_PAIRS)), False


def additivity_audit(sc: SplittingContext, seed: int = DEFAULT_SEED, raise_on_failure: bool = True) -> AuditReport:
    """Theta_l(x-hat) Theta_l(y-hat) = Theta_l(z-hat) mod p*pi_l for z = x + y in
    W_l(F_{p^m}), then psi_{l,m}(x) psi_{l,m}(y) = psi_{l,m}(z) after snapping."""
    ctx, fq, l = sc.ctx, sc.fq, sc.l
    size = fq.q**l
    need = ctx.e + 1
    pairs, exhaustive = audit_pairs(size, seed)
    vecs: dict = {}
    psis: dict = {}

    def vec(i):
        if i not in vecs:
            vecs[i] = witt_decode(fq, l, i)
        return vecs[i]

    def psi(i):
        if i not in psis:
            psis[i] = psi_lm(sc, vec(i))
        return psis[i]

    worst = ctx.cap
    failures = []
    for i, j in pairs:
        x, y = vec(i), vec(j)
        z = witt_add(x, y)
        k = z.encode()
        vecs.setdefault(k, z)
        lhs = sc.big_theta(x.comps) * sc.big_theta(y.comps)
        depth = ctx.pi_valuation(lhs - sc.big_theta(z.comps))
        worst = min(worst, depth)
        if depth < need or (psi(i) + psi(j)) % ctx.order != psi(k):
            failures.append((i, j))
    report = AuditReport(sc.p, l, sc.m, len(pairs), worst, not failures, exhaustive,
                         None if exhaustive else seed, need, sc.N, failures)
    if failures and raise_on_failure:
        i, j = failures[0]
        raise AuditFailure(f"additivity fails at pair {vec(i)}, {vec(j)}", report)
    return report


def bridge_depths(sc: SplittingContext, k: int, t: FqElem, u: FqElem) -> int:
    """pi-depth of E(pi_l^{p^k} S_k(t~, u~)) - theta_{l-k}(lift of S_k(t, u) mod p)."""
    if not 0 <= k <= sc.l - 1:
        raise OutOfRange(f"k must lie in 0..{sc.l - 1}")
    ctx, p = sc.ctx, sc.p
    S = s_polys(p, k)[k]
    ring = ctx.ring
    tt, uu = teichmuller(t, ring), teichmuller(u, ring)
    s_val = S.evaluate([tt, uu], ring.one)
    s_bar = S.evaluate([t, u], sc.fq.one, reduce_coeff=lambda c: c % p)
    # E(w s) = sum e_n w^n s^n with w = pi_l^{p^k}
    w = sc.pis[sc.l] ** (p**k)
    D = -(-ctx.cap // p**k)
    ecs = e_residues(p, D, ctx.mod)
    coeffs, pw = [], ctx.one
    for n in range(D + 1):
        coeffs.append(pw * ecs[n])
        pw = pw * w
    lhs = theta_eval(ThetaSeries(ctx, sc.l - k, tuple(coeffs), p**k), s_val)
    rhs = sc.theta(sc.l - k, s_bar)
    return ctx.pi_valuation(lhs - rhs)
