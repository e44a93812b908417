from __future__ import annotations

from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from padic_lab.errors import OutOfRange, TruncationTooShort
from padic_lab.splitting import (
    SplittingContext,
    ThetaSeries,
    additivity_audit,
    audit_pairs,
    big_theta_eval,
    bridge_depths,
    psi_l_theta,
    psi_lm,
    splitting_context,
    theta_eval,
    theta_series,
)
from padic_lab.unramified import teichmuller
from padic_lab.witt import WittVector, witt_add, witt_decode, witt_from_int, witt_to_int, witt_vectors

SHAPES = [(2, 1, 1), (2, 2, 1), (2, 3, 1), (3, 1, 1), (3, 2, 1), (5, 1, 1), (2, 2, 2), (3, 1, 2), (7, 1, 1)]


@pytest.mark.parametrize("p,l,m", SHAPES)
def test_theta_series_coefficients(p, l, m):
    sc = splitting_context(p, l, m)
    ctx = sc.ctx
    for level in range(1, l + 1):
        s = sc.series[level]
        pi = sc.pis[level]
        assert s.coeffs[0] == ctx.one
        assert s.coeffs[1] == pi
        for n, lam in enumerate(s.coeffs):
            assert ctx.pi_valuation(lam) >= min(n * s.step, ctx.cap)


@pytest.mark.parametrize("p,l,m", SHAPES)
def test_theta_at_zero_and_one(p, l, m):
    sc = splitting_context(p, l, m)
    ctx = sc.ctx
    top = sc.series[l]
    assert theta_eval(top, 0) == ctx.one
    z = theta_eval(top, 1)
    assert z ** ctx.order == ctx.one
    assert z ** (ctx.order // p) != ctx.one
    assert ctx.pi_valuation(z - 1) == 1
    assert ctx.snap_root_of_unity(z) == sc.table.t_star


@pytest.mark.parametrize("p,l,m", SHAPES)
def test_canonical_zeta_and_ladder(p, l, m):
    sc = splitting_context(p, l, m)
    table, order = sc.table, sc.ctx.order
    # the canonical root is Y itself for every context we build
    assert table.t_star == 1
    assert table.psi(0) == 0
    assert table.value(1) == sc.theta(l, sc.fq.one)
    for j in range(1, l):
        assert table.ladder[j] * p % order == table.ladder[j - 1]
    assert table.ladder[0] == p ** (l - 1)


@pytest.mark.parametrize("p,l", [(2, 3), (3, 2), (5, 1), (7, 1), (5, 2)])
def test_theta_at_prime_field_teichmueller_units_is_primitive(p, l):
    sc = splitting_context(p, l, 1)
    for x in sc.fq.elements():
        if x.is_zero():
            continue
        t = sc.ctx.snap_root_of_unity(sc.theta(l, x))
        assert t % p != 0


def test_truncation_too_short():
    sc = splitting_context(2, 2, 1)
    s = sc.series[2]
    short = ThetaSeries(s.ctx, 2, s.coeffs[:3], s.step)
    with pytest.raises(TruncationTooShort):
        theta_eval(short, 1)
    with pytest.raises(OutOfRange):
        theta_series(sc.ctx, 3)


@pytest.mark.parametrize("p,l,m", [(2, 2, 1), (3, 2, 1), (2, 2, 2)])
def test_big_theta_examples(p, l, m):
    sc = splitting_context(p, l, m)
    ring = sc.ctx.ring
    zero, one = ring.zero, ring.one
    assert big_theta_eval(sc, [zero] * l) == sc.ctx.one
    assert big_theta_eval(sc, [one] + [zero] * (l - 1)) == sc.table.value(1)
    with pytest.raises(OutOfRange):
        big_theta_eval(sc, [zero] * (l + 1))


def test_level_one_is_dwork_splitting_function():
    sc = splitting_context(3, 1, 1)
    for x in sc.fq.elements():
        lift = teichmuller(x, sc.ctx.ring)
        assert big_theta_eval(sc, [lift]) == theta_eval(sc.series[1], lift)


@pytest.mark.parametrize("p,l", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (2, 4), (5, 2), (3, 3)])
def test_psi_is_a_character_of_order_p_to_l(p, l):
    sc = splitting_context(p, l, 1)
    order = p**l
    psi = [psi_l_theta(sc, c) for c in range(order)]
    assert psi[0] == 0
    assert psi == [sc.table.psi(c) for c in range(order)]
    assert psi[1] * p ** (l - 1) % order != 0
    for a, b in product(range(order), repeat=2):
        assert psi[(a + b) % order] == (psi[a] + psi[b]) % order


@pytest.mark.parametrize("p,l", [(2, 2), (3, 1), (2, 3), (3, 2)])
def test_psi_lm_over_prime_field_is_psi_of_integer(p, l):
    sc = splitting_context(p, l, 1)
    for x in witt_vectors(sc.fq, l):
        assert psi_lm(sc, x) == sc.table.psi(witt_to_int(x))


@pytest.mark.parametrize("p,l,m", [(2, 1, 2), (2, 2, 2), (3, 1, 2), (2, 1, 3), (2, 2, 3), (3, 2, 2)])
def test_psi_lm_trace_form_is_additive(p, l, m):
    sc = splitting_context(p, l, m)
    vecs = list(witt_vectors(sc.fq, l))
    psi = {x: psi_lm(sc, x) for x in vecs}
    assert psi[vecs[0]] == 0
    order = sc.ctx.order
    step = max(1, len(vecs) // 16)
    for x in vecs:
        for y in vecs[::step]:
            assert psi[witt_add(x, y)] == (psi[x] + psi[y]) % order


def test_psi_lm_on_teichmueller_points_is_product_of_thetas():
    sc = splitting_context(2, 2, 2)
    zero = sc.fq.zero
    for x in sc.fq.elements():
        orbit = [x, x**2]
        val = sc.ctx.one
        for y in orbit:
            val = val * sc.theta(2, y)
        w = WittVector(sc.fq, 2, (x, zero))
        assert psi_lm(sc, w) == sc.ctx.snap_root_of_unity(val)


def test_audit_z_mod_4():
    report = additivity_audit(splitting_context(2, 2, 1))
    assert report.passed and report.exhaustive
    assert report.pairs_checked == 16
    assert report.min_depth_observed >= report.required_depth == 3


def test_audit_w2_f4_depth():
    report = additivity_audit(splitting_context(2, 2, 2))
    assert report.passed and report.exhaustive
    assert report.pairs_checked == 256
    assert report.min_depth_observed >= 3
    assert report.as_json()["pass"] is True


def test_audit_pair_policy():
    pairs, exhaustive = audit_pairs(256)
    assert exhaustive and len(pairs) == 2**16
    pairs, exhaustive = audit_pairs(257, seed=3)
    assert not exhaustive and len(pairs) == 2**12 and pairs == sorted(pairs)
    assert pairs == audit_pairs(257, seed=3)[0]


@pytest.mark.parametrize("p,l,m", [(2, 2, 1), (2, 3, 1), (3, 2, 1), (2, 2, 2), (3, 2, 2)])
def test_s_bridge_depths(p, l, m):
    sc = splitting_context(p, l, m)
    elems = list(sc.fq.elements())
    for k in range(l):
        for t, u in product(elems, repeat=2):
            assert bridge_depths(sc, k, t, u) >= sc.e + 1
    with pytest.raises(OutOfRange):
        bridge_depths(sc, l, elems[0], elems[0])


def test_explicit_precision_gives_same_character():
    low = SplittingContext(3, 2, 1)
    high = SplittingContext(3, 2, 1, N=low.N + 2)
    assert low.table.t_star == high.table.t_star
    for c in range(9):
        assert psi_l_theta(low, c) == psi_l_theta(high, c)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([(2, 4, 1), (5, 2, 1), (3, 3, 1), (2, 2, 3)]), st.randoms(use_true_random=False))
def test_psi_lm_additive_sampled(shape, rng):
    p, l, m = shape
    sc = splitting_context(p, l, m)
    n = sc.fq.q**l
    x, y = witt_decode(sc.fq, l, rng.randrange(n)), witt_decode(sc.fq, l, rng.randrange(n))
    assert psi_lm(sc, witt_add(x, y)) == (psi_lm(sc, x) + psi_lm(sc, y)) % sc.ctx.order


def test_from_int_and_theta_agree():
    sc = splitting_context(5, 1, 1)
    for c in range(5):
        assert psi_lm(sc, witt_from_int(c, 5, 1)) == psi_l_theta(sc, c)
