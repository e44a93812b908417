from __future__ import annotations

from fractions import Fraction
from math import factorial

import pytest

from padic_lab.artin_hasse import (
    ah_series,
    build_pi_system,
    compat_depth,
    e_coeffs,
    e_rational,
    newton_polygon,
    pi_compat_check,
    pi_compat_weak,
)
from padic_lab.cyclotomic import shifted_cyclotomic_poly
from padic_lab.errors import UsageError, ZeroSeries
from padic_lab.padic import rational_val


def exp_of_series_oracle(a: list[Fraction], D: int) -> list[Fraction]:
    """sum_k a^k / k! truncated at degree D, by repeated multiplication."""
    out = [Fraction(0)] * (D + 1)
    power = [Fraction(1)] + [Fraction(0)] * D
    for k in range(D + 1):
        for n, c in enumerate(power):
            out[n] += c / factorial(k)
        nxt = [Fraction(0)] * (D + 1)
        for i, ci in enumerate(power):
            if ci:
                for j in range(1, D + 1 - i):
                    nxt[i + j] += ci * a[j]
        power = nxt
    return out


def test_ah_series_examples():
    s = ah_series(2, 4)
    assert list(s.coeffs) == [0, 1, Fraction(1, 2), 0, Fraction(1, 4)]
    s3 = ah_series(3, 2)
    assert list(s3.coeffs) == [0, 1, 0]


@pytest.mark.parametrize("p,D", [(2, 24), (3, 20), (5, 26)])
def test_e_coefficients_match_exponential_oracle(p, D):
    ah = list(ah_series(p, D).coeffs)
    assert list(e_rational(p, D)) == exp_of_series_oracle(ah, D)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_e_coefficients_low_degrees(p):
    e = e_rational(p, 60)
    assert e[0] == 1 and e[1] == 1
    for n in range(p):
        assert e[n] == Fraction(1, factorial(n))
    assert all(c.denominator % p for c in e)
    res = e_coeffs(p, p - 1, 4)
    assert all(r * factorial(n) == 1 for n, r in enumerate(res))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_ah_newton_polygon_table(p):
    poly = newton_polygon(ah_series(p, p**3))
    expected = tuple((Fraction(-1, p**k - p ** (k - 1)), p**k - p ** (k - 1)) for k in (1, 2, 3))
    assert poly.segments == expected


@pytest.mark.parametrize("p,l", [(2, 1), (2, 3), (3, 2), (5, 1), (5, 2), (7, 1)])
def test_shifted_cyclotomic_polygon_is_one_segment(p, l):
    e = p ** (l - 1) * (p - 1)
    poly = newton_polygon(shifted_cyclotomic_poly(p, l), p)
    assert poly.segments == ((Fraction(-1, e), e),)


def test_newton_polygon_edge_cases():
    assert newton_polygon([0, 1, 1], 2).segments == ((Fraction(0), 1),)
    with pytest.raises(ZeroSeries):
        newton_polygon([0, 0], 3)
    with pytest.raises(UsageError):
        newton_polygon([1, 2])


def test_e_polygon_slopes_are_nonnegative():
    # integral coefficients with e_0 = 1: no negative valuations anywhere
    for p in (2, 3):
        e = e_rational(p, 40)
        assert all(rational_val(c, p) >= 0 for c in e if c)


def test_pi_one_for_p2_matches_oracle():
    # oracle: digit-by-digit search for x = 2 mod 4 with E(x) = -1 mod 2^N
    assert build_pi_system(2, 1, 6).pis[1].coeffs == (42,)
    assert build_pi_system(2, 1, 8).pis[1].coeffs == (170,)
    assert build_pi_system(2, 2, 4).pis[1].coeffs == (10, 0)


@pytest.mark.parametrize("p,l,N", [(2, 1, 5), (2, 2, 4), (2, 3, 4), (3, 1, 4), (3, 2, 3), (5, 1, 3), (5, 2, 3)])
def test_pi_system_properties(p, l, N):
    sysm = build_pi_system(p, l, N)
    ctx = sysm.ctx
    assert sysm.pis[0].is_zero()
    top = sysm.pis[l]
    assert ctx.pi_valuation(top) == 1
    assert ctx.congruent_mod_pi(top, ctx.pi_hat, 2)
    assert all(r >= N - 1 for r in sysm.ah_residual[1:])
    for j in range(1, l + 1):
        assert ctx.pi_valuation(sysm.pis[j]) == p ** (l - j)
        assert pi_compat_check(sysm.pis[j], sysm.pis[j - 1], level=j)
        assert compat_depth(sysm.pis[j], sysm.pis[j - 1]) >= ctx.e + p ** (l - j)


@pytest.mark.parametrize("p,l,N", [(2, 2, 4), (3, 2, 3), (2, 3, 4), (5, 1, 3), (3, 1, 5)])
def test_pi_system_stable_under_precision_increase(p, l, N):
    low, high = build_pi_system(p, l, N), build_pi_system(p, l, N + 2)
    for a, b in zip(low.pis, high.pis):
        assert b.with_precision(low.ctx) == a


def test_compat_examples():
    s1 = build_pi_system(2, 1, 5)
    # v(pi_1^2) = 2 = e + 1 with e = 1
    assert pi_compat_check(s1.pis[1], s1.pis[0])
    s2 = build_pi_system(2, 2, 4)
    assert pi_compat_check(s2.pis[2], s2.pis[1])


def galois(z, a):
    """Y -> Y^a applied to an element of a pure cyclotomic context."""
    ctx = z.ctx
    out = ctx.zero
    for i, c in enumerate(z.coeffs):
        if c:
            out = out + ctx.y_power(a * i) * c
    return out


@pytest.mark.parametrize("p,l,N,a", [(3, 2, 3, 2), (5, 2, 3, 2), (2, 3, 4, 3), (5, 2, 3, 4)])
def test_compat_rejects_another_root(p, l, N, a):
    sysm = build_pi_system(p, l, N)
    upper, lower = sysm.pis[l], sysm.pis[l - 1]
    other = galois(lower, a)
    # still a root of valuation p, but not the compatible one
    assert other != lower
    assert sysm.ctx.pi_valuation(other) == p
    # only the strong modulus p * pi_l pins the root down
    assert not pi_compat_check(upper, other)
    assert pi_compat_weak(upper, lower)


def test_truncation_guard():
    with pytest.raises(UsageError):
        build_pi_system(2, 2, 6, K=1)
