from __future__ import annotations

import random
from itertools import product

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from padic_lab.errors import CtxMismatch, GuardExceeded
from padic_lab.unramified import build_field, teichmuller, unram_ring
from padic_lab.witt import (
    addition_polys,
    s_polys,
    witt_add,
    witt_add_ghost,
    witt_addition_table,
    witt_decode,
    witt_frobenius,
    witt_from_int,
    witt_to_int,
    witt_trace,
    witt_vector,
    witt_vectors,
    witt_zero,
)


def sympy_addition_polys(p, l):
    """Independent oracle: the ghost recursion solved in sympy over Q."""
    X = sympy.symbols(f"X_0:{l}")
    Y = sympy.symbols(f"Y_0:{l}")
    P = []
    for k in range(l):
        rhs = sum(p**j * (X[j] ** p ** (k - j) + Y[j] ** p ** (k - j)) for j in range(k + 1))
        rhs -= sum(p**j * P[j] ** p ** (k - j) for j in range(k))
        P.append(sympy.expand(rhs / p**k))
    return [sympy.Poly(f, *X, *Y) for f in P]


def as_dict(poly):
    return {tuple(e): int(c) for e, c in poly.terms()}


@pytest.mark.parametrize("p,l", [(2, 3), (3, 3), (5, 2)])
def test_addition_polys_match_sympy(p, l):
    ours = addition_polys(p, l)
    for k, ref in enumerate(sympy_addition_polys(p, l)):
        assert ours[k].as_dict() == as_dict(ref)


def test_low_degree_forms():
    P = addition_polys(2, 2)
    assert str(P[0]) == "X_0 + Y_0"
    assert P[1].as_dict() == {(0, 1, 0, 0): 1, (0, 0, 0, 1): 1, (1, 0, 1, 0): -1}
    P3 = addition_polys(3, 2)
    assert P3[1].as_dict() == {
        (0, 1, 0, 0): 1,
        (0, 0, 0, 1): 1,
        (2, 0, 1, 0): -1,
        (1, 0, 2, 0): -1,
    }
    S = s_polys(2, 1)
    assert S[0].as_dict() == {(1, 0): 1, (0, 1): 1}
    assert S[1].as_dict() == {(1, 1): -1}


@pytest.mark.parametrize("p,k", [(2, 4), (3, 3), (5, 2), (7, 2)])
def test_isobaric_and_homogeneous(p, k):
    P = addition_polys(p, k + 1)
    for j, Pj in enumerate(P):
        assert Pj.weights([p**i for i in range(k + 1)] * 2) == {p**j}
    for j, S in enumerate(s_polys(p, k)):
        assert S.is_homogeneous(p**j)


def test_guard():
    with pytest.raises(GuardExceeded):
        addition_polys(2, 6)
    with pytest.raises(GuardExceeded):
        addition_polys(7, 4)


def test_spec_examples_over_f2():
    fq = build_field(2, 1)
    one0 = witt_vector(fq, [1, 0])
    assert witt_add(one0, one0) == witt_vector(fq, [0, 1])
    assert witt_add(one0, witt_vector(fq, [1, 1])).is_zero()
    assert [witt_from_int(n, 2, 2).comps for n in range(4)] == [
        witt_vector(fq, c).comps for c in ([0, 0], [1, 0], [0, 1], [1, 1])
    ]


def teichmuller_oracle_int(u):
    """sum p^i tau(x_i) mod p^l, tau(x) = x^(p^l) mod p^l."""
    p, l = u.p, u.l
    mod = p**l
    return sum(p**i * pow(c.coeffs[0], p**l, mod) for i, c in enumerate(u.comps)) % mod


@pytest.mark.parametrize("p,l", [(2, 1), (2, 4), (2, 7), (3, 3), (3, 4), (5, 3), (7, 2), (11, 2), (127, 1)])
def test_witt_to_int_matches_teichmuller_oracle(p, l):
    fq = build_field(p, 1)
    for u in witt_vectors(fq, l):
        n = witt_to_int(u)
        assert n == teichmuller_oracle_int(u)
        assert witt_from_int(n, p, l) == u


def w_fq_oracle(u, N):
    """sum p^i tau(x_i^(p^-i)) in the unramified ring mod p^N."""
    fq, p = u.fq, u.p
    ring = unram_ring(fq, N)
    total = ring.zero
    for i, x in enumerate(u.comps):
        root = x ** (p ** (fq.m * u.l - i))  # p^i-th root: Frobenius has order m
        total = total + teichmuller(root, ring) * p**i
    return total


@pytest.mark.parametrize("p,m,l", [(2, 2, 2), (2, 3, 2), (3, 2, 2), (2, 2, 3)])
def test_addition_matches_w_fq_oracle(p, m, l):
    fq = build_field(p, m)
    rng = random.Random(p * m * l)
    vecs = list(witt_vectors(fq, l))
    image = {u: w_fq_oracle(u, l) for u in vecs}
    for _ in range(300):
        u, v = rng.choice(vecs), rng.choice(vecs)
        assert image[witt_add(u, v)] == image[u] + image[v]


@pytest.mark.parametrize("p,m,l", [(2, 2, 3), (3, 2, 2), (5, 1, 3), (2, 1, 5), (2, 3, 2)])
def test_ghost_route_matches_polynomials(p, m, l):
    fq = build_field(p, m)
    rng = random.Random(11)
    n = fq.q**l
    for _ in range(150):
        u, v = witt_decode(fq, l, rng.randrange(n)), witt_decode(fq, l, rng.randrange(n))
        assert witt_add(u, v) == witt_add_ghost(u, v)
    assert np.array_equal(
        witt_addition_table(p, m, l), witt_addition_table(p, m, l, method="polys")
    )


def check_group_table(T):
    n = T.shape[0]
    ident = np.arange(n)
    assert np.array_equal(T[0], ident) and np.array_equal(T[:, 0], ident)
    assert np.array_equal(T, T.T)
    assert all(len(np.unique(row)) == n for row in T)  # inverses and cancellation
    # exhaustive associativity: T[T[a, b], c] == T[a, T[b, c]]
    for a in range(n):
        assert np.array_equal(T[T[a]], T[a][T])


@pytest.mark.parametrize("p,m,l", [(2, 1, 4), (2, 2, 2), (3, 1, 3), (2, 3, 2), (5, 1, 2), (3, 2, 2), (2, 1, 7)])
def test_group_axioms_exhaustive_small(p, m, l):
    check_group_table(witt_addition_table(p, m, l))


def test_frobenius_and_trace():
    fq = build_field(2, 2)
    g = fq.generator
    u = witt_vector(fq, [g, fq.zero])
    direct = witt_add(u, witt_vector(fq, [g * g, fq.zero]))
    assert [c.coeffs for c in witt_trace(u).comps] == [c.coeffs[:1] for c in direct.comps]
    assert all(c.coeffs[1:] == (0,) for c in direct.comps)
    assert witt_trace(witt_zero(fq, 2)).is_zero()
    for x in witt_vectors(build_field(3, 1), 2):
        assert witt_frobenius(x) == x and witt_trace(x) == x
    fq8 = build_field(2, 3)
    for x in witt_vectors(fq8, 2):
        y = x
        for _ in range(3):
            y = witt_frobenius(y)
        assert y == x


@pytest.mark.parametrize("p,m,l", [(2, 2, 2), (3, 2, 2), (2, 3, 2)])
def test_frobenius_additive_exhaustive(p, m, l):
    fq = build_field(p, m)
    vecs = list(witt_vectors(fq, l))
    for u, v in product(vecs, repeat=2):
        assert witt_frobenius(witt_add(u, v)) == witt_add(witt_frobenius(u), witt_frobenius(v))


def test_mismatched_shapes():
    with pytest.raises(CtxMismatch):
        witt_add(witt_zero(build_field(2, 1), 2), witt_zero(build_field(2, 1), 3))
    with pytest.raises(CtxMismatch):
        witt_to_int(witt_zero(build_field(2, 2), 2))


shapes = st.sampled_from([(2, 4, 3), (3, 3, 2), (5, 2, 2), (2, 2, 6), (3, 1, 6), (7, 1, 4)])


@settings(max_examples=40, deadline=None)
@given(shapes, st.randoms(use_true_random=False))
def test_group_laws_sampled(shape, rng):
    p, m, l = shape
    fq = build_field(p, m)
    n = fq.q**l
    u, v, w = (witt_decode(fq, l, rng.randrange(n)) for _ in range(3))
    assert witt_add(witt_add(u, v), w) == witt_add(u, witt_add(v, w))
    assert witt_add(u, v) == witt_add(v, u)
    assert witt_add(u, witt_zero(fq, l)) == u
    assert witt_trace(witt_add(u, v)) == witt_add(witt_trace(u), witt_trace(v))


def test_isomorphism_past_polynomial_guard():
    for n in range(0, 2**8, 7):
        u = witt_from_int(n, 2, 8)
        assert witt_to_int(u) == n == teichmuller_oracle_int(u)
        assert witt_add(u, witt_from_int(5, 2, 8)) == witt_from_int(n + 5, 2, 8)
