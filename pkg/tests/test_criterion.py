import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from permpoly.construct import assemble_f
from permpoly.criterion import (
    RationalMap,
    big_R,
    build_S,
    build_T,
    check_conditions,
    check_even_specialization,
    check_L_on_T,
    even_l,
    even_psi,
    g_values_on_mu,
    invert_H_from_psi,
    mu_traces,
    odd_psi,
    odd_R_from_psi,
    poly_sqrt,
)
from permpoly.errors import DegenerateDenominator, NonPolynomialSquareRoot, ZeroPolynomial
from permpoly.poly import LaurentPoly, UniPoly, parse_laurent
from permpoly.reduce import ReducedPair, reduce_h
from reference import permutes_ext
from strategies import ctx_for, laurents, random_laurent


def U(ctx, *coeffs):
    return UniPoly(ctx, coeffs)


# --- S and T ----------------------------------------------------------

def test_S_examples():
    assert list(build_S(ctx_for(2, 2))) == [2, 3]
    assert list(build_S(ctx_for(2, 1))) == [1]
    assert list(build_S(ctx_for(3, 1))) == [0]


def test_T_examples():
    assert list(build_T(ctx_for(2, 2))) == [2, 3]
    assert len(build_T(ctx_for(2, 3))) == 4
    assert list(build_T(ctx_for(7, 1))) == [5]


@pytest.mark.parametrize("p,k", [(2, 1), (2, 2), (2, 5), (2, 8), (3, 1), (3, 2), (3, 4), (5, 2), (7, 2), (11, 1)])
def test_S_two_constructions_agree(p, k):
    ctx = ctx_for(p, k)
    S = build_S(ctx)  # raises if the predicate and the image of mu disagree
    image = set(mu_traces(ctx).tolist()) - {2 % p, (-2) % p}
    assert set(S) == image
    assert len(set(S)) == len(S)
    if p == 2:
        assert len(build_T(ctx)) == ctx.q // 2
    else:
        M = ctx.mid
        for b in build_T(ctx):
            assert ctx.eta(b) == -1 and ctx.eta(M.add(b, M.from_int(4))) == 1


# --- R(a) ---------------------------------------------------------------

def test_R_constant_two():
    ctx = ctx_for(5, 1)
    one = U(ctx, 1)
    R = big_R(ctx, ReducedPair(one, one), 1)
    for a in range(5):
        v = R.eval(a)
        assert v is None or v == 2


def test_R_example_pair_char2():
    ctx = ctx_for(2, 3)
    R = big_R(ctx, ReducedPair(U(ctx, 1, 1), U(ctx, 0, 1)), 1)
    assert R.num == U(ctx, 0, 1)
    assert R.den == U(ctx, 1, 0, 1, 1)  # a^3 + a^2 + 1


@pytest.mark.parametrize("p,k", [(3, 2), (5, 2), (7, 1)])
def test_R_at_two(p, k):
    ctx = ctx_for(p, k)
    rng = np.random.default_rng(7)
    two = ctx.mid.from_int(2)
    for _ in range(30):
        h1 = UniPoly(ctx, rng.integers(0, ctx.q, 3))
        h2 = UniPoly(ctx, rng.integers(0, ctx.q, 3))
        if ctx.mid.add(h1.eval(two), h2.eval(two)) == 0:
            continue
        for r in (1, 2, 5):
            assert big_R(ctx, ReducedPair(h1, h2), r).eval(two) == two


def commuting_violations(ctx, h, r):
    """Points of mu where R(a) != g(x) + g(x)^q (h(x) != 0)."""
    T = ctx.top
    g, hx = g_values_on_mu(ctx, h, r)
    R = big_R(ctx, reduce_h(ctx, h), r)
    vals, ok = R.eval_vec(mu_traces(ctx))
    rhs = T.add_vec(g, T.pow_vec(g, ctx.q))
    live = hx != 0
    assert np.array_equal(ok, live)  # the denominator of R is the norm of h(x)
    return int(np.count_nonzero(live & (vals != rhs)))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(2, 2), (2, 3), (2, 4), (3, 2), (5, 2)]).flatmap(
    lambda pk: st.tuples(st.just(ctx_for(*pk)), laurents(ctx_for(*pk), min_terms=1),
                         st.integers(1, 40))))
def test_commuting_identity(args):
    ctx, h, r = args
    if h.is_zero():
        return
    assert commuting_violations(ctx, h, r) == 0


# --- the four conditions ------------------------------------------------

def test_trinomial_q8():
    ctx = ctx_for(2, 3)
    rep = check_conditions(ctx, parse_laurent(ctx, "x^2 + x + x^-1"), 1, run_oracle=True)
    assert rep.conditions_ok and rep.oracle_verdict is True
    assert assemble_f(ctx, parse_laurent(ctx, "x^2 + x + x^-1"), 1).exponents == [8, 15, 57]


def test_identity_map():
    for p, k in [(2, 2), (3, 2), (5, 1)]:
        ctx = ctx_for(p, k)
        rep = check_conditions(ctx, LaurentPoly.const(ctx, 1), 1, run_oracle=True)
        assert rep.conditions_ok and rep.oracle_verdict


def test_zero_of_h_on_mu():
    ctx = ctx_for(2, 2)
    rep = check_conditions(ctx, parse_laurent(ctx, "x + 1"), 1, run_oracle=True)
    assert not rep.h_nonzero_ok
    assert rep.witnesses["h_nonzero"] == [1]
    assert rep.oracle_verdict is False
    with pytest.raises(ZeroPolynomial):
        check_conditions(ctx, LaurentPoly.zero(ctx), 1)


def test_gcd_condition():
    ctx = ctx_for(3, 2)
    rep = check_conditions(ctx, LaurentPoly.const(ctx, 1), 2, run_oracle=True)
    assert not rep.gcd_ok and rep.oracle_verdict is False


@pytest.mark.parametrize("p,k", [(2, 2), (2, 3), (3, 1), (3, 2), (5, 1)])
def test_conditions_equal_oracle_and_reference(p, k):
    ctx = ctx_for(p, k)
    rng = np.random.default_rng(100 * p + k)
    n2 = ctx.q * ctx.q - 1
    seen = {True: 0, False: 0}
    for _ in range(60):
        h = random_laurent(ctx, rng, -4, 4, 3)
        r = int(rng.integers(1, n2))
        rep = check_conditions(ctx, h, r, run_oracle=True)
        assert rep.consistent, (h, r, rep)
        try:
            af = assemble_f(ctx, h, r)
        except ZeroPolynomial:
            assert rep.oracle_verdict is False
        else:
            assert permutes_ext(ctx, af.terms) == rep.oracle_verdict
        seen[rep.oracle_verdict] += 1
    assert seen[False] > 0


def test_half_exponent_input_is_doubled():
    ctx = ctx_for(2, 3)
    h = parse_laurent(ctx, "x^-1/2 + x + 1")
    rep = check_conditions(ctx, h, 1, run_oracle=True)
    assert rep.doubled and rep.consistent


# --- even characteristic ---------------------------------------------

def test_even_psi_examples():
    ctx = ctx_for(2, 4)
    M = ctx.mid
    l = even_l(ReducedPair(U(ctx, 0, 1), U(ctx, 1, 1)))
    assert even_psi(ReducedPair(U(ctx, 0, 1), U(ctx, 1, 1))).eval(5) == 5
    for b in range(1, ctx.q):
        assert l.eval(b) == M.inv(b)
    l2 = even_l(ReducedPair(U(ctx, 0, 0, 1), U(ctx, 1)))
    for b in range(ctx.q):
        d = M.add(1, M.mul(b, b))
        if d:
            assert l2.eval(b) == M.inv(d)
    with pytest.raises(DegenerateDenominator):
        even_psi(ReducedPair(U(ctx, 1, 1), U(ctx, 1, 1)))


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_even_reciprocal_identity(k):
    # 1/R(a) = 1/a + psi(a) + psi(a)^2 on S, r = 1
    ctx = ctx_for(2, k)
    M = ctx.mid
    rng = np.random.default_rng(k)
    for _ in range(20):
        h = random_laurent(ctx, rng, -3, 3, 4)
        pair = reduce_h(ctx, h)
        if (pair.h1 + pair.h2).is_zero():
            continue
        R = big_R(ctx, pair, 1)
        psi = even_psi(pair)
        for a in build_S(ctx):
            rv, pv = R.eval(a), psi.eval(a)
            if rv in (None, 0) or pv is None:
                continue
            assert M.inv(rv) == M.add(M.add(M.inv(a), pv), M.mul(pv, pv))


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
def test_even_specialization_matches_oracle(k):
    ctx = ctx_for(2, k)
    rng = np.random.default_rng(50 + k)
    for _ in range(25):
        h = random_laurent(ctx, rng, -3, 3, 4)
        spec = check_even_specialization(ctx, h)
        rep = check_conditions(ctx, h, 1, run_oracle=True)
        assert spec["permutes"] == rep.oracle_verdict


def test_L_on_T_examples():
    for k in range(2, 13):
        ctx = ctx_for(2, k)
        assert check_L_on_T(ctx, lambda b: ctx.mid.inv_vec(b)).is_permutation
    ctx = ctx_for(2, 5)
    assert check_L_on_T(ctx, lambda b: b).is_permutation  # L = b^2
    ctx = ctx_for(3, 2)
    assert check_L_on_T(ctx, lambda b: b).is_permutation  # L = b^3


# --- odd characteristic ---------------------------------------------

def test_odd_psi_examples():
    ctx = ctx_for(5, 1)
    zero, one = U(ctx), U(ctx, 1)
    psi = odd_psi(ReducedPair(zero, one))
    assert all(psi.eval(a) == 4 for a in range(5))
    R = odd_R_from_psi(ctx, psi)
    assert all(R.eval(a) == a * a % 5 for a in range(5))
    psi = odd_psi(ReducedPair(one, zero))
    assert all(psi.eval(a) == 1 for a in range(5))
    psi = odd_psi(ReducedPair(one, one))
    assert psi.num.is_zero()
    # psi = 0 / (a + 2): R = 4 wherever psi is defined
    assert [odd_R_from_psi(ctx, psi).eval(a) for a in range(5)] == [4, 4, 4, None, 4]


@pytest.mark.parametrize("p,k", [(3, 2), (5, 2), (7, 1), (3, 3)])
def test_odd_R_square_identity(p, k):
    # R(a)^2 = (a^2 - 4) psi(a)^2 + 4 on S for r = 1
    ctx = ctx_for(p, k)
    M = ctx.mid
    rng = np.random.default_rng(p + k)
    for _ in range(20):
        pair = reduce_h(ctx, random_laurent(ctx, rng, -3, 3, 4))
        try:
            psi = odd_psi(pair)
        except DegenerateDenominator:
            continue
        R = big_R(ctx, pair, 1)
        R2 = odd_R_from_psi(ctx, psi)
        for a in build_S(ctx):
            rv, r2 = R.eval(a), R2.eval(a)
            if rv is None or r2 is None:
                continue
            assert M.mul(rv, rv) == r2


@pytest.mark.parametrize("p,m", [(3, 1), (3, 2), (5, 1), (7, 1)])
def test_invert_H_closed_form(p, m):
    ctx = ctx_for(p, 2)
    a = UniPoly.var(ctx)
    N = p**m
    psi = (a * a - 4) ** ((N - 1) // 2)
    delta = (a * a - 4) * psi * psi + 4
    assert delta == UniPoly.monomial(ctx, 1, 2 * N)
    H = invert_H_from_psi(ctx, RationalMap(psi, U(ctx, 1)), "plus")
    assert H.num == -(a * psi) + UniPoly.monomial(ctx, 1, N)
    assert H.den == psi * 2 - 2


def test_invert_H_zero_psi():
    for p in (3, 5, 7):
        ctx = ctx_for(p, 1)
        z = RationalMap(U(ctx), U(ctx, 1))
        vals = set()
        for branch in ("plus", "minus"):
            H = invert_H_from_psi(ctx, z, branch)
            v = H.eval(0)
            assert ctx.mid.mul(v, v) == 1
            vals.add(v)
        assert vals == {1, p - 1}


def test_poly_sqrt():
    ctx = ctx_for(5, 1)
    P = U(ctx, 1, 2, 3)
    assert poly_sqrt(P * P) in (P, -P)
    with pytest.raises(NonPolynomialSquareRoot):
        poly_sqrt(U(ctx, 0, 1))
