import math

import pytest

from permpoly.errors import InvalidParams
from permpoly.families import (
    FAMILIES,
    family_build,
    family_fields,
    family_generate,
    family_params,
    odd_observed_condition,
)
from permpoly.oracle import check_f_permutes
from permpoly.search import trinomial_L_level
from reference import permutes_ext
from strategies import ctx_for

EVEN = [n for n, f in FAMILIES.items() if f.parity == "even_char"]
ODD = [n for n, f in FAMILIES.items() if f.parity == "odd_char"]


def members(family, max_q2, budget=6):
    for p, k in family_fields(family, max_q2):
        ctx = ctx_for(p, k)
        for params in family_params(ctx, family, budget=budget, seed=5):
            yield ctx, params


@pytest.mark.parametrize("family", [f for f in EVEN if f != "binomial_corollary"] + ["odd_case_I", "odd_case_III"])
def test_prediction_matches_reference(family):
    # tiny fields only: the reference field is pure python
    seen = 0
    for ctx, params in members(family, 2**8 if ctx_p2(family) else 7**2, budget=4):
        af, predicted = family_generate(ctx, family, params)
        assert permutes_ext(ctx, af.terms) == predicted, (ctx, params)
        seen += 1
    assert seen > 0


def ctx_p2(family):
    return FAMILIES[family].parity == "even_char"


@pytest.mark.parametrize("family", EVEN + ODD)
def test_oracle_matches_observed_rule(family):
    max_q2 = 2**12 if ctx_p2(family) else 11**2
    for ctx, params in members(family, max_q2):
        af, predicted = family_generate(ctx, family, params)
        got = check_f_permutes(ctx, af).is_permutation
        if family in ODD:
            predicted = odd_observed_condition(ctx, family, params["m"])
        assert got == predicted, (ctx, params)


@pytest.mark.parametrize("family,m", [("odd_case_II", 2), ("odd_case_IV", 1)])
def test_gcd_condition_fails_when_q_is_1_mod_4(family, m):
    # q = 5: n = 12 (case II, m = 2) and n = 4 (case IV, m = 1) share 4 with q - 1
    # but only 2 with (q - 1)/2, so the gcd condition says no, yet f permutes
    ctx = ctx_for(5, 1)
    af, predicted = family_generate(ctx, family, {"m": m})
    assert not predicted
    assert check_f_permutes(ctx, af).is_permutation
    assert permutes_ext(ctx, af.terms)
    # for q = 3 mod 4 the stated condition is exact
    ctx = ctx_for(7, 1)
    for m in (1, 2):
        af, predicted = family_generate(ctx, family, {"m": m})
        assert check_f_permutes(ctx, af).is_permutation == predicted


def test_odd_case_I_m_equals_k():
    for k in (1, 2, 3):
        n = (3**k - 1) // 2
        assert math.gcd(n, 3**k - 1) == math.gcd(n, n)
        _, _, predicted = family_build(ctx_for(3, k), "odd_case_I", {"m": k})
        assert predicted


@pytest.mark.parametrize("family", ["trinomial_b_b4_b8", "trinomial_b_b2_b8"])
def test_trinomials_fail_only_at_multiples_of_7(family):
    for k in range(3, 11):
        ctx = ctx_for(2, k)
        if ctx.q**2 <= 2**20:
            af, predicted = family_generate(ctx, family)
            assert predicted == (k % 7 != 0)
            assert check_f_permutes(ctx, af).is_permutation == predicted
    for k in (7, 14):
        rec = trinomial_L_level(family, k)
        assert rec["predicted"] is False and rec["oracle"] is False


def test_pp_s_minus_2_sweep_all_true():
    for k in range(2, 11):
        ctx = ctx_for(2, k)
        if ctx.q**2 > 2**16:
            break
        af, predicted = family_generate(ctx, "PP_s_minus_2")
        assert predicted and check_f_permutes(ctx, af).is_permutation


def test_parity_guards():
    with pytest.raises(InvalidParams):
        family_build(ctx_for(3, 1), "PP_s_minus_1")
    with pytest.raises(InvalidParams):
        family_build(ctx_for(2, 3), "odd_case_I", {"m": 1})
    with pytest.raises(InvalidParams):
        family_build(ctx_for(2, 3), "no_such_family")


def test_params_are_reproducible():
    ctx = ctx_for(2, 5)
    a = list(family_params(ctx, "linearized", budget=5, seed=2))
    b = list(family_params(ctx, "linearized", budget=5, seed=2))
    assert a == b
