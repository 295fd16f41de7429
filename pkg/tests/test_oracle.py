import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from permpoly.construct import assemble_f
from permpoly.errors import BoundExceeded, OddCharacteristic, ZeroPolynomial
from permpoly.ff_core import FieldCtx
from permpoly.oracle import (
    check_f_permutes,
    check_L_permutes_T,
    check_linearized_perm,
    check_permutation,
    f_values,
    find_collision,
)
from permpoly.poly import LaurentPoly, parse_laurent
from strategies import ctx_for, random_laurent


def brute_collision(values):
    first = {}
    best = None
    for j, v in enumerate(values):
        if v in first:
            i = first[v]
            if best is None or i < best[0]:
                best = (i, j)
        else:
            first[v] = j
    return best


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 40), max_size=30) | st.lists(st.integers(0, 10**12), max_size=30))
def test_find_collision_matches_brute_force(vals):
    arr = np.array(vals, dtype=np.int64)
    assert find_collision(arr) == brute_collision(vals)


def test_square_map():
    f8 = FieldCtx(2, 3)
    sq = lambda xs: f8.mid.mul_vec(xs, xs)  # noqa: E731
    assert check_permutation(f8, "mid_field", sq).is_permutation
    f7 = FieldCtx(7, 1)
    v = check_permutation(f7, "mid_field", lambda xs: f7.mid.mul_vec(xs, xs))
    assert not v.is_permutation
    assert v.collision == (1, 6) and v.kind == "collision"


def test_trinomial_permutes_f64():
    ctx = ctx_for(2, 3)
    af = assemble_f(ctx, parse_laurent(ctx, "x^2 + x + x^-1"), 1)
    assert check_f_permutes(ctx, af).is_permutation


@pytest.mark.parametrize("p,k", [(2, 2), (2, 3), (2, 4), (3, 2), (5, 2), (7, 1)])
def test_direct_and_factored_agree(p, k):
    ctx = ctx_for(p, k)
    rng = np.random.default_rng(3 * p + k)
    for _ in range(15):
        h = random_laurent(ctx, rng, -5, 5, 4)
        r = int(rng.integers(1, ctx.q * ctx.q))
        try:
            af = assemble_f(ctx, h, r)
        except ZeroPolynomial:
            continue
        pd, vd = f_values(ctx, af, "direct")
        pf, vf = f_values(ctx, af, "factored")
        assert np.array_equal(pd, pf) and np.array_equal(vd, vf)
        assert check_f_permutes(ctx, af, "direct").to_dict() == check_f_permutes(ctx, af, "factored").to_dict()


def test_domains():
    ctx = ctx_for(3, 2)
    assert check_permutation(ctx, "mu", lambda xs: ctx.top.pow_vec(xs, 3)).is_permutation
    v = check_permutation(ctx, "mu", lambda xs: ctx.top.pow_vec(xs, 2))
    assert not v.is_permutation  # gcd(2, 10) = 2
    # an escape is reported separately from a collision
    v = check_permutation(ctx, "T", lambda xs: np.zeros_like(xs))
    assert v.kind == "escape"
    v = check_permutation(ctx, "full_ext_field", lambda xs: (xs, xs != 0))
    assert v.kind == "undefined"


def test_L_on_T_examples():
    for k in (3, 6, 12):
        ctx = ctx_for(2, k)
        assert check_L_permutes_T(ctx, lambda b: ctx.mid.inv_vec(b), "even_char").is_permutation
    ctx = ctx_for(3, 2)
    assert check_L_permutes_T(ctx, lambda b: b, "odd_char").is_permutation
    with pytest.raises(OddCharacteristic):
        check_L_permutes_T(ctx, lambda b: b, "even_char")


def test_linearized_examples():
    assert check_linearized_perm(ctx_for(2, 3), [0, 0, 1])
    assert not check_linearized_perm(ctx_for(2, 7), [0, 0, 1])
    assert check_linearized_perm(ctx_for(2, 4), [0])


def test_bound():
    ctx = FieldCtx(2, 13)  # q^2 = 2^26 is beyond the table limit
    with pytest.raises(BoundExceeded):
        check_f_permutes(ctx, assemble_f(ctx, LaurentPoly.const(ctx, 1), 1))
