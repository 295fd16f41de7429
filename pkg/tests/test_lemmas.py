import pytest

from permpoly.errors import OddCharacteristic
from permpoly.lemmas import (
    check_binomial_norm_lemma,
    check_cubic_lemma,
    check_linearized_T_equivalence,
    check_quadratic_lemma,
    check_quartic_lemma,
    run_all,
)
from strategies import ctx_for


def test_small_run_has_no_violations():
    reps = run_all(kmax_quadratic=4, kmax_cubic=4, kmax_quartic=5, kmax_linear=3, kmax_norm=4, t_max=2)
    assert reps and all(r.ok for r in reps), [r.to_dict() for r in reps if not r.ok]
    assert all(r.checked > 0 for r in reps)


@pytest.mark.parametrize("k", [1, 2, 3, 5, 6])
def test_each_lemma(k):
    ctx = ctx_for(2, k)
    for rep in (check_quadratic_lemma(ctx), check_cubic_lemma(ctx), check_quartic_lemma(ctx),
                check_linearized_T_equivalence(ctx, 2)):
        assert rep.ok, rep.to_dict()
    for r in range(1, k + 1):
        assert check_binomial_norm_lemma(ctx, r).ok


def test_report_shape():
    d = check_quadratic_lemma(ctx_for(2, 3)).to_dict()
    assert d["lemma"] == "quadratic" and d["violations"] == 0 and d["checked"] == 7 * 8


def test_needs_characteristic_two():
    with pytest.raises(OddCharacteristic):
        check_quadratic_lemma(ctx_for(3, 2))
