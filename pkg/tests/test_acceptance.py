"""End-to-end acceptance checks, one test per criterion, each at its stated scale.

Every test records a PASS/FAIL line that is printed in the pytest terminal summary.
"""

import io
import time
from pathlib import Path

import numpy as np
import pytest

from permpoly.cli import run
from permpoly.construct import construct_h, strip_vanishing_factors, substitute_a
from permpoly.criterion import big_R, check_conditions, g_values_on_mu, mu_traces
from permpoly.families import FAMILIES, odd_observed_condition
from permpoly.lemmas import run_all
from permpoly.poly import UniPoly
from permpoly.reduce import reduce_h
from permpoly.search import search_tables, verify_family_sweep
from strategies import ctx_for, random_laurent, random_unipoly

pytestmark = pytest.mark.slow

DATA = Path(__file__).parent / "data"
FIELDS = {4: (2, 2), 8: (2, 3), 16: (2, 4), 9: (3, 2), 25: (5, 2), 49: (7, 2)}
ODD_UNSTATED = ("odd_case_II", "odd_case_IV")


def golden_sets(name):
    out = {}
    for line in (DATA / name).read_text().splitlines()[1:]:
        p, k, s = map(int, line.split(","))
        out.setdefault(k, []).append(s)
    return out


def test_1_even_table(acceptance):
    buf = io.StringIO()
    t0 = time.perf_counter()
    code = run(["reproduce-tables", "--p", "2", "--kmin", "3", "--kmax", "12"], out=buf)
    dt = time.perf_counter() - t0
    gold = (DATA / "monomial_hits_p2.csv").read_text()
    ok = code == 0 and buf.getvalue() == gold and dt < 120
    acceptance("1 even monomial table (p = 2, k = 3..12) byte-identical", ok, f"{dt:.1f}s")
    assert buf.getvalue() == gold
    assert code == 0 and dt < 120


def test_2_odd_tables(acceptance):
    t0 = time.perf_counter()
    bad = []
    for p, kmax, name in ((3, 5, "monomial_hits_p3.csv"), (5, 5, "monomial_hits_p5.csv"), (7, 4, "monomial_hits_p7.csv")):
        gold = golden_sets(name)
        got = {res.k: res.hits for res in search_tables(p, 2, kmax)}
        if got != gold:
            bad.append(p)
    dt = time.perf_counter() - t0
    acceptance("2 odd monomial tables (p = 3, 5, 7)", not bad and dt < 60, f"{dt:.1f}s mismatched p={bad}")
    assert got[4] == gold[4] and not bad
    assert dt < 60


def test_3_conditions_iff_permutation(acceptance):
    t0 = time.perf_counter()
    wrong, positives, total = [], 0, 0
    for q in (4, 8, 16, 9, 25):
        ctx = ctx_for(*FIELDS[q])
        rng = np.random.default_rng(1000 + q)
        for _ in range(500):
            h = random_laurent(ctx, rng, -4, 4, 3)
            r = int(rng.integers(1, ctx.q * ctx.q - 1))
            rep = check_conditions(ctx, h, r, run_oracle=True)
            total += 1
            positives += rep.oracle_verdict
            if rep.conditions_ok != rep.oracle_verdict:
                wrong.append((q, str(h), r))
    dt = time.perf_counter() - t0
    ok = not wrong and dt < 60
    acceptance("3 conditions iff permutation", ok,
               f"{total} instances, {positives} permutations, {len(wrong)} disagreements, {dt:.1f}s")
    assert not wrong, wrong[:5]
    assert dt < 60


@pytest.fixture(scope="module")
def odd_unstated_sweeps():
    return {f: verify_family_sweep(f, max_q2=2**20) for f in ODD_UNSTATED}


def test_4_family_sweeps(acceptance):
    t0 = time.perf_counter()
    mism, checked = {}, 0
    for fam in FAMILIES:
        if fam in ODD_UNSTATED:
            continue
        rep = verify_family_sweep(fam, max_q2=2**20, L_level_k=(7, 14))
        checked += rep.checked
        if rep.mismatches:
            mism[fam] = rep.mismatches[:3]
        if fam.startswith("trinomial"):
            # k = 7 through f itself and the L level, k = 14 through the L level only
            levels = {(r["k"], r["level"]): r["oracle"] for r in rep.records}
            assert levels[(7, "oracle")] is False and levels[(7, "L")] is False
            assert levels[(14, "L")] is False
    dt = time.perf_counter() - t0
    acceptance("4 family sweeps (all families but odd II/IV)", not mism,
               f"{checked} tuples, {len(mism)} families with mismatches, {dt:.1f}s")
    assert not mism, mism


@pytest.mark.xfail(strict=True, reason="the gcd condition of odd cases II and IV fails for q = 1 mod 4")
def test_4_odd_II_IV_stated_condition(acceptance, odd_unstated_sweeps):
    counts = {f: (rep.checked, len(rep.mismatches)) for f, rep in odd_unstated_sweeps.items()}
    ok = all(m == 0 for _, m in counts.values())
    acceptance("4 family sweeps (odd II/IV, stated gcd condition)", ok,
               " ".join(f"{f}: {m}/{c} mismatches" for f, (c, m) in counts.items()))
    assert ok


def test_4_odd_II_IV_observed_rule(acceptance, odd_unstated_sweeps):
    bad = []
    for fam, rep in odd_unstated_sweeps.items():
        for rec in rep.records:
            ctx = ctx_for(rec["p"], rec["k"])
            if odd_observed_condition(ctx, fam, rec["params"]["m"]) != rec["oracle"]:
                bad.append((fam, rec["p"], rec["k"], rec["params"]))
        # every disagreement with the stated condition sits at q = 1 mod 4
        assert all((m["p"] ** m["k"]) % 4 == 1 for m in rep.mismatches)
    acceptance("4 family sweeps (odd II/IV, observed q mod 4 rule)", not bad, f"{len(bad)} mismatches")
    assert not bad


def test_5_commuting_identity(acceptance):
    bad = 0
    for q in (4, 8, 16, 9, 25, 49):
        ctx = ctx_for(*FIELDS[q])
        T = ctx.top
        traces = mu_traces(ctx)
        rng = np.random.default_rng(2000 + q)
        done = 0
        while done < 100:
            h = random_laurent(ctx, rng, -6, 6, 5)
            r = int(rng.integers(1, 4 * q))
            g, hx = g_values_on_mu(ctx, h, r)
            live = hx != 0
            if not live.any():
                continue
            R = big_R(ctx, reduce_h(ctx, h), r)
            vals, ok = R.eval_vec(traces)
            rhs = T.add_vec(g, T.pow_vec(g, q))
            bad += int(np.count_nonzero(live & ((vals != rhs) | ~ok)))
            done += 1
    acceptance("5 R(a) = g(x) + g(x)^q on mu", bad == 0, f"600 h, {bad} violations")
    assert bad == 0


def pair_h(ctx, h1, h2):
    return substitute_a(ctx, h1).shift(1) + substitute_a(ctx, h2)


def test_6_lemmas(acceptance):
    t0 = time.perf_counter()
    reps = run_all(kmax_quadratic=8, kmax_cubic=6, kmax_quartic=12, kmax_linear=5, kmax_norm=10, t_max=3)
    dt = time.perf_counter() - t0
    bad = [r.to_dict() for r in reps if not r.ok]
    acceptance("6 lemma checks", not bad and dt < 300,
               f"{sum(r.checked for r in reps)} cases, {len(bad)} failing reports, {dt:.1f}s")
    assert not bad
    assert dt < 300


@pytest.fixture(scope="module")
def roundtrip_samples():
    """(ctx, pair g, rebuilt g, division count) for 200 random pairs per field."""
    out = []
    for q in (8, 16, 9):
        ctx = ctx_for(*FIELDS[q])
        rng = np.random.default_rng(3000 + q)
        tau = UniPoly.var(ctx) * UniPoly.var(ctx) - 4
        n = 0
        while n < 200:
            h1, h2 = random_unipoly(ctx, rng), random_unipoly(ctx, rng)
            if h1.is_zero() and h2.is_zero():
                continue
            if n % 3 == 0:  # a gauge factor (a^2 - 4)^j makes the division loop run
                f = tau ** int(rng.integers(1, 3))
                h1, h2 = h1 * f, h2 * f
            n += 1
            h0 = pair_h(ctx, h1, h2)
            _, steps = strip_vanishing_factors(ctx, h0)
            pair = reduce_h(ctx, construct_h(ctx, h1, h2))
            g0, v0 = g_values_on_mu(ctx, h0, 1)
            g1, v1 = g_values_on_mu(ctx, pair_h(ctx, pair.h1, pair.h2), 1)
            live = (v0 != 0) & (v1 != 0)
            out.append((ctx, g0[live], g1[live], steps))
    return out


@pytest.mark.xfail(strict=True, reason="each division by x - 1/x negates g in odd characteristic")
def test_7_roundtrip_literal(acceptance, roundtrip_samples):
    bad = [(ctx.q, steps) for ctx, g0, g1, steps in roundtrip_samples if not np.array_equal(g0, g1)]
    acceptance("7 round trip preserves g on mu (literal)", not bad,
               f"{len(roundtrip_samples)} pairs, {len(bad)} violations (q, divisions): {bad[:5]}")
    assert not bad


def test_7_roundtrip_up_to_division_sign(acceptance, roundtrip_samples):
    bad = []
    for ctx, g0, g1, steps in roundtrip_samples:
        expect = g0 if ctx.p == 2 or steps % 2 == 0 else ctx.top.neg_vec(g0)
        if not np.array_equal(expect, g1):
            bad.append((ctx.q, steps))
    acceptance("7 round trip preserves g on mu up to (-1)^divisions", not bad,
               f"{len(roundtrip_samples)} pairs, {len(bad)} violations")
    assert not bad
