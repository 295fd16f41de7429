"""Exhaustive checks of the characteristic-2 field lemmas the constructions rely on.

Each check compares a closed-form predicate against brute force over a small
field and returns a LemmaReport with the number of cases and any violations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import OddCharacteristic
from .ff_core import FieldCtx, cubic_unique_root, norm_to_subfield, quadratic_solvable

CHUNK = 1 << 22  # entries per 2D block


@dataclass
class LemmaReport:
    name: str
    k: int
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"lemma": self.name, "k": self.k, "checked": self.checked,
                "violations": len(self.violations), "witnesses": self.violations[:5]}


def _need_even(ctx):
    if ctx.p != 2:
        raise OddCharacteristic("characteristic-2 lemma")


def check_quadratic_lemma(ctx: FieldCtx) -> LemmaReport:
    """x^2 + u x + v has a root in F_q iff Tr(v/u^2) = 0 (u != 0)."""
    _need_even(ctx)
    M = ctx.mid
    xs = ctx.mid_array()
    x2 = M.mul_vec(xs, xs)
    rep = LemmaReport("quadratic", ctx.k)
    for u in range(1, ctx.q):
        has_root = np.zeros(ctx.q, dtype=bool)
        has_root[M.add_vec(x2, M.mul_vec(u, xs))] = True  # v = x^2 + u x has the root x
        for v in range(ctx.q):
            rep.checked += 1
            if quadratic_solvable(ctx, u, v) != bool(has_root[v]):
                rep.violations.append((u, v))
    return rep


def check_cubic_lemma(ctx: FieldCtx) -> LemmaReport:
    """x^3 + u x + v has exactly one root in F_q iff Tr(u^3/v^2 + 1) != 0 (v != 0)."""
    _need_even(ctx)
    M = ctx.mid
    xs = ctx.mid_array()
    x3 = M.pow_vec(xs, 3)
    rep = LemmaReport("cubic", ctx.k)
    for u in range(ctx.q):
        counts = np.bincount(M.add_vec(x3, M.mul_vec(u, xs)), minlength=ctx.q)
        for v in range(1, ctx.q):
            rep.checked += 1
            if cubic_unique_root(ctx, u, v) != (counts[v] == 1):
                rep.violations.append((u, v))
    return rep


def check_quartic_lemma(ctx: FieldCtx) -> LemmaReport:
    """For every b with Tr(b) = 1, x^4 + x^3 + b^2 x^2 + b^2 x + b^5 has no root in F_q."""
    _need_even(ctx)
    M = ctx.mid
    xs = ctx.mid_array()
    x43 = M.add_vec(M.pow_vec(xs, 4), M.pow_vec(xs, 3))
    x21 = M.add_vec(M.mul_vec(xs, xs), xs)
    T = xs[ctx.trace_table == 1]
    rep = LemmaReport("quartic", ctx.k)
    rows = max(1, CHUNK // ctx.q)
    for start in range(0, T.size, rows):
        b = T[start:start + rows, None]
        P = M.add_vec(M.add_vec(x43[None, :], M.mul_vec(M.mul_vec(b, b), x21[None, :])), M.pow_vec(b, 5))
        hit = (P == 0).any(axis=1)
        rep.checked += int(b.size)
        rep.violations += [int(v) for v in b[hit, 0]]
    return rep


def check_linearized_T_equivalence(ctx: FieldCtx, t_max: int = 3) -> LemmaReport:
    """For every l(b) = sum_{i<=t} alpha_i b^(2^i), t <= t_max: L = b + l + l^2 permutes
    T = {Tr(b) = 1} iff L permutes F_q."""
    _need_even(ctx)
    M = ctx.mid
    q = ctx.q
    n = min(t_max, ctx.k - 1) + 1
    xs = ctx.mid_array()
    pows = [xs]
    for _ in range(n - 1):
        pows.append(M.mul_vec(pows[-1], pows[-1]))
    tmask = ctx.trace_table == 1
    Tidx = np.nonzero(tmask)[0]
    rep = LemmaReport("linearized_T", ctx.k)
    total = q**n
    rows = max(1, CHUNK // q)
    for start in range(0, total, rows):
        codes = np.arange(start, min(total, start + rows), dtype=np.int64)
        alphas = [(codes // q**i) % q for i in range(n)]
        lv = np.zeros((codes.size, q), dtype=np.int64)
        for i in range(n):
            lv = M.add_vec(lv, M.mul_vec(alphas[i][:, None], pows[i][None, :]))
        L = M.add_vec(M.add_vec(xs[None, :], lv), M.mul_vec(lv, lv))
        on_field = (L == 0).sum(axis=1) == 1
        LT = L[:, Tidx]
        inside = tmask[LT].all(axis=1)
        s = np.sort(LT, axis=1)
        distinct = (s[:, 1:] != s[:, :-1]).all(axis=1) if Tidx.size > 1 else np.ones(codes.size, bool)
        on_T = inside & distinct
        rep.checked += int(codes.size)
        bad = np.nonzero(on_T != on_field)[0]
        rep.violations += [[int(a[j]) for a in alphas] for j in bad]
    return rep


def check_binomial_norm_lemma(ctx: FieldCtx, r: int) -> LemmaReport:
    """x^(2^r) + c x permutes F_{2^k} iff N_{2^k/2^d}(c) != 1, d = gcd(k, r)."""
    _need_even(ctx)
    M = ctx.mid
    q = ctx.q
    d = math.gcd(ctx.k, r)
    xs = ctx.mid_array()
    xr = M.pow_vec(xs, 2**r)
    cs = ctx.mid_array()
    rep = LemmaReport(f"binomial_norm_r{r}", ctx.k)
    rows = max(1, CHUNK // q)
    for start in range(0, q, rows):
        c = cs[start:start + rows]
        V = M.add_vec(xr[None, :], M.mul_vec(c[:, None], xs[None, :]))
        s = np.sort(V, axis=1)
        perm = (s[:, 1:] != s[:, :-1]).all(axis=1)
        for cv, pv in zip(c.tolist(), perm.tolist()):
            rep.checked += 1
            if (norm_to_subfield(ctx, cv, d) != 1) != pv:
                rep.violations.append(cv)
    return rep


def run_all(kmax_quadratic=8, kmax_cubic=6, kmax_quartic=12, kmax_linear=5, kmax_norm=10,
            t_max: int = 3) -> list[LemmaReport]:
    """Every lemma over every k in range, characteristic 2."""
    out = []
    ctxs: dict[int, FieldCtx] = {}

    def C(k):
        if k not in ctxs:
            ctxs[k] = FieldCtx(2, k)
        return ctxs[k]

    for k in range(1, kmax_quadratic + 1):
        out.append(check_quadratic_lemma(C(k)))
    for k in range(1, kmax_cubic + 1):
        out.append(check_cubic_lemma(C(k)))
    for k in range(1, kmax_quartic + 1):
        out.append(check_quartic_lemma(C(k)))
    for k in range(1, kmax_linear + 1):
        out.append(check_linearized_T_equivalence(C(k), t_max))
    for k, r in product(range(1, kmax_norm + 1), range(1, kmax_norm + 1)):
        if r <= k:
            out.append(check_binomial_norm_lemma(C(k), r))
    return out
