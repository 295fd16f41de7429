"""Permutation criteria for f(x) = x^r h(x^(q-1)) over F_{q^2}.

The chain of reductions is F_{q^2} -> mu_{q+1} (via x^(q-1)) -> {2, -2} u S
(via x + x^q).  ``check_conditions`` evaluates the four conditions that
together are equivalent to f permuting F_{q^2}:

  (i)   gcd(r, q-1) = 1
  (ii)  g(x) = x^r h(x)^(q-1) takes the value 1 only at x = 1 and -1 only at x = -1
  (iii) h has no zero on mu_{q+1}
  (iv)  R(a) permutes {2, -2} u S

The even and odd characteristic specialisations (psi, l(b), L(b) on T) live
here as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (
    DegenerateDenominator,
    EvenCharacteristic,
    HalfExponentInOddCharacteristic,
    InternalMismatch,
    NonPolynomialSquareRoot,
    OddCharacteristic,
    ZeroDenominatorPolynomial,
    ZeroPolynomial,
)
from .ff_core import sqrt_int
from .oracle import find_collision
from .poly import LaurentPoly, UniPoly, laurent_values_on_mu, to_integer_exponents
from .reduce import ReducedPair, dickson, normalize_on_mu, reduce_h


# ---------------------------------------------------------------------------
# rational maps

@dataclass(frozen=True)
class RationalMap:
    num: UniPoly
    den: UniPoly

    def eval(self, a: int) -> Optional[int]:
        d = self.den.eval(a)
        if d == 0:
            return None
        return self.num.ctx.mid.div(self.num.eval(a), d)

    def eval_vec(self, xs) -> tuple[np.ndarray, np.ndarray]:
        """(values, defined) over an array of mid-level encodings."""
        M = self.num.ctx.mid
        n = self.num.eval_vec(xs)
        d = self.den.eval_vec(xs)
        ok = d != 0
        return np.where(ok, M.mul_vec(n, M.inv_vec(d)), 0), ok

    def reciprocal_argument(self) -> "RationalMap":
        """The map b -> self(1/b), written over a common denominator."""
        m = max(self.num.degree, self.den.degree, 0)
        ctx = self.num.ctx

        def rev(poly):
            c = list(poly.coeffs) + [0] * (m + 1 - len(poly.coeffs))
            return UniPoly(ctx, reversed(c))

        return RationalMap(rev(self.num), rev(self.den))


# ---------------------------------------------------------------------------
# S and T

@dataclass(frozen=True)
class SSet:
    elems: tuple
    parity: str

    def __len__(self):
        return len(self.elems)

    def __iter__(self):
        return iter(self.elems)

    def __contains__(self, a):
        return int(a) in set(self.elems)

    def array(self) -> np.ndarray:
        return np.array(self.elems, dtype=np.int64)


@dataclass(frozen=True)
class TSet(SSet):
    pass


def _parity(ctx) -> str:
    return "even_char" if ctx.p == 2 else "odd_char"


def mu_traces(ctx) -> np.ndarray:
    """x + x^q for every x in mu_{q+1} (in mu order), as mid-level encodings."""
    def build():
        n = ctx.q + 1
        idx = np.arange(n, dtype=np.int64)
        mu = ctx.mu
        a = ctx.top.add_vec(mu, mu[(-idx) % n])
        if np.any(a >= ctx.q):
            raise InternalMismatch("x + x^q left F_q")
        return a
    return ctx.memo("mu_traces", build)


def _plus_minus_one_mask(ctx) -> np.ndarray:
    mu = ctx.mu
    return (mu == 1) | (mu == ctx.mid.neg(1))


def build_S(ctx) -> SSet:
    """S from its defining predicate, cross-checked against the image of mu_{q+1} minus {1, -1}."""
    M = ctx.mid
    xs = ctx.mid_array()
    if ctx.p == 2:
        nz = xs[1:]
        by_def = nz[ctx.trace_table[M.inv_vec(nz)] == 1]
    else:
        d = M.sub_vec(M.mul_vec(xs, xs), M.from_int(4))
        by_def = xs[ctx.eta_table[d] == -1]
    image = np.unique(mu_traces(ctx)[~_plus_minus_one_mask(ctx)])
    if not np.array_equal(np.sort(by_def), image):
        raise InternalMismatch("the two constructions of S disagree")
    return SSet(tuple(int(v) for v in image), _parity(ctx))


def build_T(ctx) -> TSet:
    M = ctx.mid
    xs = ctx.mid_array()
    if ctx.p == 2:
        elems = xs[ctx.trace_table == 1]
    else:
        eta = ctx.eta_table
        elems = xs[(eta[xs] == -1) & (eta[M.add_vec(xs, M.from_int(4))] == 1)]
    return TSet(tuple(int(v) for v in elems), _parity(ctx))


def S_with_poles(ctx) -> np.ndarray:
    """Sorted {2, -2} u S."""
    return np.unique(mu_traces(ctx))


# ---------------------------------------------------------------------------
# R(a)

def big_R(ctx, pair: ReducedPair, r: int) -> RationalMap:
    """R(a) = (h1^2 D_{r-2} + h2^2 D_r + 2 h1 h2 D_{r-1}) / (h1^2 + h1 h2 a + h2^2)."""
    h1, h2 = pair.h1, pair.h2
    a = UniPoly.var(ctx)
    den = h1 * h1 + h1 * h2 * a + h2 * h2
    if den.is_zero():
        raise ZeroDenominatorPolynomial("h1^2 + a h1 h2 + h2^2 vanishes identically")
    num = h1 * h1 * dickson(ctx, r - 2) + h2 * h2 * dickson(ctx, r) + h1 * h2 * dickson(ctx, r - 1) * 2
    return RationalMap(num, den)


def g_values_on_mu(ctx, h: LaurentPoly, r: int) -> tuple[np.ndarray, np.ndarray]:
    """(g(x), h(x)) over mu order, with g(x) = x^r h(1/x)/h(x) and g = 0 where h(x) = 0.

    h(1/x) equals h(x)^q on mu_{q+1} because the coefficients of h lie in F_q.
    """
    T = ctx.top
    n = ctx.q + 1
    idx = np.arange(n, dtype=np.int64)
    hx = laurent_values_on_mu(ctx, h)
    hinv = hx[(-idx) % n]
    xr = ctx.mu[(idx * (r % n)) % n]
    safe = np.where(hx == 0, 1, hx)
    if T.log_np is None:
        T.build_tables()
    if T.log_np is not None:
        inv = T.exp_np[(T.order - T.log_np[safe]) % T.order]
    else:  # pragma: no cover - fields beyond the table limit
        inv = np.array([T.inv(int(v)) for v in safe], dtype=np.int64)
    g = T.mul_vec(T.mul_vec(xr, hinv), inv)
    return np.where(hx == 0, 0, g), hx


def R_values(ctx, h: LaurentPoly, r: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(domain, R values, defined-mask) on {2, -2} u S, evaluated through the reduced pair."""
    M = ctx.mid
    n = ctx.q + 1
    traces = mu_traces(ctx)
    dom, rep = np.unique(traces, return_index=True)
    pair = reduce_h(ctx, normalize_on_mu(ctx, h))
    h1 = pair.h1.eval_vec(dom)
    h2 = pair.h2.eval_vec(dom)
    mu = ctx.mu
    T = ctx.top

    def dick(e):
        # D_e(a) = x^e + x^-e at the representative x of a
        v = T.add_vec(mu[(rep * e) % n], mu[(-rep * e) % n])
        return v

    rr = r % n
    d_r2, d_r, d_r1 = dick(rr - 2), dick(rr), dick(rr - 1)
    h11, h22, h12 = M.mul_vec(h1, h1), M.mul_vec(h2, h2), M.mul_vec(h1, h2)
    num = M.add_vec(M.add_vec(M.mul_vec(h11, d_r2), M.mul_vec(h22, d_r)),
                    M.mul_vec(M.add_vec(h12, h12), d_r1))
    den = M.add_vec(M.add_vec(h11, M.mul_vec(h12, dom)), h22)
    ok = den != 0
    vals = np.where(ok, M.mul_vec(num, M.inv_vec(den)), 0)
    return dom, vals, ok


@dataclass
class VerifyReport:
    gcd_ok: bool
    g_fixed_ok: bool
    h_nonzero_ok: bool
    r_permutes_ok: bool
    oracle_verdict: Optional[bool] = None
    witnesses: dict = field(default_factory=dict)
    doubled: bool = False

    @property
    def conditions_ok(self) -> bool:
        return self.gcd_ok and self.g_fixed_ok and self.h_nonzero_ok and self.r_permutes_ok

    @property
    def consistent(self) -> bool:
        return self.oracle_verdict is None or self.oracle_verdict == self.conditions_ok

    def to_dict(self) -> dict:
        return {
            "gcd_ok": self.gcd_ok,
            "g_fixed_ok": self.g_fixed_ok,
            "h_nonzero_ok": self.h_nonzero_ok,
            "r_permutes_ok": self.r_permutes_ok,
            "oracle": self.oracle_verdict,
            "witnesses": self.witnesses,
        }


def check_conditions(ctx, h: LaurentPoly, r: int, run_oracle: bool = False) -> VerifyReport:
    if h.is_zero():
        raise ZeroPolynomial("h must be nonzero")
    doubled = False
    if h.has_half_exponents():
        if ctx.p != 2:
            raise HalfExponentInOddCharacteristic("half exponents need characteristic 2")
        # f(x^2) = x^(2r) h(x^(2(q-1))) is a permutation iff f is
        h, doubled = to_integer_exponents(h)
        r = 2 * r
    q = ctx.q
    T = ctx.top
    mu = ctx.mu
    witnesses: dict[str, list] = {}

    gcd_ok = math.gcd(r, q - 1) == 1
    if not gcd_ok:
        witnesses["gcd"] = [r, q - 1]

    g, hx = g_values_on_mu(ctx, h, r)
    zero = hx == 0
    h_nonzero_ok = not zero.any()
    if not h_nonzero_ok:
        witnesses["h_nonzero"] = [int(v) for v in mu[zero]]

    one, minus_one = 1, T.neg(1)
    bad = (~zero) & (((g == one) & (mu != one)) | ((g == minus_one) & (mu != minus_one)))
    g_fixed_ok = not bad.any()
    if not g_fixed_ok:
        witnesses["g_fixed"] = [int(v) for v in mu[bad]]

    dom, vals, ok = R_values(ctx, h, r)
    rw = []
    if not ok.all():
        rw += [["degenerate", int(a)] for a in dom[~ok]]
    else:
        inside = np.isin(vals, dom)
        if not inside.all():
            rw += [["escape", int(a), int(v)] for a, v in zip(dom[~inside], vals[~inside])]
        col = find_collision(vals)
        if col is not None:
            i, j = col
            rw.append(["collision", int(dom[i]), int(dom[j])])
    r_permutes_ok = not rw
    if rw:
        witnesses["r_permutes"] = rw

    report = VerifyReport(gcd_ok, g_fixed_ok, h_nonzero_ok, r_permutes_ok,
                          witnesses=witnesses, doubled=doubled)
    if run_oracle:
        from .construct import assemble_f
        from .oracle import check_f_permutes
        try:
            af = assemble_f(ctx, h, r)
        except ZeroPolynomial:
            # h vanishes on all of mu_{q+1}, so f is the zero map
            report.oracle_verdict = False
        else:
            report.oracle_verdict = check_f_permutes(ctx, af).is_permutation
    return report


# ---------------------------------------------------------------------------
# even characteristic

def even_psi(pair: ReducedPair) -> RationalMap:
    """psi(a) = h1 / (h1 + h2)."""
    ctx = pair.h1.ctx
    if ctx.p != 2:
        raise OddCharacteristic("even_psi needs characteristic 2")
    den = pair.h1 + pair.h2
    if den.is_zero():
        raise DegenerateDenominator("h1 + h2 vanishes identically")
    return RationalMap(pair.h1, den)


def even_l(pair: ReducedPair) -> RationalMap:
    """l(b) = psi(1/b) over a common denominator."""
    return even_psi(pair).reciprocal_argument()


def even_L_values(ctx, lvals: np.ndarray, bs: np.ndarray) -> np.ndarray:
    """L(b) = b + l(b) + l(b)^2."""
    M = ctx.mid
    return M.add_vec(M.add_vec(bs, lvals), M.mul_vec(lvals, lvals))


def check_even_specialization(ctx, h: LaurentPoly) -> dict:
    """The characteristic-2, r = 1 criterion phrased on T.

    f = x h(x^(q-1)) permutes iff h1(1/b) != h2(1/b) on T, h(1) != 0, and
    L(b) = b + l(b) + l(b)^2 permutes T.
    """
    if ctx.p != 2:
        raise OddCharacteristic("even specialisation needs characteristic 2")
    h, doubled = to_integer_exponents(h)
    if doubled:
        raise ValueError("the T-level criterion is stated for r = 1 and integer exponents")
    M = ctx.mid
    pair = reduce_h(ctx, normalize_on_mu(ctx, h))
    Tset = build_T(ctx).array()
    inv_b = M.inv_vec(Tset)
    h1 = pair.h1.eval_vec(inv_b)
    h2 = pair.h2.eval_vec(inv_b)
    cond1 = bool(np.all(h1 != h2))
    cond2 = h.coefficient_sum() != 0
    cond3 = False
    if cond1:
        lv = M.mul_vec(h1, M.inv_vec(M.add_vec(h1, h2)))
        L = even_L_values(ctx, lv, Tset)
        cond3 = bool(np.all(np.isin(L, Tset)) and np.unique(L).size == L.size)
    return {"h1_ne_h2": cond1, "h_at_1": cond2, "L_permutes_T": cond3,
            "permutes": cond1 and cond2 and cond3}


# ---------------------------------------------------------------------------
# odd characteristic

def odd_psi(pair: ReducedPair) -> RationalMap:
    """psi(a) = (h1^2 - h2^2) / (a h1 h2 + h1^2 + h2^2)."""
    ctx = pair.h1.ctx
    if ctx.p == 2:
        raise EvenCharacteristic("odd_psi needs odd characteristic")
    h1, h2 = pair.h1, pair.h2
    den = h1 * h2 * UniPoly.var(ctx) + h1 * h1 + h2 * h2
    if den.is_zero():
        raise DegenerateDenominator("a h1 h2 + h1^2 + h2^2 vanishes identically")
    return RationalMap(h1 * h1 - h2 * h2, den)


def odd_R_from_psi(ctx, psi: RationalMap) -> RationalMap:
    """(a^2 - 4) psi^2 + 4, the square of the r = 1 map R(a)."""
    a = UniPoly.var(ctx)
    n, d = psi.num, psi.den
    return RationalMap((a * a - 4) * n * n + d * d * 4, d * d)


def odd_L_values(ctx, lvals: np.ndarray, bs: np.ndarray) -> np.ndarray:
    """L(b) = b l(b)^2."""
    M = ctx.mid
    return M.mul_vec(bs, M.mul_vec(lvals, lvals))


def epsilon_values(ctx, bs: np.ndarray) -> np.ndarray:
    """A square root of b + 4 for each b (smaller encoding); b must lie in T."""
    M = ctx.mid
    four = M.from_int(4)
    return np.array([sqrt_int(M, M.add(int(b), four)) for b in bs], dtype=np.int64)


def poly_sqrt(P: UniPoly) -> UniPoly:
    """Exact square root of a polynomial over F_q (odd q); leading coefficient is the
    smaller-encoding root.  Raises NonPolynomialSquareRoot when none exists."""
    ctx = P.ctx
    M = ctx.mid
    if P.is_zero():
        return P
    if P.degree % 2:
        raise NonPolynomialSquareRoot("odd degree")
    n = P.degree // 2
    lead = sqrt_int(M, P.lead())
    if lead is None:
        raise NonPolynomialSquareRoot("leading coefficient is not a square")
    s = [0] * (n + 1)
    s[n] = lead
    inv2l = M.inv(M.add(lead, lead))
    c = P.coeffs
    for i in range(n - 1, -1, -1):
        acc = c[n + i]
        for j in range(i + 1, n):
            l_ = n + i - j
            if i < l_ <= n:
                acc = M.sub(acc, M.mul(s[j], s[l_]))
        s[i] = M.mul(acc, inv2l)
    root = UniPoly(ctx, s)
    if root * root != P:
        raise NonPolynomialSquareRoot("not a perfect square")
    return root


def invert_H_from_psi(ctx, psi: RationalMap, branch: str = "plus") -> RationalMap:
    """Solve (psi - 1) H^2 + a psi H + psi + 1 = 0 for H = h1/h2.

    With psi = N/D the discriminant is ((a^2-4) N^2 + 4 D^2) / D^2 and
    H = (-a N +/- s) / (2N - 2D) where s^2 = (a^2-4) N^2 + 4 D^2.
    """
    if ctx.p == 2:
        raise EvenCharacteristic("invert_H_from_psi needs odd characteristic")
    if branch not in ("plus", "minus"):
        raise ValueError("branch must be 'plus' or 'minus'")
    a = UniPoly.var(ctx)
    N, D = psi.num, psi.den
    s = poly_sqrt((a * a - 4) * N * N + D * D * 4)
    if branch == "minus":
        s = -s
    h1 = -(a * N) + s
    h2 = N * 2 - D * 2
    if h2.is_zero():
        raise DegenerateDenominator("psi = 1 identically")
    return RationalMap(h1, h2)


def check_L_on_T(ctx, l: Callable[[np.ndarray], np.ndarray]):
    """Whether L(b) permutes T, for l given as a vectorised callable on T."""
    from .oracle import check_L_permutes_T
    return check_L_permutes_T(ctx, l, _parity(ctx))
