"""Named families of permutation polynomials x^r h(x^(q-1)) with their predicted status.

Even-characteristic families are stored in the squared form f(x^2), i.e. as
(H, r = 2) with H(y) a Laurent polynomial in y = x^(q-1); this is a
permutation iff the original f is.  Each family also knows how to enumerate
(or sample) its admissible parameters for a given field.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

import numpy as np

from .construct import AssembledPP, a_power, assemble_f, binomial_row_arrays, binomial_row_mod_p
from .errors import InvalidParams
from .ff_core import is_prime, norm_to_subfield
from .poly import LaurentPoly

DEFAULT_SAMPLES = 24


def _y(ctx, e: int, c: int = 1) -> LaurentPoly:
    return LaurentPoly.monomial(ctx, c, e)


def _laurent(ctx, exps, coeffs=None) -> LaurentPoly:
    coeffs = coeffs or [1] * len(exps)
    return LaurentPoly(ctx, list(zip(exps, coeffs)))


def _frob(ctx, c: int, i: int) -> int:
    """c^(2^i) in F_{2^k}, i taken mod k."""
    return ctx.mid.pow(c, pow(2, i % ctx.k))


def x_minus_xinv_power(ctx, n: int) -> LaurentPoly:
    """(x - 1/x)^n."""
    M = ctx.mid
    row = binomial_row_mod_p(n, ctx.p)
    return LaurentPoly(ctx, [(n - 2 * i, M.from_int(-c if i % 2 else c)) for i, c in row.items()])


def u_poly(ctx, n: int) -> LaurentPoly:
    """U_n(x) = x^n + x^(n-2) + ... + 1 for even n >= 0."""
    if n < 0 or n % 2:
        raise InvalidParams("U_n needs an even n >= 0")
    return _laurent(ctx, list(range(0, n + 1, 2)))


# ---------------------------------------------------------------------------
# family records

@dataclass(frozen=True)
class Family:
    name: str
    parity: str  # "even_char" or "odd_char"
    build: Callable  # (ctx, params) -> (h, r, predicted)
    params: Callable  # (ctx, rng, budget) -> iterator of param dicts
    fields: Callable  # (max_q2) -> iterator of (p, k)
    note: str = ""


def _even_fields(pred=lambda k: True, kmin=1):
    def gen(max_q2):
        k = kmin
        while 4**k <= max_q2:
            if pred(k):
                yield 2, k
            k += 1
    return gen


def _odd_fields(max_q2, primes_limit: Optional[int] = None):
    p = 3
    while p * p <= max_q2 and (primes_limit is None or p <= primes_limit):
        if is_prime(p):
            k = 1
            while p ** (2 * k) <= max_q2:
                yield p, k
                k += 1
        p += 2


def _no_params(ctx, rng, budget):
    yield {}


# -- fixed-shape even families ------------------------------------------------

def _pp_s_minus_1(ctx, params):
    _need_even(ctx)
    return _laurent(ctx, [2, 1, -1]), 1, True


def _pp_s_minus_2(ctx, params):
    _need_even(ctx)
    return _laurent(ctx, [3, 2, -1, -2, 0]), 1, True


def _y_plus_a_power(ctx, n: int) -> LaurentPoly:
    """y + (y + 1/y)^n."""
    return _y(ctx, 1) + a_power(ctx, n)


def _s3(ctx, params):
    _need_even(ctx)
    k = ctx.k
    if k % 2 == 0:
        raise InvalidParams("the s3 family needs k odd")
    s = (2 ** (k + 1) - 1) // 3
    return _y_plus_a_power(ctx, 2 * s - 1), 2, True


def _s4(ctx, params):
    _need_even(ctx)
    k = ctx.k
    if k % 2:
        raise InvalidParams("the s4 family needs k even")
    m = k // 2
    return _y_plus_a_power(ctx, 2**k - 2**m - 1), 2, True


def _q4(ctx, params):
    """Over F_{Q^2} with Q = 2^K, K = 2k', k' even: s = (2Q - sqrt(Q) - 1)/3."""
    _need_even(ctx)
    K = ctx.k
    if K % 4:
        raise InvalidParams("the q^4 family needs k divisible by 4")
    Q = 2**K
    s = (2 * Q - 2 ** (K // 2) - 1) // 3
    return _y_plus_a_power(ctx, 2 * s - 1), 2, True


def _trinomial_b4_b8(ctx, params):
    _need_even(ctx)
    return _laurent(ctx, [7, 5, 3, -1, -3, -5, -7]), 2, ctx.k % 7 != 0


def _trinomial_b2_b8(ctx, params):
    _need_even(ctx)
    return _laurent(ctx, [7, 3, -1, -5, -7]), 2, ctx.k % 7 != 0


TRINOMIAL_ALPHAS = {
    "trinomial_b_b4_b8": [0, 0, 1],  # l(b) = b^4
    "trinomial_b_b2_b8": [0, 1, 1],  # l(b) = b^2 + b^4
}


# -- linearized families ------------------------------------------------------

def linearized_H(ctx, alphas) -> LaurentPoly:
    """e y^2 + e + (y + 1/y)^(2^(t+1) - 1) + alpha_t y, e = sum_{i<t} alpha_i (y + 1/y)^(2^(t+1) - 2^(i+1) - 1)."""
    t = len(alphas) - 1
    e = LaurentPoly.zero(ctx)
    for i, al in enumerate(alphas[:-1]):
        if al:
            e = e + a_power(ctx, 2 ** (t + 1) - 2 ** (i + 1) - 1).scale(al)
    return e.shift(2) + e + a_power(ctx, 2 ** (t + 1) - 1) + _y(ctx, 1, alphas[-1])


def _check_alphas(ctx, alphas):
    _need_even(ctx)
    alphas = [int(a) for a in alphas]
    if not alphas or len(alphas) > ctx.k:
        raise InvalidParams("need 1 <= t + 1 <= k coefficients")
    if alphas[-1] == 0:
        raise InvalidParams("alpha_t must be nonzero")
    if any(not 0 <= a < ctx.q for a in alphas):
        raise InvalidParams("coefficients must be encodings of F_q")
    return alphas


def _linearized(ctx, params):
    from .oracle import check_linearized_perm
    alphas = _check_alphas(ctx, params["alphas"])
    return linearized_H(ctx, alphas), 2, check_linearized_perm(ctx, alphas, cross_check=False)


def _random_nonzero(ctx, rng):
    return rng.randrange(1, ctx.q)


def _linearized_params(ctx, rng, budget):
    q, k = ctx.q, ctx.k
    total = sum((q - 1) * q**t for t in range(k))
    if total <= budget:
        for t in range(k):
            for tail in range(1, q):
                for head in range(q**t):
                    yield {"alphas": _digits(head, q, t) + [tail]}
        return
    for _ in range(budget):
        t = rng.randrange(k)
        yield {"alphas": [rng.randrange(q) for _ in range(t)] + [_random_nonzero(ctx, rng)]}


def _digits(n, base, length):
    out = []
    for _ in range(length):
        n, r = divmod(n, base)
        out.append(r)
    return out


def monomial_alphas(ctx, case: str, t: Optional[int] = None, j: Optional[int] = None,
                    alpha: Optional[int] = None) -> list[int]:
    """Coefficient vectors for which b + l(b) + l(b)^2 is a monomial."""
    k = ctx.k
    if case == "i":
        if not alpha:
            raise InvalidParams("case (i) needs alpha_0 != 0")
        return [_frob(ctx, alpha, i) for i in range(k)]
    if case == "ii":
        if not alpha or j is None or not 1 <= j <= k - 1:
            raise InvalidParams("case (ii) needs 1 <= j <= k-1 and alpha_j != 0")
        return [ctx.mid.add(1, _frob(ctx, alpha, k + i - j)) if i < j else _frob(ctx, alpha, i - j)
                for i in range(k)]
    if case == "iii":
        if t is None or not 0 <= t <= k - 2:
            raise InvalidParams("case (iii) needs t <= k-2")
        return [1] * (t + 1)
    raise InvalidParams(f"unknown monomial case {case!r}")


def _linearized_monomial(ctx, params):
    alphas = _check_alphas(ctx, monomial_alphas(ctx, params["case"], params.get("t"),
                                                 params.get("j"), params.get("alpha")))
    return linearized_H(ctx, alphas), 2, True


def _capped(items, rng, budget):
    items = list(items)
    if len(items) <= budget:
        return items
    return rng.sample(items, budget)


def _monomial_params(ctx, rng, budget):
    k, q = ctx.k, ctx.q
    out = [{"case": "i", "alpha": a} for a in range(1, q)]
    out += [{"case": "ii", "j": j, "alpha": a} for j in range(1, k) for a in range(1, q)]
    out += [{"case": "iii", "t": t} for t in range(0, k - 1)]
    yield from _capped(out, rng, budget)


def binomial_alphas(ctx, case: str, params) -> tuple[list[int], int, int]:
    """(alphas, c, d) for the four binomial cases; L permutes iff N_{2^k/2^d}(c) != 1."""
    M = ctx.mid
    k = ctx.k
    fr = lambda c, i: _frob(ctx, c, i)
    if case == "i":
        j, a0, aj = params["j"], params["alpha0"], params["alphaj"]
        if not 1 <= j <= k - 1 or aj == 0:
            raise InvalidParams("case (i) needs 1 <= j <= k-1 and alpha_j != 0")
        A = M.add(M.add(fr(aj, k - j), a0), 1)
        B = M.add(aj, fr(a0, j))
        if A == 0 or B == 0:
            raise InvalidParams("case (i) side conditions fail")
        alphas = [fr(a0, i) if i < j else fr(aj, i - j) for i in range(k)]
        return alphas, M.div(A, B), math.gcd(k, j)
    if case == "ii":
        j1, j2, a1, a2 = params["j1"], params["j2"], params["alpha1"], params["alpha2"]
        if not 1 <= j1 < j2 <= k - 1 or a1 == 0 or a2 == 0:
            raise InvalidParams("case (ii) needs 1 <= j1 < j2 <= k-1 and nonzero alphas")
        A = M.add(M.add(a1, 1), fr(a2, k - j2 + j1))
        B = M.add(a2, fr(a1, j2 - j1))
        if A == 0 or B == 0:
            raise InvalidParams("case (ii) side conditions fail")
        alphas = []
        for i in range(k):
            if i < j1:
                alphas.append(M.add(1, fr(a2, k - j2 + i)))
            elif i < j2:
                alphas.append(fr(a1, i - j1))
            else:
                alphas.append(fr(a2, i - j2))
        return alphas, M.div(A, B), math.gcd(j2 - j1, k)
    if case == "iii":
        t, a0 = params["t"], params["alpha0"]
        if not 0 <= t <= k - 2 or a0 in (0, 1):
            raise InvalidParams("case (iii) needs t <= k-2 and alpha_0 not in {0, 1}")
        alphas = [fr(a0, i) for i in range(t + 1)]
        return alphas, M.div(M.add(1, a0), fr(a0, t + 1)), math.gcd(t + 1, k)
    if case == "iv":
        t, j, aj = params["t"], params["j"], params["alphaj"]
        if not 1 <= j <= t <= k - 2 or aj in (0, 1):
            raise InvalidParams("case (iv) needs 1 <= j <= t <= k-2 and alpha_j not in {0, 1}")
        alphas = [1 if i < j else fr(aj, i - j) for i in range(t + 1)]
        return alphas, M.div(M.add(aj, 1), fr(aj, t - j + 1)), math.gcd(t + 1 - j, k)
    raise InvalidParams(f"unknown binomial case {case!r}")


def _linearized_binomial(ctx, params):
    _need_even(ctx)
    alphas, c, d = binomial_alphas(ctx, params["case"], params)
    alphas = _check_alphas(ctx, alphas)
    return linearized_H(ctx, alphas), 2, norm_to_subfield(ctx, c, d) != 1


def _binomial_params(ctx, rng, budget):
    k, q = ctx.k, ctx.q

    def admissible(case, prm):
        try:
            binomial_alphas(ctx, case, prm)
            return True
        except InvalidParams:
            return False

    small = q * q * k * k <= 4 * budget
    cand = []
    for j in range(1, k):
        if small:
            cand += [{"case": "i", "j": j, "alpha0": a0, "alphaj": aj}
                     for a0 in range(q) for aj in range(1, q)]
        else:
            cand += [{"case": "i", "j": j, "alpha0": rng.randrange(q), "alphaj": rng.randrange(1, q)}
                     for _ in range(budget // k + 1)]
    for j1 in range(1, k):
        for j2 in range(j1 + 1, k):
            if small:
                cand += [{"case": "ii", "j1": j1, "j2": j2, "alpha1": a1, "alpha2": a2}
                         for a1 in range(1, q) for a2 in range(1, q)]
            else:
                cand += [{"case": "ii", "j1": j1, "j2": j2, "alpha1": rng.randrange(1, q),
                          "alpha2": rng.randrange(1, q)} for _ in range(budget // (k * k) + 1)]
    for t in range(0, k - 1):
        cand += [{"case": "iii", "t": t, "alpha0": a} for a in range(2, q)]
        for j in range(1, t + 1):
            cand += [{"case": "iv", "t": t, "j": j, "alphaj": a} for a in range(2, q)]
    out = [prm for prm in cand if admissible(prm["case"], prm)]
    yield from _capped(out, rng, budget)


def _binomial_corollary(ctx, params):
    _need_even(ctx)
    k = ctx.k
    if k < 4 or k % 3:
        raise InvalidParams("the corollary needs k >= 4 and k divisible by 3")
    a = int(params["alpha"])
    if a in (0, 1) or not 0 <= a < ctx.q:
        raise InvalidParams("alpha must lie in F_q minus {0, 1}")
    M = ctx.mid
    a1 = M.add(a, 1)
    a2 = M.add(M.mul(a, a), 1)
    a4 = M.add(M.pow(a, 4), 1)
    H = _laurent(ctx, [7, 5, 3, 1, -1, -3, -5, -7], [a1, a2, a1, a4, a1, a2, a1, 1])
    c = M.div(a1, M.pow(a, 8))
    return H, 2, norm_to_subfield(ctx, c, 3) != 1


def _corollary_params(ctx, rng, budget):
    yield from ({"alpha": a} for a in _capped(range(2, ctx.q), rng, budget))


# -- odd characteristic -------------------------------------------------------

class _MuAccumulator:
    """Prime-field coefficients indexed by exponent mod q+1.

    The odd families have exponents up to p^(2k); on mu_{q+1} (and hence in
    the assembled f) only the residue mod q+1 matters, so terms are folded as
    they are added.
    """

    def __init__(self, ctx):
        self.ctx = ctx
        self.n = ctx.q + 1
        self.acc = np.zeros(self.n, dtype=np.int64)

    def add(self, exps, coeffs):
        np.add.at(self.acc, np.asarray(exps, dtype=np.int64) % self.n, np.asarray(coeffs, dtype=np.int64))

    def add_row(self, row, top: int, shift: int = 0, sign: int = 1, alternate: bool = False):
        """sign * sum_i C_i x^(top - 2i + shift), (i, C_i) from binomial_row_arrays,
        (-1)^i if alternate."""
        i, c = row
        if alternate:
            c = np.where(i % 2 == 1, -c, c)
        self.add(top - 2 * i + shift, sign * c)

    def add_progression(self, start: int, stop: int, shift: int = 0, sign: int = 1):
        """sign * (x^start + x^(start+2) + ... + x^stop) * x^shift."""
        e = np.arange(start, stop + 1, 2, dtype=np.int64)
        self.add(e + shift, np.full(e.size, sign))

    def poly(self) -> LaurentPoly:
        p, n, M = self.ctx.p, self.n, self.ctx.mid
        c = self.acc % p
        terms = []
        for r in np.nonzero(c)[0].tolist():
            e = r - n if 2 * r > n else r
            terms.append((e, M.from_int(int(c[r]))))
        return LaurentPoly(self.ctx, terms)


def _odd_h(ctx, m: int, case: str) -> LaurentPoly:
    """h of the odd families, with exponents folded into (-(q+1)/2, (q+1)/2]."""
    p = ctx.p
    N = p**m
    acc = _MuAccumulator(ctx)
    sgn = -1 if case in ("III", "IV") else 1
    Mexp = N - 2 if case in ("I", "III") else N - 1
    D = binomial_row_arrays(Mexp, p)
    # sgn * (-(x^2 + 1) D + 2 D) = sgn * (D - x^2 D) with D = (x - 1/x)^Mexp
    acc.add_row(D, Mexp, shift=2, sign=-sgn, alternate=True)
    acc.add_row(D, Mexp, shift=0, sign=sgn, alternate=True)
    if case in ("I", "III"):
        # x U_{N-1} - x^(-(N-2)) U_{N-3}
        acc.add_progression(0, N - 1, shift=1)
        acc.add_progression(0, N - 3, shift=-(N - 2), sign=-1)
    else:
        # -x (x + 1/x)^N - 2
        acc.add_row(binomial_row_arrays(N, p), N, shift=1, sign=-1)
        acc.add([0], [-2])
    return acc.poly()


def _odd_gcd_condition(n: int, q: int) -> bool:
    return math.gcd(n, q - 1) == math.gcd(n, (q - 1) // 2)


def _odd_family(case):
    def build(ctx, params):
        if ctx.p == 2:
            raise InvalidParams("odd-characteristic family")
        m = int(params["m"])
        if m < 1:
            raise InvalidParams("m must be positive")
        q = ctx.q
        if case in ("I", "II"):
            n = (ctx.p**m - 1) // 2
        else:
            n = (q + ctx.p**m - 2) // 2
        return _odd_h(ctx, m, case), 1, _odd_gcd_condition(n, q)
    return build


def odd_observed_condition(ctx, family: str, m: int) -> bool:
    """Permutation status of the odd families as measured by the oracle.

    Cases I and III follow the gcd condition.  Cases II and IV follow it only
    for q = 3 mod 4; for q = 1 mod 4 every member permutes, including the m
    where the gcd condition says otherwise.
    """
    h, r, predicted = FAMILIES[family].build(ctx, {"m": m})
    if family in ("odd_case_II", "odd_case_IV") and ctx.q % 4 == 1:
        return True
    return predicted


def _odd_params(ctx, rng, budget):
    # p^m mod 2(q^2 - 1) has period 2k in m, so m = 1..2k covers every case
    for m in range(1, 2 * ctx.k + 1):
        yield {"m": m}


def _need_even(ctx):
    if ctx.p != 2:
        raise InvalidParams("characteristic-2 family")


FAMILIES: dict[str, Family] = {}


def _register(name, parity, build, params=_no_params, fields=None, note=""):
    if fields is None:
        fields = _even_fields() if parity == "even_char" else _odd_fields
    FAMILIES[name] = Family(name, parity, build, params, fields, note)


_register("PP_s_minus_1", "even_char", _pp_s_minus_1)
_register("PP_s_minus_2", "even_char", _pp_s_minus_2)
_register("s3", "even_char", _s3, fields=_even_fields(lambda k: k % 2 == 1))
_register("s4", "even_char", _s4, fields=_even_fields(lambda k: k % 2 == 0))
_register("q4", "even_char", _q4, fields=_even_fields(lambda k: k % 4 == 0))
_register("linearized", "even_char", _linearized, _linearized_params)
_register("linearized_monomial", "even_char", _linearized_monomial, _monomial_params)
_register("linearized_binomial", "even_char", _linearized_binomial, _binomial_params,
          fields=_even_fields(kmin=2))
_register("binomial_corollary", "even_char", _binomial_corollary, _corollary_params,
          fields=_even_fields(lambda k: k >= 4 and k % 3 == 0))
_register("trinomial_b_b4_b8", "even_char", _trinomial_b4_b8)
_register("trinomial_b_b2_b8", "even_char", _trinomial_b2_b8)
for _case in ("I", "II", "III", "IV"):
    _register(f"odd_case_{_case}", "odd_char", _odd_family(_case), _odd_params)


def family_build(ctx, family: str, params=None) -> tuple[LaurentPoly, int, bool]:
    """(h, r, predicted) before assembly."""
    fam = FAMILIES.get(family)
    if fam is None:
        raise InvalidParams(f"unknown family {family!r}; known: {', '.join(sorted(FAMILIES))}")
    return fam.build(ctx, params or {})


def family_generate(ctx, family: str, params=None) -> tuple[AssembledPP, bool]:
    h, r, predicted = family_build(ctx, family, params)
    return assemble_f(ctx, h, r), predicted


def family_params(ctx, family: str, budget: int = DEFAULT_SAMPLES, seed: int = 0) -> Iterator[dict]:
    rng = random.Random(f"{family}:{ctx.p}:{ctx.k}:{seed}")
    return FAMILIES[family].params(ctx, rng, budget)


def family_fields(family: str, max_q2: int = 2**20, odd_prime_limit: Optional[int] = None):
    fam = FAMILIES[family]
    if fam.parity == "odd_char":
        return list(_odd_fields(max_q2, odd_prime_limit))
    return list(fam.fields(max_q2))
