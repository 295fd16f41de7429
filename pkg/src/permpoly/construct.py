"""From a reduced pair (h1, h2) back to h(x), and from h(x) to f(x) = x^r h(x^(q-1)).

construct_h substitutes a = x + 1/x into h1(a) x + h2(a) and then strips
factors x - 1/x while h vanishes at both 1 and -1.  In characteristic 2 the
two points coincide and one factor x^(1/2) + x^(-1/2) (whose square is
x + 1/x) is removed per round, which is where half exponents come from.
Neither division changes g(x) = x^r h(x)^(q-1) on mu_{q+1} up to sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np

from .errors import (
    HalfExponentInOddCharacteristic,
    NonTerminating,
    ZeroPolynomial,
)
from .ff_core import to_digits
from .poly import LaurentPoly, UniPoly, as_exponent, resolve_exponent

PolyInA = Union[UniPoly, LaurentPoly]


# ---------------------------------------------------------------------------
# binomial expansions

@lru_cache(maxsize=64)
def binomial_row_arrays(n: int, p: int) -> tuple[np.ndarray, np.ndarray]:
    """(i, C(n, i) mod p) over the i with a nonzero value, as int64 arrays (Lucas'
    theorem).  Cached; treat the arrays as read-only."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    digits = to_digits(n, p, max(1, _ndigits(n, p)))
    idx = np.zeros(1, dtype=np.int64)
    coef = np.ones(1, dtype=np.int64)
    w = 1
    for d in digits:
        # C(d, i) mod p for i <= d < p, all nonzero
        small = [1] * (d + 1)
        for i in range(1, d + 1):
            small[i] = small[i - 1] * (d - i + 1) * pow(i, -1, p) % p
        idx = (idx[:, None] + w * np.arange(d + 1, dtype=np.int64)).ravel()
        coef = (coef[:, None] * np.array(small, dtype=np.int64) % p).ravel()
        w *= p
    return idx, coef


def binomial_row_mod_p(n: int, p: int) -> dict[int, int]:
    """{i: C(n, i) mod p} for the i with a nonzero value."""
    idx, coef = binomial_row_arrays(n, p)
    return dict(zip(idx.tolist(), coef.tolist()))


def _ndigits(n: int, p: int) -> int:
    c = 0
    while n:
        n //= p
        c += 1
    return c


def a_power(ctx, e) -> LaurentPoly:
    """(x + 1/x)^e as a Laurent polynomial in x.

    A half-integer e is allowed in characteristic 2, where
    (x + 1/x)^(n/2) = (x^(1/2) + x^(-1/2))^n.
    """
    e = as_exponent(e)
    if e < 0:
        raise ValueError("negative power of a")
    cache = ctx.memo("a_power", dict)
    hit = cache.get(e)
    if hit is not None:
        return hit
    if e.denominator == 1:
        n, w = int(e), Fraction(1)
    else:
        if ctx.p != 2:
            raise HalfExponentInOddCharacteristic("a^(n/2) needs characteristic 2")
        n, w = e.numerator, Fraction(1, 2)
    M = ctx.mid
    row = binomial_row_mod_p(n, ctx.p)
    out = LaurentPoly(ctx, [(w * (n - 2 * i), M.from_int(c)) for i, c in row.items()])
    cache[e] = out
    return out


def substitute_a(ctx, poly: PolyInA) -> LaurentPoly:
    """Replace a by x + 1/x in a polynomial in a."""
    if isinstance(poly, UniPoly):
        items = [(Fraction(i), c) for i, c in enumerate(poly.coeffs) if c]
    else:
        items = list(poly.terms.items())
    acc = LaurentPoly.zero(ctx)
    for e, c in items:
        acc = acc + a_power(ctx, e).scale(c)
    return acc


# ---------------------------------------------------------------------------
# the division loop

def _divide_x2_minus_1(ctx, L: LaurentPoly):
    """L / (x^2 - 1) for integer exponents, or None when the division is not exact."""
    M = ctx.mid
    e0 = int(L.min_exp())
    deg = int(L.max_exp()) - e0
    if deg < 2:
        return None
    p = [0] * (deg + 1)
    for e, c in L.terms.items():
        p[int(e) - e0] = c
    # p_j = q_{j-2} - q_j
    q = [0] * (deg - 1)
    for j in range(deg, 1, -1):
        q[j - 2] = M.add(p[j], q[j] if j <= deg - 2 else 0)
    if M.add(p[0], q[0]) != 0 or M.add(p[1], q[1] if deg >= 3 else 0) != 0:
        return None
    return LaurentPoly(ctx, [(i + e0, c) for i, c in enumerate(q) if c])


def _value_at_minus_one(ctx, h: LaurentPoly) -> int:
    M = ctx.mid
    acc = 0
    for e, c in h.terms.items():
        acc = M.sub(acc, c) if int(e) % 2 else M.add(acc, c)
    return acc


def strip_vanishing_factors(ctx, h: LaurentPoly) -> tuple[LaurentPoly, int]:
    """Divide h by x - 1/x (odd) or x^(1/2) + x^(-1/2) (char 2) while it vanishes
    at the relevant points.  Returns (h, number of divisions)."""
    if h.is_zero():
        raise NonTerminating("h is identically zero, so the division loop never stops")
    span = 2 * (h.max_exp() - h.min_exp())
    steps = 0
    while True:
        if ctx.p == 2:
            if h.coefficient_sum() != 0:
                break
            # h(z^2) / (z + 1/z) = z h(z^2) / (z^2 + 1), then z -> x^(1/2)
            H = h.substitute_power(2)
            if H.has_half_exponents():
                break
            Q = _divide_x2_minus_1(ctx, H)
            if Q is None:
                break
            h = Q.shift(1).substitute_power(Fraction(1, 2))
        else:
            if h.has_half_exponents():
                raise HalfExponentInOddCharacteristic("half exponents need characteristic 2")
            if h.coefficient_sum() != 0 or _value_at_minus_one(ctx, h) != 0:
                break
            Q = _divide_x2_minus_1(ctx, h)
            if Q is None:
                break
            h = Q.shift(1)
        steps += 1
        if h.is_zero() or steps > span + 1:
            raise NonTerminating("division loop exceeded the degree bound")
    return h, steps


def integer_form(ctx, h: LaurentPoly) -> LaurentPoly:
    """Replace each half-exponent term by the integer exponent that agrees with it on
    mu_{q+1} (taken in (-(q+1)/2, (q+1)/2]).  Integer terms are left alone."""
    if not h.has_half_exponents():
        return h
    n = ctx.q + 1
    terms = []
    for e, c in h.terms.items():
        if e.denominator == 2:
            r = resolve_exponent(ctx, e)
            e = r - n if 2 * r > n else r
        terms.append((e, c))
    return LaurentPoly(ctx, terms)


def construct_h(ctx, h1: PolyInA, h2: PolyInA, paper_form: bool = False) -> LaurentPoly:
    """h(x) from (h1(a), h2(a)).

    By default the result has integer exponents only (half exponents are
    folded onto their representatives modulo q+1, which does not change h
    on mu_{q+1}).  With ``paper_form`` the half-exponent form is kept.
    """
    if _is_zero(h1) and _is_zero(h2):
        raise NonTerminating("(h1, h2) = (0, 0)")
    h = substitute_a(ctx, h1).shift(1) + substitute_a(ctx, h2)
    h, _ = strip_vanishing_factors(ctx, h)
    return h if paper_form else integer_form(ctx, h)


def _is_zero(poly) -> bool:
    return poly.is_zero()


# ---------------------------------------------------------------------------
# assembly

@dataclass
class AssembledPP:
    """f(x) = sum c x^e on F_{q^2}; ``h`` and ``r`` are the integer-exponent data
    it was assembled from (after doubling, when ``doubled`` is set)."""
    terms: list
    r: int
    doubled: bool
    h: LaurentPoly = field(repr=False)
    q: int = 0

    @property
    def exponents(self) -> list[int]:
        return [e for e, _ in self.terms]

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*x^{e}" for e, c in reversed(self.terms))

    def to_dict(self) -> dict:
        return {
            "terms": [[e, c] for e, c in self.terms],
            "r": self.r,
            "doubled": self.doubled,
        }


def assemble_f(ctx, h: LaurentPoly, r: int) -> AssembledPP:
    if h.is_zero():
        raise ZeroPolynomial("h must be nonzero")
    doubled = False
    if h.has_half_exponents():
        if ctx.p != 2:
            raise HalfExponentInOddCharacteristic("half exponents need characteristic 2")
        # x -> x^2 is a bijection of F_{q^2}, so f(x^2) = x^(2r) h(x^(2(q-1))) may stand in for f
        h = h.substitute_power(2)
        r = 2 * r
        doubled = True
    q = ctx.q
    N = q * q - 1
    M = ctx.mid
    acc: dict[int, int] = {}
    for e, c in h.terms.items():
        E = (r + int(e) * (q - 1)) % N
        acc[E] = M.add(acc.get(E, 0), c)
    terms = sorted((e, c) for e, c in acc.items() if c)
    if not terms:
        raise ZeroPolynomial("all terms of f cancel")
    return AssembledPP(terms, r, doubled, h, q)


def evaluate_f(ctx, af: AssembledPP, x: int) -> int:
    """f(x) at one top-level element by direct term-by-term evaluation (f(0) = 0)."""
    T = ctx.top
    if x == 0:
        return 0
    acc = 0
    for e, c in af.terms:
        acc = T.add(acc, T.scale(c, T.pow(x, e)))
    return acc


def direct_f_values(ctx, h: LaurentPoly, r: int, xs) -> np.ndarray:
    """x^r h(x^(q-1)) computed straight from h at nonzero points, without assembly."""
    T = ctx.top
    q = ctx.q
    h2, doubled = (h.substitute_power(2), True) if h.has_half_exponents() else (h, False)
    rr = 2 * r if doubled else r
    out = []
    for x in xs:
        x = int(x)
        y = T.pow(x, q - 1)
        acc = 0
        for e, c in h2.terms.items():
            acc = T.add(acc, T.scale(c, T.pow(y, int(e))))
        out.append(T.mul(T.pow(x, rr), acc))
    return np.array(out, dtype=np.int64)


def family_generate(ctx, family: str, params=None):
    """(AssembledPP, predicted verdict) for a named family; see ``families``."""
    from .families import family_generate as _gen
    return _gen(ctx, family, params or {})
