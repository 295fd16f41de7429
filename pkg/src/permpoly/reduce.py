"""Reduction of h(x) on mu_{q+1} to h1(a)*x + h2(a), where a = x + 1/x.

On mu_{q+1} every x satisfies x^2 = a*x - 1, so x^n = phi_n(a)*x + chi_n(a)
with phi_{n+1} = a*phi_n + chi_n and chi_{n+1} = -phi_n.  Negative powers use
x^{-1} = a - x, which gives x^{-n} = -phi_n(a)*x + phi_{n+1}(a).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import HalfExponent
from .poly import LaurentPoly, UniPoly, resolve_exponent


@dataclass(frozen=True)
class ReducedPair:
    h1: UniPoly
    h2: UniPoly

    def eval(self, a: int) -> tuple[int, int]:
        return self.h1.eval(a), self.h2.eval(a)

    def __add__(self, other: "ReducedPair") -> "ReducedPair":
        return ReducedPair(self.h1 + other.h1, self.h2 + other.h2)


def _phi_list(ctx, n: int) -> list[UniPoly]:
    """phi_0 .. phi_n (phi_0 = 0), extended on demand and cached on ctx."""
    phis = ctx.memo("phi", lambda: [UniPoly.zero(ctx), UniPoly.const(ctx, 1)])
    a = UniPoly.var(ctx)
    while len(phis) <= n:
        # phi_{m+1} = a*phi_m + chi_m and chi_m = -phi_{m-1}
        phis.append(a * phis[-1] - phis[-2])
    return phis


def phi_chi(ctx, n: int) -> tuple[UniPoly, UniPoly]:
    """(phi_n, chi_n) with x^n = phi_n(a)*x + chi_n(a) on mu_{q+1}."""
    if n < 1:
        raise ValueError("n must be positive")
    phis = _phi_list(ctx, n)
    return phis[n], -phis[n - 1]


def power_pair(ctx, n: int) -> tuple[UniPoly, UniPoly]:
    """(phi, chi) for any integer n, including 0 and negatives."""
    if n == 0:
        return UniPoly.zero(ctx), UniPoly.const(ctx, 1)
    if n > 0:
        return phi_chi(ctx, n)
    phis = _phi_list(ctx, -n + 1)
    return -phis[-n], phis[-n + 1]


def dickson(ctx, e: int) -> UniPoly:
    """D_e(a) with D_e(x + 1/x) = x^e + x^-e; D_{-e} = D_e."""
    e = abs(e)
    ds = ctx.memo("dickson", lambda: [UniPoly.from_int(ctx, 2), UniPoly.var(ctx)])
    a = UniPoly.var(ctx)
    while len(ds) <= e:
        ds.append(a * ds[-1] - ds[-2])
    return ds[e]


def reduce_h(ctx, h: LaurentPoly) -> ReducedPair:
    if h.has_half_exponents():
        raise HalfExponent("reduce_h needs integer exponents; apply to_integer_exponents first")
    h1 = UniPoly.zero(ctx)
    h2 = UniPoly.zero(ctx)
    for e, c in h.terms.items():
        ph, ch = power_pair(ctx, int(e))
        h1 = h1 + ph.scale(c)
        h2 = h2 + ch.scale(c)
    return ReducedPair(h1, h2)


def normalize_on_mu(ctx, h: LaurentPoly) -> LaurentPoly:
    """Same function on mu_{q+1}, with every exponent moved into (-(q+1)/2, (q+1)/2].

    Half exponents (characteristic 2 only) become their integer representatives.
    """
    n = ctx.q + 1
    terms = []
    for e, c in h.terms.items():
        r = resolve_exponent(ctx, e)
        if 2 * r > n:
            r -= n
        terms.append((r, c))
    return LaurentPoly(ctx, terms)
