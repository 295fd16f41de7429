"""Shared hypothesis strategies and random generators for the test suite."""

from functools import lru_cache

from hypothesis import strategies as st

from permpoly.ff_core import FieldCtx
from permpoly.poly import LaurentPoly, UniPoly


@lru_cache(maxsize=None)
def ctx_for(p, k):
    return FieldCtx(p, k)


def field(pairs):
    return st.sampled_from(pairs).map(lambda pk: ctx_for(*pk))


@st.composite
def unipolys(draw, ctx, max_degree=6):
    coeffs = draw(st.lists(st.integers(0, ctx.q - 1), max_size=max_degree + 1))
    return UniPoly(ctx, coeffs)


@st.composite
def laurents(draw, ctx, emin=-6, emax=6, max_terms=5, min_terms=0):
    n = draw(st.integers(min_terms, max_terms))
    terms = [(draw(st.integers(emin, emax)), draw(st.integers(1, ctx.q - 1))) for _ in range(n)]
    return LaurentPoly(ctx, terms)


def random_laurent(ctx, rng, emin=-6, emax=6, max_terms=5):
    """A nonzero Laurent polynomial with random exponents and coefficients."""
    while True:
        n = int(rng.integers(1, max_terms + 1))
        terms = [(int(rng.integers(emin, emax + 1)), int(rng.integers(1, ctx.q))) for _ in range(n)]
        h = LaurentPoly(ctx, terms)
        if not h.is_zero():
            return h


def random_unipoly(ctx, rng, max_degree=4):
    return UniPoly(ctx, [int(rng.integers(0, ctx.q)) for _ in range(int(rng.integers(0, max_degree + 1)) + 1)])
