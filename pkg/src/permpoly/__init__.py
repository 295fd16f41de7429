"""Permutation polynomials of the form x^r h(x^(q-1)) over F_{q^2}.

Field arithmetic, the reduction h(x) -> (h1(a), h2(a)) and its inverse, the
permutation criterion on mu_{q+1}, brute-force oracles, named families and
exhaustive searches.
"""

__version__ = "0.1.0"

from .ff_core import FieldCtx  # noqa: E402

__all__ = ["FieldCtx", "__version__"]
