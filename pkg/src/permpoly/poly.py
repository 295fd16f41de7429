"""Polynomials over F_q.

``UniPoly`` is a dense polynomial in the symbol ``a`` (used for h1, h2, psi,
Dickson polynomials and friends).  ``LaurentPoly`` is a sparse polynomial in
``x`` whose exponents may be negative or half-integers, which is the natural
home of h(x) once ``a = x + 1/x`` has been substituted back.

Coefficients are mid-level encodings; both classes keep a reference to the
owning :class:`~permpoly.ff_core.FieldCtx`.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    ExponentError,
    HalfExponentInOddCharacteristic,
    InexactDivision,
    LevelMismatch,
    NotOnMu,
)


def _same_ctx(a, b):
    if a.ctx is not b.ctx:
        raise LevelMismatch("polynomials belong to different field contexts")


# ---------------------------------------------------------------------------
# dense polynomials in a

class UniPoly:
    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx, coeffs: Iterable[int] = ()):
        c = [int(v) for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.ctx = ctx
        self.coeffs = tuple(c)

    @classmethod
    def zero(cls, ctx):
        return cls(ctx)

    @classmethod
    def const(cls, ctx, c: int):
        return cls(ctx, [c])

    @classmethod
    def monomial(cls, ctx, c: int, n: int):
        if n < 0:
            raise ExponentError("UniPoly exponents must be nonnegative")
        return cls(ctx, [0] * n + [c])

    @classmethod
    def var(cls, ctx):
        return cls(ctx, [0, 1])

    @classmethod
    def from_int(cls, ctx, n: int):
        """The constant n * 1 of the prime subfield."""
        return cls(ctx, [n % ctx.p])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def _wrap(self, coeffs):
        return UniPoly(self.ctx, coeffs)

    def _lift(self, other):
        if isinstance(other, UniPoly):
            _same_ctx(self, other)
            return other
        if isinstance(other, int):
            return UniPoly.from_int(self.ctx, other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        M = self.ctx.mid
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = M.add(out[i], c)
        return self._wrap(out)

    __radd__ = __add__

    def __neg__(self):
        M = self.ctx.mid
        return self._wrap([M.neg(c) for c in self.coeffs])

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: int) -> "UniPoly":
        M = self.ctx.mid
        return self._wrap([M.mul(c, v) for v in self.coeffs])

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return UniPoly.zero(self.ctx)
        M = self.ctx.mid
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if not x:
                continue
            for j, y in enumerate(other.coeffs):
                if y:
                    out[i + j] = M.add(out[i + j], M.mul(x, y))
        return self._wrap(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ExponentError("negative power of a polynomial")
        result, base = UniPoly.const(self.ctx, 1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, UniPoly):
            return self.ctx is other.ctx and self.coeffs == other.coeffs
        if isinstance(other, int):
            return self == UniPoly.from_int(self.ctx, other)
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"UniPoly({self.pretty()})"

    def eval(self, x: int) -> int:
        M = self.ctx.mid
        acc = 0
        for c in reversed(self.coeffs):
            acc = M.add(M.mul(acc, x), c)
        return acc

    def eval_vec(self, xs) -> np.ndarray:
        M = self.ctx.mid
        xs = np.asarray(xs, dtype=np.int64)
        acc = np.zeros_like(xs)
        for c in reversed(self.coeffs):
            acc = M.add_vec(M.mul_vec(acc, xs), c)
        return acc

    def compose_linear(self, c1: int, c0: int) -> "UniPoly":
        """p(c1*a + c0)."""
        lin = UniPoly(self.ctx, [c0, c1])
        acc = UniPoly.zero(self.ctx)
        for c in reversed(self.coeffs):
            acc = acc * lin + UniPoly.const(self.ctx, c)
        return acc

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        _same_ctx(self, other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        M = self.ctx.mid
        rem = list(self.coeffs)
        d = other.degree
        inv_lead = M.inv(other.lead())
        quot = [0] * max(len(rem) - d, 0)
        for i in range(len(rem) - 1 - d, -1, -1):
            c = M.mul(rem[i + d], inv_lead)
            if c == 0:
                continue
            quot[i] = c
            for j, oc in enumerate(other.coeffs):
                rem[i + j] = M.sub(rem[i + j], M.mul(c, oc))
        return self._wrap(quot), self._wrap(rem[:d] if d > 0 else [])

    def divexact(self, other: "UniPoly") -> "UniPoly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise InexactDivision(f"{self.pretty()} is not divisible by {other.pretty()}")
        return q

    def gcd(self, other: "UniPoly") -> "UniPoly":
        """Monic gcd."""
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        if a.is_zero():
            return a
        return a.scale(self.ctx.mid.inv(a.lead()))

    def to_laurent(self) -> "LaurentPoly":
        return LaurentPoly(self.ctx, {i: c for i, c in enumerate(self.coeffs) if c})

    def to_text(self, symbol: str = "a") -> str:
        return self.to_laurent().to_text(symbol)

    def pretty(self, symbol: str = "a") -> str:
        return self.to_laurent().pretty(symbol)


def unipoly_arith(ctx, op: str, *args):
    """Functional front end: add, sub, mul, eval, compose_linear, divexact."""
    if op == "add":
        return args[0] + args[1]
    if op == "sub":
        return args[0] - args[1]
    if op == "mul":
        return args[0] * args[1]
    if op == "eval":
        return args[0].eval(int(args[1]))
    if op == "compose_linear":
        return args[0].compose_linear(int(args[1]), int(args[2]))
    if op == "divexact":
        return args[0].divexact(args[1])
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# sparse Laurent polynomials in x with exponents in (1/2)Z

def as_exponent(e) -> Fraction:
    f = Fraction(e)
    if f.denominator not in (1, 2):
        raise ExponentError(f"exponent {e} has denominator {f.denominator}; only 1 and 2 are supported")
    return f


class LaurentPoly:
    __slots__ = ("ctx", "terms")

    def __init__(self, ctx, terms: Mapping | Iterable = ()):
        M = ctx.mid
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Fraction, int] = {}
        for e, c in items:
            e = as_exponent(e)
            c = int(c)
            if c:
                acc[e] = M.add(acc.get(e, 0), c)
        self.ctx = ctx
        self.terms = {e: c for e, c in sorted(acc.items()) if c}

    @classmethod
    def zero(cls, ctx):
        return cls(ctx)

    @classmethod
    def const(cls, ctx, c: int):
        return cls(ctx, {0: c})

    @classmethod
    def monomial(cls, ctx, c: int, e) -> "LaurentPoly":
        return cls(ctx, {e: c})

    def is_zero(self) -> bool:
        return not self.terms

    def exponents(self) -> list[Fraction]:
        return list(self.terms)

    def has_half_exponents(self) -> bool:
        return any(e.denominator == 2 for e in self.terms)

    def max_exp(self) -> Fraction:
        return max(self.terms)

    def min_exp(self) -> Fraction:
        return min(self.terms)

    def _lift(self, other):
        if isinstance(other, LaurentPoly):
            _same_ctx(self, other)
            return other
        if isinstance(other, int):
            return LaurentPoly.const(self.ctx, other % self.ctx.p)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return LaurentPoly(self.ctx, list(self.terms.items()) + list(other.terms.items()))

    __radd__ = __add__

    def __neg__(self):
        M = self.ctx.mid
        return LaurentPoly(self.ctx, {e: M.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: int) -> "LaurentPoly":
        M = self.ctx.mid
        return LaurentPoly(self.ctx, {e: M.mul(c, v) for e, v in self.terms.items()})

    def shift(self, e) -> "LaurentPoly":
        """Multiply by x^e."""
        e = as_exponent(e)
        return LaurentPoly(self.ctx, {k + e: c for k, c in self.terms.items()})

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        M = self.ctx.mid
        out = []
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                out.append((e1 + e2, M.mul(c1, c2)))
        return LaurentPoly(self.ctx, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ExponentError("negative power of a Laurent polynomial")
        result, base = LaurentPoly.const(self.ctx, 1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def substitute_power(self, m) -> "LaurentPoly":
        """L(x^m): every exponent multiplied by m."""
        return LaurentPoly(self.ctx, {e * m: c for e, c in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.ctx is other.ctx and self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    def __repr__(self):
        return f"LaurentPoly({self.pretty()})"

    def coefficient_sum(self) -> int:
        """L(1); meaningful for half exponents too since every root of 1 is 1."""
        M = self.ctx.mid
        acc = 0
        for c in self.terms.values():
            acc = M.add(acc, c)
        return acc

    def eval_mid(self, x: int) -> int:
        """Evaluate at a nonzero mid-level element (integer exponents only)."""
        if self.has_half_exponents():
            raise ExponentError("half exponents cannot be evaluated off mu")
        M = self.ctx.mid
        acc = 0
        for e, c in self.terms.items():
            acc = M.add(acc, M.mul(c, M.pow(x, int(e))))
        return acc

    def eval_top(self, x: int) -> int:
        """Evaluate at a nonzero top-level element (integer exponents only)."""
        if self.has_half_exponents():
            raise ExponentError("half exponents cannot be evaluated off mu")
        T = self.ctx.top
        acc = 0
        for e, c in self.terms.items():
            acc = T.add(acc, T.scale(c, T.pow(x, int(e))))
        return acc

    def to_text(self, symbol: str = "x") -> str:
        """Machine form: ``c*x^e`` terms joined by `` + ``, highest exponent first."""
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{symbol}^{_fmt_exp(e)}" for e, c in reversed(self.terms.items()))

    def pretty(self, symbol: str = "x") -> str:
        """Compact human form such as ``a+1`` or ``x^-1/2+x+1``."""
        if not self.terms:
            return "0"
        parts = []
        for e, c in reversed(self.terms.items()):
            if e == 0:
                parts.append(str(c))
                continue
            mono = symbol if e == 1 else f"{symbol}^{_fmt_exp(e)}"
            parts.append(mono if c == 1 else f"{c}*{mono}")
        return "+".join(parts)


def _fmt_exp(e: Fraction) -> str:
    return str(e.numerator) if e.denominator == 1 else f"{e.numerator}/2"


# ---------------------------------------------------------------------------
# evaluation on mu_{q+1}

def resolve_exponent(ctx, e) -> int:
    """Integer representative of x^e on mu_{q+1}, i.e. a residue modulo q+1."""
    e = as_exponent(e)
    n = ctx.q + 1
    if e.denominator == 1:
        return int(e) % n
    if ctx.p != 2:
        raise HalfExponentInOddCharacteristic(
            "half exponents are only defined on mu_{q+1} in characteristic 2; double first")
    return e.numerator * pow(2, -1, n) % n


def _mu_digits(ctx) -> np.ndarray:
    """Base-p digits of the top-level encodings of mu (addition there is digitwise)."""
    def build():
        w = ctx.p ** np.arange(2 * ctx.k, dtype=np.int64)
        return (ctx.mu[:, None] // w[None, :]) % ctx.p
    return ctx.memo("mu_digits", build)


MU_EVAL_CHUNK = 1 << 22


def laurent_values_on_mu(ctx, L: LaurentPoly, idx=None) -> np.ndarray:
    """Values of L at mu[i] for every i (or for the given index array)."""
    n = ctx.q + 1
    T = ctx.top
    mu = ctx.mu
    p = ctx.p
    if idx is None:
        idx = np.arange(n, dtype=np.int64)
    idx = np.asarray(idx, dtype=np.int64)
    shape = idx.shape
    idx = idx.ravel()
    acc = np.zeros(idx.shape, dtype=np.int64)
    # prime-field coefficients: integer digit sums, reduced mod p once at the end
    # (the mid encoding of a prime-field element c is c itself)
    small = [(resolve_exponent(ctx, e), c) for e, c in L.terms.items() if c < p]
    big = [(resolve_exponent(ctx, e), c) for e, c in L.terms.items() if c >= p]
    if small:
        digits = _mu_digits(ctx)
        dsum = np.zeros((idx.size, digits.shape[1]), dtype=np.int64)
        rs = np.array([r for r, _ in small], dtype=np.int64)
        cs = np.array([c for _, c in small], dtype=np.int64)
        step = max(1, MU_EVAL_CHUNK // max(1, idx.size * digits.shape[1]))
        for a in range(0, rs.size, step):
            pos = (rs[a:a + step, None] * idx[None, :]) % n
            dsum += np.einsum("t,tid->id", cs[a:a + step], digits[pos])
            dsum %= p
        w = p ** np.arange(digits.shape[1], dtype=np.int64)
        acc = dsum @ w
    for r, c in big:
        acc = T.add_vec(acc, T.scale_vec(c, mu[(idx * r) % n]))
    return acc.reshape(shape)


def laurent_eval_on_mu(ctx, L: LaurentPoly, x) -> int:
    """Evaluate L at an element x of mu_{q+1} (top-level encoding or FieldElement)."""
    x = int(x)
    i = ctx.mu_index.get(x)
    if i is None:
        raise NotOnMu(f"{x} is not in mu_{{q+1}}")
    return int(laurent_values_on_mu(ctx, L, np.array([i]))[0])


def to_integer_exponents(L: LaurentPoly) -> tuple[LaurentPoly, bool]:
    """Return (L(x^2), True) if L has half exponents, else (L, False)."""
    if L.has_half_exponents():
        return L.substitute_power(2), True
    return L, False


# ---------------------------------------------------------------------------
# text form

_TERM = re.compile(
    r"^(?:(?P<c>\d+)\s*\*?\s*)?(?:(?P<sym>[a-z])(?:\s*\^\s*[({]?\s*(?P<e>[-+]?\d+(?:\s*/\s*\d+)?)\s*[)}]?)?)?$")


def parse_terms(text: str, symbol: str = "x") -> list[tuple[Fraction, int]]:
    """Parse ``"1*x^3 + 2*x^-1/2 + 1"`` into (exponent, coefficient) pairs.

    Accepts bare constants, ``x``, ``x^e``, ``c*x^e`` and ``c x^e``; exponents
    may be written ``n/2`` and optionally wrapped in parentheses or braces.
    """
    text = text.strip()
    if text in ("", "0"):
        return []
    # split on '+' that is not part of an exponent
    pieces = re.split(r"\+(?![^({]*[)}])", text)
    out = []
    for raw in pieces:
        piece = raw.strip()
        if not piece:
            raise ValueError(f"empty term in {text!r}")
        m = _TERM.match(piece)
        if not m or (m.group("c") is None and m.group("sym") is None):
            raise ValueError(f"cannot parse term {piece!r}")
        sym = m.group("sym")
        if sym is not None and sym != symbol:
            raise ValueError(f"unexpected symbol {sym!r} in {piece!r} (expected {symbol!r})")
        c = int(m.group("c")) if m.group("c") is not None else 1
        if sym is None:
            e = Fraction(0)
        elif m.group("e") is None:
            e = Fraction(1)
        else:
            e = as_exponent(Fraction(m.group("e").replace(" ", "")))
        out.append((e, c))
    return out


def parse_laurent(ctx, text: str, symbol: str = "x") -> LaurentPoly:
    terms = parse_terms(text, symbol)
    for _, c in terms:
        if not 0 <= c < ctx.q:
            raise ValueError(f"coefficient {c} is not a valid encoding in F_{ctx.q}")
    return LaurentPoly(ctx, terms)


def parse_unipoly(ctx, text: str, symbol: str = "a") -> UniPoly:
    L = parse_laurent(ctx, text, symbol)
    if any(e.denominator != 1 or e < 0 for e in L.terms):
        raise ExponentError("a polynomial in a needs nonnegative integer exponents")
    deg = int(L.max_exp()) if L.terms else -1
    coeffs = [0] * (deg + 1)
    for e, c in L.terms.items():
        coeffs[int(e)] = c
    return UniPoly(ctx, coeffs)
