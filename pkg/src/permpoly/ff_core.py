"""Exact arithmetic in F_p, F_q = F_{p^k} and the tower F_{q^2} = F_q[y]/(y^2 + c1*y + c0).

Field elements are carried around as plain integers.  A mid-level element
sum(c_i t^i) is encoded as sum(c_i p^i); a top-level element u0 + u1*y is
encoded as u0 + u1*q.  The same encoding orders every "smallest element"
tie-break used by the context (default moduli, generators, square roots).

:class:`FieldElement` is a thin value wrapper over an encoding for callers who
want operator syntax; the hot paths in the rest of the package work on the
integers (and on numpy arrays of them) through the level objects
``ctx.base``, ``ctx.mid`` and ``ctx.top``.
"""

from __future__ import annotations

import math
from functools import cached_property
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    BoundExceeded,
    DivisionByZero,
    EvenCharacteristic,
    LevelMismatch,
    NotIrreducible,
    NotPrime,
    OddCharacteristic,
    ZeroCoefficient,
)

DEFAULT_BOUND = 2**32
# largest F_{q^2} for which log/exp tables are materialised
TOP_TABLE_LIMIT = 2**24

LEVELS = ("base", "mid", "top")


# ---------------------------------------------------------------------------
# integer helpers

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n`` by trial division."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def to_digits(n: int, base: int, length: int) -> list[int]:
    out = []
    for _ in range(length):
        n, r = divmod(n, base)
        out.append(r)
    return out


def from_digits(digits: Sequence[int], base: int) -> int:
    n = 0
    for d in reversed(digits):
        n = n * base + d
    return n


# ---------------------------------------------------------------------------
# dense polynomials over F_p (coefficient lists, constant term first)

def _ptrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _ptrim([c % p for c in out])


def _pmod(a: list[int], f: list[int], p: int) -> list[int]:
    """Remainder of ``a`` modulo the polynomial ``f`` (any nonzero leading coeff)."""
    a = list(a)
    df = len(f) - 1
    inv_lc = pow(f[-1], -1, p)
    while len(_ptrim(a)) - 1 >= df:
        shift = len(a) - 1 - df
        c = a[-1] * inv_lc % p
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % p
        _ptrim(a)
    return a


def _psub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _ptrim(out)


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _ptrim(list(a)), _ptrim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _ppowmod(base: list[int], e: int, f: list[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(base, f, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), f, p)
        base = _pmod(_pmul(base, base, p), f, p)
        e >>= 1
    return result


def is_irreducible_fp(coeffs: Sequence[int], p: int) -> bool:
    """Irreducibility over F_p: no root in F_p, and gcd(f, x^(p^i) - x) = 1 for i <= deg/2."""
    f = _ptrim([c % p for c in coeffs])
    k = len(f) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    fm = f
    for r in range(p):
        if sum(c * pow(r, i, p) for i, c in enumerate(fm)) % p == 0:
            return False
    xp = [0, 1]
    for _ in range(k // 2):
        xp = _ppowmod(xp, p, f, p)
        g = _pgcd(f, _psub(xp, [0, 1], p), p)
        if len(g) > 1:
            return False
    return True


def smallest_irreducible(p: int, k: int) -> list[int]:
    """Monic irreducible of degree ``k`` over F_p with the smallest encoding sum(c_i p^i)."""
    if k == 1:
        return [0, 1]
    for enc in range(p**k, 2 * p**k):
        coeffs = to_digits(enc, p, k + 1)
        if coeffs[0] != 0 and is_irreducible_fp(coeffs, p):
            return coeffs
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


# ---------------------------------------------------------------------------
# levels

class PrimeLevel:
    """F_p with elements 0..p-1."""

    name = "base"

    def __init__(self, p: int):
        self.p = p
        self.size = p
        self.order = p - 1
        self.degree = 1

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise DivisionByZero("inverse of zero")
        return pow(a, -1, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e):
        if e < 0:
            return pow(self.inv(a), -e, self.p)
        return pow(a, e, self.p)

    def coeffs(self, a):
        return (a,)

    def add_vec(self, a, b):
        return (a + b) % self.p

    def mul_vec(self, a, b):
        return (a * b) % self.p


class MidLevel:
    """F_q = F_p[t]/(m(t)) backed by log/exp and Zech tables."""

    name = "mid"

    def __init__(self, p: int, k: int, modulus: Sequence[int]):
        self.p = p
        self.k = k
        self.degree = k
        self.size = q = p**k
        self.order = q - 1
        self.modulus = list(modulus)
        self.generator = self._find_generator()
        self._build_tables()

    # slow arithmetic, only used before the tables exist
    def _slow_mul(self, a: int, b: int) -> int:
        p, k = self.p, self.k
        prod = _pmul(to_digits(a, p, k), to_digits(b, p, k), p)
        return from_digits(_pmod(prod, self.modulus, p), p)

    def _slow_pow(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self._slow_mul(r, a)
            a = self._slow_mul(a, a)
            e >>= 1
        return r

    def _find_generator(self) -> int:
        n = self.order
        if n == 1:
            return 1
        primes = prime_factors(n)
        start = 1 if self.k == 1 else self.p
        for g in range(start, self.size):
            if all(self._slow_pow(g, n // r) != 1 for r in primes):
                return g
        raise AssertionError("no generator found")  # pragma: no cover

    def _build_tables(self):
        q, n, p = self.size, self.order, self.p
        exp = [0] * (2 * n)
        log = [-1] * q
        x = 1
        g = self.generator
        for i in range(n):
            exp[i] = x
            log[x] = i
            x = self._slow_mul(x, g)
        for i in range(n, 2 * n):
            exp[i] = exp[i - n]
        self._exp = exp
        self._log = log
        self.exp_np = np.array(exp, dtype=np.int64)
        log_np = np.array(log, dtype=np.int64)
        log_np[0] = 0
        self.log_np = log_np
        if p != 2:
            # zech[i] = log(1 + g^i), -1 when 1 + g^i = 0
            zech = [-1] * n
            for i in range(n):
                v = exp[i]
                one_plus = v + 1 if v % p != p - 1 else v - (p - 1)
                zech[i] = log[one_plus] if one_plus else -1
            self._zech = zech
            self.zech_np = np.array(zech, dtype=np.int64)
            self._half = n // 2

    # scalar ops
    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if a == 0:
            return b
        if b == 0:
            return a
        la = self._log[a]
        z = self._zech[(self._log[b] - la) % self.order]
        return 0 if z < 0 else self._exp[la + z]

    def neg(self, a: int) -> int:
        if self.p == 2 or a == 0:
            return a
        return self._exp[self._log[a] + self._half]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero")
        return self._exp[(self.order - self._log[a]) % self.order]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise DivisionByZero("negative power of zero")
            return 1 if e == 0 else 0
        return self._exp[(self._log[a] * e) % self.order]

    def log(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("log of zero")
        return self._log[a]

    def exp(self, i: int) -> int:
        return self._exp[i % self.order]

    def from_int(self, n: int) -> int:
        """Image of the integer ``n`` in the prime subfield."""
        return n % self.p

    def coeffs(self, a: int) -> tuple[int, ...]:
        return tuple(to_digits(a, self.p, self.k))

    # vector ops on int64 arrays of encodings
    def add_vec(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        a, b = np.broadcast_arrays(a, b)
        la = self.log_np[a]
        z = self.zech_np[(self.log_np[b] - la) % self.order]
        res = np.where(z < 0, 0, self.exp_np[la + np.maximum(z, 0)])
        res = np.where(b == 0, a, res)
        return np.where(a == 0, b, res)

    def neg_vec(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return a
        return np.where(a == 0, 0, self.exp_np[self.log_np[a] + self._half])

    def sub_vec(self, a, b):
        return self.add_vec(a, self.neg_vec(b))

    def mul_vec(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        res = self.exp_np[self.log_np[a] + self.log_np[b]]
        return np.where((a == 0) | (b == 0), 0, res)

    def inv_vec(self, a):
        a = np.asarray(a, dtype=np.int64)
        return np.where(a == 0, 0, self.exp_np[(self.order - self.log_np[a]) % self.order])

    def pow_vec(self, a, e: int):
        a = np.asarray(a, dtype=np.int64)
        res = self.exp_np[(self.log_np[a] * (e % self.order)) % self.order]
        if e == 0:
            return np.ones_like(a)
        return np.where(a == 0, 0, res)


class TopLevel:
    """F_{q^2} = F_q[y]/(y^2 + c1*y + c0); encoding u0 + u1*q."""

    name = "top"
    table_limit = TOP_TABLE_LIMIT

    def __init__(self, mid: MidLevel, modulus: Sequence[int]):
        self.mid = mid
        self.p = mid.p
        self.degree = 2 * mid.k
        self.q = mid.size
        self.size = self.q * self.q
        self.order = self.size - 1
        c0, c1, lead = modulus
        if lead != 1:
            raise NotIrreducible("top modulus must be monic")
        self.modulus = [c0, c1, 1]
        self.c0, self.c1 = c0, c1
        self.exp_np = None
        self.log_np = None
        self.generator = self._find_generator()

    def split(self, a: int) -> tuple[int, int]:
        u1, u0 = divmod(a, self.q)
        return u0, u1

    def join(self, u0: int, u1: int) -> int:
        return u0 + u1 * self.q

    def coeffs(self, a: int) -> tuple[int, int]:
        return self.split(a)

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        M = self.mid
        a0, a1 = self.split(a)
        b0, b1 = self.split(b)
        return self.join(M.add(a0, b0), M.add(a1, b1))

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        a0, a1 = self.split(a)
        return self.join(self.mid.neg(a0), self.mid.neg(a1))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.log_np is not None:
            if a == 0 or b == 0:
                return 0
            return int(self.exp_np[(self.log_np[a] + self.log_np[b]) % self.order])
        M = self.mid
        a0, a1 = self.split(a)
        b0, b1 = self.split(b)
        t11 = M.mul(a1, b1)
        re = M.sub(M.mul(a0, b0), M.mul(self.c0, t11))
        im = M.sub(M.add(M.mul(a0, b1), M.mul(a1, b0)), M.mul(self.c1, t11))
        return self.join(re, im)

    def scale(self, c: int, a: int) -> int:
        """Product of a mid-level scalar with a top-level element."""
        a0, a1 = self.split(a)
        return self.join(self.mid.mul(c, a0), self.mid.mul(c, a1))

    def conj(self, a: int) -> int:
        """Frobenius x -> x^q, using y^q = -c1 - y."""
        M = self.mid
        a0, a1 = self.split(a)
        return self.join(M.sub(a0, M.mul(self.c1, a1)), M.neg(a1))

    def norm(self, a: int) -> int:
        n = self.mul(a, self.conj(a))
        assert n < self.q
        return n

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero")
        return self.scale(self.mid.inv(self.norm(a)), self.conj(a))

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise DivisionByZero("negative power of zero")
            return 1 if e == 0 else 0
        if self.log_np is not None:
            return int(self.exp_np[(int(self.log_np[a]) * e) % self.order])
        if e < 0:
            a, e = self.inv(a), -e
        e %= self.order
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def _find_generator(self) -> int:
        n = self.order
        primes = prime_factors(n)
        # encodings below q lie in F_q and cannot have order q^2 - 1
        for g in range(self.q, self.size):
            if all(self.pow(g, n // r) != 1 for r in primes):
                return g
        raise AssertionError("no generator found")  # pragma: no cover

    # vector ops
    def add_vec(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        M, q = self.mid, self.q
        return M.add_vec(a % q, b % q) + q * M.add_vec(a // q, b // q)

    def neg_vec(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return a
        M, q = self.mid, self.q
        return M.neg_vec(a % q) + q * M.neg_vec(a // q)

    def scale_vec(self, c, a):
        a = np.asarray(a, dtype=np.int64)
        M, q = self.mid, self.q
        return M.mul_vec(c, a % q) + q * M.mul_vec(c, a // q)

    def _tower_mul_vec(self, a, b):
        M, q = self.mid, self.q
        a0, a1 = a % q, a // q
        b0, b1 = b % q, b // q
        t11 = M.mul_vec(a1, b1)
        re = M.sub_vec(M.mul_vec(a0, b0), M.mul_vec(self.c0, t11))
        im = M.sub_vec(M.add_vec(M.mul_vec(a0, b1), M.mul_vec(a1, b0)), M.mul_vec(self.c1, t11))
        return re + q * im

    def mul_vec(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        a, b = np.broadcast_arrays(a, b)
        if self.log_np is not None:
            res = self.exp_np[(self.log_np[a] + self.log_np[b]) % self.order]
            return np.where((a == 0) | (b == 0), 0, res)
        return self._tower_mul_vec(a, b)

    def pow_vec(self, a, e: int):
        a = np.asarray(a, dtype=np.int64)
        if e == 0:
            return np.ones_like(a)
        if self.log_np is not None:
            res = self.exp_np[(self.log_np[a] * (e % self.order)) % self.order]
            return np.where(a == 0, 0, res)
        if e < 0:
            raise ValueError("negative vector powers need the log tables")
        r = np.ones_like(a)
        base = a.copy()
        while e:
            if e & 1:
                r = self._tower_mul_vec(r, base)
            base = self._tower_mul_vec(base, base)
            e >>= 1
        return r

    def build_tables(self) -> bool:
        """Materialise log/exp tables; returns False when the field is too large."""
        if self.log_np is not None:
            return True
        if self.size > self.table_limit:
            return False
        n = self.order
        block = math.isqrt(n) + 1
        first = [1] * block
        for i in range(1, block):
            first[i] = self.mul(first[i - 1], self.generator)
        step = self.mul(first[-1], self.generator)
        first = np.array(first, dtype=np.int64)
        exp = np.empty(block * (n // block + 1), dtype=np.int64)
        cur = first
        step_vec = np.full(block, step, dtype=np.int64)
        for j in range(n // block + 1):
            exp[j * block:(j + 1) * block] = cur
            cur = self._tower_mul_vec(cur, step_vec)
        exp = exp[:n]
        log = np.zeros(self.size, dtype=np.int64)
        log[exp] = np.arange(n, dtype=np.int64)
        if np.bincount(exp, minlength=self.size).max() != 1:  # pragma: no cover - bad generator
            raise AssertionError("top generator tables are inconsistent")
        self.exp_np = exp
        self.log_np = log
        return True


# ---------------------------------------------------------------------------
# context

class FieldCtx:
    """A prime-power field F_q together with its quadratic extension F_{q^2}.

    Treat instances as immutable.  Lazily built tables are cached on first use.
    """

    def __init__(self, p: int, k: int, mid_modulus: Sequence[int] | None = None,
                 top_modulus: Sequence[int] | None = None, bound: int = DEFAULT_BOUND):
        if not is_prime(p):
            raise NotPrime(f"p={p} is not prime")
        if k < 1:
            raise ValueError(f"k={k} must be >= 1")
        if p ** (2 * k) > bound:
            raise BoundExceeded(f"p^(2k) = {p ** (2 * k)} exceeds the enumeration bound {bound}")
        self.p = p
        self.k = k
        self.q = p**k
        self.bound = bound
        if mid_modulus is None:
            mid_modulus = smallest_irreducible(p, k)
        else:
            mid_modulus = [int(c) % p for c in mid_modulus]
            if len(_ptrim(list(mid_modulus))) != k + 1 or mid_modulus[-1] != 1:
                raise NotIrreducible(f"mid modulus must be monic of degree {k}")
            if not is_irreducible_fp(mid_modulus, p):
                raise NotIrreducible(f"{mid_modulus} is reducible over F_{p}")
        self.base = PrimeLevel(p)
        self.mid = MidLevel(p, k, mid_modulus)
        if top_modulus is None:
            top_modulus = self._smallest_top_modulus()
        else:
            top_modulus = [int(c) for c in top_modulus]
            if len(top_modulus) != 3 or top_modulus[2] != 1 or any(not 0 <= c < self.q for c in top_modulus):
                raise NotIrreducible("top modulus must be a monic quadratic over F_q")
            if self._quadratic_has_root(top_modulus[1], top_modulus[0]):
                raise NotIrreducible(f"{top_modulus} has a root in F_q")
        self.top = TopLevel(self.mid, top_modulus)
        self._memo: dict = {}

    # -- construction helpers
    def _quadratic_values(self, c1: int) -> np.ndarray:
        xs = np.arange(self.q, dtype=np.int64)
        M = self.mid
        return M.add_vec(M.mul_vec(xs, xs), M.mul_vec(c1, xs))

    def _quadratic_has_root(self, c1: int, c0: int) -> bool:
        vals = self._quadratic_values(c1)
        return bool(np.any(vals == self.mid.neg(c0)))

    def _smallest_top_modulus(self) -> list[int]:
        M = self.mid
        for c1 in range(self.q):
            hit = np.zeros(self.q, dtype=bool)
            hit[self._quadratic_values(c1)] = True
            for c0 in range(self.q):
                if not hit[M.neg(c0)]:
                    return [c0, c1, 1]
        raise AssertionError("no irreducible quadratic found")  # pragma: no cover

    # -- descriptive properties
    @property
    def mid_modulus(self) -> list[int]:
        return list(self.mid.modulus)

    @property
    def top_modulus(self) -> list[int]:
        return list(self.top.modulus)

    @property
    def mid_generator(self) -> int:
        return self.mid.generator

    @property
    def top_generator(self) -> int:
        return self.top.generator

    @property
    def even(self) -> bool:
        return self.p == 2

    def level(self, name: str):
        try:
            return {"base": self.base, "mid": self.mid, "top": self.top}[name]
        except KeyError:
            raise LevelMismatch(f"unknown level {name!r}") from None

    def elem(self, value: int, level: str = "mid") -> "FieldElement":
        return FieldElement(self, level, value)

    def describe(self) -> dict:
        return {
            "p": self.p,
            "k": self.k,
            "mid_modulus": from_digits(self.mid.modulus, self.p),
            "top_modulus": self.top.modulus[0] + self.top.modulus[1] * self.q + self.q * self.q,
        }

    def __repr__(self):
        return f"FieldCtx(p={self.p}, k={self.k})"

    # -- cached tables
    @cached_property
    def trace_table(self) -> np.ndarray:
        """Tr_{F_q/F_p} of every mid-level encoding."""
        M, p, k = self.mid, self.p, self.k
        basis_tr = []
        for i in range(k):
            e = p**i  # encoding of t^i
            acc, x = 0, e
            for _ in range(k):
                acc = M.add(acc, x)
                x = M.pow(x, p)
            assert acc < p
            basis_tr.append(acc)
        xs = np.arange(self.q, dtype=np.int64)
        tot = np.zeros(self.q, dtype=np.int64)
        for i, t in enumerate(basis_tr):
            tot += ((xs // p**i) % p) * t
        return tot % p

    @cached_property
    def eta_table(self) -> np.ndarray:
        if self.p == 2:
            raise EvenCharacteristic("quadratic character needs odd characteristic")
        M = self.mid
        tab = np.where(M.log_np % 2 == 0, 1, -1).astype(np.int64)
        tab[0] = 0
        return tab

    @cached_property
    def mu(self) -> np.ndarray:
        """mu_{q+1} in generator order: entry i is omega^i with omega = top_generator^(q-1)."""
        T = self.top
        omega = T.pow(T.generator, self.q - 1)
        out = [1] * (self.q + 1)
        for i in range(1, self.q + 1):
            out[i] = T.mul(out[i - 1], omega)
        return np.array(out, dtype=np.int64)

    @cached_property
    def mu_index(self) -> dict[int, int]:
        return {int(v): i for i, v in enumerate(self.mu)}

    def mid_array(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    def top_array(self) -> np.ndarray:
        if self.q * self.q > self.bound:
            raise BoundExceeded("F_{q^2} exceeds the enumeration bound")
        return np.arange(self.q * self.q, dtype=np.int64)

    # -- scalar predicates on encodings
    def trace(self, a: int) -> int:
        return int(self.trace_table[a])

    def eta(self, a: int) -> int:
        return int(self.eta_table[a])

    def memo(self, key, factory):
        """Per-context memo for derived data (Dickson sequences etc.)."""
        if key not in self._memo:
            self._memo[key] = factory()
        return self._memo[key]


def ctx_new(p: int, k: int, mid_modulus: Sequence[int] | None = None, *,
            top_modulus: Sequence[int] | None = None, bound: int = DEFAULT_BOUND) -> FieldCtx:
    return FieldCtx(p, k, mid_modulus, top_modulus, bound)


def read_modulus_file(path: str | Path) -> dict[str, list[int]]:
    """Parse lines like ``mid: 1 1 0 1`` (coefficients from the constant term up)."""
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        level, _, rest = line.partition(":")
        level = level.strip()
        if level not in ("mid", "top"):
            raise ValueError(f"unknown modulus level {level!r}")
        out[level] = [int(tok) for tok in rest.split()]
    return out


# ---------------------------------------------------------------------------
# element wrapper

class FieldElement:
    __slots__ = ("ctx", "level", "value")

    def __init__(self, ctx: FieldCtx, level: str, value: int):
        if level not in LEVELS:
            raise LevelMismatch(f"unknown level {level!r}")
        size = ctx.level(level).size
        value = int(value)
        if not 0 <= value < size:
            raise ValueError(f"encoding {value} out of range for level {level}")
        self.ctx = ctx
        self.level = level
        self.value = value

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.ctx.level(self.level).coeffs(self.value)

    def _field(self):
        return self.ctx.level(self.level)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.ctx is not self.ctx or other.level != self.level:
                raise LevelMismatch(f"{self.level} vs {other.level}")
            return other.value
        if isinstance(other, int):
            return self.ctx.mid.from_int(other)
        return NotImplemented

    def _wrap(self, v: int) -> "FieldElement":
        return FieldElement(self.ctx, self.level, v)

    def __add__(self, other):
        return self._wrap(self._field().add(self.value, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self._field().sub(self.value, self._coerce(other)))

    def __rsub__(self, other):
        return self._wrap(self._field().sub(self._coerce(other), self.value))

    def __neg__(self):
        return self._wrap(self._field().neg(self.value))

    def __mul__(self, other):
        return self._wrap(self._field().mul(self.value, self._coerce(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._wrap(self._field().div(self.value, self._coerce(other)))

    def __pow__(self, e: int):
        return self._wrap(self._field().pow(self.value, e))

    def inverse(self):
        return self._wrap(self._field().inv(self.value))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return other.ctx is self.ctx and other.level == self.level and other.value == self.value
        if isinstance(other, int):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash((id(self.ctx), self.level, self.value))

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"FieldElement({self.level}, {self.value})"

    def pretty(self) -> str:
        """Polynomial-basis form, e.g. ``t^2+1`` (mid) or ``(1)*y+(t)`` (top)."""
        if self.level == "top":
            u0, u1 = self.coeffs
            return f"({_pretty_mid(self.ctx, u1)})*y+({_pretty_mid(self.ctx, u0)})"
        return _pretty_mid(self.ctx, self.value)


def _pretty_mid(ctx: FieldCtx, v: int) -> str:
    digits = to_digits(v, ctx.p, ctx.k)
    parts = []
    for i in reversed(range(ctx.k)):
        c = digits[i]
        if not c:
            continue
        mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
        if not mono:
            parts.append(str(c))
        else:
            parts.append(mono if c == 1 else f"{c}*{mono}")
    return "+".join(parts) or "0"


# ---------------------------------------------------------------------------
# operations on wrapped elements

def _unwrap(ctx: FieldCtx, e, level: str) -> int:
    if isinstance(e, FieldElement):
        if e.ctx is not ctx:
            raise LevelMismatch("element belongs to a different context")
        if e.level != level:
            raise LevelMismatch(f"expected a {level}-level element, got {e.level}")
        return e.value
    return int(e)


def field_arith(ctx: FieldCtx, op: str, *operands: FieldElement) -> FieldElement:
    """Apply ``op`` in {add, sub, mul, inv, pow} to elements sharing one level."""
    if not operands or not isinstance(operands[0], FieldElement):
        raise LevelMismatch("first operand must be a FieldElement")
    level = operands[0].level
    F = ctx.level(level)
    a = _unwrap(ctx, operands[0], level)
    if op == "inv":
        return FieldElement(ctx, level, F.inv(a))
    if op == "pow":
        return FieldElement(ctx, level, F.pow(a, int(operands[1])))
    b = _unwrap(ctx, operands[1], level)
    fn = {"add": F.add, "sub": F.sub, "mul": F.mul}.get(op)
    if fn is None:
        raise ValueError(f"unknown op {op!r}")
    return FieldElement(ctx, level, fn(a, b))


def trace_to_prime(ctx: FieldCtx, e) -> FieldElement:
    return FieldElement(ctx, "base", ctx.trace(_unwrap(ctx, e, "mid")))


def quadratic_character(ctx: FieldCtx, e) -> int:
    if ctx.p == 2:
        raise EvenCharacteristic("quadratic character needs odd characteristic")
    return ctx.eta(_unwrap(ctx, e, "mid"))


def norm_to_subfield(ctx: FieldCtx, c: int, d: int) -> int:
    """N_{F_q / F_{p^d}}(c) = c^((q-1)/(p^d-1)) for d | k."""
    if ctx.k % d:
        raise ValueError(f"{d} does not divide {ctx.k}")
    return ctx.mid.pow(c, (ctx.q - 1) // (ctx.p**d - 1))


def sqrt_int(F, e: int) -> int | None:
    """Square root in a level object; the smaller encoding of the two roots."""
    if e == 0:
        return 0
    Q = F.size
    if F.p == 2:
        return F.pow(e, Q // 2)
    if F.pow(e, (Q - 1) // 2) != 1:
        return None
    if Q % 4 == 3:
        r = F.pow(e, (Q + 1) // 4)
    else:
        odd, s = Q - 1, 0
        while odd % 2 == 0:
            odd //= 2
            s += 1
        z = next(c for c in range(2, Q) if F.pow(c, (Q - 1) // 2) != 1)
        m, c, t, r = s, F.pow(z, odd), F.pow(e, odd), F.pow(e, (odd + 1) // 2)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = F.mul(t2, t2)
                i += 1
            b = F.pow(c, 1 << (m - i - 1))
            m, c = i, F.mul(b, b)
            t, r = F.mul(t, c), F.mul(r, b)
    return min(r, F.neg(r))


def sqrt(ctx: FieldCtx, e) -> FieldElement | None:
    level = e.level if isinstance(e, FieldElement) else "mid"
    F = ctx.level(level)
    r = sqrt_int(F, _unwrap(ctx, e, level))
    return None if r is None else FieldElement(ctx, level, r)


def quadratic_solvable(ctx: FieldCtx, u, v) -> bool:
    """Whether x^2 + u*x + v has a root in F_q (char 2): Tr(v/u^2) = 0."""
    if ctx.p != 2:
        raise OddCharacteristic("quadratic_solvable is a characteristic-2 predicate")
    u, v = _unwrap(ctx, u, "mid"), _unwrap(ctx, v, "mid")
    if u == 0:
        raise ZeroCoefficient("u must be nonzero")
    M = ctx.mid
    return ctx.trace(M.div(v, M.mul(u, u))) == 0


def cubic_unique_root(ctx: FieldCtx, u, v) -> bool:
    """Whether x^3 + u*x + v has exactly one root in F_q (char 2): Tr(u^3/v^2 + 1) != 0."""
    if ctx.p != 2:
        raise OddCharacteristic("cubic_unique_root is a characteristic-2 predicate")
    u, v = _unwrap(ctx, u, "mid"), _unwrap(ctx, v, "mid")
    if v == 0:
        raise ZeroCoefficient("v must be nonzero")
    M = ctx.mid
    return ctx.trace(M.add(M.div(M.pow(u, 3), M.mul(v, v)), 1)) != 0


def enumerate_set(ctx: FieldCtx, which: str) -> Iterator[FieldElement]:
    """Yield every element of ``mid_field``, ``top_field`` or ``mu`` (in generator order)."""
    if which == "mid_field":
        if ctx.q > ctx.bound:
            raise BoundExceeded("F_q exceeds the enumeration bound")
        return (FieldElement(ctx, "mid", v) for v in range(ctx.q))
    if which == "top_field":
        if ctx.q * ctx.q > ctx.bound:
            raise BoundExceeded("F_{q^2} exceeds the enumeration bound")
        return (FieldElement(ctx, "top", v) for v in range(ctx.q * ctx.q))
    if which == "mu":
        return (FieldElement(ctx, "top", int(v)) for v in ctx.mu)
    raise ValueError(f"unknown set {which!r}")
