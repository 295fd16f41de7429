"""A deliberately naive second implementation of F_{p^n}, used as an independent oracle.

Elements are tuples of base-p coefficients of a flat extension F_p[z]/(m(z)),
with no tower, no tables and no numpy.  The mid field F_q of a FieldCtx is
embedded by finding a root of its modulus, so polynomials built by the library
can be evaluated here without touching the library's arithmetic.
"""

import itertools


class FlatField:
    def __init__(self, p, n):
        self.p, self.n = p, n
        self.modulus = self._find_modulus()
        self.size = p**n

    def _find_modulus(self):
        p, n = self.p, self.n
        for tail in itertools.product(range(p), repeat=n):
            m = list(reversed(tail)) + [1]
            if self._irreducible(m):
                return m
        raise AssertionError("no irreducible polynomial")

    def _irreducible(self, m):
        p, n = self.p, len(m) - 1
        for d in range(1, n // 2 + 1):
            for tail in itertools.product(range(p), repeat=d):
                g = list(tail) + [1]
                r = list(m)
                for i in range(n - d, -1, -1):
                    c = r[i + d]
                    for j in range(d + 1):
                        r[i + j] = (r[i + j] - c * g[j]) % p
                if not any(r[:d]):
                    return False
        return True

    def elements(self):
        return [tuple(t) for t in itertools.product(range(self.p), repeat=self.n)]

    def zero(self):
        return (0,) * self.n

    def one(self):
        return (1,) + (0,) * (self.n - 1)

    def scalar(self, c):
        return (c % self.p,) + (0,) * (self.n - 1)

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def mul(self, a, b):
        p, n, m = self.p, self.n, self.modulus
        prod = [0] * (2 * n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        for i in range(2 * n - 2, n - 1, -1):
            c = prod[i] % p
            if c:
                for j in range(n + 1):
                    prod[i - n + j] -= c * m[j]
        return tuple(v % p for v in prod[:n])

    def pow(self, a, e):
        r = self.one()
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r


def embed_mid(ctx, F):
    """Map mid-level encodings of ctx into F (which must contain F_q).

    Returns a dict encoding -> element of F.
    """
    m = ctx.mid_modulus
    root = None
    for z in F.elements():
        acc = F.zero()
        for c in reversed(m):
            acc = F.add(F.mul(acc, z), F.scalar(c))
        if acc == F.zero():
            root = z
            break
    assert root is not None
    powers = [F.one()]
    for _ in range(ctx.k - 1):
        powers.append(F.mul(powers[-1], root))
    out = {}
    for code in range(ctx.q):
        acc, v = F.zero(), code
        for i in range(ctx.k):
            acc = F.add(acc, F.mul(F.scalar(v % ctx.p), powers[i]))
            v //= ctx.p
        out[code] = acc
    return out


def permutes_ext(ctx, terms, cache={}):
    """Whether sum c * x^e (mid-level c, integer e >= 0) permutes F_{q^2}, by brute force."""
    key = (ctx.p, ctx.k, tuple(ctx.mid_modulus))
    if key not in cache:
        F = FlatField(ctx.p, 2 * ctx.k)
        cache[key] = (F, embed_mid(ctx, F), F.elements())
    F, emb, els = cache[key]
    # exponent 0 modulo q^2 - 1 stands for x^(q^2-1), which vanishes at 0
    top = F.size - 1
    images = set()
    for x in els:
        acc = F.zero()
        for e, c in terms:
            acc = F.add(acc, F.mul(emb[c], F.pow(x, e or top)))
        images.add(acc)
    return len(images) == len(els)
