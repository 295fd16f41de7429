"""Brute-force permutation checks by full enumeration.

Two exact evaluators are available for f(x) = x^r h(x^(q-1)) on F_{q^2}:

* ``direct`` sums c * x^E term by term using the log/exp tables of F_{q^2};
* ``factored`` evaluates h once on mu_{q+1} and uses that x^(q-1) = mu[j mod (q+1)]
  when x = g^j, so every point costs one table lookup.

Both run over the same enumeration order (0 first, then g^0, g^1, ...), which
keeps collision witnesses identical across modes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import BoundExceeded, EvenCharacteristic, OddCharacteristic, VerdictMismatch
from .ff_core import TOP_TABLE_LIMIT

# direct evaluation when (#terms) * q^2 stays below this
DIRECT_WORK_LIMIT = 2**20  # terms * q^2 above this uses the factored evaluation


@dataclass
class PermVerdict:
    is_permutation: bool
    collision: Optional[tuple] = None
    domain_size: int = 0
    kind: Optional[str] = None  # None, "collision", "escape" or "undefined"
    witness: Optional[tuple] = None

    def to_dict(self) -> dict:
        return {
            "is_permutation": self.is_permutation,
            "kind": self.kind,
            "collision": list(self.collision) if self.collision else None,
            "witness": list(self.witness) if self.witness else None,
            "domain_size": self.domain_size,
        }


def find_collision(values) -> Optional[tuple[int, int]]:
    """(i, j) with values[i] == values[j], i the smallest index that has a partner and
    j the next index sharing its value; None when all values are distinct."""
    values = np.asarray(values)
    if values.size and values.min() >= 0 and values.max() < 4 * values.size + 16:
        # dense small range: one counting pass settles the common no-repeat case
        counts = np.bincount(values)
        if counts.max() <= 1:
            return None
        repeated = counts[values] > 1
    else:
        sv = np.sort(values)
        dup = sv[1:][sv[1:] == sv[:-1]]
        if dup.size == 0:
            return None
        repeated = np.isin(values, dup)
    i = int(np.argmax(repeated))
    j = i + 1 + int(np.argmax(values[i + 1:] == values[i]))
    return i, j


def verdict_from_images(domain: np.ndarray, images: np.ndarray,
                        defined: Optional[np.ndarray] = None,
                        target: Optional[np.ndarray] = None) -> PermVerdict:
    """Decide whether x -> images[x] permutes ``domain``.

    ``target`` is the set the images must land in (defaults to the domain
    itself when given; pass None for maps into a whole field).
    """
    n = int(domain.size)
    if defined is not None and not np.all(defined):
        bad = int(np.argmin(defined))
        return PermVerdict(False, None, n, "undefined", (int(domain[bad]),))
    if target is not None:
        inside = np.isin(images, target)
        if not inside.all():
            bad = int(np.argmin(inside))
            return PermVerdict(False, None, n, "escape", (int(domain[bad]), int(images[bad])))
    col = find_collision(images)
    if col is not None:
        i, j = col
        return PermVerdict(False, (int(domain[i]), int(domain[j])), n, "collision")
    return PermVerdict(True, None, n)


# ---------------------------------------------------------------------------
# f on F_{q^2}

def _top_tables(ctx):
    T = ctx.top
    if T.size > min(ctx.bound, TOP_TABLE_LIMIT) or not T.build_tables():
        raise BoundExceeded(f"F_{{q^2}} with q^2 = {T.size} is beyond the enumeration limit")
    return T


def f_values(ctx, af, mode: str = "auto") -> tuple[np.ndarray, np.ndarray]:
    """(points, f(points)) over all of F_{q^2}, 0 first and then g^j for j = 0..q^2-2."""
    T = _top_tables(ctx)
    N = T.order
    if mode == "auto":
        mode = "direct" if len(af.terms) * T.size <= DIRECT_WORK_LIMIT else "factored"
    j = np.arange(N, dtype=np.int64)
    if mode == "direct":
        acc = np.zeros(N, dtype=np.int64)
        for e, c in af.terms:
            lc = int(T.log_np[c])
            acc = T.add_vec(acc, T.exp_np[(lc + j * e) % N])
    elif mode == "factored":
        from .poly import laurent_values_on_mu
        hv = laurent_values_on_mu(ctx, af.h)
        n = ctx.q + 1
        hj = hv[j % n]
        acc = np.where(hj == 0, 0,
                       T.exp_np[(j * (af.r % N) + T.log_np[np.where(hj == 0, 1, hj)]) % N])
    else:
        raise ValueError(f"unknown mode {mode!r}")
    points = np.concatenate(([0], T.exp_np))
    values = np.concatenate(([0], acc))
    return points, values


def check_f_permutes(ctx, af, mode: str = "auto") -> PermVerdict:
    points, values = f_values(ctx, af, mode)
    return verdict_from_images(points, values)


# ---------------------------------------------------------------------------
# generic domains

def domain_array(ctx, domain: str) -> np.ndarray:
    if domain == "full_ext_field":
        return ctx.top_array()
    if domain == "mid_field":
        return ctx.mid_array()
    if domain == "mu":
        return ctx.mu.copy()
    from .criterion import S_with_poles, build_T
    if domain == "S_with_poles":
        return S_with_poles(ctx)
    if domain == "T":
        return build_T(ctx).array()
    raise ValueError(f"unknown domain {domain!r}")


def check_permutation(ctx, domain: str, fmap: Callable) -> PermVerdict:
    """Whether ``fmap`` permutes the named domain.

    ``fmap`` takes an int64 array of encodings and returns either the images
    or a pair (images, defined-mask).  For the closed domains (mu, S u {2,-2},
    T) images must stay inside the domain.
    """
    dom = domain_array(ctx, domain)
    out = fmap(dom)
    defined = None
    if isinstance(out, tuple):
        out, defined = out
    images = np.asarray(out, dtype=np.int64)
    closed = domain in ("mu", "S_with_poles", "T")
    return verdict_from_images(dom, images, defined, dom if closed else None)


def _parity_of(ctx) -> str:
    return "even_char" if ctx.p == 2 else "odd_char"


def check_L_permutes_T(ctx, l: Callable, parity: Optional[str] = None) -> PermVerdict:
    """Whether L(b) permutes T, with L(b) = b + l(b) + l(b)^2 (even) or b l(b)^2 (odd).

    ``l`` is vectorised over T and may return (values, defined-mask).
    """
    parity = parity or _parity_of(ctx)
    if parity != _parity_of(ctx):
        raise (OddCharacteristic if ctx.p != 2 else EvenCharacteristic)(
            f"parity {parity} does not match characteristic {ctx.p}")
    from .criterion import build_T, even_L_values, odd_L_values
    Tset = build_T(ctx).array()
    out = l(Tset)
    defined = None
    if isinstance(out, tuple):
        out, defined = out
    lv = np.asarray(out, dtype=np.int64)
    if parity == "even_char":
        L = even_L_values(ctx, lv, Tset)
    else:
        L = odd_L_values(ctx, lv, Tset)
    return verdict_from_images(Tset, L, defined, Tset)


def linear_l_values(ctx, alphas, xs: np.ndarray) -> np.ndarray:
    """l(b) = sum alpha_i b^(2^i)."""
    M = ctx.mid
    xs = np.asarray(xs, dtype=np.int64)
    lv = np.zeros_like(xs)
    pw = xs
    for a in alphas:
        if a:
            lv = M.add_vec(lv, M.mul_vec(a, pw))
        pw = M.mul_vec(pw, pw)
    return lv


def linearized_values(ctx, alphas, xs: np.ndarray) -> np.ndarray:
    """L(b) = b + l(b) + l(b)^2."""
    M = ctx.mid
    lv = linear_l_values(ctx, alphas, xs)
    return M.add_vec(M.add_vec(np.asarray(xs, dtype=np.int64), lv), M.mul_vec(lv, lv))


def check_linearized_perm(ctx, alphas, cross_check: bool = True) -> bool:
    """Whether the linearized L permutes F_q (trivial kernel), cross-checked on T."""
    if ctx.p != 2:
        raise OddCharacteristic("linearized L(b) is a characteristic-2 construction")
    L = linearized_values(ctx, alphas, ctx.mid_array())
    verdict = int(np.count_nonzero(L == 0)) == 1
    if cross_check:
        on_T = check_L_permutes_T(ctx, lambda b: linear_l_values(ctx, alphas, b), "even_char")
        if on_T.is_permutation != verdict:
            raise VerdictMismatch(f"L permutes F_q: {verdict}, L permutes T: {on_T.is_permutation}")
    return verdict
