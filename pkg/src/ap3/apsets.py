"""Counting three-term progressions, certifying their absence, and building
progression-free sets.

A progression is a triple ``x, x+y, x+2y``; it is trivial when ``y = 0``.  Counts
are of ordered pairs ``(x, y)``, so every nontrivial progression is counted
twice (once per direction).  Sets in an odd-order group use the group law;
sets in [N] use integer arithmetic with no wraparound.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import DomainRefusal, NotAPFree
from .groups import AmbientGroup, Interval, SiteSet


@dataclass(frozen=True)
class APCount:
    total: int
    trivial: int

    @property
    def nontrivial(self) -> int:
        return self.total - self.trivial


class APCheck(NamedTuple):
    free: bool
    witness: Optional[tuple[int, int]]

    def __bool__(self):
        return self.free


def _check_countable(A: SiteSet) -> None:
    if not A.is_interval and A.group.order % 2 == 0:
        raise DomainRefusal("3-AP counts need an odd-order group")


def _midpoints(A: SiteSet, a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Midpoints of the pairs (a, b) and a mask of pairs that have one."""
    if A.is_interval:
        s = a + b
        return s // 2, (s % 2) == 0
    g = A.group
    inv2 = (g.order + 1) // 2 if g.is_cyclic else 2
    m = g.scale(inv2, g.add(a, b))
    return np.asarray(m), np.ones(np.shape(m), dtype=bool)


def _progression_pairs(A: SiteSet, chunk: int = 2048):
    """Yield arrays (x, m) of ordered endpoint/midpoint pairs, x != far end."""
    arr = A.array()
    ind = A.indicator().astype(bool)
    for start in range(0, len(arr), chunk):
        a = arr[start:start + chunk, None]
        b = arr[None, :]
        a_full = np.broadcast_to(a, (a.shape[0], len(arr)))
        b_full = np.broadcast_to(b, a_full.shape)
        m, ok = _midpoints(A, a_full, b_full)
        ok = ok & (a_full != b_full)
        hit = np.zeros_like(ok)
        hit[ok] = ind[m[ok]]
        yield a_full[hit], m[hit]


def _count_pairs(A: SiteSet) -> int:
    return sum(len(x) for x, _ in _progression_pairs(A)) + len(A)


def _count_loop(A: SiteSet) -> int:
    ind = A.indicator().astype(bool)
    if A.is_interval:
        N = A.ambient.length
        total = 0
        x = np.arange(1, N + 1)
        for y in range(-(N - 1), N):
            x1, x2 = x + y, x + 2 * y
            ok = (x1 >= 1) & (x1 <= N) & (x2 >= 1) & (x2 <= N)
            total += int(np.sum(ind[x[ok]] & ind[x1[ok]] & ind[x2[ok]]))
        return total
    g = A.group
    idx = np.arange(g.order)
    total = 0
    for y in range(g.order):
        total += int(np.sum(ind & ind[g.add(idx, y)] & ind[g.add(idx, g.scale(2, y))]))
    return total


def sum_representations(A: SiteSet) -> np.ndarray:
    """Integer counting convolution ``r(s) = #{(a, b) in A^2 : a + b = s}``."""
    ind = A.indicator()
    if A.is_interval:
        return np.convolve(ind, ind)
    g = A.group
    idx = np.arange(g.order)
    r = np.zeros(g.order, dtype=np.int64)
    for a in A.elements:
        r += ind[g.sub(idx, a)]
    return r


def _count_convolution(A: SiteSet) -> int:
    r = sum_representations(A)
    arr = A.array()
    if A.is_interval:
        return int(r[2 * arr].sum())
    return int(r[A.group.scale(2, arr)].sum())


def count_3aps(A: SiteSet, method: str = "auto") -> APCount:
    """Exact number of pairs (x, y) with x, x+y, x+2y all in A."""
    _check_countable(A)
    if method == "auto":
        method = "convolution" if len(A) * A.ambient.order <= 20_000_000 else "pairs"
    if method == "loop":
        total = _count_loop(A)
    elif method == "convolution":
        total = _count_convolution(A)
    elif method == "pairs":
        total = _count_pairs(A)
    else:
        raise ValueError(f"unknown counting method {method!r}")
    return APCount(total=total, trivial=len(A))


def is_ap_free(A: SiteSet) -> APCheck:
    """AP-freeness with the lexicographically least witness (x, y) on failure."""
    _check_countable(A)
    best = None
    for x, m in _progression_pairs(A):
        if not len(x):
            continue
        if A.is_interval:
            y = m - x
        else:
            y = np.asarray(A.group.sub(m, x))
        order = np.lexsort((y, x))
        cand = (int(x[order[0]]), int(y[order[0]]))
        if best is None or cand < best:
            best = cand
    return APCheck(best is None, best)


def require_ap_free(A: SiteSet, what: str = "input") -> None:
    check = is_ap_free(A)
    if not check.free:
        raise NotAPFree(check.witness, f"{what} contains a nontrivial 3-AP")


# -- constructions ----------------------------------------------------------


def construct_digit(N: int) -> SiteSet:
    """Elements of [N] whose base-3 digits are all 0 or 1."""
    if N < 1:
        raise ValueError("N must be positive")
    k = 0
    while 3**k <= N:
        k += 1
    powers = 3 ** np.arange(k, dtype=np.int64)
    bits = (np.arange(2**k, dtype=np.int64)[:, None] >> np.arange(k)) & 1
    vals = bits @ powers
    vals = vals[(vals >= 1) & (vals <= N)]
    return SiteSet(Interval(N), tuple(int(v) for v in np.sort(vals)))


@dataclass(frozen=True)
class BehrendParams:
    dimension: int
    base: int
    radius: int
    shell_size: int


def behrend_params(N: int, d: int | None = None) -> BehrendParams:
    if N < 64 and d is None:
        raise ValueError("Behrend construction needs N >= 64")
    if d is None:
        d = round(math.sqrt(math.log2(N)))
    if d < 2:
        raise ValueError("N too small for a Behrend sphere of dimension >= 2")
    b = int(math.floor(N ** (1.0 / d) / 2))
    while (2 * (b + 1)) ** d <= N:  # guard against floating roots
        b += 1
    while b > 0 and (2 * b) ** d > N:
        b -= 1
    if b < 2:
        raise ValueError("N too small for base >= 2")
    shells = Counter(sum(v * v for v in pt) for pt in itertools.product(range(b), repeat=d))
    size = max(shells.values())
    radius = min(r for r, c in shells.items() if c == size)
    return BehrendParams(d, b, radius, size)


def construct_behrend(N: int, d: int | None = None) -> SiteSet:
    """Most populated sphere of {0..b-1}^d, read as base-2b digits, shifted into [N].

    Digits below b never carry when two points are added, so x + z = 2y holds
    digitwise; strict convexity of the sphere then forces x = z.
    """
    p = behrend_params(N, d)
    pts = [pt for pt in itertools.product(range(p.base), repeat=p.dimension)
           if sum(v * v for v in pt) == p.radius]
    radix = 2 * p.base
    vals = sorted(1 + sum(v * radix**i for i, v in enumerate(pt)) for pt in pts)
    return SiteSet(Interval(N), tuple(vals))


def construct_salem_spencer(N: int, d: int | None = None) -> SiteSet:
    """Experimental: fixed-digit-multiset construction in base 2d+1 with digits <= d.

    All elements share one multiset of digits, so their digit vectors have equal
    Euclidean norm and the same convexity argument as Behrend's applies.  With
    ``d=None`` the d giving the largest set is used.
    """
    if N < 3:
        raise ValueError("N must be at least 3")
    if d is None:
        options = []
        for dd in range(1, max(2, int(math.log(N)) + 1)):
            if (2 * dd + 1) ** 1 <= N:
                options.append(construct_salem_spencer(N, dd))
        return max(options, key=lambda s: (len(s), [-e for e in s.elements]))
    base = 2 * d + 1
    k = 0
    while base ** (k + 1) <= N:
        k += 1
    if k == 0:
        raise ValueError("N smaller than the base")
    best_counts, best_size = None, -1
    for counts in _compositions(k, d + 1):
        size = math.factorial(k)
        for c in counts:
            size //= math.factorial(c)
        if size > best_size:
            best_counts, best_size = counts, size
    digits = [v for v, c in enumerate(best_counts) for _ in range(c)]
    vals = sorted({1 + sum(v * base**i for i, v in enumerate(perm))
                   for perm in set(itertools.permutations(digits))})
    return SiteSet(Interval(N), tuple(vals))


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def product_lift(A: SiteSet, B: SiteSet) -> SiteSet:
    """Cap set {(a, b)} in F_3^(m+n) from cap sets A in F_3^m and B in F_3^n."""
    if A.is_interval or B.is_interval or A.group.is_cyclic or B.group.is_cyclic:
        raise DomainRefusal("product lift needs two vector-group sets")
    require_ap_free(A, "left factor")
    require_ap_free(B, "right factor")
    m, n = A.group.dimension, B.group.dimension
    shift = 3**m
    els = sorted(a + shift * b for a in A.elements for b in B.elements)
    return SiteSet(AmbientGroup.vector(m + n), tuple(els))


# -- embeddings and restrictions -------------------------------------------


def embed_cyclic(A: SiteSet, p: int) -> SiteSet:
    """View a subset of [N] inside Z/pZ (residues 1..N)."""
    if not A.is_interval or p <= A.ambient.length:
        raise ValueError("need an interval set and p > N")
    return SiteSet(AmbientGroup.cyclic(p), A.elements)


def restrict_to_progression(A: SiteSet, start: int, step: int, length: int) -> SiteSet:
    """``{n in [length] : start + step*n in A}`` as a subset of [length]."""
    els = [n for n in range(1, length + 1) if start + step * n in A]
    return SiteSet(Interval(length), tuple(els))
