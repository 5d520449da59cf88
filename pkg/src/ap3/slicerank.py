"""The polynomial-method bound for cap sets.

For a cap set A in F_3^n the diagonal indicator on A x A x A equals
1_{x+y+z=0}, which is the polynomial prod_i (1 - (x_i + y_i + z_i)^2).  Sorting
its monomials by which variable block has small degree writes it as a sum of
few slices, while the diagonal on any set S needs |S| slices.  The count
M(n) = 3 * #{a in {0,1,2}^n : sum(a) < 2n/3} bounds the number of slices when
3 does not divide n.  When it does, monomials whose three blocks all have
degree exactly 2n/3 have no block strictly below 2n/3; they are put on the x
block and counted in ``boundary_monomials``, and the slice count can then
exceed M(n).

Everything here is exact F_3 or integer arithmetic except the rate columns.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy import sparse
from scipy.optimize import minimize_scalar

from . import f3
from .apsets import require_ap_free
from .errors import DomainRefusal, TheoremViolation
from .groups import SiteSet

DP_LIMIT = 2000
RATE_CEILING = 2.7552
RATE_FROM = 50
EXPLICIT_MAX_DIM = 6
FULL_CHECK_MAX = 64
SAMPLE_TRIPLES = 1_000_000


# -- counting ------------------------------------------------------------------


def digit_sum_counts(n: int) -> list[int]:
    """c[s] = #{a in {0,1,2}^n : sum(a) = s}, by dynamic programming."""
    counts = [1]
    for _ in range(n):
        nxt = [0] * (len(counts) + 2)
        for s, c in enumerate(counts):
            nxt[s] += c
            nxt[s + 1] += c
            nxt[s + 2] += c
        counts = nxt
    return counts


def _small_counts_recurrence(n: int, upto: int) -> list[int]:
    # coefficients of (1 + x + x^2)^n from (s+1)c[s+1] = (n-s)c[s] + (2n-s+1)c[s-1]
    c = [1, n]
    for s in range(1, upto):
        c.append(((n - s) * c[s] + (2 * n - s + 1) * c[s - 1]) // (s + 1))
    return c[: upto + 1]


def count_bound(n: int, method: str = "auto") -> int:
    """M(n) = 3 * #{a in {0,1,2}^n : 3 * sum(a) < 2n}, exactly."""
    if not isinstance(n, int) or n < 1:
        raise ValueError("n must be a positive integer")
    top = (2 * n - 1) // 3  # largest s with 3s < 2n
    if method == "auto":
        method = "dp" if n <= DP_LIMIT else "recurrence"
    if method == "dp":
        counts = digit_sum_counts(n)
    elif method == "recurrence":
        counts = _small_counts_recurrence(n, top)
    else:
        raise ValueError(f"unknown method {method!r}")
    return 3 * sum(counts[: top + 1])


def count_bound_enumeration(n: int) -> int:
    """M(n) by listing all 3^n digit vectors (oracle for small n)."""
    if n > 14:
        raise ValueError("enumeration is limited to n <= 14")
    sums = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        sums = (sums[:, None] + np.arange(3)).reshape(-1)
    return 3 * int(np.sum(3 * sums < 2 * n))


@dataclass(frozen=True)
class RateRow:
    n: int
    bound: int
    root: float  # M(n)^(1/n)
    hoeffding_ok: bool


def _log(m: int) -> float:
    return math.log(m)


def hoeffding_holds(n: int, m: int) -> bool:
    """M(n) <= 3^(n+1) * 2 e^(-n/18), compared in logarithms."""
    return _log(m) <= (n + 1) * math.log(3) + math.log(2) - n / 18


def rate_report(n_max: int, start: int = 1) -> list[RateRow]:
    """(n, M(n), M(n)^(1/n)) for start <= n <= n_max, checking the Hoeffding
    bound for every n and the rate ceiling from n = 50 on."""
    if n_max < 1:
        raise ValueError("n_max must be positive")
    rows = []
    counts = digit_sum_counts(start - 1)
    for n in range(start, n_max + 1):
        nxt = [0] * (len(counts) + 2)
        for k, c in enumerate(counts):
            nxt[k] += c
            nxt[k + 1] += c
            nxt[k + 2] += c
        counts = nxt
        m = 3 * sum(counts[: (2 * n - 1) // 3 + 1])
        root = math.exp(_log(m) / n)
        ok = hoeffding_holds(n, m)
        if not ok:
            raise TheoremViolation(f"Hoeffding bound fails at n={n}")
        if n >= RATE_FROM and root > RATE_CEILING:
            raise TheoremViolation(f"M({n})^(1/{n}) = {root} exceeds {RATE_CEILING}")
        rows.append(RateRow(n, m, root, ok))
    return rows


def hoeffding_rate() -> float:
    """Growth rate 3 / e^(1/18) implied by the Hoeffding estimate."""
    return 3 / math.exp(1 / 18)


def eg_rate_constant() -> tuple[float, float]:
    """min over 0 < x <= 1 of (1 + x + x^2) / x^(2/3), and the minimiser."""
    res = minimize_scalar(lambda x: (1 + x + x * x) / x ** (2 / 3), bounds=(1e-9, 1.0),
                          method="bounded", options={"xatol": 1e-12})
    return float(res.fun), float(res.x)


# -- explicit decompositions --------------------------------------------------------

# 1 - (x + y + z)^2 over F_3, as (coefficient, (deg x, deg y, deg z))
FACTOR_TERMS = (
    (1, (0, 0, 0)),
    (2, (2, 0, 0)),
    (2, (0, 2, 0)),
    (2, (0, 0, 2)),
    (1, (1, 1, 0)),
    (1, (1, 0, 1)),
    (1, (0, 1, 1)),
)

@dataclass(frozen=True, eq=False)
class SlicePart:
    """g(v) * h(u, w) where v is the sliced variable (1, 2 or 3) and (u, w) the
    other two in their natural order."""

    index: int
    g: np.ndarray  # shape (|S|,), values mod 3
    h: np.ndarray  # shape (|S|, |S|), values mod 3
    label: Optional[tuple[int, ...]] = None  # exponent vector of the one-variable monomial


@dataclass(frozen=True, eq=False)
class SliceDecomposition:
    domain: tuple[int, ...]
    parts: tuple[SlicePart, ...]
    monomials: Optional[int] = None  # number of monomials before grouping
    boundary_monomials: int = 0  # monomials with every block degree exactly 2n/3

    @property
    def split(self) -> tuple[int, int, int]:
        """(t1, t2, t): parts sliced on x are 1..t1, on y t1+1..t2, on z the rest."""
        t1 = sum(p.index == 1 for p in self.parts)
        t2 = t1 + sum(p.index == 2 for p in self.parts)
        return t1, t2, len(self.parts)

    def check_tables(self) -> None:
        s = len(self.domain)
        indices = [p.index for p in self.parts]
        if indices != sorted(indices) or any(i not in (1, 2, 3) for i in indices):
            raise ValueError("parts must be grouped by sliced variable 1, 2, 3")
        for p in self.parts:
            if p.g.shape != (s,) or p.h.shape != (s, s):
                raise ValueError("incomplete factor tables")

    def tensor(self) -> np.ndarray:
        """The represented function on S^3, reduced mod 3."""
        self.check_tables()
        s = len(self.domain)
        out = np.zeros((s, s, s), dtype=np.int64)
        for p in self.parts:
            g, h = p.g.astype(np.int64), p.h.astype(np.int64)
            if p.index == 1:
                out += g[:, None, None] * h[None, :, :]
            elif p.index == 2:
                out += g[None, :, None] * h[:, None, :]
            else:
                out += g[None, None, :] * h[:, :, None]
            out %= 3
        return out

    def value(self, i: int, j: int, k: int) -> int:
        total = 0
        for p in self.parts:
            if p.index == 1:
                total += int(p.g[i]) * int(p.h[j, k])
            elif p.index == 2:
                total += int(p.g[j]) * int(p.h[i, k])
            else:
                total += int(p.g[k]) * int(p.h[i, j])
        return total % 3


def _exponent_table(n: int, points: np.ndarray) -> np.ndarray:
    """E[e, s] = prod_i s_i^(e_i) over F_3 for every exponent vector e in {0,1,2}^n."""
    digits = points  # shape (|S|, n)
    powers = np.stack([np.ones_like(digits), digits, (digits * digits) % 3])  # (3, |S|, n)
    table = np.ones((1, len(points)), dtype=np.int64)
    for i in range(n):
        table = (table[None, :, :] * powers[:, None, :, i]) % 3  # new digit is most significant
        table = table.reshape(-1, len(points))
    return table


def expand_monomials(n: int):
    """Yield (coefficient, ex, ey, ez) for all 7^n monomials of the product,
    with exponent vectors encoded little-endian in base 3."""
    for combo in itertools.product(FACTOR_TERMS, repeat=n):
        coef = 1
        ex = ey = ez = 0
        w = 1
        for c, (a, b, d) in combo:
            coef = coef * c % 3
            ex += a * w
            ey += b * w
            ez += d * w
            w *= 3
        yield coef, ex, ey, ez


def _degree(code: int) -> int:
    total = 0
    while code:
        total += code % 3
        code //= 3
    return total


def _digits(code: int, n: int) -> tuple[int, ...]:
    return tuple((code // 3**i) % 3 for i in range(n))


def build_decomposition(A: SiteSet) -> SliceDecomposition:
    """Slice decomposition of the diagonal on A^3 with at most M(n) parts."""
    if A.is_interval or A.group.is_cyclic:
        raise DomainRefusal("expected a cap set in F_3^n")
    n = A.group.dimension
    if n > EXPLICIT_MAX_DIM:
        raise ValueError(f"explicit expansion is limited to n <= {EXPLICIT_MAX_DIM}")
    require_ap_free(A, "set")
    pts = A.group.digits(A.array()).reshape(len(A), n)
    E = _exponent_table(n, pts).astype(float)  # (3^n, |S|)
    size = 3**n
    limit = 2 * n
    degree = [_degree(c) for c in range(size)]

    groups: dict[tuple[int, int], list[tuple[int, int, int]]] = {}
    count = boundary = 0
    for coef, ex, ey, ez in expand_monomials(n):
        count += 1
        choices = ((1, ex, (ey, ez)), (2, ey, (ex, ez)), (3, ez, (ex, ey)))
        pick = next((c for c in choices if 3 * degree[c[1]] < limit), None)
        if pick is None:
            # total degree 2n split evenly (needs 3 | n): no block is strictly
            # below 2n/3, so fall back to the first block at exactly 2n/3
            pick = next((c for c in choices if 3 * degree[c[1]] <= limit), None)
            if pick is None:
                raise TheoremViolation("a monomial has no block of degree <= 2n/3")
            boundary += 1
        block, own, rest = pick
        groups.setdefault((block, own), []).append((coef, rest[0], rest[1]))

    parts = []
    for (block, own), terms in sorted(groups.items()):
        coefs, rows, cols = zip(*terms)
        cm = sparse.coo_matrix((np.array(coefs, dtype=float), (rows, cols)), shape=(size, size)).tocsr()
        h = E.T @ (cm @ E)  # exact: integers far below 2^53
        h = np.rint(h).astype(np.int64) % 3
        g = E[own].astype(np.int64) % 3
        parts.append(SlicePart(block, g, h, _digits(own, n)))
    return SliceDecomposition(A.elements, tuple(parts), count, boundary)


def diagonal(size: int) -> np.ndarray:
    t = np.zeros((size, size, size), dtype=np.int64)
    i = np.arange(size)
    t[i, i, i] = 1
    return t


def standard_decomposition(domain) -> SliceDecomposition:
    """The |S|-part decomposition sum_s 1_s(x) (1_s(y) 1_s(z))."""
    domain = tuple(domain)
    s = len(domain)
    parts = []
    for i in range(s):
        g = np.zeros(s, dtype=np.int64)
        g[i] = 1
        h = np.zeros((s, s), dtype=np.int64)
        h[i, i] = 1
        parts.append(SlicePart(1, g, h))
    return SliceDecomposition(domain, tuple(parts))


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    mismatch: Optional[tuple[int, int, int]] = None  # indices into the domain
    exhaustive: bool = True

    def __bool__(self):
        return self.ok


Target = Union[np.ndarray, Callable[[int, int, int], int]]


def verify_decomposition(target: Target, D: SliceDecomposition, seed: int = 0) -> VerifyResult:
    """Compare D with ``target`` on every triple (|S| <= 64) or on a seeded
    sample of a million triples, reporting the first mismatch."""
    D.check_tables()
    s = len(D.domain)
    if s <= FULL_CHECK_MAX:
        want = np.asarray(target) % 3 if not callable(target) else np.array(
            [[[target(i, j, k) for k in range(s)] for j in range(s)] for i in range(s)]) % 3
        diff = np.argwhere(D.tensor() != want)
        if len(diff):
            return VerifyResult(False, tuple(int(v) for v in diff[0]))
        return VerifyResult(True)
    rng = np.random.default_rng(seed)
    trip = rng.integers(0, s, size=(SAMPLE_TRIPLES, 3))
    got = np.zeros(len(trip), dtype=np.int64)
    for p in D.parts:
        a, b, c = trip[:, 0], trip[:, 1], trip[:, 2]
        if p.index == 1:
            got += p.g[a] * p.h[b, c]
        elif p.index == 2:
            got += p.g[b] * p.h[a, c]
        else:
            got += p.g[c] * p.h[a, b]
        got %= 3
    if callable(target):
        want = np.array([target(*map(int, t)) for t in trip]) % 3
    else:
        want = np.asarray(target)[trip[:, 0], trip[:, 1], trip[:, 2]] % 3
    bad = np.flatnonzero(got != want)
    if len(bad):
        return VerifyResult(False, tuple(int(v) for v in trip[bad[0]]), False)
    return VerifyResult(True, None, False)


@dataclass(frozen=True)
class RankWitness:
    """Outcome of testing a claimed decomposition of the diagonal.

    When ``contradiction`` is set, ``weights`` is orthogonal to every z-sliced
    one-variable factor, the diagonal matrix of ``weights`` has rank
    ``diagonal_rank`` > t2, while contracting the decomposition against the
    weights gives a matrix of rank ``contracted_rank`` <= t2.  A valid
    decomposition would make those two matrices equal.
    """

    consistent: bool
    contradiction: bool
    weights: tuple[int, ...] = ()
    diagonal_rank: int = 0
    contracted_rank: int = 0
    t2: int = 0
    iterations: int = 0
    mismatch: Optional[tuple[int, int, int]] = None


def _grow_support(gz: np.ndarray, s: int) -> tuple[np.ndarray, int]:
    """A vector orthogonal to the rows of gz whose support cannot be enlarged."""
    basis = f3.nullspace(gz, cols=s)
    r = basis[0].copy()
    steps = 0
    while True:
        supp = np.flatnonzero(r)
        pin = np.zeros((len(supp), s), dtype=np.int64)
        pin[np.arange(len(supp)), supp] = 1
        system = np.vstack([gz, pin]) if len(gz) else pin
        extra = f3.nullspace(system, cols=s)
        if not len(extra):
            return r, steps
        r = (r + extra[0]) % 3
        steps += 1
        if steps > s:
            raise TheoremViolation("support growth did not terminate")


def diagonal_lower_bound(D: SliceDecomposition) -> RankWitness:
    """Refute a claim that the diagonal on S^3 has slice rank t < |S|."""
    D.check_tables()
    s = len(D.domain)
    t1, t2, t = D.split
    if t >= s:
        return RankWitness(True, False, t2=t2)
    gz = np.array([p.g for p in D.parts if p.index == 3], dtype=np.int64).reshape(-1, s) % 3
    r, steps = _grow_support(gz, s)
    if np.count_nonzero(r) <= t2:
        raise TheoremViolation("maximal support is not larger than t2")
    contracted = np.zeros((s, s), dtype=np.int64)
    for p in D.parts:
        g, h = p.g.astype(np.int64), p.h.astype(np.int64)
        if p.index == 1:
            contracted += np.outer(g, h @ r)
        elif p.index == 2:
            contracted += np.outer(h @ r, g)
        else:
            contracted += int(g @ r) * h
    contracted %= 3
    diag_rank = f3.rank(np.diag(r))
    dec_rank = f3.rank(contracted)
    check = verify_decomposition(diagonal(s), D)
    return RankWitness(False, diag_rank > t2 >= dec_rank, tuple(int(v) for v in r),
                       diag_rank, dec_rank, t2, steps, check.mismatch)
