"""Exact extremal sizes r3(N) and r3(F_3^n) with certified witnesses.

Both solvers are depth-first branch-and-bound searches that try points in
increasing order, including a point before excluding it.  Among sets of equal
size that order is lexicographic, so the first witness of the optimal size is
the lexicographically least one.  Sets are Python ints used as bitmasks.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .apsets import is_ap_free
from .errors import DomainRefusal, NotAPFree
from .groups import AmbientGroup, Interval, SiteSet, siteset_from_json

log = logging.getLogger(__name__)

OPTIMAL = "optimal"
LOWER_BOUND = "lower-bound-only"
EXHAUSTIVE = "exhaustive"
BRANCH_AND_BOUND = "branch-and-bound"

DEFAULT_BUDGET = 50_000_000


@dataclass(frozen=True)
class Problem:
    kind: str  # "integer" or "vector"
    size: int

    def to_json(self) -> dict:
        return {"kind": self.kind, "N" if self.kind == "integer" else "n": self.size}

    @classmethod
    def from_json(cls, obj) -> "Problem":
        if obj["kind"] == "integer":
            return cls("integer", int(obj["N"]))
        if obj["kind"] == "vector":
            return cls("vector", int(obj["n"]))
        raise ValueError(f"unknown problem kind {obj['kind']!r}")

    def ambient(self):
        return Interval(self.size) if self.kind == "integer" else AmbientGroup.vector(self.size)


@dataclass(frozen=True)
class ExtremalRecord:
    problem: Problem
    value: int
    witness: SiteSet
    method: str
    proof: str

    @property
    def optimal(self) -> bool:
        return self.proof == OPTIMAL

    def validate(self) -> None:
        if self.witness.ambient != self.problem.ambient():
            raise ValueError("witness lives in the wrong ambient set")
        if self.optimal and len(self.witness) != self.value:
            raise ValueError("optimal record must have a witness of full size")
        if len(self.witness) < self.value and self.proof == LOWER_BOUND:
            raise ValueError("lower bound exceeds its witness")
        check = is_ap_free(self.witness)
        if not check.free:
            raise NotAPFree(check.witness, "witness contains a nontrivial 3-AP")

    def to_json(self) -> dict:
        return {
            "problem": self.problem.to_json(),
            "value": self.value,
            "witness": self.witness.to_json(),
            "method": self.method,
            "proof": self.proof,
        }

    @classmethod
    def from_json(cls, obj) -> "ExtremalRecord":
        rec = cls(
            Problem.from_json(obj["problem"]),
            int(obj["value"]),
            siteset_from_json(obj["witness"]),
            str(obj["method"]),
            str(obj["proof"]),
        )
        rec.validate()
        return rec


class _BudgetExhausted(Exception):
    pass


class _Counter:
    def __init__(self, budget: Optional[int]):
        self.left = budget if budget is not None else float("inf")

    def tick(self):
        self.left -= 1
        if self.left < 0:
            raise _BudgetExhausted


def _bits(mask: int) -> tuple[int, ...]:
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


# -- integers -------------------------------------------------------------------


# r3 values and lex-least witnesses proved so far (bit i set <=> i in the set)
_integer_table: dict[int, tuple[int, int]] = {}


def _search_interval(k: int, target: int, table: dict, counter: _Counter,
                     with_ends: bool) -> Optional[int]:
    """Lex-least AP-free subset of [k] of size ``target``, or None.

    With ``with_ends`` the set must contain both 1 and k; any set beating
    r3(k-1) has that shape, since otherwise a translate fits in [k-1].
    """
    top = k - 1 if with_ends else k
    full = (1 << (top + 1)) - 1

    def r3(length: int) -> int:
        return table[length][0] if length in table else table[length - 1][0] + 1

    def free_from(a: int, forb: int) -> int:
        return ((full >> a) << a) & ~forb

    def add(a: int, chosen: list[int], forb: int) -> int:
        for b in chosen:
            c = 2 * a - b
            if c <= top:
                forb |= 1 << c
        if with_ends and (a + k) % 2 == 0:
            forb |= 1 << ((a + k) // 2)
        return forb

    def dfs(a: int, count: int, chosen: list[int], forb: int) -> Optional[list[int]]:
        if count == target:
            return chosen
        if a > top:
            return None
        counter.tick()
        room = top - a + 1
        bound = min(r3(room), free_from(a, forb).bit_count())
        if with_ends:
            bound = min(bound, r3(room + 1) - 1)
        if count + bound < target:
            return None
        if not forb >> a & 1:
            chosen.append(a)
            found = dfs(a + 1, count + 1, chosen, add(a, chosen[:-1], forb))
            if found is not None:
                return found
            chosen.pop()
        return dfs(a + 1, count, chosen, forb)

    if with_ends:
        if k == 1:
            return 1 << 1 if target == 1 else None
        forb = add(1, [], 0)
        found = dfs(2, 2, [1], forb)
        if found is None:
            return None
        found = found + [k]
    else:
        found = dfs(1, 0, [], 0)
        if found is None:
            return None
    return sum(1 << a for a in found)


def solve_integer(N: int, budget: Optional[int] = DEFAULT_BUDGET) -> ExtremalRecord:
    """r3(N) by growing N one step at a time.

    r3(k) is r3(k-1) or r3(k-1) + 1; the larger value needs a set containing
    1 and k, so each step is one constrained search plus, when that fails, a
    search for the lex-least witness of the old size.  ``budget`` caps the
    number of search nodes over the whole call.
    """
    if not isinstance(N, int) or N < 1:
        raise ValueError("N must be a positive integer")
    counter = _Counter(budget)
    table = _integer_table
    table.setdefault(0, (0, 0))
    for k in range(1, N + 1):
        if k in table:
            continue
        prev = table[k - 1][0]
        try:
            grown = _search_interval(k, prev + 1, table, counter, with_ends=True)
            if grown is not None:
                table[k] = (prev + 1, grown)
                continue
            same = _search_interval(k, prev, table, counter, with_ends=False)
        except _BudgetExhausted:
            best = table[k - 1]
            witness = SiteSet(Interval(N), _bits(best[1]))
            return ExtremalRecord(Problem("integer", N), best[0], witness, BRANCH_AND_BOUND, LOWER_BOUND)
        if same is None:
            raise RuntimeError(f"no AP-free set of size r3({k - 1}) in [{k}]")
        table[k] = (prev, same)
    value, mask = table[N]
    return ExtremalRecord(Problem("integer", N), value, SiteSet(Interval(N), _bits(mask)),
                          BRANCH_AND_BOUND, OPTIMAL)


def integer_progressions(N: int) -> list[tuple[int, int, int]]:
    return [(x, x + d, x + 2 * d) for d in range(1, (N - 1) // 2 + 1) for x in range(1, N - 2 * d + 1)]


def _exhaustive(order: int, lines: list[tuple[int, ...]], offset: int) -> tuple[int, tuple[int, ...]]:
    masks = np.arange(1 << order, dtype=np.int64)
    good = np.ones(len(masks), dtype=bool)
    for line in lines:
        m = sum(1 << (p - offset) for p in line)
        good &= (masks & m) != m
    sizes = np.zeros(len(masks), dtype=np.int64)
    for i in range(order):
        sizes += (masks >> i) & 1
    sizes[~good] = -1
    best = int(sizes.max())
    winners = masks[sizes == best]
    witness = min(tuple(p + offset for p in _bits(int(w))) for w in winners)
    return best, witness


def exhaustive_integer(N: int) -> tuple[int, tuple[int, ...]]:
    """r3(N) and the lex-least witness by checking all 2^N subsets."""
    if not 1 <= N <= 24:
        raise ValueError("exhaustive enumeration is limited to N <= 24")
    return _exhaustive(N, integer_progressions(N), 1)


# -- vector groups ---------------------------------------------------------------


def affine_lines(n: int) -> list[tuple[int, int, int]]:
    """All lines {x, y, z} of F_3^n (x + y + z = 0, distinct points)."""
    g = AmbientGroup.vector(n)
    out = set()
    for a, b in combinations(range(g.order), 2):
        c = int(g.neg(g.add(a, b)))
        out.add(tuple(sorted((a, b, c))))
    return sorted(out)


def exhaustive_vector(n: int) -> tuple[int, tuple[int, ...]]:
    """r3(F_3^n) and the lex-least witness by checking all 2^(3^n) subsets."""
    if not 1 <= n <= 2:
        raise ValueError("exhaustive enumeration is limited to n <= 2")
    return _exhaustive(3**n, affine_lines(n), 0)


_vector_table: dict[int, tuple[int, int, str]] = {}


def _coset_masks(n: int) -> list[list[int]]:
    """For every hyperplane direction, the bitmasks of its three cosets."""
    g = AmbientGroup.vector(n)
    idx = np.arange(g.order)
    dirs = []
    for xi in range(1, g.order):
        d = g.digits(xi)
        first = d[np.flatnonzero(d)[0]]
        if first != 1:
            continue
        level = g.pairing(xi, idx)
        dirs.append([sum(1 << int(x) for x in np.flatnonzero(level == v)) for v in range(3)])
    return dirs


def _search_vector(n: int, sub_bound: int, counter: _Counter, start: int) -> tuple[int, int, bool]:
    """Maximum cap containing {0, e1, e2}; returns (size, mask, complete)."""
    g = AmbientGroup.vector(n)
    order = g.order
    third = [[0] * order for _ in range(order)]
    for a in range(order):
        for b in range(order):
            third[a][b] = int(g.neg(g.add(a, b)))
    cosets = _coset_masks(n)
    full = (1 << order) - 1

    seed = [0, 1, 3]
    chosen_mask = 0
    forb = 0
    for i, p in enumerate(seed):
        for q in seed[:i]:
            forb |= 1 << third[p][q]
        chosen_mask |= 1 << p
    forb |= chosen_mask

    best = [start - 1, 0]

    def bound(chosen: int, avail: int) -> int:
        out = chosen.bit_count() + avail.bit_count()
        for planes in cosets:
            b = 0
            for m in planes:
                b += min(sub_bound, (chosen & m).bit_count() + (avail & m).bit_count())
            if b < out:
                out = b
        return out

    def dfs(a: int, chosen: int, points: list[int], forb: int) -> None:
        counter.tick()
        avail = ((full >> a) << a) & ~forb
        if bound(chosen, avail) <= best[0]:
            return
        if not avail:
            best[0], best[1] = chosen.bit_count(), chosen
            return
        p = (avail & -avail).bit_length() - 1
        new_forb = forb | (1 << p)
        for q in points:
            new_forb |= 1 << third[p][q]
        points.append(p)
        dfs(p + 1, chosen | (1 << p), points, new_forb)
        points.pop()
        dfs(p + 1, chosen, points, forb | (1 << p))

    try:
        dfs(4, chosen_mask, list(seed), forb)
    except _BudgetExhausted:
        return best[0], best[1], False
    return best[0], best[1], True


def solve_vector(n: int, budget: Optional[int] = DEFAULT_BUDGET) -> ExtremalRecord:
    """r3(F_3^n): exhaustive for n <= 2, branch-and-bound for n = 3, 4.

    Any three points of a cap are affinely independent, so some image of an
    optimal cap under the affine group contains 0, e1 and e2; the search fixes
    those three.  That triple is also the lexicographically least possible
    start, so the witness found is still the lex-least optimum.
    """
    if not isinstance(n, int) or n < 1:
        raise ValueError("n must be a positive integer")
    if n > 4:
        raise DomainRefusal("optimality is only supported for n <= 4")
    problem = Problem("vector", n)
    g = AmbientGroup.vector(n)
    if n in _vector_table:
        value, mask, proof = _vector_table[n]
        method = EXHAUSTIVE if n <= 2 else BRANCH_AND_BOUND
        return ExtremalRecord(problem, value, SiteSet(g, _bits(mask)), method, proof)
    if n <= 2:
        value, witness = exhaustive_vector(n)
        _vector_table[n] = (value, sum(1 << p for p in witness), OPTIMAL)
        return ExtremalRecord(problem, value, SiteSet(g, witness), EXHAUSTIVE, OPTIMAL)
    below = solve_vector(n - 1, budget)
    sub = below.value if below.optimal else 3 ** (n - 1)
    # the product of a smaller cap with {0, 1} gives a safe starting bound
    start = 2 * below.value
    size, mask, complete = _search_vector(n, sub, _Counter(budget), start)
    if mask == 0:
        lifted = tuple(sorted(a + 3 ** (n - 1) * b for a in below.witness.elements for b in (0, 1)))
        size, mask = len(lifted), sum(1 << p for p in lifted)
    proof = OPTIMAL if complete and below.optimal else LOWER_BOUND
    if proof == OPTIMAL:
        _vector_table[n] = (size, mask, proof)
    return ExtremalRecord(problem, size, SiteSet(g, _bits(mask)), BRANCH_AND_BOUND, proof)


# -- cache ---------------------------------------------------------------------------


def cache_put(path: str | os.PathLike, record: ExtremalRecord) -> None:
    """Append a record after re-checking its witness."""
    record.validate()
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record.to_json(), separators=(",", ":")) + "\n")


def cache_get(path: str | os.PathLike, problem: Problem) -> Optional[ExtremalRecord]:
    """Best valid record for ``problem``; corrupt or tampered lines are skipped."""
    if not os.path.exists(path):
        return None
    best = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                if Problem.from_json(obj["problem"]) != problem:
                    continue
                rec = ExtremalRecord.from_json(obj)
            except NotAPFree as exc:
                log.warning("cache line %d rejected: %s", lineno, exc)
                continue
            except (ValueError, KeyError, TypeError) as exc:
                log.warning("cache line %d skipped: %s", lineno, exc)
                continue
            key = (rec.optimal, rec.value)
            if best is None or key > (best.optimal, best.value):
                best = rec
    return best
