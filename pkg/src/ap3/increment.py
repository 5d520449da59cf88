"""Density-increment steps for progression-free sets, with checkable certificates.

Each step either certifies that the instance is too small for the argument to
apply (an exact rational inequality), or exhibits a structured piece (an
affine hyperplane of F_3^n, or an integer progression) on which the set is
denser by a definite amount.  Certificates carry exact rationals and are
re-verified by counting, independently of the pipeline that produced them.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import constants as C
from .apsets import require_ap_free
from .errors import DomainRefusal, TheoremViolation
from .fourier import forward_transform, indicator
from .groups import AmbientGroup, Interval, SiteSet, fraction_json, fraction_from_json

COEFF_TIE_TOL = 1e-12
FLOOR_TOL = 1e-9

SMALL = "small-N"
INCREMENT = "increment"


@dataclass(frozen=True)
class IncrementCertificate:
    """Outcome of one increment step.

    ``structure`` describes the piece: for vector sets a hyperplane
    ``{x : normal . x = level}``, for integer sets the progression
    ``start + step * n`` for n = 1..length.
    """

    branch: str
    setting: str  # "vector" or "integer"
    size: int  # 3^n or N
    density: Fraction
    small_bound: Fraction  # 2/alpha^2 or 8/alpha^2
    structure: Optional[dict] = None
    achieved: Optional[Fraction] = None
    floor: Optional[Fraction] = None
    length_ok: Optional[bool] = None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "branch": self.branch,
            "setting": self.setting,
            "size": self.size,
            "density": fraction_json(self.density),
            "small_bound": fraction_json(self.small_bound),
        }
        if self.branch == INCREMENT:
            out.update(
                structure=self.structure,
                achieved=fraction_json(self.achieved),
                floor=fraction_json(self.floor),
                length_ok=self.length_ok,
            )
        if self.details:
            out["details"] = self.details
        return out

    @classmethod
    def from_json(cls, obj) -> "IncrementCertificate":
        inc = obj["branch"] == INCREMENT
        return cls(
            obj["branch"],
            obj["setting"],
            int(obj["size"]),
            fraction_from_json(obj["density"]),
            fraction_from_json(obj["small_bound"]),
            obj.get("structure") if inc else None,
            fraction_from_json(obj["achieved"]) if inc else None,
            fraction_from_json(obj["floor"]) if inc else None,
            obj.get("length_ok") if inc else None,
            obj.get("details", {}),
        )


@dataclass(frozen=True)
class TraceStep:
    level: int
    size: int  # n for vector sets, N for integer sets
    density: Fraction
    certificate: IncrementCertificate

    def to_json(self) -> dict:
        return {"level": self.level, "size": self.size, "density": fraction_json(self.density),
                "certificate": self.certificate.to_json()}


@dataclass(frozen=True)
class IterationTrace:
    setting: str
    steps: tuple[TraceStep, ...]
    verdict: dict

    def __len__(self):
        return len(self.steps)

    @property
    def increments(self) -> int:
        return sum(s.certificate.branch == INCREMENT for s in self.steps)

    def to_json(self) -> dict:
        return {"setting": self.setting, "steps": [s.to_json() for s in self.steps],
                "verdict": self.verdict}


# -- F_3^n -----------------------------------------------------------------------


def _vector_set(A: SiteSet) -> AmbientGroup:
    if A.is_interval or A.group.is_cyclic:
        raise DomainRefusal("expected a subset of F_3^n")
    return A.group


def meshulam_step(A: SiteSet) -> IncrementCertificate:
    """One increment step for a cap set: small-N, or a denser hyperplane."""
    g = _vector_set(A)
    if not len(A):
        raise DomainRefusal("the empty set has no density to increase")
    require_ap_free(A, "set")
    alpha = A.density
    bound = C.meshulam_small_bound(alpha)
    if g.order < bound:
        return IncrementCertificate(SMALL, "vector", g.order, alpha, bound)

    coeffs = np.abs(forward_transform(g, indicator(A)).values)
    coeffs[0] = -1.0
    top = coeffs.max()
    xi = int(np.flatnonzero(coeffs >= top - COEFF_TIE_TOL)[0])
    needed = float(alpha) ** 2 / C.MESHULAM_FOURIER_FLOOR_DIV
    if top < needed - FLOOR_TOL:
        raise TheoremViolation(f"largest nontrivial coefficient {top} is below alpha^2/2 = {needed}")

    idx = np.arange(g.order)
    levels = np.asarray(g.pairing(xi, idx))
    hits = np.bincount(levels[A.array()], minlength=3)
    reps = [int(idx[levels == v].min()) for v in range(3)]
    level = min(range(3), key=lambda v: (-hits[v], reps[v]))
    achieved = Fraction(int(hits[level]), g.order // 3)
    floor = C.meshulam_floor(alpha)
    if achieved < floor:
        raise TheoremViolation(f"hyperplane density {achieved} is below the floor {floor}")
    return IncrementCertificate(
        INCREMENT, "vector", g.order, alpha, bound,
        structure={"dimension": g.dimension, "normal": xi, "level": level,
                   "representative": reps[level]},
        achieved=achieved, floor=floor, length_ok=True,
        details={"coefficient": float(top), "coefficient_floor": needed},
    )


def restrict_to_hyperplane(A: SiteSet, normal: int, level: int) -> SiteSet:
    """The part of A on {normal . x = level}, moved into F_3^(n-1).

    The least point of the hyperplane is translated to 0, and the first
    coordinate where the normal is nonzero is dropped; on the subspace
    ``normal^perp`` that coordinate is determined by the others, so the map is
    a linear isomorphism and carries progressions to progressions.
    """
    g = _vector_set(A)
    n = g.dimension
    idx = np.arange(g.order)
    on = np.asarray(g.pairing(normal, idx)) == level
    rep = int(idx[on].min())
    pts = A.array()[np.asarray(g.pairing(normal, A.array())) == level]
    moved = g.digits(np.asarray(g.sub(pts, rep)).reshape(-1))
    pivot = int(np.flatnonzero(g.digits(normal))[0])
    keep = [j for j in range(n) if j != pivot]
    if n == 1:
        raise DomainRefusal("F_3^1 has no proper hyperplane to move into")
    h = AmbientGroup.vector(n - 1)
    return SiteSet.from_elements(h, [int(h.encode(v)) for v in moved[:, keep]])


def meshulam_drive(A: SiteSet) -> IterationTrace:
    g = _vector_set(A)
    alpha0 = A.density
    n0 = g.dimension
    steps = []
    current = A
    while True:
        cert = meshulam_step(current)
        steps.append(TraceStep(len(steps), current.group.dimension, current.density, cert))
        if cert.branch == SMALL:
            break
        s = cert.structure
        nxt = restrict_to_hyperplane(current, s["normal"], s["level"])
        if nxt.density != cert.achieved:
            raise TheoremViolation("restricted set does not have the certified density")
        current = nxt
    for a, b in zip(steps, steps[1:]):
        if b.size != a.size - 1 or b.density < C.meshulam_floor(a.density):
            raise TheoremViolation(f"trace invariant broken between levels {a.level} and {b.level}")
    i0 = len(steps) - 1
    verdict = {
        "steps": i0,
        "steps_bound_ok": i0 <= C.MESHULAM_STEPS_NUM / alpha0,
        "dimension_bound_ok": n0 < C.MESHULAM_DIM_NUM / alpha0,
    }
    if not (verdict["steps_bound_ok"] and verdict["dimension_bound_ok"]):
        raise TheoremViolation(f"terminal bounds fail: {verdict}")
    return IterationTrace("vector", tuple(steps), verdict)


# -- Dirichlet approximation and primes ------------------------------------------------


def _continued_fraction(x: Fraction):
    while True:
        a = math.floor(x)
        yield a
        x -= a
        if x == 0:
            return
        x = 1 / x


def _convergents(x: Fraction):
    p0, q0, p1, q1 = 0, 1, 1, 0
    for a in _continued_fraction(x):
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        yield p1, q1


def dirichlet(gamma, Q: int, k: Optional[int] = None) -> tuple[tuple[int, ...], int]:
    """Integers p_i and the least 1 <= q <= Q with |gamma_i - p_i/q| < 1/(q Q^(1/k)).

    ``gamma`` is a number or a sequence of numbers; doubles are read exactly.
    For one number the least q is a continued-fraction denominator (a minimal
    q is a best approximation); several numbers are scanned q = 1, 2, ...
    """
    if isinstance(gamma, (int, float, Fraction)):
        gammas = [Fraction(gamma)]
    else:
        gammas = [Fraction(v) for v in gamma]
    if k is None:
        k = len(gammas)
    if k != len(gammas) or k < 1 or Q < 1:
        raise ValueError("need k >= 1 numbers and Q >= 1")

    def good(q: int) -> Optional[tuple[int, ...]]:
        ps = tuple(round(q * v) for v in gammas)
        if all(abs(q * v - p) ** k * Q < 1 for v, p in zip(gammas, ps)):
            return ps
        return None

    if k == 1:
        for _, q in _convergents(gammas[0]):
            if q > Q:
                break
            ps = good(q)
            if ps is not None:
                return ps, q
    else:
        for q in range(1, Q + 1):
            ps = good(q)
            if ps is not None:
                return ps, q
    raise TheoremViolation(f"no Dirichlet approximation with q <= {Q}")


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    if m % 2 == 0:
        return m == 2
    r = math.isqrt(m)
    return all(m % d for d in range(3, r + 1, 2))


def bertrand_prime(N: int) -> int:
    """Least prime p with 2N < p < 4N."""
    for p in range(2 * N + 1, 4 * N):
        if is_prime(p):
            return p
    raise TheoremViolation(f"no prime in ({2 * N}, {4 * N})")


# -- [N] -------------------------------------------------------------------------------


def roth_partition(p: int, q: int, length: int) -> tuple[list[list[int]], list[list[int]]]:
    """Split 0..p-1 into step-q runs: full blocks of ``length``, plus one short tail per residue."""
    full, short = [], []
    for r in range(q):
        run = list(range(r, p, q))
        cut = len(run) - len(run) % length
        full.extend(run[i:i + length] for i in range(0, cut, length))
        short.append(run[cut:])
    return full, short


def partition_is_exact(p: int, full, short) -> bool:
    allpts = sorted(x for block in list(full) + list(short) for x in block)
    return allpts == list(range(p))


def _integer_runs(cell: Sequence[int], p: int, q: int) -> list[tuple[int, int]]:
    """Write a cell as step-q integer progressions in [p] (residue 0 read as p).

    Returns (first element, length) pairs.
    """
    vals = [x if x else p for x in cell]
    runs: list[list[int]] = [[vals[0]]]
    for v in vals[1:]:
        if v - runs[-1][-1] == q:
            runs[-1].append(v)
        else:
            runs.append([v])
    return [(r[0], len(r)) for r in runs]


def _interval_set(A: SiteSet) -> int:
    if not A.is_interval:
        raise DomainRefusal("expected a subset of [N]")
    return A.ambient.length


def _length_ok(length: int, alpha: Fraction, N: int) -> bool:
    # length >= alpha^4 sqrt(N) / 2^21, squared to stay exact
    return (length * C.ROTH_LENGTH_DIV) ** 2 >= alpha**8 * N


def roth_step(A: SiteSet) -> IncrementCertificate:
    """One increment step for a progression-free subset of [N]."""
    N = _interval_set(A)
    if not len(A):
        raise DomainRefusal("the empty set has no density to increase")
    require_ap_free(A, "set")
    alpha = A.density
    bound = C.roth_small_bound(alpha)
    if N < bound:
        return IncrementCertificate(SMALL, "integer", N, alpha, bound)

    p = bertrand_prime(N)
    a_f = float(alpha)
    f = np.zeros(p)
    f[1:N + 1] = -a_f
    f[A.array()] += 1.0
    mags = np.abs(np.fft.fft(f))
    mags[0] = -1.0
    top = mags.max()
    xi = int(np.flatnonzero(mags >= top - COEFF_TIE_TOL * max(top, 1.0))[0])
    coeff_floor = a_f**2 * p / C.ROTH_FOURIER_FLOOR_DIV
    if top < coeff_floor - FLOOR_TOL:
        raise TheoremViolation(f"largest coefficient {top} is below alpha^2 p / 2^7 = {coeff_floor}")

    Q = math.isqrt(p)
    if Q * Q < p:
        Q += 1
    (num,), q = dirichlet(Fraction(xi, p), Q, 1)
    theta = (Fraction(xi, p) - Fraction(num, q)) * q * math.sqrt(p)
    cell = math.ceil(a_f**2 * math.sqrt(p) / C.ROTH_CELL_LENGTH_DIV)
    cell = max(cell, 1)
    full, short = roth_partition(p, q, cell)
    if not partition_is_exact(p, full, short):
        raise TheoremViolation("progressions do not partition Z/pZ")

    # f_A with 0 read as p, which lies outside [N]
    fa = np.zeros(p + 1)
    fa[1:N + 1] = -a_f
    fa[A.array()] += 1.0
    sums = [float(fa[[x if x else p for x in blk]].sum()) for blk in full]
    best = max(sums)
    i = next(j for j, s in enumerate(sums) if s >= best - COEFF_TIE_TOL)
    chosen = full[i]

    phase = 2 * math.pi * float(theta) / (q * math.sqrt(p))
    spread = max((abs(cmath.exp(1j * phase * blk[-1]) - cmath.exp(1j * phase * blk[0]))
                  for blk in full if len(blk) > 1), default=0.0)

    members = set(A.elements)
    floor = C.roth_floor(alpha)
    runs = sorted(_integer_runs(chosen, p, q), key=lambda r: (-r[1], r[0]))
    case = "single-run" if len(runs) == 1 else (
        "both-large" if Fraction(runs[1][1]) >= alpha**2 * cell / C.ROTH_GAIN_DIV else "short-tail")
    for first, length in runs:
        hit = sum(first + q * j in members for j in range(length))
        achieved = Fraction(hit, length)
        if achieved >= floor and _length_ok(length, alpha, N):
            return IncrementCertificate(
                INCREMENT, "integer", N, alpha, bound,
                structure={"start": first - q, "step": q, "length": length},
                achieved=achieved, floor=floor, length_ok=True,
                details={
                    "prime": p, "frequency": xi, "coefficient": float(top),
                    "coefficient_floor": coeff_floor, "dirichlet": [num, q],
                    "theta": float(theta), "cell_length": cell, "cells": len(full),
                    "cell_index": i, "case": case, "phase_spread": spread,
                    "phase_spread_ok": spread <= a_f**2 / C.ROTH_PHASE_DIV,
                },
            )
    raise TheoremViolation("neither piece of the densest cell meets the density and length floors")


def restrict_to_structure(A: SiteSet, structure: dict) -> SiteSet:
    start, step, length = structure["start"], structure["step"], structure["length"]
    els = [j for j in range(1, length + 1) if start + step * j in A]
    return SiteSet(Interval(length), tuple(els))


def roth_drive(A: SiteSet) -> IterationTrace:
    _interval_set(A)
    steps = []
    current = A
    while True:
        cert = roth_step(current)
        steps.append(TraceStep(len(steps), current.ambient.length, current.density, cert))
        if cert.branch == SMALL:
            break
        nxt = restrict_to_structure(current, cert.structure)
        if nxt.density != cert.achieved:
            raise TheoremViolation("rescaled set does not have the certified density")
        current = nxt
    for a, b in zip(steps, steps[1:]):
        if b.density < C.roth_floor(a.density) or not _length_ok(b.size, a.density, a.size):
            raise TheoremViolation(f"trace invariant broken between levels {a.level} and {b.level}")
    verdict = {"steps": len(steps) - 1, "final_size": steps[-1].size,
               "final_density": fraction_json(steps[-1].density)}
    return IterationTrace("integer", tuple(steps), verdict)


# -- independent re-verification ----------------------------------------------------------


def verify_certificate(cert: IncrementCertificate, A: SiteSet) -> bool:
    """Recount everything the certificate claims about A."""
    if cert.density != A.density or cert.size != A.ambient.order:
        return False
    if cert.setting == "vector":
        expected_bound = C.meshulam_small_bound(cert.density)
    else:
        expected_bound = C.roth_small_bound(cert.density)
    if cert.small_bound != expected_bound:
        return False
    if cert.branch == SMALL:
        return cert.size < cert.small_bound
    s = cert.structure
    if cert.setting == "vector":
        g = A.group
        on = [x for x in range(g.order) if g.pairing(s["normal"], x) == s["level"]]
        hit = sum(x in A for x in on)
        achieved = Fraction(hit, len(on))
        floor = C.meshulam_floor(cert.density)
        length_ok = True
    else:
        pts = [s["start"] + s["step"] * j for j in range(1, s["length"] + 1)]
        hit = sum(x in A for x in pts)
        achieved = Fraction(hit, len(pts))
        floor = C.roth_floor(cert.density)
        length_ok = _length_ok(s["length"], cert.density, cert.size)
    return achieved == cert.achieved and floor == cert.floor and achieved >= floor and length_ok
