"""Bohr sets in Z/NZ.

A Bohr set is stored through its threshold profile
``t(x) = max_gamma |gamma(x) - 1| / nu(gamma)``: x lies in the dilate B_rho
exactly when ``t(x) <= rho``.  Sorting the profile once turns every size query
into a binary search, and makes the regularity condition decidable exactly
because ``rho -> |B_rho|`` is a right-continuous step function whose jumps are
the profile values.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import constants as C
from .errors import DomainRefusal, TheoremViolation
from .groups import AmbientGroup

PROFILE_GUARD = 1e-12


def _chord(gamma: int, x: np.ndarray, N: int) -> np.ndarray:
    """|e(gamma x / N) - 1| = 2 |sin(pi gamma x / N)|."""
    k = (gamma * x) % N
    return 2.0 * np.abs(np.sin(np.pi * k / N))


def threshold_profile(N: int, gamma, nu) -> np.ndarray:
    x = np.arange(N, dtype=np.int64)
    t = np.zeros(N)
    for g, w in zip(gamma, nu):
        if w == 0:
            vals = np.where((g * x) % N == 0, 0.0, np.inf)
        else:
            vals = _chord(g, x, N) / w
        t = np.maximum(t, vals)
    return t


@dataclass(frozen=True, eq=False)
class BohrSet:
    """Bohr(Gamma, rho * nu) in Z/NZ; ``rho`` is the dilation already applied."""

    modulus: int
    gamma: tuple[int, ...]
    nu: tuple[float, ...]
    rho: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "_t", threshold_profile(self.modulus, self.gamma, self.nu))
        order = np.lexsort((np.arange(self.modulus), self._t))
        object.__setattr__(self, "_order", order)
        object.__setattr__(self, "_sorted", self._t[order])

    @property
    def group(self) -> AmbientGroup:
        return AmbientGroup.cyclic(self.modulus)

    @property
    def rank(self) -> int:
        return len(self.gamma)

    @property
    def profile(self) -> np.ndarray:
        """Threshold t(x) for every x (independent of the dilation)."""
        return self._t

    def sorted_profile(self) -> list[tuple[float, int]]:
        return [(float(t), int(x)) for t, x in zip(self._sorted, self._order)]

    def size_at(self, rho: float) -> int:
        """|Bohr(Gamma, rho * nu)| for the undilated widths nu."""
        return int(np.searchsorted(self._sorted, rho + PROFILE_GUARD, side="right"))

    def __len__(self):
        return self.size_at(self.rho)

    def members(self, rho: Optional[float] = None) -> np.ndarray:
        rho = self.rho if rho is None else rho
        return np.flatnonzero(self._t <= rho + PROFILE_GUARD)

    def mask(self, rho: Optional[float] = None) -> np.ndarray:
        rho = self.rho if rho is None else rho
        return self._t <= rho + PROFILE_GUARD

    def __contains__(self, x):
        return bool(self._t[int(x) % self.modulus] <= self.rho + PROFILE_GUARD)

    def levels(self) -> np.ndarray:
        """Distinct finite profile values; the size jumps at each (minus the guard)."""
        return np.unique(self._sorted[np.isfinite(self._sorted)])

    def count_below(self, t: float) -> int:
        return int(np.searchsorted(self._sorted, t, side="left"))

    def count_upto(self, t: float) -> int:
        return int(np.searchsorted(self._sorted, t, side="right"))

    def to_json(self) -> dict:
        out = {"modulus": self.modulus, "gamma": list(self.gamma), "nu": list(self.nu)}
        if self.rho != 1.0:
            out["rho"] = self.rho
        return out


def bohr_build(group: AmbientGroup, gamma, nu) -> BohrSet:
    if not group.is_cyclic:
        raise DomainRefusal("Bohr sets are implemented for cyclic groups only")
    gamma = [int(g) for g in gamma]
    nu = [float(w) for w in nu]
    if not gamma:
        raise ValueError("frequency set must be nonempty")
    if len(nu) != len(gamma):
        raise ValueError("need one width per frequency")
    if any(not 0 <= w <= 2 for w in nu):
        raise ValueError("widths must lie in [0, 2]")
    group.check(np.array(gamma))
    pairs = sorted(zip(gamma, nu))
    return BohrSet(group.modulus, tuple(g for g, _ in pairs), tuple(w for _, w in pairs))


def bohr_from_json(obj) -> BohrSet:
    try:
        B = bohr_build(AmbientGroup.cyclic(int(obj["modulus"])), obj["gamma"], obj["nu"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed Bohr set: {exc}") from None
    rho = float(obj.get("rho", 1.0))
    return dilate(B, rho) if rho != 1.0 else B


def parse_bohr(text: str) -> BohrSet:
    return bohr_from_json(json.loads(text))


def dilate(B: BohrSet, rho: float) -> BohrSet:
    if not rho > 0:
        raise ValueError("dilation factor must be positive")
    return BohrSet(B.modulus, B.gamma, B.nu, B.rho * float(rho))


def size_lower_bound_holds(B: BohrSet, rho: float) -> bool:
    """|B_rho| >= (rho/4)^r |B| in exact rational arithmetic (rho < 1)."""
    bound = (Fraction(rho) / C.DILATE_SIZE_DIV) ** B.rank * len(B)
    return len(dilate(B, rho)) >= bound


def doubling_factor(B: BohrSet, rho: float = 1.0) -> int:
    """A proven constant K with |B_{2 rho}| <= K |B_rho|.

    Per frequency, the arc where |gamma(x) - 1| <= 2 w is cut into cells of
    angular width 2 arcsin(w / 2); two points of B_{2 rho} sharing a cell in
    every coordinate differ by an element of B_rho.  Chord length is concave in
    the angle, so narrow widths need 5 cells per frequency, not 4.
    """
    K = 1
    for w in B.nu:
        w = w * B.rho * rho
        if w == 0:
            continue
        small = 2 * math.asin(min(w, 2.0) / 2)
        big = 2 * math.asin(min(w, 1.0)) if w < 1 else math.pi
        K *= math.ceil(2 * big / small - 1e-12)
    return K


# -- regularity ---------------------------------------------------------------


@dataclass(frozen=True)
class RegularityVerdict:
    regular: bool
    delta: Optional[float] = None  # a violating delta, smallest |delta| first
    size: Optional[int] = None  # |B_{1+delta}| at the witness

    def __bool__(self):
        return self.regular


def regularity_check(B: BohrSet) -> RegularityVerdict:
    """Decide (1 - c r|d|)|B| <= |B_{1+d}| <= (1 + c r|d|)|B| for all |d| <= 1/(c r).

    Growing delta, the size only jumps up at profile values and the upper
    envelope keeps rising, so the upper inequality only needs checking at the
    jumps.  Shrinking delta, the size drops just below each profile value; the
    lower envelope is largest right there, so the left limit at every profile
    value decides the lower inequality.
    """
    c = C.REGULARITY_CONST * B.rank
    s = B.rho
    n = len(B)
    width = s / c
    levels = B.levels()
    found: list[tuple[float, float, int]] = []

    for t in levels[(levels > s + PROFILE_GUARD) & (levels - PROFILE_GUARD <= s + width)]:
        d = (t - PROFILE_GUARD) / s - 1
        size = B.count_upto(t)
        if size > (1 + c * d) * n:
            found.append((float(d), float(d), size))
            break

    inside = levels[(levels <= s + PROFILE_GUARD) & (levels - PROFILE_GUARD > s - width)]
    prev = -1.0 / c
    for t in inside:
        d = min(0.0, (t - PROFILE_GUARD) / s - 1)
        left = B.count_below(t)
        need = (1 - c * abs(d)) * n
        if left < need:
            # any delta slightly below d works; stay inside the constant stretch
            eta = min((need - left) / (c * n), d - prev) / 2
            witness = d - eta
            found.append((abs(witness), float(witness), B.size_at(s * (1 + witness))))
        prev = d
    if not found:
        return RegularityVerdict(True)
    _, d, size = min(found)
    return RegularityVerdict(False, d, size)


def regularity_grid(B: BohrSet, points: int = 10_000) -> RegularityVerdict:
    """Dense-grid approximation of the regularity test, used as an oracle."""
    c = C.REGULARITY_CONST * B.rank
    n = len(B)
    deltas = np.linspace(-1 / c, 1 / c, points)
    for d in sorted(deltas, key=abs):
        size = B.size_at(B.rho * (1 + d))
        if not (1 - c * abs(d)) * n <= size <= (1 + c * abs(d)) * n:
            return RegularityVerdict(False, float(d), size)
    return RegularityVerdict(True)


def find_regular_dilate(B: BohrSet, t: float) -> float:
    """Some rho in [t/2, t] with B_rho regular, scanning down from t."""
    if not 0 < t <= 1:
        raise ValueError("t must lie in (0, 1]")
    s = B.rho
    lo, hi = s * t / 2, s * t
    levels = B.levels() - PROFILE_GUARD
    marks = sorted({hi, lo, *levels[(levels >= lo) & (levels <= hi)].tolist()}, reverse=True)
    candidates = []
    for a, b in zip(marks, marks[1:] + [lo]):
        candidates.extend([a, (a + b) / 2])
    candidates.append(lo)
    for level in candidates:
        rho = level / s
        if t / 2 <= rho <= t and regularity_check(dilate(B, rho)):
            return rho
    raise TheoremViolation(f"no regular dilate found in [{t / 2}, {t}]")


# -- restricted 3-AP count ------------------------------------------------------


@dataclass(frozen=True)
class RestrictedCount:
    count: int
    defect: int
    size: int
    dilate_size: int
    defect_bound: Fraction
    defect_ok: bool

    @property
    def lower_bound(self) -> int:
        return self.size * self.dilate_size - self.defect


def _count_convolution(a: np.ndarray, b_members: np.ndarray) -> np.ndarray:
    out = np.zeros(len(a), dtype=np.int64)
    for x in b_members:
        out += np.roll(a, int(x))
    return out


def restricted_ap_count(B: BohrSet, rho: float) -> RestrictedCount:
    """Progressions x, x+y, x+2y in B with y in B_rho, and how far
    1_{B_{1-2rho}} * 1_{B_rho} is from |B_rho| 1_B (integer counting sums)."""
    r = B.rank
    rho_q = Fraction(rho)
    if not (Fraction(1, C.REGIME_LOW_DIV * r) < rho_q < Fraction(1, C.REGIME_HIGH_DIV * r)):
        raise DomainRefusal(
            f"rho must satisfy 1/({C.REGIME_LOW_DIV}r) < rho < 1/({C.REGIME_HIGH_DIV}r) with r={r}"
        )
    if not regularity_check(B):
        raise DomainRefusal("B is not regular")
    small = dilate(B, rho)
    if not regularity_check(small):
        raise DomainRefusal("B_rho is not regular")
    ind = B.mask().astype(np.int64)
    steps = small.members()
    N = B.modulus
    count = 0
    for y in steps:
        count += int(np.sum(ind & np.roll(ind, -int(y)) & np.roll(ind, -2 * int(y) % N)))
    inner = dilate(B, 1 - 2 * rho).mask().astype(np.int64)
    conv = _count_convolution(inner, steps)
    defect = int(np.abs(conv - len(steps) * ind).sum())
    bound = C.DEFECT_CONST * r * rho_q * len(B) * len(steps)
    return RestrictedCount(count, defect, len(B), len(steps), bound, defect <= bound)


def bohr_json(B: BohrSet) -> str:
    return json.dumps(B.to_json())
