"""Large spectra, additive and higher energies, dissociated dimension, and
diagnostics built from them.

Energies are exact integers from counting convolutions; the Fourier expression
``E_x |inverse(1_D)(x)|^(2m)`` is kept alongside as a floating cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import f3
from .errors import DomainRefusal, TheoremViolation
from .fourier import forward_transform, indicator, inverse_transform, SpectrumTable
from .groups import AmbientGroup, SiteSet

SPEC_GUARD = 1e-12
ENERGY_RTOL = 1e-6
EXACT_DIMENSION_CAP = 24


@dataclass(frozen=True)
class LargeSpectrum:
    base: SiteSet
    delta: Fraction
    frequencies: tuple[int, ...]
    boundary: tuple[int, ...] = ()

    def __len__(self):
        return len(self.frequencies)

    def as_siteset(self) -> SiteSet:
        return SiteSet(self.base.group, self.frequencies)


def _delta(delta) -> Fraction:
    d = Fraction(delta) if not isinstance(delta, float) else Fraction(delta).limit_denominator(10**12)
    if not 0 < d <= 1:
        raise ValueError("delta must lie in (0, 1]")
    return d


def large_spectrum(A: SiteSet, delta) -> LargeSpectrum:
    """Frequencies xi with |1_A^(xi)| >= delta * alpha.

    Values within SPEC_GUARD of the threshold count as members (the inequality
    is non-strict) and are also listed in ``boundary``.
    """
    if not len(A):
        raise DomainRefusal("large spectrum of the empty set")
    d = _delta(delta)
    coeffs = forward_transform(A.group, indicator(A)).values
    gap = np.abs(coeffs) ** 2 - (float(d) * A.alpha) ** 2
    members = np.flatnonzero(gap >= -SPEC_GUARD)
    boundary = np.flatnonzero(np.abs(gap) <= SPEC_GUARD)
    return LargeSpectrum(A, d, tuple(int(x) for x in members), tuple(int(x) for x in boundary))


# -- energies ---------------------------------------------------------------


@dataclass(frozen=True)
class EnergyReport:
    delta_set: SiteSet
    m: int
    value: int
    spectral: float

    @property
    def normalized(self) -> Fraction:
        return Fraction(self.value, len(self.delta_set) ** (2 * self.m - 1))


def representation_counts(D: SiteSet, m: int) -> np.ndarray:
    """``r_m(x)``: number of m-tuples from D summing to x, as exact integers."""
    g = D.group
    idx = np.arange(g.order)
    safe = len(D) ** max(m - 1, 1) < 2**62
    r = D.indicator().astype(np.int64 if safe else object)
    base = r.copy()
    for _ in range(m - 1):
        nxt = np.zeros_like(base)
        for a in D.elements:
            nxt = nxt + r[g.sub(idx, a)]
        r = nxt
    return r


def energy(D: SiteSet, m: int) -> EnergyReport:
    """E_{2m}(D): number of 2m-tuples with equal sums of the two halves."""
    if m < 2:
        raise ValueError("energy needs m >= 2")
    if not len(D):
        raise DomainRefusal("energy of the empty set")
    r = representation_counts(D, m)
    value = sum(int(v) * int(v) for v in r)
    check = inverse_transform(SpectrumTable(D.group, D.indicator().astype(complex)))
    spectral = float(np.mean(np.abs(check) ** (2 * m)))
    if abs(spectral - value) > ENERGY_RTOL * value:
        raise TheoremViolation(f"energy mismatch: counted {value}, Fourier {spectral}")
    return EnergyReport(D, m, value, spectral)


def holder_chain(D: SiteSet, m_max: int = 4) -> dict:
    """Check the trivial bounds and Hoelder chains between E_4, E_8 and E_2m.

    Fractional powers are cleared, so every comparison is between integers:
    E_4^(m-1) <= E_2m |D|^(m-2) for m > 2, and E_8^(m-1) <= E_2m^3 |D|^(m-4)
    for m > 4.
    """
    k = len(D)
    values = {m: energy(D, m).value for m in range(2, m_max + 1)}
    checks = {}
    for m, e in values.items():
        checks[f"trivial_{2 * m}"] = k**m <= e <= k ** (2 * m - 1)
        if m > 2:
            checks[f"e4_chain_{2 * m}"] = values[2] ** (m - 1) <= e * k ** (m - 2)
        if m > 4:
            checks[f"e8_chain_{2 * m}"] = values[4] ** (m - 1) <= e**3 * k ** (m - 4)
    return checks


def spectrum_energy_floor(A: SiteSet, delta, m: int) -> tuple[bool, int, Fraction]:
    """E_2m(Spec_delta(A)) >= alpha delta^2m |Spec_delta(A)|^2m, exactly."""
    spec = large_spectrum(A, delta)
    e = energy(spec.as_siteset(), m).value
    floor = A.density * spec.delta ** (2 * m) * len(spec) ** (2 * m)
    return e >= floor, e, floor


# -- dissociativity -----------------------------------------------------------


@dataclass(frozen=True)
class DimensionResult:
    dimension: int
    witness: tuple[int, ...]
    exact: bool


def is_dissociated(g: AmbientGroup, S) -> bool:
    """True iff all 2^|S| subset sums are distinct (no {-1,0,1} relation)."""
    sums = {0}
    for s in S:
        shifted = {int(g.add(t, s)) for t in sums}
        if shifted & sums:
            return False
        sums |= shifted
    return True


def dissociated_dimension(D: SiteSet, mode: str = "auto") -> DimensionResult:
    """Size of the largest dissociated subset of D.

    Exact mode is a depth-first search over subsets in index order (include
    before exclude), so the witness is the lexicographically least maximiser.
    Dissociated sets have 2^|S| distinct subset sums, which caps |S| at
    log2|G| and prunes the search.  Greedy mode returns a lower bound.
    """
    g = D.group
    if mode == "auto":
        mode = "exact" if len(D) <= EXACT_DIMENSION_CAP else "greedy"
    if mode == "greedy":
        chosen: list[int] = []
        sums = {0}
        for s in D.elements:
            shifted = {int(g.add(t, s)) for t in sums}
            if not shifted & sums:
                chosen.append(s)
                sums |= shifted
        return DimensionResult(len(chosen), tuple(chosen), False)
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    if len(D) > EXACT_DIMENSION_CAP:
        raise ValueError(f"exact dimension is capped at |D| <= {EXACT_DIMENSION_CAP}")

    order = g.order
    cap = int(math.floor(math.log2(order)))
    elems = [e for e in D.elements if e != 0]
    shifts = [np.asarray(g.add(np.arange(order), s)) for s in elems]
    best: list[int] = []

    def search(i: int, chosen: list[int], sums: np.ndarray) -> None:
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        for j in range(i, len(elems)):
            if len(best) >= cap or len(chosen) + (len(elems) - j) <= len(best):
                return
            moved = np.zeros(order, dtype=bool)
            moved[shifts[j][sums]] = True
            if (moved & sums).any():
                continue
            chosen.append(elems[j])
            search(j + 1, chosen, sums | moved)
            chosen.pop()

    start = np.zeros(order, dtype=bool)
    start[0] = True
    search(0, [], start)
    return DimensionResult(len(best), tuple(best), True)


def f3_rank(g: AmbientGroup, elements) -> int:
    """Rank over F_3 of a list of vector-group elements."""
    elements = list(elements)
    if not elements:
        return 0
    return f3.rank(g.digits(np.array(elements, dtype=np.int64)))


# -- diagnostics ----------------------------------------------------------------


@dataclass(frozen=True)
class ChangReport:
    spectrum_size: int
    dimension: int
    exact: bool
    witness: tuple[int, ...]
    chang_ratio: Optional[float]
    bloom_ratio: Optional[float]


def chang_diagnostic(A: SiteSet, delta, mode: str = "auto") -> ChangReport:
    """Dimension of Spec_delta(A) against 1/delta^2 and 1/delta, per log(1/alpha).

    The comparison constants are unknown, so only the ratios are reported.
    """
    spec = large_spectrum(A, delta)
    dim = dissociated_dimension(spec.as_siteset(), mode)
    d = float(spec.delta)
    log_inv = math.log(1 / A.alpha)
    chang = dim.dimension * d * d / log_inv if log_inv > 0 else None
    bloom = dim.dimension * d / log_inv if log_inv > 0 else None
    return ChangReport(len(spec), dim.dimension, dim.exact, dim.witness, chang, bloom)


@dataclass(frozen=True)
class NonSmoothingReport:
    spectrum_size: int
    e4: int
    e8: int
    tau: Fraction
    sigma: Fraction
    ratios: dict
    kappa: float
    non_smoothing: bool
    sigma_ge_tau_cubed: bool
    degenerate: bool


def nonsmoothing_probe(A: SiteSet, delta, kappa: float) -> NonSmoothingReport:
    """Compare (delta, |Spec|, E4, E8) with the additively non-smoothing profile.

    Each of delta/alpha, |Spec| delta^3, tau/delta^2 and sigma/delta^6 must lie in
    [1/kappa, kappa] for the regime to be declared.
    """
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    spec = large_spectrum(A, delta)
    S = spec.as_siteset()
    k = len(S)
    e4 = energy(S, 2).value
    e8 = energy(S, 4).value
    tau = Fraction(e4, k**3)
    sigma = Fraction(e8, k**7)
    d = spec.delta
    ratios = {
        "delta_over_alpha": float(d / A.density),
        "spec_delta_cubed": float(k * d**3),
        "tau_over_delta_sq": float(tau / d**2),
        "sigma_over_delta_6": float(sigma / d**6),
    }
    inside = all(1 / kappa <= v <= kappa for v in ratios.values())
    return NonSmoothingReport(k, e4, e8, tau, sigma, ratios, kappa, inside,
                              sigma >= tau**3, k == 1)


@dataclass(frozen=True)
class Ell3Band:
    delta: Fraction  # band is delta*alpha <= |f^| < 2*delta*alpha
    count: int
    mass: float


@dataclass(frozen=True)
class Ell3Report:
    total: float
    small_count: int
    small_mass: float
    bands: tuple[Ell3Band, ...] = field(default_factory=tuple)


def ell3_mass(A: SiteSet) -> Ell3Report:
    """Cube-sum of the balanced function's coefficients, split into dyadic bands.

    Coefficients of size at most alpha^2 are pooled into one small band.
    """
    if not len(A):
        raise DomainRefusal("ell3 mass of the empty set")
    coeffs = forward_transform(A.group, indicator(A) - A.alpha).values
    mags = np.abs(coeffs)
    alpha = A.alpha
    cubes = mags**3
    total = float(cubes.sum())
    small = mags <= alpha * alpha
    bands: dict[int, list[int]] = {}
    for xi in np.flatnonzero(~small):
        j = max(0, int(math.floor(math.log2(alpha / mags[xi]))))
        while j > 0 and mags[xi] >= 2 * alpha / 2**j:
            j -= 1
        while mags[xi] < alpha / 2**j:
            j += 1
        bands.setdefault(j, []).append(int(xi))
    out = tuple(
        Ell3Band(Fraction(1, 2**j), len(xs), float(cubes[xs].sum()))
        for j, xs in sorted(bands.items())
    )
    return Ell3Report(total, int(small.sum()), float(cubes[small].sum()), out)


@dataclass(frozen=True)
class LpNormReport:
    m: int
    moment: Fraction  # E_x (mu_A * 1_A)(x)^(2m)
    norm: float


def lp_convolution_norm(A: SiteSet, m: int) -> LpNormReport:
    """``||mu_A * 1_A||_{L^{2m}}`` with the moment computed exactly."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if not len(A):
        raise DomainRefusal("normalised indicator of the empty set")
    g = A.group
    ind = A.indicator()
    idx = np.arange(g.order)
    r = np.zeros(g.order, dtype=np.int64)
    for a in A.elements:
        r += ind[g.sub(idx, a)]
    # (mu_A * 1_A)(x) = r(x) / |A|
    num = sum(int(v) ** (2 * m) for v in r)
    moment = Fraction(num, g.order * len(A) ** (2 * m))
    log_moment = math.log(num) - math.log(g.order) - 2 * m * math.log(len(A))
    norm = math.exp(log_moment / (2 * m))
    return LpNormReport(m, moment, norm)
