"""Fourier analysis on Z/NZ and F_3^n.

Normalisations: the forward transform averages, ``f^(xi) = E_x f(x) conj(xi(x))``,
and the inverse sums, ``F(x) = sum_xi F(xi) xi(x)``.  Convolution is averaged,
``(g*h)(x) = E_y g(x-y) h(y)``, so that the transform of ``g*h`` is the pointwise
product of transforms.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import TheoremViolation
from .groups import AmbientGroup, SiteSet, ambient_from_json

TRIPLE_FORM_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class SpectrumTable:
    group: AmbientGroup
    values: np.ndarray

    def __post_init__(self):
        if len(self.values) != self.group.order:
            raise ValueError("spectrum length must equal the group order")

    def __getitem__(self, xi):
        return self.values[xi]

    def to_json(self) -> dict:
        return {
            "group": self.group.to_json(),
            "re": [float(v) for v in self.values.real],
            "im": [float(v) for v in self.values.imag],
        }

    @classmethod
    def from_json(cls, obj) -> "SpectrumTable":
        g = ambient_from_json(obj["group"])
        vals = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
        return cls(g, vals)


def _as_function(g: AmbientGroup, f) -> np.ndarray:
    arr = np.asarray(f)
    if arr.shape != (g.order,):
        raise ValueError(f"function has {arr.size} entries, group order is {g.order}")
    return arr


def _cube(g: AmbientGroup, arr: np.ndarray) -> np.ndarray:
    # C-order reshape puts coordinate n on axis 0; fftn treats all axes alike,
    # so the flattened output keeps the same little-endian indexing.
    return arr.reshape((3,) * g.dimension)


def forward_transform(g: AmbientGroup, f) -> SpectrumTable:
    arr = _as_function(g, f).astype(complex)
    if g.is_cyclic:
        vals = np.fft.fft(arr)
    else:
        vals = np.fft.fftn(_cube(g, arr)).reshape(-1)
    return SpectrumTable(g, vals / g.order)


def inverse_transform(F: SpectrumTable) -> np.ndarray:
    g = F.group
    arr = np.asarray(F.values, dtype=complex)
    if g.is_cyclic:
        out = np.fft.ifft(arr)
    else:
        out = np.fft.ifftn(_cube(g, arr)).reshape(-1)
    return out * g.order


def character_matrix(g: AmbientGroup) -> np.ndarray:
    """Matrix ``C[xi, x] = xi(x)``; O(|G|^2) memory, meant for oracles."""
    idx = np.arange(g.order)
    k = g.pairing(idx[:, None], idx[None, :])
    return np.exp(2j * np.pi * k / g.pairing_modulus)


def naive_forward_transform(g: AmbientGroup, f) -> SpectrumTable:
    """Direct O(|G|^2) evaluation of the forward transform."""
    arr = _as_function(g, f).astype(complex)
    return SpectrumTable(g, character_matrix(g).conj() @ arr / g.order)


def naive_inverse_transform(F: SpectrumTable) -> np.ndarray:
    return character_matrix(F.group).T @ np.asarray(F.values, dtype=complex)


def reflect(g: AmbientGroup, h) -> np.ndarray:
    """``h_-(x) = conj(h(-x))``."""
    arr = _as_function(g, h)
    return np.conj(arr[g.neg(np.arange(g.order))])


def convolve(g: AmbientGroup, a, b) -> np.ndarray:
    fa = forward_transform(g, a).values
    fb = forward_transform(g, b).values
    return inverse_transform(SpectrumTable(g, fa * fb))


def correlate(g: AmbientGroup, a, b) -> np.ndarray:
    """``a o b = a * b_-``."""
    return convolve(g, a, reflect(g, b))


def direct_convolve(g: AmbientGroup, a, b) -> np.ndarray:
    a = _as_function(g, a)
    b = _as_function(g, b)
    idx = np.arange(g.order)
    out = np.zeros(g.order, dtype=complex)
    for y in range(g.order):
        out += a[g.sub(idx, y)] * b[y]
    return out / g.order


def indicator(A: SiteSet) -> np.ndarray:
    return A.indicator().astype(float)


def _require_odd(g: AmbientGroup) -> None:
    if g.order % 2 == 0:
        raise ValueError("3-AP forms need odd group order (dilation by 2 must be invertible)")


def triple_form_direct(g: AmbientGroup, f, gg, h) -> complex:
    """``E_{x,y} f(x) g(x+y) h(x+2y)`` by the O(|G|^2) double loop."""
    _require_odd(g)
    f, gg, h = (_as_function(g, v) for v in (f, gg, h))
    idx = np.arange(g.order)
    total = 0j
    for y in range(g.order):
        y2 = g.scale(2, y)
        total += np.sum(f * gg[g.add(idx, y)] * h[g.add(idx, y2)])
    return complex(total / g.order**2)


def triple_form_spectral(g: AmbientGroup, f, gg, h) -> complex:
    """``sum_xi f^(xi) g^(-2 xi) h^(xi)``."""
    _require_odd(g)
    F = forward_transform(g, f).values
    Gv = forward_transform(g, gg).values
    H = forward_transform(g, h).values
    m2 = g.scale(-2, np.arange(g.order))
    return complex(np.sum(F * Gv[m2] * H))


def triple_ap_form(g: AmbientGroup, f, gg, h) -> complex:
    """The 3-AP trilinear form; both evaluation routes must agree."""
    direct = triple_form_direct(g, f, gg, h)
    spectral = triple_form_spectral(g, f, gg, h)
    if abs(direct - spectral) > TRIPLE_FORM_RTOL * max(abs(direct), 1e-12):
        raise TheoremViolation(
            f"3-AP identity mismatch: direct {direct!r} vs spectral {spectral!r}"
        )
    return spectral


def spectrum_json(A: SiteSet) -> str:
    return json.dumps(forward_transform(A.group, indicator(A)).to_json())
