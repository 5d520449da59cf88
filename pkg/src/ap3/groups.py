"""Ambient groups Z/NZ and F_3^n, the integer interval [N], and site sets.

Elements are plain nonnegative integers.  For ``F_3^n`` the index of a vector
``(a_1, ..., a_n)`` is ``sum(a_i * 3**(i-1))`` (coordinate 1 least significant),
so indices are stable across modules and file formats.  Characters are
identified with group elements (self-duality), so a frequency is just another
index.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np


class EncodingError(ValueError):
    """An element index or digit sequence is invalid for its group."""


class SiteSetParseError(ValueError):
    """Base class for errors raised while reading site-set JSON."""


class MalformedSiteSet(SiteSetParseError):
    pass


class ElementOutOfRange(SiteSetParseError):
    pass


class DuplicateElement(SiteSetParseError):
    pass


@dataclass(frozen=True)
class AmbientGroup:
    """Either the cyclic group Z/NZ or the vector group F_3^n."""

    kind: str
    size: int

    def __post_init__(self):
        if self.kind not in ("cyclic", "vector"):
            raise ValueError(f"unknown group kind {self.kind!r}")
        if int(self.size) != self.size or self.size < 1:
            raise ValueError("modulus/dimension must be a positive integer")

    @classmethod
    def cyclic(cls, modulus: int) -> "AmbientGroup":
        return cls("cyclic", modulus)

    @classmethod
    def vector(cls, dimension: int) -> "AmbientGroup":
        return cls("vector", dimension)

    @property
    def is_cyclic(self) -> bool:
        return self.kind == "cyclic"

    @property
    def modulus(self) -> int:
        if not self.is_cyclic:
            raise AttributeError("vector groups have no modulus")
        return self.size

    @property
    def dimension(self) -> int:
        if self.is_cyclic:
            raise AttributeError("cyclic groups have no dimension")
        return self.size

    @property
    def order(self) -> int:
        return self.size if self.is_cyclic else 3**self.size

    def __str__(self):
        return f"Z/{self.size}Z" if self.is_cyclic else f"F_3^{self.size}"

    # -- encoding ---------------------------------------------------------

    def check(self, a) -> None:
        arr = np.asarray(a)
        if arr.size and (arr.min() < 0 or arr.max() >= self.order):
            raise EncodingError(f"index out of range for {self}")

    def digits(self, a) -> np.ndarray:
        """Base-3 digits of vector-group indices, shape ``(..., n)``."""
        if self.is_cyclic:
            raise EncodingError("digits are only defined for vector groups")
        arr = np.asarray(a, dtype=np.int64)
        self.check(arr)
        powers = 3 ** np.arange(self.size, dtype=np.int64)
        return (arr[..., None] // powers) % 3

    def encode(self, digits) -> np.ndarray | int:
        if self.is_cyclic:
            raise EncodingError("digits are only defined for vector groups")
        d = np.asarray(digits, dtype=np.int64)
        if d.shape[-1] != self.size or (d.size and (d.min() < 0 or d.max() > 2)):
            raise EncodingError(f"bad digit sequence for {self}")
        out = d @ (3 ** np.arange(self.size, dtype=np.int64))
        return int(out) if out.ndim == 0 else out

    # -- arithmetic (vectorised; scalars in, scalars out) ----------------

    def add(self, a, b):
        self.check(a)
        self.check(b)
        if self.is_cyclic:
            out = (np.asarray(a, dtype=np.int64) + np.asarray(b, dtype=np.int64)) % self.size
        else:
            out = self.encode((self.digits(a) + self.digits(b)) % 3)
        return _scalarise(out)

    def scale(self, k: int, a):
        """The element ``k*a``."""
        if self.is_cyclic:
            self.check(a)
            return _scalarise((k * np.asarray(a, dtype=np.int64)) % self.size)
        return _scalarise(self.encode((k * self.digits(a)) % 3))

    def neg(self, a):
        return self.scale(-1, a)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def pairing(self, xi, x):
        """Integer ``k`` with ``xi(x) = e(k / m)`` where m is the modulus (3 for vectors)."""
        if self.is_cyclic:
            self.check(xi)
            self.check(x)
            return _scalarise((np.asarray(xi, dtype=np.int64) * np.asarray(x, dtype=np.int64)) % self.size)
        return _scalarise((self.digits(xi) * self.digits(x)).sum(axis=-1) % 3)

    @property
    def pairing_modulus(self) -> int:
        return self.size if self.is_cyclic else 3

    def to_json(self) -> dict:
        if self.is_cyclic:
            return {"kind": "cyclic", "modulus": self.size}
        return {"kind": "vector", "dimension": self.size}


@dataclass(frozen=True)
class Interval:
    """The integer interval [N] = {1, ..., N}; not a group, no wraparound."""

    length: int
    kind: str = field(default="interval", init=False)

    def __post_init__(self):
        if int(self.length) != self.length or self.length < 1:
            raise ValueError("interval length must be a positive integer")

    @property
    def order(self) -> int:
        return self.length

    def check(self, a) -> None:
        arr = np.asarray(a)
        if arr.size and (arr.min() < 1 or arr.max() > self.length):
            raise EncodingError(f"element outside [1, {self.length}]")

    def __str__(self):
        return f"[{self.length}]"

    def to_json(self) -> dict:
        return {"kind": "interval", "length": self.length}


Ambient = Union[AmbientGroup, Interval]


def _scalarise(x):
    x = np.asarray(x)
    return int(x) if x.ndim == 0 else x


def element_add(g: AmbientGroup, a: int, b: int) -> int:
    return int(g.add(a, b))


def character_eval(g: AmbientGroup, xi: int, x: int) -> complex:
    """Value of the character indexed by ``xi`` at ``x``."""
    k = int(g.pairing(xi, x))
    if k == 0:
        return 1 + 0j
    return cmath.exp(2j * math.pi * k / g.pairing_modulus)


@dataclass(frozen=True)
class SiteSet:
    """A subset of an ambient group (or of [N]) with its exact density."""

    ambient: Ambient
    elements: tuple[int, ...]

    def __post_init__(self):
        els = tuple(int(e) for e in self.elements)
        object.__setattr__(self, "elements", els)
        if any(b <= a for a, b in zip(els, els[1:])):
            raise ValueError("elements must be strictly increasing")
        self.ambient.check(np.array(els, dtype=np.int64))

    @classmethod
    def from_elements(cls, ambient: Ambient, elements: Iterable[int]) -> "SiteSet":
        els = [int(e) for e in elements]
        if len(set(els)) != len(els):
            dup = sorted(e for e in set(els) if els.count(e) > 1)[0]
            raise DuplicateElement(f"duplicate element {dup}")
        try:
            ambient.check(np.array(els, dtype=np.int64))
        except EncodingError as exc:
            raise ElementOutOfRange(str(exc)) from None
        return cls(ambient, tuple(sorted(els)))

    @property
    def group(self) -> AmbientGroup:
        if not isinstance(self.ambient, AmbientGroup):
            raise TypeError("site set lives in an integer interval, not a group")
        return self.ambient

    @property
    def is_interval(self) -> bool:
        return isinstance(self.ambient, Interval)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return int(x) in self._lookup

    @property
    def _lookup(self) -> frozenset:
        cached = self.__dict__.get("_lookup_cache")
        if cached is None:
            cached = frozenset(self.elements)
            object.__setattr__(self, "_lookup_cache", cached)
        return cached

    @property
    def density(self) -> Fraction:
        return Fraction(len(self.elements), self.ambient.order)

    @property
    def alpha(self) -> float:
        return float(self.density)

    def array(self) -> np.ndarray:
        return np.array(self.elements, dtype=np.int64)

    def indicator(self) -> np.ndarray:
        """0/1 vector indexed by element value (length order, or N+1 for [N])."""
        n = self.ambient.order + (1 if self.is_interval else 0)
        out = np.zeros(n, dtype=np.int64)
        out[self.array()] = 1
        return out

    def to_json(self) -> dict:
        return {"group": self.ambient.to_json(), "elements": list(self.elements)}


def ambient_from_json(obj) -> Ambient:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise MalformedSiteSet("group must be an object with a 'kind'")
    kind = obj["kind"]
    try:
        if kind == "cyclic":
            return AmbientGroup.cyclic(_posint(obj["modulus"]))
        if kind == "vector":
            return AmbientGroup.vector(_posint(obj["dimension"]))
        if kind == "interval":
            return Interval(_posint(obj["length"]))
    except (KeyError, ValueError) as exc:
        raise MalformedSiteSet(f"bad group description: {exc}") from None
    raise MalformedSiteSet(f"unknown group kind {kind!r}")


def _posint(v) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise ValueError(f"expected a positive integer, got {v!r}")
    return v


def siteset_from_json(obj) -> SiteSet:
    if not isinstance(obj, dict) or "group" not in obj or "elements" not in obj:
        raise MalformedSiteSet("expected an object with 'group' and 'elements'")
    ambient = ambient_from_json(obj["group"])
    els = obj["elements"]
    if not isinstance(els, list) or any(isinstance(e, bool) or not isinstance(e, int) for e in els):
        raise MalformedSiteSet("'elements' must be a list of integers")
    return SiteSet.from_elements(ambient, els)


def parse_siteset(text: str) -> SiteSet:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedSiteSet(f"invalid JSON: {exc}") from None
    return siteset_from_json(obj)


def emit_siteset(s: SiteSet) -> str:
    return json.dumps(s.to_json(), separators=(",", ":"))


def fraction_json(q: Fraction) -> dict:
    q = Fraction(q)
    return {"num": q.numerator, "den": q.denominator}


def fraction_from_json(obj) -> Fraction:
    return Fraction(int(obj["num"]), int(obj["den"]))


def vector_set(n: int, vectors: Sequence[Sequence[int]]) -> SiteSet:
    """Site set in F_3^n from explicit coordinate vectors (coordinate 1 first)."""
    g = AmbientGroup.vector(n)
    return SiteSet.from_elements(g, [int(g.encode(v)) for v in vectors])
