import itertools
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ap3.groups import (
    AmbientGroup,
    DuplicateElement,
    ElementOutOfRange,
    EncodingError,
    Interval,
    MalformedSiteSet,
    SiteSet,
    character_eval,
    element_add,
    emit_siteset,
    parse_siteset,
    vector_set,
)

from conftest import site_sets, small_groups


def test_group_orders():
    assert AmbientGroup.cyclic(7).order == 7
    assert AmbientGroup.vector(4).order == 81
    with pytest.raises(ValueError):
        AmbientGroup.cyclic(0)
    with pytest.raises(ValueError):
        AmbientGroup.vector(0)


def test_element_add_examples():
    assert element_add(AmbientGroup.cyclic(5), 3, 4) == 2
    assert element_add(AmbientGroup.vector(2), 1, 3) == 4
    for g in (AmbientGroup.cyclic(9), AmbientGroup.vector(3)):
        assert all(element_add(g, a, 0) == a for a in range(g.order))
    with pytest.raises(EncodingError):
        element_add(AmbientGroup.cyclic(5), 5, 1)


def test_character_examples():
    assert abs(character_eval(AmbientGroup.cyclic(4), 1, 1) - 1j) < 1e-12
    g = AmbientGroup.vector(2)
    assert character_eval(g, g.encode([1, 1]), g.encode([1, 2])) == 1
    for x in range(9):
        assert character_eval(g, 0, x) == 1


@pytest.mark.parametrize("g", [AmbientGroup.cyclic(n) for n in (1, 2, 12, 81)]
                         + [AmbientGroup.vector(n) for n in (1, 2, 3, 4)])
def test_group_axioms_exhaustive(g):
    idx = np.arange(g.order)
    a, b = np.meshgrid(idx, idx, indexing="ij")
    ab = g.add(a, b)
    assert np.array_equal(ab, ab.T)
    for c in range(0, g.order, max(1, g.order // 9)):
        assert np.array_equal(g.add(ab, c), g.add(a, g.add(b, c)))
    assert np.all(g.add(idx, g.neg(idx)) == 0)


@given(g=small_groups, data=st.data())
def test_character_is_multiplicative(g, data):
    xi, x, y = (data.draw(st.integers(0, g.order - 1)) for _ in range(3))
    lhs = character_eval(g, xi, g.add(x, y))
    rhs = character_eval(g, xi, x) * character_eval(g, xi, y)
    assert abs(lhs - rhs) < 1e-10
    assert abs(abs(lhs) - 1) < 1e-12


@pytest.mark.parametrize("n", range(1, 9))
def test_encoding_bijective(n):
    g = AmbientGroup.vector(n)
    digits = np.array(list(itertools.product(range(3), repeat=n)))
    idx = g.encode(digits)
    assert sorted(idx) == list(range(g.order))
    assert np.array_equal(g.digits(idx), digits)


def test_little_endian_index():
    g = AmbientGroup.vector(3)
    assert g.encode([1, 0, 0]) == 1
    assert g.encode([0, 1, 0]) == 3
    assert g.encode([0, 0, 2]) == 18


def test_parse_examples():
    A = parse_siteset('{"group":{"kind":"cyclic","modulus":5},"elements":[0,1]}')
    assert A.density == Fraction(2, 5)
    assert vector_set(1, [[0], [1]]).density == Fraction(2, 3)
    with pytest.raises(DuplicateElement):
        parse_siteset('{"group":{"kind":"cyclic","modulus":5},"elements":[3,3]}')
    with pytest.raises(ElementOutOfRange):
        parse_siteset('{"group":{"kind":"cyclic","modulus":5},"elements":[5]}')
    with pytest.raises(MalformedSiteSet):
        parse_siteset('{"group":{"kind":"cyclic","modulus":5},"elements":[1]} trailing')
    with pytest.raises(MalformedSiteSet):
        parse_siteset('{"group":{"kind":"torus"},"elements":[]}')


def test_parse_resorts():
    A = parse_siteset('{"group":{"kind":"cyclic","modulus":9},"elements":[4,0,2]}')
    assert A.elements == (0, 2, 4)


def test_error_kinds_are_distinct():
    assert len({DuplicateElement, ElementOutOfRange, MalformedSiteSet}) == 3
    assert not issubclass(DuplicateElement, ElementOutOfRange)


@given(site_sets())
def test_json_round_trip(A):
    B = parse_siteset(emit_siteset(A))
    assert B == A
    assert B.density * A.ambient.order == len(A)


def test_interval_ambient():
    A = parse_siteset('{"group":{"kind":"interval","length":10},"elements":[1,10]}')
    assert isinstance(A.ambient, Interval) and A.density == Fraction(1, 5)
    with pytest.raises(ElementOutOfRange):
        SiteSet.from_elements(Interval(10), [0])
    assert json.loads(emit_siteset(A))["group"] == {"kind": "interval", "length": 10}
