import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permcert.errors import (
    BudgetExceededError,
    EmptySpecError,
    ModulusTooSmallError,
    SpecMismatchError,
)
from permcert.group_core import (
    GroupSpec,
    add,
    construct_max_order_element,
    decode,
    encode,
    enumerate_elements,
    max_order_element,
    order,
    scalar_mul,
    validate_spec,
)


def repeated_add(spec, s, a):
    total = spec.identity
    for _ in range(s):
        total = tuple((x + y) % d for x, y, d in zip(total, a, spec.moduli))
    return total


def order_by_addition(spec, a):
    total, m = a, 1
    while total != spec.identity:
        total = tuple((x + y) % d for x, y, d in zip(total, a, spec.moduli))
        m += 1
    return m


SMALL_SPECS = [(2,), (3,), (4,), (6,), (2, 2), (4, 2), (6, 4), (3, 3), (2, 2, 2), (8, 2), (6, 6), (5, 4, 3)]


@pytest.mark.parametrize("moduli, exponent", [([4], 4), ([4, 2], 4), ([6, 4], 12)])
def test_validate_spec_exponent(moduli, exponent):
    assert validate_spec(moduli).exponent == exponent


def test_validate_spec_errors():
    with pytest.raises(EmptySpecError):
        validate_spec([])
    for bad in ([0], [1], [4, 1]):
        with pytest.raises(ModulusTooSmallError):
            validate_spec(bad)


def test_validate_spec_accepts_json_text():
    assert validate_spec("[4,2]").moduli == (4, 2)


def test_add_examples():
    s = GroupSpec((4, 2))
    assert add(s, (3, 1), (1, 1)) == (0, 0)
    assert add(s, (0, 0), (2, 1)) == (2, 1)
    assert add(GroupSpec((6,)), (4,), (5,)) == (3,)


def test_add_rejects_foreign_elements():
    s = GroupSpec((4, 2))
    with pytest.raises(SpecMismatchError):
        add(s, (3,), (1, 1))
    with pytest.raises(SpecMismatchError):
        add(s, (4, 0), (1, 1))


def test_scalar_mul_examples():
    s = GroupSpec((4, 2))
    assert scalar_mul(s, 0, (3, 1)) == (0, 0)
    assert scalar_mul(s, 2, (2, 1)) == repeated_add(s, 2, (2, 1)) == (0, 0)
    c6 = GroupSpec((6,))
    assert scalar_mul(c6, 4, (4,)) == repeated_add(c6, 4, (4,)) == (4,)


def test_order_examples():
    assert order(GroupSpec((4, 2)), (0, 0)) == 1
    assert order(GroupSpec((6,)), (4,)) == order_by_addition(GroupSpec((6,)), (4,)) == 3
    assert order(GroupSpec((4, 2)), (2, 1)) == 2


@pytest.mark.parametrize("moduli, expected", [((4,), (1,)), ((4, 2), (1, 0)), ((6, 4), (1, 1))])
def test_max_order_element_examples(moduli, expected):
    s = GroupSpec(moduli)
    assert max_order_element(s) == expected
    assert order_by_addition(s, expected) == s.exponent


def test_enumerate_elements_examples():
    assert list(enumerate_elements(GroupSpec((2,)))) == [(0,), (1,)]
    assert list(enumerate_elements(GroupSpec((2, 2)))) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert list(enumerate_elements(GroupSpec((3,)))) == [(0,), (1,), (2,)]


def test_enumerate_budget():
    with pytest.raises(BudgetExceededError):
        enumerate_elements(GroupSpec((1 << 13, 1 << 12)))
    with pytest.raises(BudgetExceededError):
        enumerate_elements(GroupSpec((10, 10)), budget=99)


@pytest.mark.parametrize("moduli", SMALL_SPECS)
def test_encode_matches_enumeration(moduli):
    s = GroupSpec(moduli)
    for i, a in enumerate(enumerate_elements(s)):
        assert encode(s, a) == i
        assert decode(s, i) == a


@pytest.mark.parametrize("moduli", SMALL_SPECS)
def test_group_axioms_exhaustive_small(moduli):
    s = GroupSpec(moduli)
    elems = list(enumerate_elements(s))
    rng = random.Random(1)
    for a in elems:
        assert add(s, a, s.identity) == a
    for _ in range(200):
        a, b, c = (rng.choice(elems) for _ in range(3))
        assert add(s, a, b) == add(s, b, a)
        assert add(s, add(s, a, b), c) == add(s, a, add(s, b, c))


@pytest.mark.parametrize("moduli", [m for m in SMALL_SPECS if GroupSpec(m).order <= 64])
def test_scalar_mul_is_repeated_addition_exhaustive(moduli):
    s = GroupSpec(moduli)
    for a in enumerate_elements(s):
        for k in range(2 * s.exponent + 1):
            assert scalar_mul(s, k, a) == repeated_add(s, k, a)


@pytest.mark.parametrize("moduli", [m for m in SMALL_SPECS if GroupSpec(m).order <= 256])
def test_order_properties_exhaustive(moduli):
    s = GroupSpec(moduli)
    for a in enumerate_elements(s):
        o = order(s, a)
        assert s.exponent % o == 0
        assert o == order_by_addition(s, a)
        assert scalar_mul(s, o, a) == s.identity
        assert all(scalar_mul(s, k, a) != s.identity for k in range(1, o))


moduli_strategy = st.lists(st.integers(2, 60), min_size=1, max_size=4)


@settings(max_examples=200, deadline=None)
@given(moduli_strategy)
def test_max_order_element_has_exponent_order(moduli):
    s = GroupSpec(tuple(moduli))
    assert order(s, max_order_element(s)) == s.exponent
    assert order(s, construct_max_order_element(s)) == s.exponent


@settings(max_examples=200, deadline=None)
@given(moduli_strategy, st.data())
def test_random_scalar_mul_matches_addition(moduli, data):
    s = GroupSpec(tuple(moduli))
    a = tuple(data.draw(st.integers(0, d - 1)) for d in s.moduli)
    k = data.draw(st.integers(0, 2 * s.exponent))
    assert scalar_mul(s, k, a) == repeated_add(s, k, a)


def test_large_moduli_exact():
    p = (1 << 32) - 5
    s = GroupSpec((p, 1 << 32))
    a = (p - 1, (1 << 32) - 1)
    assert scalar_mul(s, p - 1, a) == ((p - 1) * (p - 1) % p, ((p - 1) * ((1 << 32) - 1)) % (1 << 32))
    x = max_order_element(s)
    assert order(s, x) == s.exponent


def test_cyclicity():
    assert GroupSpec((2, 3)).is_cyclic
    assert not GroupSpec((2, 2)).is_cyclic
