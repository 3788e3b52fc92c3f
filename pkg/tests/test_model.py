from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from catpaths.errors import (
    EmptySupport,
    IllegalCatastrophe,
    InvalidJumpSet,
    NegativeAltitude,
    UnknownJump,
)
from catpaths.model import (
    DYCK,
    Catastrophe,
    CatastrophePolicy,
    Jump,
    JumpSet,
    detect_period,
    parse_steps,
    path_statistics,
    validate_path,
)

from .conftest import jumpsets


def test_parse_dyck():
    J = JumpSet.parse("-1:1, 1:1, q=1")
    assert J == DYCK
    assert J.support == (-1, 1)
    assert J.excluded == frozenset({0, 1})
    assert (J.c, J.d) == (1, 1)


def test_parse_rational_and_policy():
    J = JumpSet.parse("-2:1/2,0:3,1:2/3,q=3/4", "anywhere")
    assert J.p(-2) == Fraction(1, 2)
    assert J.p(-1) == 0
    assert J.q == Fraction(3, 4)
    assert J.excluded == frozenset()


@pytest.mark.parametrize("text", ["1:1,q=1", "-1:1,q=1", "-1:1,1:1", "-1:1,-1:2,1:1,q=1", "-1:x,1:1,q=1"])
def test_parse_rejects(text):
    with pytest.raises((InvalidJumpSet, ValueError)):
        JumpSet.parse(text)


def test_zero_weights_dropped_and_empty():
    J = JumpSet.from_weights({-1: 1, 0: 0, 1: 1})
    assert J.support == (-1, 1)
    with pytest.raises(EmptySupport):
        JumpSet((), Fraction(1))


def test_float_weights_rejected():
    with pytest.raises(TypeError):
        JumpSet.from_weights({-1: 0.5, 1: 1})


@given(jumpsets())
def test_serialization_roundtrip(J):
    assert JumpSet.parse(str(J)) == J


def test_policy_parse():
    assert CatastrophePolicy.parse("exclude:0,3").excluded == frozenset({0, 3})
    assert str(CatastrophePolicy.parse("exclude:3;0")) == "exclude:0;3"
    with pytest.raises(ValueError):
        CatastrophePolicy.parse("sometimes")


def test_default_policy_excludes_down_jump_sizes():
    J = JumpSet.parse("-3:1,-1:1,2:1,q=1")
    assert J.excluded == frozenset({0, 1, 3})
    assert J.permits(2) and not J.permits(3)


def test_validate_path_and_statistics():
    p = validate_path(DYCK, parse_steps("1 1 -1 1 C2 1 -1 1 1 C2"))
    assert p.altitudes == (0, 1, 2, 1, 2, 0, 1, 0, 1, 2, 0)
    assert p.weight == 1
    s = path_statistics(p)
    assert s == (0, 2, 3, 4, 5, 2)


def test_validate_path_weights():
    J = JumpSet.parse("-1:1/2,1:3,q=2/3")
    p = validate_path(J, [1, 1, Catastrophe(2), 1, -1])
    assert p.weight == Fraction(3) ** 3 * Fraction(1, 2) * Fraction(2, 3)


@pytest.mark.parametrize(
    "steps, exc, index",
    [
        ([-1], NegativeAltitude, 0),
        ([1, 2], UnknownJump, 1),
        ([1, "C1"], IllegalCatastrophe, 1),
        (["C0"], IllegalCatastrophe, 0),
        ([1, 1, "C1"], IllegalCatastrophe, 2),
    ],
)
def test_validate_path_errors(steps, exc, index):
    with pytest.raises(exc) as info:
        validate_path(DYCK, steps)
    assert info.value.index == index


def test_anywhere_allows_size_zero():
    J = DYCK.with_policy("anywhere")
    p = validate_path(J, ["C0", 1, "C1"])
    assert path_statistics(p).n_catastrophes == 2


@pytest.mark.parametrize("support, period", [((-1, 1), 2), ((-1, 0, 1), 1), ((-2, 1), 3), ((-2, 2), 4), ((-1, 2), 3)])
def test_detect_period(support, period):
    assert detect_period(support) == period


def test_step_strings():
    assert str(Jump(-2)) == "-2" and str(Catastrophe(3)) == "C3"
    assert str(validate_path(DYCK, [1, 1, "C2", 1, -1])) == "1 1 C2 1 -1"


@given(st.lists(st.sampled_from([1, -1]), max_size=12))
def test_validate_accepts_exactly_nonnegative_walks(steps):
    alt, ok = 0, True
    for s in steps:
        alt += s
        ok &= alt >= 0
    if ok:
        assert validate_path(DYCK, steps).final_altitude == alt
    else:
        with pytest.raises(NegativeAltitude):
            validate_path(DYCK, steps)
