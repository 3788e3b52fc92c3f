import pytest
from hypothesis import given
from hypothesis import strategies as st

from catpaths import brute as B
from catpaths import series as S
from catpaths.bijection import H, HPath, arch_decompose, from_horizontal, to_horizontal
from catpaths.errors import InvalidHPath, NotAnExcursion, UnsupportedJumpSet
from catpaths.model import DYCK, MOTZKIN, parse_steps, validate_path


def _path(line):
    return validate_path(DYCK, parse_steps(line))


def test_example_mapping():
    hp = to_horizontal(_path("1 1 1 C3 1 -1"))
    assert str(hp) == "1 0h 0h -1 1 -1"
    assert from_horizontal(hp) == _path("1 1 1 C3 1 -1")


def test_lowest_up_step_is_kept():
    # levels 2 and 3 lose their last up-steps, level 1 keeps its step
    hp = to_horizontal(_path("1 1 -1 1 1 C3"))
    assert hp.steps == (1, 1, -1, H, H, -1)


def test_classical_arches_untouched():
    p = _path("1 1 -1 -1 1 -1")
    assert to_horizontal(p).steps == (1, 1, -1, -1, 1, -1)


def test_arch_decompose():
    arches = arch_decompose(_path("1 -1 1 1 C2 1 1 -1 -1"))
    assert [a.kind for a in arches] == ["nocat", "cat", "nocat"]
    assert sum(len(a.steps) for a in arches) == 9
    with pytest.raises(NotAnExcursion):
        arch_decompose(_path("1 1"))


@pytest.mark.parametrize("n", range(15))
def test_exhaustive_roundtrip(n):
    images = set()
    for p, _ in B.enumerate(DYCK, n):
        hp = to_horizontal(p)
        assert from_horizontal(hp) == p
        assert len(hp) == n and hp.is_excursion
        images.add(hp.steps)
    assert images == set(B.enumerate_hpaths(n))
    assert len(images) == S.continued_fraction_H(n)[n]


@given(st.integers(0, 14), st.randoms(use_true_random=False))
def test_inverse_on_random_hpaths(n, rnd):
    hps = list(B.enumerate_hpaths(n))
    if not hps:
        return
    hp = HPath(rnd.choice(hps))
    assert to_horizontal(from_horizontal(hp)) == hp


def test_hpath_validation():
    with pytest.raises(InvalidHPath):
        HPath((H,))
    with pytest.raises(InvalidHPath):
        HPath((1, 1, H))
    with pytest.raises(InvalidHPath):
        HPath.parse("1 x -1")
    with pytest.raises(InvalidHPath):
        from_horizontal(HPath((1, H)))
    assert HPath.parse("1 0h -1").steps == (1, H, -1)


def test_unsupported_jump_sets():
    with pytest.raises(UnsupportedJumpSet):
        to_horizontal(validate_path(MOTZKIN, [1, 0, -1]))
    with pytest.raises(UnsupportedJumpSet):
        from_horizontal(HPath((1, -1)), DYCK.with_policy("anywhere"))
