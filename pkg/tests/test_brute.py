from collections import Counter
from fractions import Fraction

import pytest

from catpaths import brute as B
from catpaths.errors import BoundExceeded
from catpaths.model import DYCK, MOTZKIN, JumpSet, path_statistics


def test_dyck_counts():
    assert [len(B.enumerate(DYCK, n)) for n in range(8)] == [1, 0, 1, 1, 3, 5, 12, 23]
    assert [len(B.enumerate(DYCK, n, "meander")) for n in range(7)] == [1, 1, 2, 4, 8, 17, 35]


def test_paths_are_distinct_and_valid():
    paths = [p for p, _ in B.enumerate(MOTZKIN, 6)]
    assert len({p.steps for p in paths}) == len(paths)
    assert all(p.is_excursion for p in paths)


def test_bound():
    with pytest.raises(BoundExceeded):
        B.enumerate(DYCK, 17)
    assert len(B.enumerate(DYCK, 17, bound=17)) > 0


def test_census_matches_path_enumeration():
    J = JumpSet.parse("-1:1/2,1:2,q=1/3", "anywhere")
    census = B.Census(J, 8)
    for param in ("catastrophes", "returns", "cumulative", "waiting", "avg_cat"):
        assert census.weighted(J, param, 8) == {k: v for k, v in B.param_value_tally(J, 8, param).items() if v}


def test_census_final_altitudes():
    census = B.Census(DYCK, 6)
    want = Counter()
    for p, w in B.enumerate(DYCK, 6, "meander"):
        want[p.final_altitude] += w
    assert census.weighted(DYCK, "final", 6) == dict(want)


def test_census_rejects_other_policy():
    census = B.Census(DYCK, 4)
    with pytest.raises(ValueError):
        census.weighted(DYCK.with_policy("anywhere"), "final", 4)


def test_oracle_tally_totals():
    t = B.oracle_tally(DYCK, 6)
    assert t.total == 12 and t.excursion_total == 12 and t.meander_total == 35
    assert sum(t.by_params.values()) == Fraction(12)
    assert all(pv.final_altitude == 0 for pv in t.by_params)


def test_avg_cat_counts_each_catastrophe():
    tally = B.param_value_tally(DYCK, 6, "avg_cat")
    n_cats = sum(len(p.catastrophe_sizes) for p, _ in B.enumerate(DYCK, 6))
    no_cat = sum(1 for p, _ in B.enumerate(DYCK, 6) if not p.catastrophe_sizes)
    assert sum(tally.values()) == n_cats + no_cat
    assert tally[0] == no_cat


def test_hpath_counts():
    assert [sum(1 for _ in B.enumerate_hpaths(n)) for n in range(8)] == [1, 0, 1, 1, 3, 5, 12, 23]


def test_statistics_recomputed():
    for p, _ in B.enumerate(DYCK, 7):
        s = path_statistics(p)
        assert s.n_catastrophes == len(p.catastrophe_sizes)
        assert s.cumulative_cat_size == sum(p.catastrophe_sizes)
