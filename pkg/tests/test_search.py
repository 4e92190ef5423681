import json
from fractions import Fraction

import pytest

from thetanorm.cocycle import Configuration, theta_direct
from thetanorm.ordercomb import canonicalize_cyclic, enumerate_x_patterns
from thetanorm.search import (
    MODES,
    NormReport,
    build_tables,
    class_table,
    eval_regular,
    max_for_x_pattern,
    norm,
)

TIED_MAXIMA = {
    (1, 1, 1, 1, 2, 3, 4): Fraction(2, 15),
    (1, 1, 1, 2, 2, 3, 4): Fraction(7, 45),
    (1, 1, 1, 2, 3, 3, 4): Fraction(7, 45),
    (1, 1, 2, 2, 3, 3, 4): Fraction(8, 45),
    (1, 1, 1, 2, 3, 4, 5): Fraction(8, 45),
    (1, 1, 2, 2, 3, 4, 5): Fraction(1, 5),
    (1, 1, 2, 3, 4, 5, 6): Fraction(2, 9),
}


def test_class_table_sizes():
    assert len(class_table(1)) == 5
    assert len(class_table(2)) == 83
    assert len(class_table(3)) == 4715
    assert len(class_table(3, compat="distinct")) == 360
    assert len(class_table(3, compat="stacked")) == 7710
    assert class_table(3) == sorted(class_table(3))


def test_norm_n1():
    r = norm(1)
    assert r.norm == 1
    assert r.exhaustive and r.complete


def test_norm_n2():
    r = norm(2, "exhaustive")
    assert r.norm == Fraction(2, 3)
    for w in r.witnesses:
        assert abs(theta_direct(w)) == Fraction(2, 3)


def test_norm_n3_paper_fast():
    r = norm(3, "paper-fast")
    assert r.norm == Fraction(11, 45)
    assert not r.exhaustive
    assert r.notes


def test_norm_n3_exhaustive(exhaustive3):
    r = exhaustive3
    assert r.norm == Fraction(11, 45)
    assert r.exhaustive and r.complete
    regular = tuple(canonicalize_cyclic(f) for f in ((1, 3, 5, 7, 2, 4, 6), (1, 4, 7, 3, 6, 2, 5)))
    assert any(w.factors[1:] == regular for w in r.witnesses)


def test_witnesses_are_sound(exhaustive3):
    for w in exhaustive3.witnesses:
        assert abs(theta_direct(w, method="sum")) == exhaustive3.norm
        assert abs(theta_direct(w, method="chain")) == exhaustive3.norm


def test_per_pattern_maxima(exhaustive3):
    pm = exhaustive3.per_pattern_maxima
    assert set(pm) == set(enumerate_x_patterns(3))
    for p, v in TIED_MAXIMA.items():
        assert pm[p] == v, p
    assert pm[(1, 2, 3, 4, 5, 6, 7)] == Fraction(11, 45)
    assert max(pm.values()) == exhaustive3.norm


def test_three_rank_patterns_strictly_smaller(exhaustive3):
    three = {p: v for p, v in exhaustive3.per_pattern_maxima.items() if max(p) == 3}
    assert len(three) == 15
    assert all(v < Fraction(11, 45) for v in three.values())


def test_patterns_with_two_ranks_vanish(exhaustive3):
    for p, v in exhaustive3.per_pattern_maxima.items():
        if max(p) < 3:
            assert v == 0


def test_pattern_result_independent_of_threads_and_tiles():
    tables = build_tables(3)
    xp = (1, 1, 2, 3, 4, 5, 6)
    ref = max_for_x_pattern(xp, tables)
    for threads, tile in [(2, 256), (3, 97), (1, 1024)]:
        r = max_for_x_pattern(xp, tables, threads=threads, tile=tile)
        assert (r.value, r.count) == (ref.value, ref.count)
        assert [w.factors for w in r.witnesses] == [w.factors for w in ref.witnesses]


def test_pattern_wrong_length():
    with pytest.raises(ValueError):
        max_for_x_pattern((1, 2, 3), build_tables(2))


def test_regular_values():
    assert [eval_regular(n) for n in (1, 2, 3, 4)] == [1, Fraction(2, 3), Fraction(11, 45), Fraction(1, 28)]


def test_regular_only_mode():
    r = norm(4, "regular-only")
    assert r.norm == Fraction(1, 28)
    assert not r.exhaustive


def test_sample_mode_is_lower_bound():
    r = norm(3, "sample", samples=50, seed=1)
    assert 0 <= r.norm <= Fraction(11, 45)
    assert not r.exhaustive
    assert r == norm(3, "sample", samples=50, seed=1)


def test_mode_validation():
    assert "exhaustive" in MODES
    with pytest.raises(ValueError):
        norm(3, "bogus")
    with pytest.raises(ValueError):
        norm(4, "exhaustive")


def test_budget_marks_incomplete():
    r = norm(3, "exhaustive", budget_seconds=0.0)
    assert not r.complete
    assert r.norm <= Fraction(11, 45)


def test_report_round_trip():
    r = norm(2, "exhaustive")
    d = json.loads(json.dumps(r.to_dict(include_run=True)))
    back = NormReport.from_dict(d)
    assert back == r
    assert back.norm == Fraction(2, 3)
    assert "run" not in r.to_dict()


def test_cache_dir_gives_same_report(tmp_path):
    plain = norm(2, "exhaustive")
    first = norm(2, "exhaustive", cache_dir=tmp_path)
    second = norm(2, "exhaustive", cache_dir=tmp_path)
    assert plain == first == second
    assert list(tmp_path.glob("*.thn"))
