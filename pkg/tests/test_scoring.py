from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import load_size_histogram
from linker_scout.clustering import ClusterAssignment
from linker_scout.scoring import (
    build_profile,
    cluster_evalues,
    evalues_from_histogram,
    read_scores_tsv,
    score_table,
    size_histogram,
    sus_scores,
    write_scores_tsv,
)


def expand(hist):
    sizes, cid = {}, 0
    for size, count in hist.items():
        for _ in range(count):
            sizes[cid] = size
            cid += 1
    return sizes


def test_size_histogram_self_checks():
    hist = load_size_histogram()
    assert sum(hist.values()) == 2188
    assert sum(s * c for s, c in hist.items()) == 6525


def test_size_histogram_evalues():
    ev = evalues_from_histogram(load_size_histogram())
    assert ev[14] == 0
    assert ev[1] == Fraction(1981, 2188)
    assert ev[2] == Fraction(1082, 2188)
    assert float(ev[1]) == pytest.approx(0.90539, abs=1e-5)
    assert float(ev[2]) == pytest.approx(0.49452, abs=1e-5)


def test_per_cluster_evalues_match_histogram():
    hist = load_size_histogram()
    sizes = expand(hist)
    ev = cluster_evalues(sizes, exact=True)
    by_size = evalues_from_histogram(hist)
    assert all(ev[c] == by_size[s] for c, s in sizes.items())


def test_sus_three_point():
    sus = sus_scores({"a": 0.0, "b": 0.5, "c": 1.0})
    assert sus == pytest.approx({"a": -1.0, "b": 0.0, "c": 1.0})


def test_sus_two_clusters():
    sus = sus_scores(cluster_evalues({0: 5, 1: 1}))
    assert sus[0] == pytest.approx(-1 / np.sqrt(2)) and sus[1] == pytest.approx(1 / np.sqrt(2))


def test_sus_degenerate():
    with pytest.raises(ValueError, match="degenerate"):
        sus_scores(cluster_evalues({0: 3, 1: 3}))
    with pytest.raises(ValueError, match="degenerate"):
        sus_scores(cluster_evalues({0: 3}))


def test_extremes_on_size_histogram():
    sizes = expand(load_size_histogram())
    sus = sus_scores(cluster_evalues(sizes))
    largest = [c for c, s in sizes.items() if s == 14]
    singles = [c for c, s in sizes.items() if s == 1]
    assert {sus[c] for c in largest} == {min(sus.values())}
    assert {sus[c] for c in singles} == {max(sus.values())}
    values = np.array(list(sus.values()))
    assert abs(values.mean()) < 1e-9 and values.std(ddof=1) == pytest.approx(1, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(1, 30), min_size=2, max_size=60))
def test_evalue_properties(size_list):
    sizes = dict(enumerate(size_list))
    ev = cluster_evalues(sizes)
    n = len(sizes)
    biggest = max(size_list)
    for c, s in sizes.items():
        assert 0 <= ev[c] <= (n - 1) / n
        if s == biggest:
            assert ev[c] == 0
    for a in sizes:
        for b in sizes:
            if sizes[a] > sizes[b]:
                assert ev[a] <= ev[b]
    if len(set(size_list)) > 1:
        sus = sus_scores(ev)
        e = np.array([ev[c] for c in sizes])
        u = np.array([sus[c] for c in sizes])
        # strictly increasing affine map of the e-value
        slope = (u[np.argmax(e)] - u[np.argmin(e)]) / (e.max() - e.min())
        assert slope > 0
        np.testing.assert_allclose(u, u[np.argmin(e)] + slope * (e - e.min()), atol=1e-9)


def test_profile():
    sus = {0: -0.5, 1: 1.2, 2: 0.1}
    prof = build_profile("x:A:10", [0] * 9, sus)
    assert prof.values == (-0.5,) * 9
    prof = build_profile("x:A:10", [0, 1, 2, 1, 0, 0, 2, 2, 1], sus)
    assert len(prof.values) == 9 and set(prof.values) <= set(sus.values())
    relabel = {0: 7, 1: 3, 2: 5}
    again = build_profile("x:A:10", [relabel[c] for c in [0, 1, 2, 1, 0, 0, 2, 2, 1]], {relabel[k]: v for k, v in sus.items()})
    assert again.values == prof.values
    with pytest.raises(RuntimeError):
        build_profile("x:A:10", [0, 9], sus)


def test_score_table_round_trip():
    a = ClusterAssignment(np.array([0, 0, 1, 2, 2, 2]))
    scores = score_table(a)
    assert [s.size for s in scores] == [2, 1, 3]
    back = read_scores_tsv(write_scores_tsv(scores))
    assert back == scores
    assert size_histogram(s.size for s in scores) == {1: 1, 2: 1, 3: 1}
