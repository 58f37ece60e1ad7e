import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from linker_scout._accel import HAVE_NUMBA
from linker_scout.invariants import (
    INVARIANT_NAMES,
    centroid_distance_sum,
    compute_invariants,
    invariant_matrix,
    signed_volume,
    write_invariants_tsv,
)

UNIT = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
REGULAR = np.array([(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]) / (2 * math.sqrt(2))


def random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def test_signed_volume_unit():
    assert signed_volume(*UNIT) == pytest.approx(1 / 6, abs=1e-15)


def test_signed_volume_odd_permutation():
    a, b, c, d = UNIT
    assert signed_volume(a, b, d, c) == pytest.approx(-1 / 6, abs=1e-15)


def test_signed_volume_coplanar():
    assert signed_volume((0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)) == 0.0


def test_centroid_distance_sum():
    assert centroid_distance_sum([(2, 3, 4)] * 4) == 0.0
    expected = math.sqrt(3) / 4 + 3 * math.sqrt(0.75**2 + 2 * 0.25**2)
    assert centroid_distance_sum(UNIT) == pytest.approx(expected, abs=1e-12)
    assert centroid_distance_sum(UNIT) == pytest.approx(2.920481, abs=1e-6)
    assert centroid_distance_sum(REGULAR) == pytest.approx(4 * math.sqrt(3 / 8), abs=1e-12)


def test_regular_tetrahedron(use_numba):
    g = invariant_matrix(REGULAR, use_numba=use_numba)[0]
    assert abs(g[0]) == pytest.approx(math.sqrt(2) / 12, abs=1e-9)
    assert g[1] == pytest.approx(6, abs=1e-9)
    np.testing.assert_allclose(g[2:8], 1, atol=1e-9)
    assert g[8] == pytest.approx(4 * math.sqrt(3 / 8), abs=1e-9)
    np.testing.assert_allclose(g[[9, 11, 13]], math.sqrt(3) / 4, atol=1e-9)
    np.testing.assert_allclose(g[[10, 12, 14]], 3, atol=1e-9)


def test_collinear_points():
    g = compute_invariants(np.array([[0, 0, 0], [1, 0, 0], [2.5, 0, 0], [4, 0, 0]], float))
    assert g[0] == 0
    assert (g[[9, 11, 13]] == 0).all()
    assert (g[2:8] > 0).all()


def test_canonical_order_of_edges_and_triangles():
    v = np.array([[0, 0, 0], [1, 0, 0], [0, 2, 0], [0, 0, 3]], float)
    g = compute_invariants(v)
    np.testing.assert_allclose(g[2:8], [1, 2, 3, math.sqrt(5), math.sqrt(10), math.sqrt(13)])
    assert g[9] == pytest.approx(1.0)  # (v1, v2, v3): legs 1 and 2
    assert g[11] == pytest.approx(3.0)  # (v1, v3, v4): legs 2 and 3
    assert g[13] == pytest.approx(1.5)  # (v1, v2, v4): legs 1 and 3
    assert g[10] == pytest.approx(3 + math.sqrt(5))
    assert len(INVARIANT_NAMES) == 15


def test_rigid_motion_invariance(rng, use_numba):
    base = rng.normal(scale=3.0, size=(20, 4, 3))
    ref = invariant_matrix(base, use_numba=use_numba)
    for _ in range(100):
        rot = random_rotation(rng)
        shift = rng.uniform(-50, 50, size=3)
        moved = base @ rot.T + shift
        np.testing.assert_allclose(invariant_matrix(moved, use_numba=use_numba), ref, rtol=0, atol=1e-9)


def test_reflection_negates_only_volume(rng):
    base = rng.normal(scale=3.0, size=(50, 4, 3))
    mirrored = base * np.array([1, 1, -1])
    a, b = invariant_matrix(base), invariant_matrix(mirrored)
    np.testing.assert_allclose(b[:, 0], -a[:, 0], atol=1e-9)
    np.testing.assert_allclose(b[:, 1:], a[:, 1:], atol=1e-9)


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")
def test_kernel_paths_agree(rng):
    v = rng.normal(scale=5.0, size=(500, 4, 3))
    np.testing.assert_allclose(invariant_matrix(v, use_numba=False), invariant_matrix(v, use_numba=True), rtol=1e-13, atol=1e-12)


coords = arrays(np.float64, (4, 3), elements=st.floats(-100, 100, allow_nan=False, width=64))


@settings(max_examples=200, deadline=None)
@given(coords)
def test_properties(v):
    g = compute_invariants(v)
    assert (g[1:] >= 0).all()
    assert g[1] == pytest.approx(g[2:8].sum(), abs=1e-9)
    edges = dict(zip(["12", "13", "14", "23", "24", "34"], g[2:8]))
    for (a, b, c), per in [(("12", "23", "13"), 10), (("13", "34", "14"), 12), (("12", "24", "14"), 14)]:
        sides = [edges[a], edges[b], edges[c]]
        assert g[per] == pytest.approx(sum(sides), abs=1e-9)
        assert max(sides) <= g[per] / 2 + 1e-9


def test_tsv_dump():
    text = write_invariants_tsv(["p:A:10:1"], invariant_matrix(REGULAR))
    header, row = text.splitlines()
    assert header.split("\t")[:3] == ["lpr_ref", "index", "signed_volume"]
    fields = row.split("\t")
    assert fields[:2] == ["p:A:10", "1"] and len(fields) == 17
    assert fields[3] == "6.000000"
