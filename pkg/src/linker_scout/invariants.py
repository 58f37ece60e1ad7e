"""
Fifteen rigid-motion invariants of a four-point fragment.

Column order of every invariant vector and matrix::

    0      signed volume
    1      perimeter (sum of the six edges)
    2-7    edges v1v2, v1v3, v1v4, v2v3, v2v4, v3v4
    8      sum of vertex distances from the centroid
    9, 10  area, perimeter of triangle (v1, v2, v3)
    11, 12 area, perimeter of triangle (v1, v3, v4)
    13, 14 area, perimeter of triangle (v1, v2, v4)
"""

from __future__ import annotations

import numpy as np

from ._accel import USE_NUMBA, njit

N_INVARIANTS = 15

INVARIANT_NAMES = (
    "signed_volume",
    "perimeter",
    "edge_12",
    "edge_13",
    "edge_14",
    "edge_23",
    "edge_24",
    "edge_34",
    "centroid_distance_sum",
    "area_123",
    "perimeter_123",
    "area_134",
    "perimeter_134",
    "area_124",
    "perimeter_124",
)

_EDGES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
_TRIANGLES = ((0, 1, 2), (0, 2, 3), (0, 1, 3))


def signed_volume(v1, v2, v3, v4):
    v1 = np.asarray(v1, dtype=float)
    a = np.asarray(v2, dtype=float) - v1
    b = np.asarray(v3, dtype=float) - v1
    c = np.asarray(v4, dtype=float) - v1
    return float(np.dot(np.cross(a, b), c) / 6.0)


def centroid_distance_sum(vertices):
    v = np.asarray(vertices, dtype=float)
    return float(np.linalg.norm(v - v.mean(axis=0), axis=1).sum())


def _invariants_numpy(v):
    """v: (n, 4, 3) -> (n, 15)."""
    n = v.shape[0]
    out = np.empty((n, N_INVARIANTS))
    a = v[:, 1] - v[:, 0]
    b = v[:, 2] - v[:, 0]
    c = v[:, 3] - v[:, 0]
    out[:, 0] = np.einsum("ij,ij->i", np.cross(a, b), c) / 6.0
    edges = np.stack([np.linalg.norm(v[:, j] - v[:, i], axis=1) for i, j in _EDGES], axis=1)
    out[:, 2:8] = edges
    out[:, 1] = edges.sum(axis=1)
    mu = v.mean(axis=1, keepdims=True)
    out[:, 8] = np.linalg.norm(v - mu, axis=2).sum(axis=1)
    edge_of = {e: i for i, e in enumerate(_EDGES)}
    for t, (p, q, r) in enumerate(_TRIANGLES):
        cr = np.cross(v[:, q] - v[:, p], v[:, r] - v[:, p])
        out[:, 9 + 2 * t] = 0.5 * np.linalg.norm(cr, axis=1)
        out[:, 10 + 2 * t] = edges[:, edge_of[(p, q)]] + edges[:, edge_of[(q, r)]] + edges[:, edge_of[(p, r)]]
    return out


@njit(cache=True)
def _dist(v, i, j):
    dx = v[j, 0] - v[i, 0]
    dy = v[j, 1] - v[i, 1]
    dz = v[j, 2] - v[i, 2]
    return np.sqrt(dx * dx + dy * dy + dz * dz)


@njit(cache=True)
def _tri_area(v, p, q, r):
    ax = v[q, 0] - v[p, 0]
    ay = v[q, 1] - v[p, 1]
    az = v[q, 2] - v[p, 2]
    bx = v[r, 0] - v[p, 0]
    by = v[r, 1] - v[p, 1]
    bz = v[r, 2] - v[p, 2]
    cx = ay * bz - az * by
    cy = az * bx - ax * bz
    cz = ax * by - ay * bx
    return 0.5 * np.sqrt(cx * cx + cy * cy + cz * cz)


@njit(cache=True)
def _invariants_numba(vs):
    n = vs.shape[0]
    out = np.empty((n, 15))
    for f in range(n):
        v = vs[f]
        ax = v[1, 0] - v[0, 0]
        ay = v[1, 1] - v[0, 1]
        az = v[1, 2] - v[0, 2]
        bx = v[2, 0] - v[0, 0]
        by = v[2, 1] - v[0, 1]
        bz = v[2, 2] - v[0, 2]
        cx = v[3, 0] - v[0, 0]
        cy = v[3, 1] - v[0, 1]
        cz = v[3, 2] - v[0, 2]
        out[f, 0] = ((ay * bz - az * by) * cx + (az * bx - ax * bz) * cy + (ax * by - ay * bx) * cz) / 6.0

        e12 = _dist(v, 0, 1)
        e13 = _dist(v, 0, 2)
        e14 = _dist(v, 0, 3)
        e23 = _dist(v, 1, 2)
        e24 = _dist(v, 1, 3)
        e34 = _dist(v, 2, 3)
        out[f, 2] = e12
        out[f, 3] = e13
        out[f, 4] = e14
        out[f, 5] = e23
        out[f, 6] = e24
        out[f, 7] = e34
        # same summation order as numpy's pairwise sum over 6 items
        out[f, 1] = e12 + e13 + e14 + e23 + e24 + e34

        mx = (v[0, 0] + v[1, 0] + v[2, 0] + v[3, 0]) / 4.0
        my = (v[0, 1] + v[1, 1] + v[2, 1] + v[3, 1]) / 4.0
        mz = (v[0, 2] + v[1, 2] + v[2, 2] + v[3, 2]) / 4.0
        s = 0.0
        for i in range(4):
            dx = v[i, 0] - mx
            dy = v[i, 1] - my
            dz = v[i, 2] - mz
            s += np.sqrt(dx * dx + dy * dy + dz * dz)
        out[f, 8] = s

        out[f, 9] = _tri_area(v, 0, 1, 2)
        out[f, 10] = e12 + e23 + e13
        out[f, 11] = _tri_area(v, 0, 2, 3)
        out[f, 12] = e13 + e34 + e14
        out[f, 13] = _tri_area(v, 0, 1, 3)
        out[f, 14] = e12 + e24 + e14
    return out


def invariant_matrix(vertices, use_numba=None):
    """Invariants for a stack of fragments, shape (n, 4, 3) -> (n, 15)."""
    v = np.ascontiguousarray(vertices, dtype=float)
    if v.ndim == 2:
        v = v[None]
    if v.shape[1:] != (4, 3):
        raise ValueError(f"expected (n, 4, 3) vertices, got {v.shape}")
    if use_numba is None:
        use_numba = USE_NUMBA
    return _invariants_numba(v) if use_numba else _invariants_numpy(v)


def compute_invariants(t):
    """15-vector for one tetrapeptide (or any 4x3 vertex array)."""
    vertices = getattr(t, "vertices", t)
    return invariant_matrix(vertices)[0]


def write_invariants_tsv(refs, matrix):
    """Debug dump: lpr_ref, index and the 15 columns at 6 decimals."""
    lines = ["lpr_ref\tindex\t" + "\t".join(INVARIANT_NAMES)]
    for ref, row in zip(refs, matrix):
        lpr_ref, index = ref.rsplit(":", 1)
        lines.append(f"{lpr_ref}\t{index}\t" + "\t".join(f"{x:.6f}" for x in row))
    return "\n".join(lines) + "\n"
