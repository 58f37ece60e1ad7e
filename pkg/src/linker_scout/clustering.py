"""
Ward-linkage agglomerative clustering and inconsistency-based tree cutting.

Node numbering follows the usual linkage-matrix convention: leaves are
``0 .. n-1`` and the cluster created by merge ``t`` gets id ``n + t``.
Merge heights are Ward distances, ``sqrt(2 |A| |B| / (|A| + |B|)) * ||c_A - c_B||``,
maintained through the Lance-Williams recurrence on their squares; two
singletons therefore merge at their Euclidean distance.

Among equal merge costs the pair with the lexicographically smallest
``(min id, max id)`` wins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._accel import USE_NUMBA, njit


@dataclass(frozen=True)
class Dendrogram:
    n_leaves: int
    merges: np.ndarray  # (n-1, 4): left id, right id, height, member count

    @property
    def heights(self):
        return self.merges[:, 2]

    def children(self, link):
        return int(self.merges[link, 0]), int(self.merges[link, 1])


@dataclass(frozen=True)
class ClusterAssignment:
    labels: np.ndarray  # cluster id per leaf, ids numbered by first member

    @property
    def n_clusters(self):
        return int(self.labels.max()) + 1 if self.labels.size else 0

    @property
    def cluster_sizes(self):
        return {c: int(s) for c, s in enumerate(np.bincount(self.labels))}


def squared_distances(points, block=512):
    """Full (n, n) matrix of squared Euclidean distances, computed row-block wise."""
    x = np.ascontiguousarray(points, dtype=float)
    n = x.shape[0]
    out = np.empty((n, n))
    for lo in range(0, n, block):
        diff = x[lo : lo + block, None, :] - x[None, :, :]
        out[lo : lo + block] = np.einsum("ijk,ijk->ij", diff, diff)
    return out


# --- numba kernel -----------------------------------------------------------


@njit(cache=True)
def _pair_less(d1, a1, b1, d2, a2, b2):
    # (cost, lo id, hi id) lexicographic comparison
    if d1 != d2:
        return d1 < d2
    if a1 != a2:
        return a1 < a2
    return b1 < b2


@njit(cache=True)
def _row_nearest(d2, ids, k):
    n = d2.shape[0]
    best = -1
    bd = np.inf
    ba = 0
    bb = 0
    idk = ids[k]
    for l in range(n):
        if l == k or ids[l] < 0:
            continue
        dl = d2[k, l]
        a = min(idk, ids[l])
        b = max(idk, ids[l])
        if best < 0 or _pair_less(dl, a, b, bd, ba, bb):
            best = l
            bd = dl
            ba = a
            bb = b
    return best, bd


@njit(cache=True)
def _ward_numba(d2):
    n = d2.shape[0]
    ids = np.arange(n)
    size = np.ones(n)
    nn = np.empty(n, dtype=np.int64)
    nnd = np.empty(n)
    merges = np.empty((n - 1, 4))
    for k in range(n):
        nn[k], nnd[k] = _row_nearest(d2, ids, k)

    for step in range(n - 1):
        # global minimum over the cached nearest neighbours
        i = -1
        bd = np.inf
        ba = 0
        bb = 0
        for k in range(n):
            if ids[k] < 0:
                continue
            a = min(ids[k], ids[nn[k]])
            b = max(ids[k], ids[nn[k]])
            if i < 0 or _pair_less(nnd[k], a, b, bd, ba, bb):
                i = k
                bd = nnd[k]
                ba = a
                bb = b
        j = nn[i]
        ni = size[i]
        nj = size[j]
        dij = d2[i, j]
        merges[step, 0] = ba
        merges[step, 1] = bb
        merges[step, 2] = np.sqrt(max(dij, 0.0))
        merges[step, 3] = ni + nj

        for k in range(n):
            if ids[k] < 0 or k == i or k == j:
                continue
            nk = size[k]
            v = ((ni + nk) * d2[i, k] + (nj + nk) * d2[j, k] - nk * dij) / (ni + nj + nk)
            d2[i, k] = v
            d2[k, i] = v
        ids[i] = n + step
        size[i] = ni + nj
        ids[j] = -1

        for k in range(n):
            if ids[k] < 0 or k == i:
                continue
            if nn[k] == i or nn[k] == j:
                nn[k], nnd[k] = _row_nearest(d2, ids, k)
            else:
                a = min(ids[k], ids[i])
                b = max(ids[k], ids[i])
                c = nn[k]
                if _pair_less(d2[k, i], a, b, nnd[k], min(ids[k], ids[c]), max(ids[k], ids[c])):
                    nn[k] = i
                    nnd[k] = d2[k, i]
        if step < n - 2:
            nn[i], nnd[i] = _row_nearest(d2, ids, i)
    return merges


# --- numpy fallback ---------------------------------------------------------


def _best_of(cands, key_lo, key_hi):
    order = np.lexsort((key_hi, key_lo))
    return cands[order[0]]


def _row_nearest_np(d2, ids, k):
    row = d2[k]
    m = row.min()
    cands = np.flatnonzero(row == m)
    if cands.size > 1:
        lo = np.minimum(ids[cands], ids[k])
        hi = np.maximum(ids[cands], ids[k])
        return _best_of(cands, lo, hi), m
    return cands[0], m


def _ward_numpy(d2):
    n = d2.shape[0]
    ids = np.arange(n)
    size = np.ones(n)
    active = np.ones(n, dtype=bool)
    np.fill_diagonal(d2, np.inf)
    nn = np.empty(n, dtype=np.int64)
    nnd = np.empty(n)
    for k in range(n):
        nn[k], nnd[k] = _row_nearest_np(d2, ids, k)
    merges = np.empty((n - 1, 4))

    for step in range(n - 1):
        act = np.flatnonzero(active)
        vals = nnd[act]
        m = vals.min()
        cands = act[vals == m]
        if cands.size > 1:
            lo = np.minimum(ids[cands], ids[nn[cands]])
            hi = np.maximum(ids[cands], ids[nn[cands]])
            i = _best_of(cands, lo, hi)
        else:
            i = cands[0]
        j = nn[i]
        ni, nj = size[i], size[j]
        dij = d2[i, j]
        merges[step] = (min(ids[i], ids[j]), max(ids[i], ids[j]), np.sqrt(max(dij, 0.0)), ni + nj)

        others = act[(act != i) & (act != j)]
        nk = size[others]
        new = ((ni + nk) * d2[i, others] + (nj + nk) * d2[j, others] - nk * dij) / (ni + nj + nk)
        d2[i, others] = new
        d2[others, i] = new
        d2[j, :] = np.inf
        d2[:, j] = np.inf
        ids[i] = n + step
        size[i] = ni + nj
        ids[j] = -1
        active[j] = False
        if others.size == 0:
            break

        stale = (nn[others] == i) | (nn[others] == j)
        for k in others[stale]:
            nn[k], nnd[k] = _row_nearest_np(d2, ids, k)
        fresh = others[~stale]
        if fresh.size:
            cur = nn[fresh]
            cur_lo = np.minimum(ids[fresh], ids[cur])
            cur_hi = np.maximum(ids[fresh], ids[cur])
            # the new cluster has the largest id, so it is always the hi member
            new_lo = ids[fresh]
            nd = d2[fresh, i]
            better = (nd < nnd[fresh]) | (
                (nd == nnd[fresh]) & ((new_lo < cur_lo) | ((new_lo == cur_lo) & (ids[i] < cur_hi)))
            )
            upd = fresh[better]
            nn[upd] = i
            nnd[upd] = nd[better]
        nn[i], nnd[i] = _row_nearest_np(d2, ids, i)
    return merges


def hac_ward(points, use_numba=None):
    """Ward agglomerative clustering of the rows of ``points``."""
    x = np.asarray(points, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("need at least two points")
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite coordinates")
    d2 = squared_distances(x)
    if use_numba is None:
        use_numba = USE_NUMBA
    merges = _ward_numba(d2) if use_numba else _ward_numpy(d2)
    return Dendrogram(x.shape[0], merges)


def inconsistency(d, depth=2):
    """Inconsistency coefficient of every link.

    The link itself counts as the first level; ``depth=2`` therefore pools
    the link with its non-leaf children. The coefficient is
    ``(h - mean) / sd`` over the pooled heights (sample sd), or 0 when
    fewer than two heights are pooled or they are all equal.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    n = d.n_leaves
    z = d.merges
    heights = z[:, 2]
    coeff = np.zeros(len(z))
    for link in range(len(z)):
        pool = []
        frontier = [link]
        for _ in range(depth):
            nxt = []
            for l in frontier:
                pool.append(heights[l])
                for c in (int(z[l, 0]), int(z[l, 1])):
                    if c >= n:
                        nxt.append(c - n)
            frontier = nxt
            if not frontier:
                break
        if len(pool) < 2:
            continue
        s = np.std(pool, ddof=1)
        if s > 0:
            coeff[link] = (heights[link] - np.mean(pool)) / s
    return coeff


def cut_dendrogram(d, coefficients, cutoff):
    """Flat clusters: maximal subtrees whose links all have coefficient <= cutoff."""
    n = d.n_leaves
    z = d.merges
    ok = np.zeros(len(z), dtype=bool)
    for link in range(len(z)):
        good = coefficients[link] <= cutoff
        for c in (int(z[link, 0]), int(z[link, 1])):
            if c >= n:
                good = good and ok[c - n]
        ok[link] = good

    labels = np.full(n, -1, dtype=np.int64)
    groups = []
    stack = [2 * n - 2] if n > 1 else [0]
    while stack:
        node = stack.pop()
        if node < n:
            groups.append([node])
        elif ok[node - n]:
            groups.append(_leaves(z, n, node))
        else:
            stack.extend(int(c) for c in z[node - n, :2])
    groups.sort(key=min)
    for cid, members in enumerate(groups):
        labels[members] = cid
    return ClusterAssignment(labels)


def _leaves(z, n, node):
    out = []
    stack = [node]
    while stack:
        x = stack.pop()
        if x < n:
            out.append(x)
        else:
            stack.extend(int(c) for c in z[x - n, :2])
    return out


def cluster(points, depth=2, cutoff=1.15, use_numba=None):
    """Convenience: Ward tree, coefficients and flat assignment in one call."""
    tree = hac_ward(points, use_numba=use_numba)
    coeff = inconsistency(tree, depth)
    return tree, coeff, cut_dendrogram(tree, coeff, cutoff)


def write_dendrogram_tsv(d):
    lines = ["left\tright\theight\tcount"]
    for left, right, h, cnt in d.merges:
        lines.append(f"{int(left)}\t{int(right)}\t{h:.17g}\t{int(cnt)}")
    return "\n".join(lines) + "\n"


def write_assignment_tsv(refs, assignment):
    lines = ["tetrapeptide\tcluster"]
    lines += [f"{r}\t{c}" for r, c in zip(refs, assignment.labels)]
    return "\n".join(lines) + "\n"
