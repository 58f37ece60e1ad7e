"""Cluster e-values, structural uniqueness scores (SUS) and LPR profiles."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


@dataclass(frozen=True)
class ClusterScore:
    cluster: int
    size: int
    evalue: float
    sus: float


@dataclass(frozen=True)
class SusProfile:
    lpr_ref: str
    values: tuple[float, ...]


def cluster_evalues(sizes, exact=False):
    """e-value of each cluster: fraction of clusters strictly larger than it.

    ``sizes`` maps cluster id -> member count. With ``exact=True`` the values
    are :class:`fractions.Fraction`.
    """
    if not sizes:
        raise ValueError("no clusters")
    total = len(sizes)
    ordered = np.sort(np.fromiter(sizes.values(), dtype=np.int64))
    out = {}
    for cid, s in sizes.items():
        larger = total - int(np.searchsorted(ordered, s, side="right"))
        out[cid] = Fraction(larger, total) if exact else larger / total
    return out


def evalues_from_histogram(histogram, exact=True):
    """e-value per cluster *size*, from a size -> number-of-clusters table."""
    total = sum(histogram.values())
    out = {}
    for size in histogram:
        larger = sum(c for s, c in histogram.items() if s > size)
        out[size] = Fraction(larger, total) if exact else larger / total
    return out


def sus_scores(evalues):
    """Z-score the e-values, one entry per cluster, sample sd."""
    keys = list(evalues)
    e = np.array([float(evalues[k]) for k in keys])
    if e.size < 2 or np.all(e == e[0]):
        raise ValueError("degenerate clustering: all clusters share one e-value")
    z = (e - e.mean()) / e.std(ddof=1)
    return dict(zip(keys, z.tolist()))


def score_table(assignment):
    sizes = assignment.cluster_sizes
    ev = cluster_evalues(sizes)
    sus = sus_scores(ev)
    return [ClusterScore(c, sizes[c], ev[c], sus[c]) for c in sorted(sizes)]


def build_profile(lpr_ref, labels, sus):
    """SUS of each fragment's cluster, in fragment order.

    ``labels`` are the cluster ids of the LPR's fragments; ``sus`` maps
    cluster id -> SUS.
    """
    values = []
    for i, c in enumerate(labels):
        if c is None or c < 0 or c not in sus:
            raise RuntimeError(f"fragment {i + 1} of {lpr_ref} has no cluster assignment")
        values.append(float(sus[c]))
    return SusProfile(lpr_ref, tuple(values))


def write_scores_tsv(scores):
    lines = ["cluster\tsize\tevalue\tsus"]
    lines += [f"{s.cluster}\t{s.size}\t{s.evalue:.17g}\t{s.sus:.17g}" for s in scores]
    return "\n".join(lines) + "\n"


def read_scores_tsv(text):
    out = []
    for line in text.splitlines()[1:]:
        if not line.strip():
            continue
        c, size, ev, sus = line.split("\t")
        out.append(ClusterScore(int(c), int(size), float(ev), float(sus)))
    return out


def size_histogram(sizes):
    """size -> number of clusters of that size, ascending by size."""
    counts: dict[int, int] = {}
    for s in sizes:
        counts[int(s)] = counts.get(int(s), 0) + 1
    return dict(sorted(counts.items()))
