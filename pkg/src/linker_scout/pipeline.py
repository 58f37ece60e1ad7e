"""
End-to-end linker demarcation over a whole dataset.

The run is transductive: all LPR fragments of the dataset are clustered
together, so a call depends on every other entry. Outputs carry a content
hash of the dataset to make that explicit.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .clustering import cut_dendrogram, hac_ward, inconsistency, write_assignment_tsv, write_dendrogram_tsv
from .demarcation import demarcate, write_linkers_json, write_linkers_tsv
from .features import dump_pca_model, fit_pca, format_policy, parse_policy, select_components, standardize, transform
from .invariants import invariant_matrix, write_invariants_tsv
from .lpr import FRAGMENT_LENGTH, discretize_lpr, extract_lprs
from .scoring import build_profile, score_table, write_scores_tsv

log = logging.getLogger(__name__)


class PipelineError(RuntimeError):
    def __init__(self, stage, detail, entry=None):
        where = f" [{entry}]" if entry else ""
        super().__init__(f"{stage}{where}: {detail}")
        self.stage = stage
        self.entry = entry


@dataclass(frozen=True)
class PipelineConfig:
    k: int = 6
    fragment_length: int = FRAGMENT_LENGTH
    pc_policy: str = "variance:0.99"
    inconsistency_depth: int = 2
    inconsistency_cutoff: float = 1.15
    linkage: str = "ward"

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if self.fragment_length != FRAGMENT_LENGTH:
            raise ValueError("only tetrapeptide fragments are supported")
        if self.inconsistency_depth < 1:
            raise ValueError("inconsistency depth must be >= 1")
        if not self.inconsistency_cutoff > 0:
            raise ValueError("inconsistency cutoff must be > 0")
        if self.linkage != "ward":
            raise ValueError("only ward linkage is implemented")
        parse_policy(self.pc_policy)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in d.items() if k in known})


@dataclass
class RunArtifacts:
    config: PipelineConfig
    lprs: list
    fragment_refs: list[str]
    invariants: np.ndarray
    standardized: np.ndarray
    projected: np.ndarray
    pca: object
    n_components: int
    dendrogram: object
    coefficients: np.ndarray
    assignment: object
    scores: list
    profiles: list
    calls: list
    dataset_hash: str
    rejected: list = field(default_factory=list)


def dataset_hash(lprs):
    h = hashlib.sha256()
    for r in lprs:
        h.update(r.ref.encode())
        for res in r.residues:
            h.update(f"{res.seq_pos}{res.insertion_code}:{res.ca[0]!r},{res.ca[1]!r},{res.ca[2]!r};".encode())
    return h.hexdigest()


def run_pipeline(entries, cfg=None, use_numba=None):
    """Run every stage over validated entries and return all intermediates."""
    cfg = cfg or PipelineConfig()
    if len(entries) < 2:
        raise PipelineError("input", "need at least two entries to cluster")

    lprs, fragments = [], []
    for e in entries:
        if e.k != cfg.k:
            raise PipelineError("extract", f"entry validated with k={e.k}, config has k={cfg.k}", e.structure_id)
        try:
            for r in extract_lprs(e):
                lprs.append(r)
                fragments.extend(discretize_lpr(r))
        except ValueError as exc:
            raise PipelineError("extract", str(exc), e.structure_id) from exc
    per_lpr = 2 * cfg.k - 3
    assert len(fragments) == len(lprs) * per_lpr
    refs = [t.ref for t in fragments]
    log.info("%d entries, %d LPRs, %d fragments", len(entries), len(lprs), len(fragments))

    x = invariant_matrix(np.stack([t.vertices for t in fragments]), use_numba=use_numba)
    try:
        z, means, stds = standardize(x)
    except ValueError as exc:
        raise PipelineError("standardize", str(exc)) from exc
    try:
        model = fit_pca(z, means, stds)
    except ValueError as exc:
        raise PipelineError("pca", str(exc)) from exc
    m = select_components(model, cfg.pc_policy)
    xpc = transform(z, model, m)
    log.info("PCA keeps %d components", m)

    tree = hac_ward(xpc, use_numba=use_numba)
    coeff = inconsistency(tree, cfg.inconsistency_depth)
    assignment = cut_dendrogram(tree, coeff, cfg.inconsistency_cutoff)
    log.info("%d clusters", assignment.n_clusters)

    try:
        scores = score_table(assignment)
    except ValueError as exc:
        raise PipelineError("score", str(exc)) from exc
    sus = {s.cluster: s.sus for s in scores}

    profiles, calls = [], []
    for n, r in enumerate(lprs):
        labels = assignment.labels[n * per_lpr : (n + 1) * per_lpr].tolist()
        prof = build_profile(r.ref, labels, sus)
        profiles.append(prof)
        calls.append(demarcate(prof.values, r.structure_id, r.chain_id, r.boundary, r.k))

    return RunArtifacts(
        cfg, lprs, refs, x, z, xpc, model, m, tree, coeff, assignment, scores, profiles, calls, dataset_hash(lprs)
    )


def run_meta(art, extra=None):
    meta = {
        "tool": "linker-scout",
        "version": __version__,
        "config": art.config.to_dict(),
        "n_components": art.n_components,
        "dataset_hash": art.dataset_hash,
        "n_lprs": len(art.lprs),
        "n_fragments": len(art.fragment_refs),
        "n_clusters": art.assignment.n_clusters,
        "n_linkers": sum(c.is_linker for c in art.calls),
        "n_no_linker": sum(not c.is_linker for c in art.calls),
        "rejected": art.rejected,
    }
    if extra:
        meta.update(extra)
    return meta


def write_outputs(art, out_dir, audit=False, as_json=False):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "linkers.tsv").write_text(write_linkers_tsv(art.calls))
    if as_json:
        (out / "linkers.json").write_text(write_linkers_json(art.calls))
    (out / "run_meta.json").write_text(json.dumps(run_meta(art), indent=2, sort_keys=True) + "\n")
    (out / "scores.tsv").write_text(write_scores_tsv(art.scores))
    (out / "clusters.tsv").write_text(write_assignment_tsv(art.fragment_refs, art.assignment))
    if audit:
        (out / "invariants.tsv").write_text(write_invariants_tsv(art.fragment_refs, art.invariants))
        (out / "pca_model.txt").write_text(dump_pca_model(art.pca))
        (out / "dendrogram.tsv").write_text(write_dendrogram_tsv(art.dendrogram))
        lines = ["lpr\t" + "\t".join(f"u{i + 1}" for i in range(2 * art.config.k - 3))]
        lines += [p.lpr_ref + "\t" + "\t".join(f"{v:.17g}" for v in p.values) for p in art.profiles]
        (out / "profiles.tsv").write_text("\n".join(lines) + "\n")
        coeff = ["link\tinconsistency"] + [f"{i}\t{c:.17g}" for i, c in enumerate(art.coefficients)]
        (out / "inconsistency.tsv").write_text("\n".join(coeff) + "\n")
    return out


__all__ = [
    "PipelineConfig",
    "PipelineError",
    "RunArtifacts",
    "format_policy",
    "run_pipeline",
    "run_meta",
    "write_outputs",
]
