"""Residue-wise scoring of linker calls against reference linkers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple


@dataclass(frozen=True)
class GoldLinker:
    structure_id: str
    chain_id: str
    start_res: int
    end_res: int
    source: str = ""

    def __post_init__(self):
        if self.start_res > self.end_res:
            raise ValueError(f"gold linker {self.structure_id}:{self.chain_id} has start > end")

    @property
    def length(self):
        return self.end_res - self.start_res + 1


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __add__(self, other):
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)


class Scores(NamedTuple):
    precision: float | None
    recall: float | None
    f1: float | None


class ResidueRange(NamedTuple):
    start: int
    end: int
    chain: tuple | None = None  # (structure_id, chain_id) when known


def _as_range(r):
    if isinstance(r, ResidueRange):
        return r
    if isinstance(r, GoldLinker):
        return ResidueRange(r.start_res, r.end_res, (r.structure_id, r.chain_id))
    if hasattr(r, "start_res"):
        return ResidueRange(r.start_res, r.end_res, (r.structure_id, r.chain_id))
    start, end = r
    return ResidueRange(int(start), int(end))


def _check_chain(a, b):
    if a.chain is not None and b.chain is not None and a.chain != b.chain:
        raise ValueError(f"ranges on different chains: {a.chain} vs {b.chain}")


def residue_confusion(pred, gold):
    """TP/FP/FN over integer residue positions of two inclusive ranges."""
    p, g = _as_range(pred), _as_range(gold)
    _check_chain(p, g)
    inter = max(0, min(p.end, g.end) - max(p.start, g.start) + 1)
    return ConfusionCounts(inter, (p.end - p.start + 1) - inter, (g.end - g.start + 1) - inter)


def prf(counts):
    """Precision, recall, F1; ``None`` where a denominator is zero."""
    tp, fp, fn = counts.tp, counts.fp, counts.fn
    precision = tp / (tp + fp) if tp + fp else None
    recall = tp / (tp + fn) if tp + fn else None
    return Scores(precision, recall, f1_score(precision, recall))


def f1_score(precision, recall):
    if precision is None or recall is None:
        return None
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def cutpoint_hit(point, gold):
    g = _as_range(gold)
    return g.start <= point <= g.end


def overlap_agreement(a, b):
    """Jaccard overlap of two ranges and its agreement band."""
    ra, rb = _as_range(a), _as_range(b)
    _check_chain(ra, rb)
    inter = max(0, min(ra.end, rb.end) - max(ra.start, rb.start) + 1)
    union = (ra.end - ra.start + 1) + (rb.end - rb.start + 1) - inter
    frac = inter / union
    if frac > 0.75:
        band = "reasonable"
    elif frac > 0.40:
        band = "medium"
    elif frac > 0:
        band = "weak"
    else:
        band = "disagree"
    return frac, band


@dataclass
class EvalRow:
    gold: GoldLinker
    status: str  # "scored", "no_linker" or "unmatched"
    pred: object = None
    counts: ConfusionCounts | None = None
    agreement: tuple[float, str] | None = None


@dataclass
class EvalReport:
    rows: list[EvalRow]
    scores: Scores
    totals: ConfusionCounts
    mode: str = "micro"
    n_no_linker: int = 0
    n_unmatched: int = 0
    bands: dict[str, int] = field(default_factory=dict)


def _nearest_call(gold, calls):
    center = (gold.start_res + gold.end_res) / 2
    return min(calls, key=lambda c: (abs(c.boundary - center), c.boundary))


def evaluate_run(preds, golds, mode="micro", agreement=False):
    """Join each gold linker to the call at its chain's nearest boundary and score.

    Calls with no linker are counted and left out of the confusion sums;
    gold entries with no call on their chain count fully as false negatives.
    """
    if mode not in ("micro", "macro"):
        raise ValueError(f"unknown aggregation mode {mode!r}")
    by_chain: dict[tuple, list] = {}
    for c in preds:
        by_chain.setdefault((c.structure_id, c.chain_id), []).append(c)

    rows = []
    claimed = {}
    for g in golds:
        calls = by_chain.get((g.structure_id, g.chain_id))
        if not calls:
            rows.append(EvalRow(g, "unmatched", counts=ConfusionCounts(0, 0, g.length)))
            continue
        call = _nearest_call(g, calls)
        key = (g.structure_id, g.chain_id, call.boundary)
        if key in claimed:
            raise ValueError(f"duplicate gold linkers for boundary {key}")
        claimed[key] = g
        if not call.is_linker:
            rows.append(EvalRow(g, "no_linker", call))
            continue
        row = EvalRow(g, "scored", call, residue_confusion(call, g))
        if agreement:
            row.agreement = overlap_agreement(call, g)
        rows.append(row)

    counted = [r for r in rows if r.counts is not None]
    totals = sum((r.counts for r in counted), ConfusionCounts())
    if mode == "micro":
        scores = prf(totals)
    else:
        per = [prf(r.counts) for r in counted]
        scores = Scores(*(_mean([getattr(s, f) for s in per]) for f in Scores._fields))

    bands: dict[str, int] = {}
    for r in rows:
        if r.agreement is not None:
            bands[r.agreement[1]] = bands.get(r.agreement[1], 0) + 1
    return EvalReport(
        rows,
        scores,
        totals,
        mode,
        n_no_linker=sum(r.status == "no_linker" for r in rows),
        n_unmatched=sum(r.status == "unmatched" for r in rows),
        bands=bands,
    )


def _mean(values):
    vals = [v for v in values if v is not None]
    return sum(vals) / len(vals) if vals else None


def read_gold_tsv(text):
    """structure_id, chain_id, start, end[, citation]; ``#`` lines and a header row are skipped."""
    out = []
    for rowno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        f = line.rstrip("\n").split("\t")
        if f[0] == "structure_id":
            continue
        if len(f) < 4:
            raise ValueError(f"gold row {rowno}: expected at least 4 columns")
        out.append(GoldLinker(f[0], f[1], int(f[2]), int(f[3]), f[4] if len(f) > 4 else ""))
    return out


def _na(v):
    return "NA" if v is None else f"{v:.4f}"


def report_tsv(report):
    lines = ["structure_id\tchain_id\tgold_start\tgold_end\tstatus\tpred_start\tpred_end\ttp\tfp\tfn\tjaccard\tband"]
    for r in report.rows:
        g, p, c = r.gold, r.pred, r.counts
        ps = pe = "NA"
        if p is not None and p.is_linker:
            ps, pe = str(p.start_res), str(p.end_res)
        tp, fp, fn = (c.tp, c.fp, c.fn) if c is not None else ("NA",) * 3
        jac, band = (f"{r.agreement[0]:.4f}", r.agreement[1]) if r.agreement else ("NA", "NA")
        lines.append(
            f"{g.structure_id}\t{g.chain_id}\t{g.start_res}\t{g.end_res}\t{r.status}\t{ps}\t{pe}\t{tp}\t{fp}\t{fn}\t{jac}\t{band}"
        )
    return "\n".join(lines) + "\n"


def report_text(report):
    s = report.scores
    t = report.totals
    out = [
        f"gold entries: {len(report.rows)}  scored: {len(report.rows) - report.n_no_linker - report.n_unmatched}"
        f"  no_linker: {report.n_no_linker}  unmatched: {report.n_unmatched}",
        f"TP={t.tp} FP={t.fp} FN={t.fn}",
        f"{report.mode} precision={_na(s.precision)} recall={_na(s.recall)} F1={_na(s.f1)}",
    ]
    if report.bands:
        out.append("agreement: " + " ".join(f"{b}={n}" for b, n in sorted(report.bands.items())))
    return "\n".join(out) + "\n"
