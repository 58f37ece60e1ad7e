"""Maximal scoring subsequences of SUS profiles and the resulting linker calls."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from fractions import Fraction

LINKER = "linker"
NO_LINKER = "no_linker"

TSV_COLUMNS = (
    "structure_id",
    "chain_id",
    "boundary",
    "lpr_start",
    "lpr_end",
    "status",
    "linker_start",
    "linker_end",
    "cum_sus",
)


@dataclass(frozen=True)
class LinkerCall:
    structure_id: str
    chain_id: str
    boundary: int
    k: int
    status: str
    start_res: int | None = None
    end_res: int | None = None
    cum_sus: float | None = None
    tetra_range: tuple[int, int] | None = None

    @property
    def lpr_start(self):
        return self.boundary - self.k + 1

    @property
    def lpr_end(self):
        return self.boundary + self.k

    @property
    def is_linker(self):
        return self.status == LINKER

    @property
    def length(self):
        return self.end_res - self.start_res + 1 if self.is_linker else 0


def maximal_scoring_subsequences(values):
    """All maximal scoring subsequences (Ruzzo & Tompa, linear time).

    Returns ``(start, end, score)`` triples with 1-based inclusive
    positions, left to right. Cumulative sums are kept as exact rationals
    so the comparisons are free of rounding; scores are returned as floats.
    """
    starts: list[int] = []
    ends: list[int] = []
    lefts: list[Fraction] = []
    rights: list[Fraction] = []
    cum = Fraction(0)
    for pos, x in enumerate(values, start=1):
        x = Fraction(x)
        if x <= 0:
            cum += x
            continue
        s, e = pos, pos
        left, cum = cum, cum + x
        right = cum
        while True:
            j = len(lefts) - 1
            while j >= 0 and not lefts[j] < left:
                j -= 1
            if j < 0 or rights[j] >= right:
                break
            # extend the candidate leftwards over I_j .. I_{k-1}
            s, left = starts[j], lefts[j]
            del starts[j:], ends[j:], lefts[j:], rights[j:]
        starts.append(s)
        ends.append(e)
        lefts.append(left)
        rights.append(right)
    return [(s, e, float(r - l)) for s, e, l, r in zip(starts, ends, lefts, rights)]


def stretch_to_residues(i, j, boundary, k):
    """Residue range spanned by tetrapeptides i..j (1-based) of an LPR."""
    if not 1 <= i <= j <= 2 * k - 3:
        raise ValueError(f"tetrapeptide range ({i}, {j}) outside 1..{2 * k - 3}")
    return boundary - k + i, boundary - k + j + 3


def select_linker(subs, structure_id, chain_id, boundary, k):
    """Pick one linker per LPR from its maximal subsequences.

    Highest score wins; ties go to the stretch whose residue centre is
    closest to the boundary midpoint (between residues d and d+1), then to
    the leftmost stretch.
    """
    if not subs:
        return LinkerCall(structure_id, chain_id, boundary, k, NO_LINKER)
    boundary_center = k + 0.5

    def rank(sub):
        i, j, score = sub
        center = (i + j) / 2 + 1.5
        return (-score, abs(center - boundary_center), i)

    i, j, score = min(subs, key=rank)
    start, end = stretch_to_residues(i, j, boundary, k)
    return LinkerCall(structure_id, chain_id, boundary, k, LINKER, start, end, score, (i, j))


def demarcate(profile_values, structure_id, chain_id, boundary, k):
    return select_linker(maximal_scoring_subsequences(profile_values), structure_id, chain_id, boundary, k)


def _na(v, fmt="{}"):
    return "NA" if v is None else fmt.format(v)


def write_linkers_tsv(calls):
    lines = ["\t".join(TSV_COLUMNS)]
    for c in calls:
        lines.append(
            "\t".join(
                [
                    c.structure_id,
                    c.chain_id,
                    str(c.boundary),
                    str(c.lpr_start),
                    str(c.lpr_end),
                    c.status,
                    _na(c.start_res),
                    _na(c.end_res),
                    _na(c.cum_sus, "{:.4f}"),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def read_linkers_tsv(text):
    calls = []
    rows = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not rows:
        return calls
    header = rows[0].split("\t")
    if tuple(header) != TSV_COLUMNS:
        raise ValueError(f"unexpected linker table header: {header}")
    for rowno, line in enumerate(rows[1:], start=2):
        f = dict(zip(TSV_COLUMNS, line.split("\t")))
        if len(f) != len(TSV_COLUMNS):
            raise ValueError(f"row {rowno}: expected {len(TSV_COLUMNS)} columns")
        boundary = int(f["boundary"])
        k = boundary - int(f["lpr_start"]) + 1
        if f["status"] == LINKER:
            start, end = int(f["linker_start"]), int(f["linker_end"])
            i = start - boundary + k
            j = end - boundary + k - 3
            calls.append(
                LinkerCall(f["structure_id"], f["chain_id"], boundary, k, LINKER, start, end, float(f["cum_sus"]), (i, j))
            )
        elif f["status"] == NO_LINKER:
            calls.append(LinkerCall(f["structure_id"], f["chain_id"], boundary, k, NO_LINKER))
        else:
            raise ValueError(f"row {rowno}: unknown status {f['status']!r}")
    return calls


def write_linkers_json(calls):
    rows = []
    for c in calls:
        row = asdict(c)
        row["lpr_start"], row["lpr_end"] = c.lpr_start, c.lpr_end
        rows.append(row)
    return json.dumps(rows, indent=2) + "\n"
