"""
Reading C-alpha traces from PDB files and domain definitions from TSV tables.

Only the pieces of the PDB format the pipeline needs are handled: ATOM
records of the 20 standard amino acids, atom name ``CA``, first MODEL only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

STANDARD_RESIDUES = frozenset(
    "ALA ARG ASN ASP CYS GLN GLU GLY HIS ILE LEU LYS MET PHE PRO SER THR TRP TYR VAL".split()
)


class PdbParseError(ValueError):
    pass


class DomainFileError(ValueError):
    pass


class EntryRejected(ValueError):
    """Raised by :func:`validate_entry`; ``reason`` is a short human string."""

    def __init__(self, structure_id, chain_id, reason):
        super().__init__(f"{structure_id}:{chain_id}: {reason}")
        self.structure_id = structure_id
        self.chain_id = chain_id
        self.reason = reason


@dataclass(frozen=True)
class Residue:
    seq_pos: int
    insertion_code: str
    ca: tuple[float, float, float]

    def __post_init__(self):
        if len(self.ca) != 3 or not all(math.isfinite(c) for c in self.ca):
            raise ValueError(f"residue {self.seq_pos}: non-finite CA coordinate {self.ca}")


@dataclass(frozen=True)
class Chain:
    chain_id: str
    residues: tuple[Residue, ...]
    # author residue numbers with no usable CA between the chain's first and last residue
    gaps: tuple[int, ...] = ()

    def __len__(self):
        return len(self.residues)


@dataclass(frozen=True)
class StructureModel:
    id: str
    chains: tuple[Chain, ...]

    def chain(self, chain_id):
        for ch in self.chains:
            if ch.chain_id == chain_id:
                return ch
        raise KeyError(chain_id)


@dataclass(frozen=True)
class DomainDefinition:
    structure_id: str
    chain_id: str
    endpoints: tuple[int, ...]

    @property
    def boundaries(self):
        """Internal endpoints, i.e. every endpoint except the last."""
        return self.endpoints[:-1]


@dataclass(frozen=True)
class ValidatedEntry:
    structure_id: str
    chain: Chain
    domains: DomainDefinition
    k: int
    # boundary -> index of the first LPR residue within chain.residues
    window_starts: dict[int, int] = field(default_factory=dict, compare=False)


def _float_field(line, lo, hi, name, lineno):
    raw = line[lo:hi]
    try:
        value = float(raw)
    except ValueError:
        raise PdbParseError(f"line {lineno}: malformed {name} field {raw!r}") from None
    if not math.isfinite(value):
        raise PdbParseError(f"line {lineno}: non-finite {name} field {raw!r}")
    return value


def parse_pdb(text, structure_id=""):
    """Parse PDB text into a :class:`StructureModel` of C-alpha traces.

    Duplicate alternate-location CA atoms are resolved by highest occupancy,
    ties going to the alphabetically first altloc. Residue numbers that are
    skipped in the numbering, or whose residue has no CA atom, are recorded
    in ``Chain.gaps``.
    """
    # chain -> {(resseq, icode): (occupancy, altloc, xyz)}
    picked: dict[str, dict[tuple[int, str], tuple]] = {}
    seen_numbers: dict[str, set[int]] = {}
    saw_atom = False

    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.startswith("ENDMDL"):
            break
        if not line.startswith("ATOM"):
            continue
        saw_atom = True
        if len(line) < 54:
            raise PdbParseError(f"line {lineno}: ATOM record truncated before coordinates")
        resname = line[17:20].strip()
        if resname not in STANDARD_RESIDUES:
            continue
        chain_id = line[21]
        try:
            resseq = int(line[22:26])
        except ValueError:
            raise PdbParseError(f"line {lineno}: malformed resSeq field {line[22:26]!r}") from None
        icode = line[26].strip() if len(line) > 26 else ""
        seen_numbers.setdefault(chain_id, set()).add(resseq)
        residues = picked.setdefault(chain_id, {})
        if line[12:16].strip() != "CA":
            continue

        xyz = (
            _float_field(line, 30, 38, "x", lineno),
            _float_field(line, 38, 46, "y", lineno),
            _float_field(line, 46, 54, "z", lineno),
        )
        occ_raw = line[54:60].strip()
        occupancy = _float_field(line, 54, 60, "occupancy", lineno) if occ_raw else 1.0
        altloc = line[16]

        key = (resseq, icode)
        prev = residues.get(key)
        if prev is None or occupancy > prev[0] or (occupancy == prev[0] and altloc < prev[1]):
            residues[key] = (occupancy, altloc, xyz)

    if not saw_atom:
        raise PdbParseError("no ATOM records")

    chains = []
    for chain_id, residues in picked.items():
        res = tuple(Residue(pos, ic, xyz) for (pos, ic), (_, _, xyz) in residues.items())
        with_ca = {r.seq_pos for r in res}
        numbers = seen_numbers[chain_id]
        lo, hi = min(numbers), max(numbers)
        gaps = tuple(p for p in range(lo, hi + 1) if p not in with_ca)
        chains.append(Chain(chain_id, res, gaps))
    return StructureModel(structure_id, tuple(chains))


def read_pdb(path, structure_id=None):
    path = Path(path)
    if structure_id is None:
        structure_id = path.stem
    return parse_pdb(path.read_text(), structure_id)


def write_trace(model):
    """Serialise a model to the tab-separated trace format."""
    lines = [f"#structure\t{model.id}"]
    for ch in model.chains:
        lines.append(f"#chain\t{ch.chain_id}")
        for r in ch.residues:
            x, y, z = (repr(float(c)) for c in r.ca)
            lines.append(f"CA\t{ch.chain_id}\t{r.seq_pos}\t{r.insertion_code or '.'}\t{x}\t{y}\t{z}")
        for p in ch.gaps:
            lines.append(f"GAP\t{ch.chain_id}\t{p}")
    return "\n".join(lines) + "\n"


def read_trace(text):
    structure_id = ""
    order: list[str] = []
    residues: dict[str, list[Residue]] = {}
    gaps: dict[str, list[int]] = {}
    for line in text.splitlines():
        if not line:
            continue
        parts = line.split("\t")
        if parts[0] == "#structure":
            structure_id = parts[1] if len(parts) > 1 else ""
        elif parts[0] == "#chain":
            order.append(parts[1])
            residues[parts[1]] = []
            gaps[parts[1]] = []
        elif parts[0] == "CA":
            icode = "" if parts[3] == "." else parts[3]
            residues[parts[1]].append(
                Residue(int(parts[2]), icode, (float(parts[4]), float(parts[5]), float(parts[6])))
            )
        elif parts[0] == "GAP":
            gaps[parts[1]].append(int(parts[2]))
    chains = tuple(Chain(c, tuple(residues[c]), tuple(gaps[c])) for c in order)
    return StructureModel(structure_id, chains)


def parse_domain_definitions(text):
    """Parse ``structure_id  chain_id  d1,d2,...`` rows.

    Fields are separated by tabs or runs of whitespace; ``#`` lines are
    comments. Endpoints must be strictly increasing and at least two domains
    are required per row.
    """
    out = []
    seen = set()
    for rowno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split()
        if len(fields) != 3:
            raise DomainFileError(f"row {rowno}: expected 3 fields, got {len(fields)}")
        sid, cid, raw = fields
        try:
            endpoints = tuple(int(tok) for tok in raw.split(",") if tok.strip())
        except ValueError:
            raise DomainFileError(f"row {rowno}: non-integer endpoint in {raw!r}") from None
        if len(endpoints) < 2:
            raise DomainFileError(f"row {rowno}: need at least two domains, got {raw!r}")
        if any(b <= a for a, b in zip(endpoints, endpoints[1:])):
            raise DomainFileError(f"row {rowno}: endpoints not strictly increasing: {raw!r}")
        if (sid, cid) in seen:
            raise DomainFileError(f"row {rowno}: duplicate entry for {sid} chain {cid}")
        seen.add((sid, cid))
        out.append(DomainDefinition(sid, cid, endpoints))
    return out


def validate_entry(s, d, k):
    """Check that every LPR window of ``d`` can be cut from ``s``.

    For each internal endpoint b, residues b-k+1 .. b+k must all be present,
    without insertion codes, and consecutive in the chain. Raises
    :class:`EntryRejected` otherwise.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    try:
        chain = s.chain(d.chain_id)
    except KeyError:
        raise EntryRejected(d.structure_id, d.chain_id, "chain not found") from None

    index = {}
    coded = set()
    for i, r in enumerate(chain.residues):
        if r.insertion_code:
            coded.add(r.seq_pos)
        else:
            index[r.seq_pos] = i

    starts = {}
    for b in d.boundaries:
        lo, hi = b - k + 1, b + k
        missing = [p for p in range(lo, hi + 1) if p not in index]
        if missing:
            raise EntryRejected(
                d.structure_id,
                d.chain_id,
                f"LPR window {lo}..{hi} around boundary {b} spans missing residue(s) "
                + ",".join(map(str, missing[:5])),
            )
        if any(lo <= p <= hi for p in coded):
            raise EntryRejected(
                d.structure_id, d.chain_id, f"insertion code inside LPR window {lo}..{hi} around boundary {b}"
            )
        first = index[lo]
        if any(index[lo + j] != first + j for j in range(2 * k)):
            raise EntryRejected(
                d.structure_id, d.chain_id, f"residues of LPR window {lo}..{hi} around boundary {b} out of order"
            )
        starts[b] = first
    return ValidatedEntry(d.structure_id, chain, d, k, starts)
