"""
Synthetic multi-domain C-alpha traces with known linker positions.

Regular domains are a four-fold square helix or a planar zigzag strand laid
out on a 1/8 Angstrom grid, so every regular fragment has bit-identical
invariants wherever it sits. Linkers are random walks with ~3.8 A steps
snapped to the same grid. Used for the end-to-end tests and the CLI smoke
fixture; nothing here is meant to look like a real protein.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .evaluation import GoldLinker
from .structure_io import DomainDefinition

GRID = 0.125


def _snap(x):
    return np.round(np.asarray(x, dtype=float) / GRID) * GRID


def helix(n):
    i = np.arange(n)
    cos = np.array([1, 0, -1, 0])[i % 4]
    sin = np.array([0, 1, 0, -1])[i % 4]
    return np.column_stack([2.5 * cos, 2.5 * sin, 1.5 * i]).astype(float)


def strand(n):
    i = np.arange(n)
    return np.column_stack([3.25 * i, 1.5 * (i % 2), np.zeros(n)]).astype(float)


def random_walk(start, n, rng, step=3.8):
    pts = []
    p = np.asarray(start, dtype=float)
    for _ in range(n):
        d = rng.normal(size=3)
        p = _snap(p + step * d / np.linalg.norm(d))
        pts.append(p)
    return np.array(pts)


def format_ca_line(serial, resname, chain, resseq, xyz, occupancy=1.0, altloc=" ", icode=" "):
    x, y, z = xyz
    return (
        f"ATOM  {serial:5d}  CA {altloc}{resname:>3s} {chain}{resseq:4d}{icode}   "
        f"{x:8.3f}{y:8.3f}{z:8.3f}{occupancy:6.2f}{0.0:6.2f}           C"
    )


def to_pdb(coords, chain="A", first_resseq=1, resname="ALA"):
    lines = [
        format_ca_line(i + 1, resname, chain, first_resseq + i, xyz) for i, xyz in enumerate(coords)
    ]
    lines += ["TER", "END"]
    return "\n".join(lines) + "\n"


def _segment(kind, n):
    return helix(n) if kind == "helix" else strand(n)


@dataclass
class SyntheticDataset:
    pdb_texts: dict[str, str]
    domains: list[DomainDefinition]
    linkers: list[GoldLinker]  # designed linker spans; absent for all-regular chains

    def domains_tsv(self):
        rows = ["# structure_id\tchain_id\tendpoints"]
        rows += [f"{d.structure_id}\t{d.chain_id}\t{','.join(map(str, d.endpoints))}" for d in self.domains]
        return "\n".join(rows) + "\n"

    def linkers_tsv(self):
        rows = ["structure_id\tchain_id\tstart\tend\tcitation"]
        rows += [f"{g.structure_id}\t{g.chain_id}\t{g.start_res}\t{g.end_res}\t{g.source}" for g in self.linkers]
        return "\n".join(rows) + "\n"

    def write(self, directory):
        from pathlib import Path

        out = Path(directory)
        (out / "pdb").mkdir(parents=True, exist_ok=True)
        for sid, text in self.pdb_texts.items():
            (out / "pdb" / f"{sid}.pdb").write_text(text)
        (out / "domains.tsv").write_text(self.domains_tsv())
        (out / "designed_linkers.tsv").write_text(self.linkers_tsv())
        return out


def build_chain(layout, rng, first_resseq=1):
    """Assemble ``layout`` = [(kind, length), ...]; kinds are helix, strand, linker.

    Returns coordinates, the 1-based residue numbers of each domain end and
    the designed linker spans.
    """
    parts = []
    cursor = np.zeros(3)
    pos = first_resseq
    endpoints = []
    linkers = []
    for idx, (kind, n) in enumerate(layout):
        if kind == "linker":
            seg = random_walk(cursor, n, rng)
            linkers.append((pos, pos + n - 1))
            # the boundary sits in the middle of the designed linker
            endpoints.append(pos + n // 2 - 1)
        else:
            seg = _segment(kind, n) + cursor + np.array([0.0, 0.0, 3.75 if idx else 0.0])
            if idx and layout[idx - 1][0] != "linker":
                endpoints.append(pos - 1)
        parts.append(seg)
        cursor = seg[-1]
        pos += n
    endpoints.append(pos - 1)
    return np.vstack(parts), endpoints, linkers


def make_dataset(n_chains=44, n_regular=3, n_three_domain=2, seed=0):
    """Two-domain chains with a designed linker, plus all-regular chains.

    ``n_regular`` chains are one continuous regular segment split by a domain
    boundary; their LPRs contain only common fragments.
    """
    rng = np.random.default_rng(seed)
    texts, domains, golds = {}, {}, []
    kinds = ("helix", "strand")

    def add(sid, layout, first):
        coords, endpoints, spans = build_chain(layout, rng, first)
        texts[sid] = to_pdb(coords, first_resseq=first)
        domains[sid] = DomainDefinition(sid, "A", tuple(endpoints))
        golds.extend(GoldLinker(sid, "A", a, b, "designed") for a, b in spans)

    for c in range(n_chains):
        layout = [
            (kinds[rng.integers(2)], int(rng.integers(18, 36))),
            ("linker", int(rng.integers(4, 9))),
            (kinds[rng.integers(2)], int(rng.integers(18, 36))),
        ]
        add(f"syn{c:03d}", layout, int(rng.choice([1, 1, 11, 101])))
    for c in range(n_three_domain):
        layout = [
            ("helix", int(rng.integers(18, 30))),
            ("linker", int(rng.integers(4, 9))),
            ("strand", int(rng.integers(18, 30))),
            ("linker", int(rng.integers(4, 9))),
            ("helix", int(rng.integers(18, 30))),
        ]
        add(f"tri{c:03d}", layout, 1)
    for c in range(n_regular):
        kind = kinds[c % 2]
        n = int(rng.integers(40, 60))
        coords = _segment(kind, n)
        sid = f"reg{c:03d}"
        texts[sid] = to_pdb(coords)
        domains[sid] = DomainDefinition(sid, "A", (n // 2, n))
    return SyntheticDataset(texts, list(domains.values()), golds)
