"""Linker probable regions (LPRs) and their tetrapeptide fragments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FRAGMENT_LENGTH = 4


@dataclass(frozen=True)
class Lpr:
    structure_id: str
    chain_id: str
    boundary: int
    k: int
    residues: tuple  # 2k Residue objects, positions boundary-k+1 .. boundary+k

    @property
    def ref(self):
        return f"{self.structure_id}:{self.chain_id}:{self.boundary}"

    @property
    def start(self):
        return self.boundary - self.k + 1

    @property
    def end(self):
        return self.boundary + self.k

    def coords(self):
        return np.array([r.ca for r in self.residues], dtype=float)


@dataclass(frozen=True)
class Tetrapeptide:
    lpr_ref: str
    index: int  # 1-based position within the LPR, 1 .. 2k-3
    vertices: np.ndarray  # (4, 3)

    @property
    def ref(self):
        return f"{self.lpr_ref}:{self.index}"


def extract_lpr(entry, boundary, k=None):
    """Cut the 2k-residue window ending k residues after ``boundary``."""
    k = entry.k if k is None else k
    endpoints = entry.domains.endpoints
    if boundary == endpoints[-1]:
        raise ValueError("terminal endpoint has no LPR")
    if boundary not in endpoints:
        raise ValueError(f"{boundary} is not an endpoint of {entry.structure_id}:{entry.domains.chain_id}")
    if k != entry.k:
        raise ValueError(f"entry was validated for k={entry.k}, not k={k}")
    first = entry.window_starts[boundary]
    residues = entry.chain.residues[first : first + 2 * k]
    lpr = Lpr(entry.structure_id, entry.chain.chain_id, boundary, k, tuple(residues))
    assert len(lpr.residues) == 2 * k and lpr.residues[k - 1].seq_pos == boundary
    return lpr


def extract_lprs(entry):
    """One LPR per internal boundary, in sequence order."""
    return [extract_lpr(entry, b) for b in entry.domains.boundaries]


def discretize_lpr(r):
    coords = r.coords()
    n = len(coords) - FRAGMENT_LENGTH + 1
    if n < 1:
        raise ValueError(f"LPR of length {len(coords)} is shorter than one fragment")
    return [Tetrapeptide(r.ref, i + 1, coords[i : i + FRAGMENT_LENGTH].copy()) for i in range(n)]
