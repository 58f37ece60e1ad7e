from pathlib import Path

import numpy as np
import pytest

from linker_scout import _accel
from linker_scout.structure_io import parse_pdb, validate_entry
from linker_scout.synthetic import make_dataset

DATA = Path(__file__).parent / "data"

KERNEL_PATHS = [pytest.param(False, id="numpy")]
if _accel.HAVE_NUMBA:
    KERNEL_PATHS.insert(0, pytest.param(True, id="numba"))


@pytest.fixture(params=KERNEL_PATHS)
def use_numba(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240229)


@pytest.fixture(scope="session")
def synthetic():
    return make_dataset(seed=0)


@pytest.fixture(scope="session")
def synthetic_entries(synthetic):
    return [
        validate_entry(parse_pdb(synthetic.pdb_texts[d.structure_id], d.structure_id), d, 6)
        for d in synthetic.domains
    ]


def load_published_pairs():
    rows = []
    for line in (DATA / "published_linker_pairs.tsv").read_text().splitlines()[1:]:
        pdb, actual, proposed = line.split("\t")
        a = tuple(int(x) for x in actual.split("-"))
        p = tuple(int(x) for x in proposed.split("-"))
        rows.append((pdb, a, p))
    return rows


def load_size_histogram():
    hist = {}
    for line in (DATA / "cluster_size_histogram.tsv").read_text().splitlines():
        if line.startswith("#") or not line.strip():
            continue
        size, count = line.split()
        hist[int(size)] = int(count)
    return hist


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
