import json
import shutil

import pytest

from conftest import DATA
from linker_scout.cli import main

SMOKE = DATA / "smoke"


def demarcate(out, *extra):
    return main(["demarcate", "--pdb-dir", str(SMOKE / "pdb"), "--domains", str(SMOKE / "domains.tsv"), "--out", str(out), *extra])


def test_smoke_run(tmp_path, capsys):
    assert demarcate(tmp_path) == 0
    rows = (tmp_path / "linkers.tsv").read_text().splitlines()
    assert rows[0].split("\t")[0] == "structure_id"
    assert len(rows) == 1 + 4
    assert [r.split("\t")[2] for r in rows[1:]] == ["121", "48", "26", "61"]
    assert "4 boundaries" in capsys.readouterr().out


def test_fixed_policy_recorded(tmp_path):
    assert demarcate(tmp_path, "--pc-policy", "fixed:8") == 0
    meta = json.loads((tmp_path / "run_meta.json").read_text())
    assert meta["n_components"] == 8
    assert meta["config"]["pc_policy"] == "fixed:8"


def test_bad_policy_rejected(tmp_path):
    with pytest.raises(SystemExit):
        demarcate(tmp_path, "--pc-policy", "fixed")


def test_config_round_trip(tmp_path):
    assert demarcate(tmp_path / "a", "--inconsistency-cutoff", "1.1", "--audit") == 0
    assert demarcate(tmp_path / "b", "--config", str(tmp_path / "a" / "run_meta.json"), "--audit") == 0
    for f in (tmp_path / "a").iterdir():
        assert (tmp_path / "b" / f.name).read_bytes() == f.read_bytes(), f.name


def test_evaluate_identical(tmp_path, capsys):
    assert demarcate(tmp_path) == 0
    preds = (tmp_path / "linkers.tsv").read_text().splitlines()[1:]
    gold = ["structure_id\tchain_id\tstart\tend"]
    gold += ["\t".join([f[0], f[1], f[6], f[7]]) for f in (r.split("\t") for r in preds) if f[5] == "linker"]
    (tmp_path / "gold.tsv").write_text("\n".join(gold) + "\n")
    capsys.readouterr()
    assert main(["evaluate", str(tmp_path / "linkers.tsv"), str(tmp_path / "gold.tsv"), "--json"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert (res["precision"], res["recall"], res["f1"]) == (1.0, 1.0, 1.0)


def test_evaluate_against_designed(tmp_path, capsys):
    assert demarcate(tmp_path) == 0
    capsys.readouterr()
    code = main(["evaluate", str(tmp_path / "linkers.tsv"), str(SMOKE / "designed_linkers.tsv"), "--agreement"])
    assert code == 0
    out = capsys.readouterr().out
    assert "no_linker: 1" in out and "micro precision=" in out


def test_evaluate_unmatched_exit_code(tmp_path, capsys):
    assert demarcate(tmp_path) == 0
    (tmp_path / "gold.tsv").write_text("zzz9\tA\t10\t15\n")
    assert main(["evaluate", str(tmp_path / "linkers.tsv"), str(tmp_path / "gold.tsv")]) == 2
    assert "unmatched gold: zzz9" in capsys.readouterr().err


def test_cluster_stats_size_histogram(capsys):
    assert main(["cluster-stats", "--histogram", str(DATA / "cluster_size_histogram.tsv"), "--json"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert (res["clusters"], res["members"]) == (2188, 6525)


def test_cluster_stats_run_dir(tmp_path, capsys):
    (tmp_path / "scores.tsv").write_text("cluster\tsize\tevalue\tsus\n0\t1\t0.6667\t0.5\n1\t1\t0.6667\t0.5\n2\t2\t0\t-1\n")
    assert main(["cluster-stats", str(tmp_path)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[1:3] == ["1\t2", "2\t1"]


def test_cluster_stats_missing(tmp_path):
    assert main(["cluster-stats", str(tmp_path)]) == 1


def test_dump_invariants(tmp_path):
    out = tmp_path / "inv.tsv"
    assert main(["dump-invariants", "--pdb-dir", str(SMOKE / "pdb"), "--domains", str(SMOKE / "domains.tsv"), "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 1 + 4 * 9


def test_rejected_entry_partial_exit(tmp_path):
    shutil.copytree(SMOKE / "pdb", tmp_path / "pdb")
    dom = (SMOKE / "domains.tsv").read_text() + "syn001\tB\t60,75\n"
    (tmp_path / "domains.tsv").write_text(dom)
    code = main(["demarcate", "--pdb-dir", str(tmp_path / "pdb"), "--domains", str(tmp_path / "domains.tsv"), "--out", str(tmp_path / "out")])
    assert code == 2
    meta = json.loads((tmp_path / "out" / "run_meta.json").read_text())
    assert meta["rejected"] and meta["rejected"][0] == {"structure_id": "syn001", "chain_id": "B", "reason": "chain not found"}


def test_missing_structure_is_error(tmp_path, capsys):
    (tmp_path / "domains.tsv").write_text("nope\tA\t50,100\n")
    code = main(["demarcate", "--pdb-dir", str(tmp_path), "--domains", str(tmp_path / "domains.tsv"), "--out", str(tmp_path / "o")])
    assert code == 1
    assert "no structure file" in capsys.readouterr().err


def test_make_synthetic(tmp_path):
    assert main(["make-synthetic", str(tmp_path), "--n-chains", "2", "--n-regular", "0", "--n-three-domain", "1", "--seed", "3"]) == 0
    for f in ("domains.tsv", "designed_linkers.tsv", "pdb/syn000.pdb"):
        assert (tmp_path / f).read_text() == (SMOKE / f).read_text()
