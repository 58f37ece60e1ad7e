"""Command line entry point: ``linker-scout <subcommand>``."""

from __future__ import annotations

import argparse
import gzip
import json
import logging
import sys
from pathlib import Path

from . import _accel
from .demarcation import read_linkers_tsv
from .evaluation import evaluate_run, read_gold_tsv, report_text, report_tsv
from .features import parse_policy
from .invariants import invariant_matrix, write_invariants_tsv
from .lpr import discretize_lpr, extract_lprs
from .pipeline import PipelineConfig, PipelineError, run_pipeline, write_outputs
from .scoring import read_scores_tsv, size_histogram
from .structure_io import DomainFileError, EntryRejected, PdbParseError, parse_domain_definitions, parse_pdb, validate_entry

log = logging.getLogger("linker_scout")

EXIT_OK, EXIT_ERROR, EXIT_PARTIAL = 0, 1, 2


class CliError(Exception):
    pass


def find_structure(pdb_dir, structure_id):
    names = [f"{structure_id}.pdb", f"{structure_id}.ent", f"pdb{structure_id}.ent"]
    names += [n + ".gz" for n in names]
    for base in (structure_id, structure_id.lower(), structure_id.upper()):
        for n in names:
            p = Path(pdb_dir) / n.replace(structure_id, base)
            if p.exists():
                return p
    raise CliError(f"no structure file for {structure_id} in {pdb_dir}")


def _read_text(path):
    path = Path(path)
    try:
        if path.suffix == ".gz":
            with gzip.open(path, "rt") as fh:
                return fh.read()
        return path.read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc


def load_entries(pdb_dir, domains_path, k):
    """Parse and validate every domain definition; returns (entries, rejections)."""
    try:
        domains = parse_domain_definitions(_read_text(domains_path))
    except DomainFileError as exc:
        raise CliError(f"{domains_path}: {exc}") from exc
    entries, rejected = [], []
    cache = {}
    for d in domains:
        if d.structure_id not in cache:
            path = find_structure(pdb_dir, d.structure_id)
            try:
                cache[d.structure_id] = parse_pdb(_read_text(path), d.structure_id)
            except PdbParseError as exc:
                raise CliError(f"{path}: {exc}") from exc
        try:
            entries.append(validate_entry(cache[d.structure_id], d, k))
        except EntryRejected as exc:
            log.warning("rejected %s", exc)
            rejected.append({"structure_id": d.structure_id, "chain_id": d.chain_id, "reason": exc.reason})
    return entries, rejected


def _config_from_args(args):
    base = {}
    if args.config:
        meta = json.loads(_read_text(args.config))
        base = meta.get("config", meta)
    overrides = {
        "k": args.k,
        "pc_policy": args.pc_policy,
        "inconsistency_depth": args.inconsistency_depth,
        "inconsistency_cutoff": args.inconsistency_cutoff,
    }
    base.update({key: v for key, v in overrides.items() if v is not None})
    try:
        return PipelineConfig.from_dict(base)
    except (TypeError, ValueError) as exc:
        raise CliError(f"bad configuration: {exc}") from exc


def cmd_demarcate(args):
    cfg = _config_from_args(args)
    entries, rejected = load_entries(args.pdb_dir, args.domains, cfg.k)
    try:
        art = run_pipeline(entries, cfg)
    except PipelineError as exc:
        raise CliError(str(exc)) from exc
    art.rejected = rejected
    out = write_outputs(art, args.out, audit=args.audit, as_json=args.json)
    n_link = sum(c.is_linker for c in art.calls)
    print(
        f"{len(art.calls)} boundaries, {n_link} linkers, {len(art.calls) - n_link} without linker, "
        f"{art.assignment.n_clusters} clusters, m={art.n_components}; wrote {out / 'linkers.tsv'}"
    )
    if rejected:
        print(f"{len(rejected)} entries rejected (see run_meta.json)", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_evaluate(args):
    preds = read_linkers_tsv(_read_text(args.predictions))
    golds = read_gold_tsv(_read_text(args.gold))
    report = evaluate_run(preds, golds, mode=args.mode, agreement=args.agreement)
    if args.json:
        s = report.scores
        print(
            json.dumps(
                {
                    "mode": report.mode,
                    "precision": s.precision,
                    "recall": s.recall,
                    "f1": s.f1,
                    "tp": report.totals.tp,
                    "fp": report.totals.fp,
                    "fn": report.totals.fn,
                    "no_linker": report.n_no_linker,
                    "unmatched": report.n_unmatched,
                    "bands": report.bands,
                },
                indent=2,
            )
        )
    else:
        sys.stdout.write(report_tsv(report) if args.tsv else report_text(report))
    if args.out:
        Path(args.out).write_text(report_tsv(report))
    if report.n_unmatched:
        for r in report.rows:
            if r.status == "unmatched":
                print(f"unmatched gold: {r.gold.structure_id}:{r.gold.chain_id} {r.gold.start_res}-{r.gold.end_res}", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def _read_histogram(path):
    hist = {}
    for line in _read_text(path).splitlines():
        f = line.split()
        if not f or line.startswith("#") or not f[0].isdigit():
            continue
        hist[int(f[0])] = int(f[1])
    return dict(sorted(hist.items()))


def cmd_cluster_stats(args):
    if args.histogram:
        hist = _read_histogram(args.histogram)
    else:
        path = Path(args.run_dir) / "scores.tsv"
        if not path.exists():
            raise CliError(f"missing {path}; run demarcate first")
        hist = size_histogram(s.size for s in read_scores_tsv(_read_text(path)))
    n_clusters = sum(hist.values())
    n_members = sum(s * c for s, c in hist.items())
    if args.json:
        print(json.dumps({"histogram": hist, "clusters": n_clusters, "members": n_members}, indent=2))
    else:
        print("size\tclusters")
        for s, c in hist.items():
            print(f"{s}\t{c}")
        print(f"total clusters\t{n_clusters}")
        print(f"total members\t{n_members}")
    return EXIT_OK


def cmd_dump_invariants(args):
    entries, rejected = load_entries(args.pdb_dir, args.domains, args.k)
    refs, verts = [], []
    for e in entries:
        for r in extract_lprs(e):
            for t in discretize_lpr(r):
                refs.append(t.ref)
                verts.append(t.vertices)
    import numpy as np

    text = write_invariants_tsv(refs, invariant_matrix(np.array(verts)) if verts else np.empty((0, 15)))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_PARTIAL if rejected else EXIT_OK


def cmd_make_synthetic(args):
    from .synthetic import make_dataset

    ds = make_dataset(n_chains=args.n_chains, n_regular=args.n_regular, n_three_domain=args.n_three_domain, seed=args.seed)
    out = ds.write(args.out)
    print(f"wrote {len(ds.pdb_texts)} structures to {out}")
    return EXIT_OK


def _policy(text):
    try:
        parse_policy(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    return text


def build_parser():
    p = argparse.ArgumentParser(prog="linker-scout", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--threads", type=int, default=None, help="cap on worker threads (env LINKER_SCOUT_THREADS)")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("demarcate", help="run the full pipeline over a dataset")
    d.add_argument("--pdb-dir", required=True)
    d.add_argument("--domains", required=True, help="domain definition TSV")
    d.add_argument("--out", required=True, help="output directory")
    d.add_argument("--k", type=int, default=None, help="LPR half-width (default 6)")
    d.add_argument("--pc-policy", type=_policy, default=None, help="variance:<theta> or fixed:<m> (default variance:0.99)")
    d.add_argument("--inconsistency-depth", type=int, default=None, help="default 2")
    d.add_argument("--inconsistency-cutoff", type=float, default=None, help="default 1.15")
    d.add_argument("--config", help="run_meta.json (or config JSON) of an earlier run; flags override it")
    d.add_argument("--audit", action="store_true", help="also write all intermediate matrices")
    d.add_argument("--json", action="store_true", help="also write linkers.json")
    d.set_defaults(func=cmd_demarcate)

    e = sub.add_parser("evaluate", help="score linkers.tsv against reference linkers")
    e.add_argument("predictions")
    e.add_argument("gold")
    e.add_argument("--mode", choices=("micro", "macro"), default="micro")
    e.add_argument("--agreement", action="store_true", help="report Jaccard agreement bands")
    e.add_argument("--json", action="store_true")
    e.add_argument("--tsv", action="store_true", help="print the per-row table")
    e.add_argument("--out", help="write the per-row TSV here")
    e.set_defaults(func=cmd_evaluate)

    c = sub.add_parser("cluster-stats", help="cluster size histogram of a run")
    c.add_argument("run_dir", nargs="?")
    c.add_argument("--histogram", help="read a size/count table instead of a run directory")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_cluster_stats)

    i = sub.add_parser("dump-invariants", help="write the invariant matrix as TSV")
    i.add_argument("--pdb-dir", required=True)
    i.add_argument("--domains", required=True)
    i.add_argument("--k", type=int, default=6)
    i.add_argument("--out")
    i.set_defaults(func=cmd_dump_invariants)

    s = sub.add_parser("make-synthetic", help="write a synthetic dataset with designed linkers")
    s.add_argument("out")
    s.add_argument("--n-chains", type=int, default=44)
    s.add_argument("--n-regular", type=int, default=3)
    s.add_argument("--n-three-domain", type=int, default=2)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_make_synthetic)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    _accel.set_threads(args.threads if args.threads is not None else _accel.threads_from_env())
    if args.command == "cluster-stats" and not (args.run_dir or args.histogram):
        parser.error("cluster-stats needs a run directory or --histogram")
    try:
        return args.func(args)
    except (CliError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
