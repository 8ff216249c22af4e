"""Command-line interface.

Subcommands mirror the pipeline stages (extract, embed, cohorts, train,
evaluate, distances, project, stats, report), plus ``run`` for the whole
pipeline and ``reproduce`` for the bundled reference-table statistics. Global
flags: --config, --seed, --out.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import experiment
from .config import load_config
from .distance import DistanceSummary, intra_mcd, mcd, pair_count, write_distance_csv
from .cohorts import Relation, relation
from .embeddings import load_embeddings
from .ingest import read_records
from .metrics import read_performance_csv
from .projection import (
    TsneConfig,
    pca_fit,
    pca_transform,
    tsne,
    write_projection_csv,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semshift",
        description="Corpus-distance and generalizability auditing for clinical-style text.",
    )
    parser.add_argument("--config", help="experiment config file (INI-style)")
    parser.add_argument("--seed", type=int, help="override the configured seed")
    parser.add_argument("--out", help="override the configured output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, doc in (
        ("run", "run the full pipeline end to end"),
        ("extract", "extract matching sentences from the corpora"),
        ("embed", "embed the extracted sentences"),
        ("cohorts", "build the combinatorial train/test cohorts"),
        ("train", "train one classifier head per train cohort"),
        ("evaluate", "evaluate every train/test pair"),
        ("stats", "recompute summary statistics from persisted artifacts"),
    ):
        sub.add_parser(name, help=doc)

    dist = sub.add_parser("distances", help="pairwise and within-set MCDs for the cohorts")
    dist.add_argument("--csv", help="write the distance table here (default <out>/distances.csv)")

    proj = sub.add_parser("project", help="2-D projection of an embedding file")
    proj.add_argument("--method", choices=("pca", "tsne"), default="pca")
    proj.add_argument("--input", required=True, help="embedding file to project")
    proj.add_argument("--background", help="embedding file to fit PCA on (defaults to --input)")
    proj.add_argument("--records", help="sentence records for note-type/specialty metadata")
    proj.add_argument("--output", required=True, help="projection CSV path")
    proj.add_argument("--perplexity", type=float, default=15.0)
    proj.add_argument("--iterations", type=int, default=1000)
    proj.add_argument("--learning-rate", type=float, default=200.0)

    rep = sub.add_parser("reproduce", help="recompute the reference-table statistics")
    rep.add_argument("--fixtures", help="directory of reference CSVs (defaults to bundled data)")
    rep.add_argument("--json", help="also write the full stats report to this path")

    sub.add_parser("report", help="emit per-figure CSV/JSON data from persisted artifacts")
    return parser


def _require_config(args) -> "experiment.ExperimentConfig":
    if not args.config:
        raise SystemExit("error: this command needs --config")
    return load_config(args.config, seed_override=args.seed, out_override=args.out)


def _print_tests(stats: dict) -> None:
    for entry in stats.get("tests", []):
        df = ",".join(f"{d:g}" for d in entry["df"])
        print(
            f"{entry['test']:32s} statistic={entry['statistic']: .6g} "
            f"df=[{df}] p={entry['p_value']:.6g}"
        )


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    command = args.command

    if command == "reproduce":
        stats = experiment.reproduce_reference_stats(args.fixtures)
        census = stats["relation_census"]
        print(f"relation census: {census}")
        means = stats["mcd_by_relation"]
        print(
            "mcd means: "
            + " ".join(f"{rel}={means[rel]['mean']:.6f}" for rel in ("native", "partial", "external"))
        )
        block = stats.get("relation_effect")
        if block:
            rel_means = block["relation_means"]
            print(
                "single-specialty macro-AUC means: "
                + " ".join(f"{rel}={rel_means[rel]:.4f}" for rel in ("native", "partial", "external"))
            )
        block = stats.get("diversity_effect")
        if block:
            print(f"diversity monotone for all test sets: {block['all_monotone']}")
        _print_tests(stats)
        if args.json:
            with open(args.json, "w", encoding="utf-8") as fh:
                json.dump(stats, fh, sort_keys=True, indent=2)
                fh.write("\n")
        return 0

    cfg = _require_config(args)
    out_dir = cfg.out_dir
    os.makedirs(out_dir, exist_ok=True)

    if command == "run":
        result = experiment.run_experiment(cfg)
        print(f"complete: {len(result.records)} evaluations -> {out_dir}")
        _print_tests(result.stats)
        return 0
    if command == "extract":
        records = experiment.stage_extract(cfg, out_dir)
        labeled = sum(1 for r in records if r.label is not None)
        print(f"extracted {len(records)} records ({labeled} labeled) -> {out_dir}/records.jsonl")
        return 0
    if command == "embed":
        matrix = experiment.stage_embed(cfg, out_dir)
        print(f"embedded {len(matrix)} sentences at dim {matrix.dim} -> {out_dir}/embeddings.emb")
        return 0
    if command == "cohorts":
        cohorts = experiment.stage_cohorts(cfg, out_dir)
        for cohort in cohorts:
            print(f"{cohort.name}: {len(cohort.sentence_ids)} sentences {dict(cohort.composition)}")
        return 0
    if command == "train":
        heads = experiment.stage_train(cfg, out_dir)
        print(f"trained {len(heads)} heads -> {out_dir}/heads")
        return 0
    if command == "evaluate":
        performance, _ = experiment.stage_evaluate(cfg, out_dir)
        print(f"wrote {len(performance)} evaluations -> {out_dir}/performance.csv")
        return 0
    if command == "distances":
        cohorts = experiment.load_cohorts_dir(out_dir)
        matrix = load_embeddings(os.path.join(out_dir, "embeddings.emb"))
        rows = []
        trains = sorted((c for c in cohorts if c.role == "train"), key=lambda c: c.name)
        tests = sorted((c for c in cohorts if c.role == "test"), key=lambda c: c.name)
        for train_cohort in trains:
            a = matrix.subset(train_cohort.sentence_ids)
            for test_cohort in tests:
                b = matrix.subset(test_cohort.sentence_ids)
                rows.append(
                    DistanceSummary(
                        train_name=train_cohort.name,
                        test_name=test_cohort.name,
                        pair_count=pair_count(len(a), len(b)),
                        mcd=mcd(a, b),
                        relation=relation(train_cohort.specialties, test_cohort.specialties),
                    )
                )
        for cohort in sorted(cohorts, key=lambda c: (c.role, c.name)):
            sub = matrix.subset(cohort.sentence_ids)
            rows.append(
                DistanceSummary(
                    train_name=cohort.name,
                    test_name=cohort.name,
                    pair_count=pair_count(len(sub)),
                    mcd=intra_mcd(sub),
                    relation=Relation.INTRA,
                )
            )
        target = args.csv or os.path.join(out_dir, "distances.csv")
        write_distance_csv(rows, target)
        print(f"wrote {len(rows)} distance rows -> {target}")
        return 0
    if command == "stats":
        cohorts = experiment.load_cohorts_dir(out_dir)
        performance = read_performance_csv(os.path.join(out_dir, "performance.csv"))
        intra = _read_intra(os.path.join(out_dir, "distances.csv"))
        stats = experiment.stage_stats(out_dir, performance, intra, cohorts)
        _print_tests(stats)
        return 0
    if command == "report":
        performance = read_performance_csv(os.path.join(out_dir, "performance.csv"))
        with open(os.path.join(out_dir, "stats.json"), encoding="utf-8") as fh:
            stats = json.load(fh)
        report_dir = os.path.join(out_dir, "report")
        experiment.write_report(stats, performance, report_dir)
        print(f"report data -> {report_dir}")
        return 0
    if command == "project":
        return _project(args)
    raise SystemExit(f"unknown command {command!r}")


def _read_intra(path) -> list:
    import csv

    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            if row["relation"] == Relation.INTRA.value:
                rows.append(
                    DistanceSummary(
                        train_name=row["train_name"],
                        test_name=row["test_name"],
                        pair_count=int(row["pair_count"]),
                        mcd=float(row["mcd"]),
                        relation=Relation.INTRA,
                    )
                )
    return rows


def _project(args) -> int:
    matrix = load_embeddings(args.input)
    metadata = {}
    if args.records:
        for rec in read_records(args.records):
            metadata.setdefault(rec.sentence_id, (rec.note_type, rec.specialty))
    if args.method == "pca":
        background = load_embeddings(args.background) if args.background else matrix
        model = pca_fit(background)
        coords = pca_transform(model, matrix.vectors)
    else:
        cfg = TsneConfig(
            perplexity=args.perplexity,
            iterations=args.iterations,
            learning_rate=args.learning_rate,
            seed=args.seed or 0,
        )
        coords = tsne(matrix, cfg)
    write_projection_csv(matrix.ids, coords, metadata, args.output)
    print(f"wrote {len(matrix)} projected points -> {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
