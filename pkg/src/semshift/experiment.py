"""End-to-end experiment pipeline and the reference-table statistics suite.

``run_experiment`` drives extraction, embedding, cohort construction, the seven
trainings, the 49 evaluations, the distance sweep, and the statistical
groupings, persisting every intermediate artifact under the output directory.
Reruns with the same config regenerate byte-identical files.

``reproduce_reference_stats`` runs the same statistical battery over the
bundled reference tables (49 train/test evaluations plus 14 within-set
distances from a clinical-notes generalizability study), needing no embeddings
at all.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from dataclasses import asdict, dataclass, field
from importlib import resources

import numpy as np

from .classifier import CLASS_ORDER, TrainConfig, load_head, save_head, train_head
from .cohorts import Relation, build_cohorts, load_cohort, relation, save_cohort
from .config import ExperimentConfig
from .distance import DistanceSummary, intra_mcd, mcd, pair_count, write_distance_csv
from .embeddings import (
    EmbeddingMatrix,
    TestEmbedder,
    fetch_embeddings,
    load_embeddings,
    save_embeddings,
)
from .ingest import Lexicon, extract_sentences, load_corpus, read_records, write_records
from .metrics import (
    PerformanceRecord,
    auc,
    ppv_at_recall,
    write_performance_csv,
)
from .stats import (
    digest_inputs,
    ols,
    one_way_anova,
    report_entry,
    rm_anova,
    t_test_two_sample,
)

# The reference tables use disease-family shorthand for dataset names.
_NAME_ALIASES = {"cancer": "oncology", "cardiac": "cardiology", "pulmonary": "pulmonology"}
_REFERENCE_SPECIALTIES = frozenset(_NAME_ALIASES.values())

RECALL_FLOOR = 0.9


class ExperimentError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


def parse_dataset_name(name: str):
    """Split a dataset name into (specialty set, role).

    Names are space-joined specialty tokens plus a trailing "train"/"test";
    "all three" is shorthand for the full reference trio.
    """
    tokens = name.split()
    if len(tokens) < 2 or tokens[-1] not in ("train", "test"):
        raise ValueError(f"cannot parse dataset name {name!r}")
    body, role = tokens[:-1], tokens[-1]
    if body == ["all", "three"]:
        return _REFERENCE_SPECIALTIES, role
    return frozenset(_NAME_ALIASES.get(t, t) for t in body), role


def _specs_of(name: str):
    return parse_dataset_name(name)[0]


# ---------------------------------------------------------------------------
# Statistical groupings shared by live runs and the reference reproduction.
# ---------------------------------------------------------------------------

_RELATIONS = (Relation.NATIVE, Relation.PARTIAL, Relation.EXTERNAL)


def compute_summary_stats(records, intra, specs_of=_specs_of) -> dict:
    """The full statistical battery over performance records and intra-set MCDs.

    ``records`` are :class:`PerformanceRecord` rows, ``intra`` is a mapping of
    dataset name to within-set MCD, ``specs_of`` resolves a dataset name to its
    specialty set.
    """
    records = list(records)
    intra = dict(intra)
    report: dict = {}
    tests: list[dict] = []

    census = {rel.value: 0 for rel in _RELATIONS}
    for rec in records:
        census[rec.relation.value] += 1
    report["relation_census"] = census

    mcds = [rec.mcd for rec in records]

    # AUC and PPV against MCD, one regression per label.
    for section, fields in (
        ("ols_auc", ("auc_yes", "auc_no", "auc_maybe")),
        ("ols_ppv", ("ppv_yes", "ppv_no", "ppv_maybe")),
    ):
        block = {}
        for name in fields:
            values = [getattr(rec, name) for rec in records]
            fit = ols(mcds, values)
            block[name] = asdict(fit)
            tests.append(
                report_entry(
                    f"{section}_{name.split('_', 1)[1]}",
                    fit.slope,
                    [fit.n - 2],
                    fit.p_value,
                    {"x": mcds, "y": values},
                )
            )
        report[section] = block

    # MCD grouped by relation: means plus a one-way ANOVA.
    groups = {
        rel.value: [rec.mcd for rec in records if rec.relation is rel] for rel in _RELATIONS
    }
    report["mcd_by_relation"] = {
        rel: {"n": len(vals), "mean": float(np.mean(vals)) if vals else math.nan}
        for rel, vals in groups.items()
    }
    populated = [vals for vals in groups.values() if len(vals) >= 2]
    if len(populated) >= 2:
        fit = one_way_anova(populated)
        report["mcd_anova"] = asdict(fit)
        tests.append(
            report_entry(
                "mcd_one_way_anova",
                fit.f_statistic,
                [fit.df_between, fit.df_within],
                fit.p_value,
                groups,
            )
        )

    # Within-set MCDs against native train/test MCDs (pooled two-sample t-test).
    native = groups[Relation.NATIVE.value]
    intra_values = [intra[name] for name in sorted(intra)]
    if len(intra_values) >= 2 and len(native) >= 2:
        fit = t_test_two_sample(intra_values, native)
        report["intra_vs_native"] = {
            **asdict(fit),
            "intra_mean": float(np.mean(intra_values)),
            "native_mean": float(np.mean(native)),
            "method": "two_sample_pooled",
        }
        tests.append(
            report_entry(
                "intra_vs_native_t",
                fit.t_statistic,
                [fit.df],
                fit.p_value,
                {"intra": intra_values, "native": native},
            )
        )

    # Relation effect for single-specialty models: subjects x relations table of
    # macro AUC averaged over the test sets in each relation.
    single_models = sorted(
        {rec.train_name for rec in records if len(specs_of(rec.train_name)) == 1}
    )
    cells = []
    complete = bool(single_models)
    for model in single_models:
        row = []
        for rel in _RELATIONS:
            vals = [
                rec.macro_auc
                for rec in records
                if rec.train_name == model and rec.relation is rel
            ]
            row.append(float(np.mean(vals)) if vals else math.nan)
        cells.append(row)
        complete = complete and all(math.isfinite(v) for v in row)
    if complete and len(single_models) >= 2:
        table = np.asarray(cells)
        fit = rm_anova(table)
        report["relation_effect"] = {
            "models": single_models,
            "relations": [rel.value for rel in _RELATIONS],
            "cells": cells,
            "relation_means": {
                rel.value: float(table[:, j].mean()) for j, rel in enumerate(_RELATIONS)
            },
            "rm_anova": asdict(fit),
        }
        tests.append(
            report_entry(
                "relation_effect_rm_anova",
                fit.f_statistic,
                [fit.df_between, fit.df_within],
                fit.p_value,
                cells,
            )
        )

    # Training-diversity effect: test sets x number of training specialties.
    levels = sorted({len(specs_of(rec.train_name)) for rec in records})
    test_sets = sorted({rec.test_name for rec in records})
    cells = []
    complete = len(levels) >= 2
    for test_name in test_sets:
        row = []
        for level in levels:
            vals = [
                rec.macro_auc
                for rec in records
                if rec.test_name == test_name and len(specs_of(rec.train_name)) == level
            ]
            row.append(float(np.mean(vals)) if vals else math.nan)
        cells.append(row)
        complete = complete and all(math.isfinite(v) for v in row)
    if complete:
        table = np.asarray(cells)
        monotone = {
            test_name: bool(np.all(np.diff(table[i]) >= 0.0))
            for i, test_name in enumerate(test_sets)
        }
        fit = rm_anova(table)
        report["diversity_effect"] = {
            "test_sets": test_sets,
            "levels": levels,
            "cells": cells,
            "monotone_by_test": monotone,
            "all_monotone": all(monotone.values()),
            "rm_anova": asdict(fit),
        }
        tests.append(
            report_entry(
                "diversity_effect_rm_anova",
                fit.f_statistic,
                [fit.df_between, fit.df_within],
                fit.p_value,
                cells,
            )
        )

    report["tests"] = tests
    return report


# ---------------------------------------------------------------------------
# Reference tables.
# ---------------------------------------------------------------------------


def _fixture_text(name: str, fixture_dir=None) -> str:
    if fixture_dir:
        with open(os.path.join(fixture_dir, name), encoding="utf-8") as fh:
            return fh.read()
    return resources.files("semshift").joinpath("fixtures").joinpath(name).read_text("utf-8")


def _read_csv(text: str, expected: list) -> list:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != expected:
        raise ValueError(f"unexpected reference table header: {reader.fieldnames}")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if any(v is None or v == "" for v in row.values()):
            raise ValueError(f"malformed reference row at line {lineno}: {row}")
        rows.append(row)
    return rows


def load_reference_tables(fixture_dir=None):
    """The bundled reference data: 49 performance rows and 14 within-set MCDs.

    Relations are recomputed from the dataset names rather than stored.
    """
    auc_rows = _read_csv(
        _fixture_text("pair_auc.csv", fixture_dir),
        ["train_set", "test_set", "mcd", "auc_yes", "auc_no", "auc_maybe"],
    )
    ppv_rows = _read_csv(
        _fixture_text("pair_ppv.csv", fixture_dir),
        ["train_set", "test_set", "mcd", "ppv_yes", "ppv_no", "ppv_maybe"],
    )
    intra_rows = _read_csv(
        _fixture_text("intra_mcd.csv", fixture_dir), ["dataset", "intra_mcd"]
    )

    ppv_by_pair = {(r["train_set"], r["test_set"]): r for r in ppv_rows}
    records = []
    for row in auc_rows:
        key = (row["train_set"], row["test_set"])
        if key not in ppv_by_pair:
            raise ValueError(f"reference tables disagree: no PPV row for {key}")
        ppv = ppv_by_pair[key]
        if float(ppv["mcd"]) != float(row["mcd"]):
            raise ValueError(f"reference tables disagree on MCD for {key}")
        train_specs, _ = parse_dataset_name(row["train_set"])
        test_specs, _ = parse_dataset_name(row["test_set"])
        records.append(
            PerformanceRecord(
                train_name=row["train_set"],
                test_name=row["test_set"],
                relation=relation(train_specs, test_specs),
                mcd=float(row["mcd"]),
                auc_yes=float(row["auc_yes"]),
                auc_no=float(row["auc_no"]),
                auc_maybe=float(row["auc_maybe"]),
                ppv_yes=float(ppv["ppv_yes"]),
                ppv_no=float(ppv["ppv_no"]),
                ppv_maybe=float(ppv["ppv_maybe"]),
            )
        )
    intra = {r["dataset"]: float(r["intra_mcd"]) for r in intra_rows}
    return records, intra


def reproduce_reference_stats(fixture_dir=None) -> dict:
    """Recompute the statistical battery from the bundled reference tables."""
    records, intra = load_reference_tables(fixture_dir)
    return compute_summary_stats(records, intra)


# ---------------------------------------------------------------------------
# Live pipeline. Each stage persists its artifacts under the output directory
# and can reload its prerequisites, so the CLI can run stages one at a time.
# ---------------------------------------------------------------------------


@dataclass
class ExperimentResult:
    records: list = field(default_factory=list)
    intra: list = field(default_factory=list)  # DistanceSummary rows
    stats: dict = field(default_factory=dict)
    out_dir: str = ""


def _slug(name: str) -> str:
    return name.replace(" ", "_")


def _config_digest(cfg: ExperimentConfig) -> str:
    return digest_inputs(
        {
            "corpus": list(cfg.corpus_paths),
            "lexicons": dict(cfg.lexicon_paths),
            "labels": cfg.labels_path,
            "embedding": asdict(cfg.embedding),
            "train": asdict(cfg.train),
            "train_fraction": cfg.train_fraction,
            "seed": cfg.seed,
        }
    )


def _write_status(out_dir: str, state: str, **extra) -> None:
    payload = {"state": state, **extra}
    with open(os.path.join(out_dir, "status.json"), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")


def _write_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _derived_seed(base: int, tag: str) -> int:
    digest = hashlib.blake2b(f"{base}:{tag}".encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def read_label_file(path) -> dict:
    """CSV of sentence_id,label; returns the id -> label mapping."""
    labels: dict[str, str] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["sentence_id", "label"]:
            raise ValueError(f"label file must have header sentence_id,label, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 2:
                raise ValueError(f"{path}:{lineno}: malformed label row {row}")
            sid, label = row
            if label not in CLASS_ORDER:
                raise ValueError(f"{path}:{lineno}: unknown label {label!r}")
            labels[sid] = label
    return labels


def _records_path(out_dir):
    return os.path.join(out_dir, "records.jsonl")


def _embeddings_path(out_dir):
    return os.path.join(out_dir, "embeddings.emb")


def _load_records(out_dir):
    return read_records(_records_path(out_dir))


def load_cohorts_dir(out_dir) -> list:
    cohort_dir = os.path.join(out_dir, "cohorts")
    cohorts = []
    for name in sorted(os.listdir(cohort_dir)):
        if name.endswith(".json"):
            cohorts.append(load_cohort(os.path.join(cohort_dir, name)))
    return cohorts


def load_heads_dir(out_dir, cohorts=None) -> dict:
    if cohorts is None:
        cohorts = load_cohorts_dir(out_dir)
    heads = {}
    for cohort in cohorts:
        if cohort.role != "train":
            continue
        head, _ = load_head(os.path.join(out_dir, "heads", _slug(cohort.name) + ".json"))
        heads[cohort.name] = head
    return heads


def _labels_by_id(records) -> dict:
    labels = {}
    for rec in records:
        if rec.label is not None:
            labels.setdefault(rec.sentence_id, rec.label)
    return labels


def stage_extract(cfg: ExperimentConfig, out_dir: str) -> list:
    """Extraction across all corpora and specialty lexicons, labels applied."""
    docs = []
    for path in cfg.corpus_paths:
        docs.extend(load_corpus(path))
    labels = read_label_file(cfg.labels_path) if cfg.labels_path else {}
    records = []
    summaries = {}
    for specialty in sorted(cfg.lexicon_paths):
        lexicon = Lexicon.load(cfg.lexicon_paths[specialty], specialty)
        result = extract_sentences(docs, lexicon)
        summaries[specialty] = result.summary()
        for rec in result.records:
            label = labels.get(rec.sentence_id)
            records.append(rec.with_label(label) if label else rec)
    write_records(records, _records_path(out_dir))
    _write_json(os.path.join(out_dir, "extraction_summary.json"), summaries)
    return records


def stage_embed(cfg: ExperimentConfig, out_dir: str, records=None) -> EmbeddingMatrix:
    """Embed the unique sentences via the configured source; persist the matrix."""
    if records is None:
        records = _load_records(out_dir)
    texts: list[str] = []
    ids: list[str] = []
    seen: set[str] = set()
    for rec in records:
        if rec.sentence_id in seen:
            continue
        seen.add(rec.sentence_id)
        ids.append(rec.sentence_id)
        texts.append(rec.text)
    source = cfg.embedding
    if source.kind == "test":
        matrix = TestEmbedder(source.seed, source.dim).matrix_for(texts, ids)
    elif source.kind == "file":
        matrix = load_embeddings(source.path).subset(ids)
    else:
        matrix = fetch_embeddings(texts, source.endpoint, ids=ids)
    save_embeddings(matrix, _embeddings_path(out_dir))
    return matrix


def stage_cohorts(cfg: ExperimentConfig, out_dir: str, records=None) -> list:
    if records is None:
        records = _load_records(out_dir)
    labeled = [r for r in records if r.label is not None]
    cohorts = build_cohorts(labeled, cfg.train_fraction, cfg.seed)
    cohort_dir = os.path.join(out_dir, "cohorts")
    os.makedirs(cohort_dir, exist_ok=True)
    for cohort in cohorts:
        save_cohort(cohort, os.path.join(cohort_dir, _slug(cohort.name) + ".json"))
    return cohorts


def stage_train(cfg: ExperimentConfig, out_dir: str, cohorts=None, matrix=None, records=None) -> dict:
    """Train one head per train cohort; deterministic per-cohort seeds."""
    if records is None:
        records = _load_records(out_dir)
    if cohorts is None:
        cohorts = load_cohorts_dir(out_dir)
    if matrix is None:
        matrix = load_embeddings(_embeddings_path(out_dir))
    labels_by_id = _labels_by_id(records)
    heads = {}
    head_dir = os.path.join(out_dir, "heads")
    report_dir = os.path.join(out_dir, "train_reports")
    os.makedirs(head_dir, exist_ok=True)
    os.makedirs(report_dir, exist_ok=True)
    for cohort in sorted((c for c in cohorts if c.role == "train"), key=lambda c: c.name):
        sub = matrix.subset(cohort.sentence_ids)
        labels = [labels_by_id[sid] for sid in cohort.sentence_ids]
        train_cfg = TrainConfig(
            learning_rate=cfg.train.learning_rate,
            epochs=cfg.train.epochs,
            batch_size=cfg.train.batch_size,
            validation_fraction=cfg.train.validation_fraction,
            seed=_derived_seed(cfg.train.seed, cohort.name),
            l2_penalty=cfg.train.l2_penalty,
        )
        report = train_head(sub.vectors, labels, train_cfg)
        heads[cohort.name] = report.head
        save_head(
            report.head,
            os.path.join(head_dir, _slug(cohort.name) + ".json"),
            report.selected_epoch,
        )
        _write_json(
            os.path.join(report_dir, _slug(cohort.name) + ".json"),
            {
                "cohort": cohort.name,
                "selected_epoch": report.selected_epoch,
                "train_losses": report.train_losses,
                "val_losses": report.val_losses,
            },
        )
    return heads


def stage_evaluate(cfg: ExperimentConfig, out_dir: str, cohorts=None, matrix=None, records=None, heads=None):
    """All train x test evaluations plus within-set MCDs; persists both CSVs."""
    if records is None:
        records = _load_records(out_dir)
    if cohorts is None:
        cohorts = load_cohorts_dir(out_dir)
    if matrix is None:
        matrix = load_embeddings(_embeddings_path(out_dir))
    if heads is None:
        heads = load_heads_dir(out_dir, cohorts)
    labels_by_id = _labels_by_id(records)
    trains = sorted((c for c in cohorts if c.role == "train"), key=lambda c: c.name)
    tests = sorted((c for c in cohorts if c.role == "test"), key=lambda c: c.name)
    performance = []
    distances = []
    for train_cohort in trains:
        head = heads[train_cohort.name]
        train_sub = matrix.subset(train_cohort.sentence_ids)
        for test_cohort in tests:
            test_sub = matrix.subset(test_cohort.sentence_ids)
            rel = relation(train_cohort.specialties, test_cohort.specialties)
            pair_mcd = mcd(train_sub, test_sub)
            probs = head.predict_proba_batch(test_sub.vectors)
            truth = [labels_by_id[sid] for sid in test_cohort.sentence_ids]
            per_auc = {}
            per_ppv = {}
            for j, cls in enumerate(CLASS_ORDER):
                positives = [t == cls for t in truth]
                per_auc[cls] = auc(probs[:, j], positives)
                per_ppv[cls] = ppv_at_recall(probs[:, j], positives, RECALL_FLOOR)
            performance.append(
                PerformanceRecord(
                    train_name=train_cohort.name,
                    test_name=test_cohort.name,
                    relation=rel,
                    mcd=pair_mcd,
                    auc_yes=per_auc["Yes"],
                    auc_no=per_auc["No"],
                    auc_maybe=per_auc["Maybe"],
                    ppv_yes=per_ppv["Yes"],
                    ppv_no=per_ppv["No"],
                    ppv_maybe=per_ppv["Maybe"],
                )
            )
            distances.append(
                DistanceSummary(
                    train_name=train_cohort.name,
                    test_name=test_cohort.name,
                    pair_count=pair_count(len(train_sub), len(test_sub)),
                    mcd=pair_mcd,
                    relation=rel,
                )
            )
    intra_rows = []
    for cohort in sorted(cohorts, key=lambda c: (c.role, c.name)):
        sub = matrix.subset(cohort.sentence_ids)
        intra_rows.append(
            DistanceSummary(
                train_name=cohort.name,
                test_name=cohort.name,
                pair_count=pair_count(len(sub)),
                mcd=intra_mcd(sub),
                relation=Relation.INTRA,
            )
        )
    write_performance_csv(performance, os.path.join(out_dir, "performance.csv"))
    write_distance_csv(distances + intra_rows, os.path.join(out_dir, "distances.csv"))
    return performance, intra_rows


def stage_stats(out_dir: str, performance, intra_rows, cohorts) -> dict:
    specialties_by_name = {c.name: c.specialties for c in cohorts}
    stats = compute_summary_stats(
        performance,
        {row.train_name: row.mcd for row in intra_rows},
        specs_of=lambda name: specialties_by_name[name],
    )
    _write_json(os.path.join(out_dir, "stats.json"), stats)
    return stats


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """The full pipeline; deterministic given the config, artifacts persisted."""
    out_dir = cfg.out_dir
    os.makedirs(out_dir, exist_ok=True)
    digest = _config_digest(cfg)

    def stage(name, fn):
        try:
            return fn()
        except Exception as exc:
            _write_status(out_dir, "failed", stage=name, config_digest=digest)
            raise ExperimentError(name, exc) from exc

    stage("validate", cfg.validate_paths)
    _write_status(out_dir, "running", config_digest=digest)
    records = stage("extract", lambda: stage_extract(cfg, out_dir))
    matrix = stage("embed", lambda: stage_embed(cfg, out_dir, records))
    cohorts = stage("cohorts", lambda: stage_cohorts(cfg, out_dir, records))
    heads = stage("train", lambda: stage_train(cfg, out_dir, cohorts, matrix, records))
    performance, intra_rows = stage(
        "evaluate", lambda: stage_evaluate(cfg, out_dir, cohorts, matrix, records, heads)
    )
    stats = stage("stats", lambda: stage_stats(out_dir, performance, intra_rows, cohorts))
    _write_status(out_dir, "complete", config_digest=digest)
    return ExperimentResult(records=performance, intra=intra_rows, stats=stats, out_dir=out_dir)


# ---------------------------------------------------------------------------
# Figure/table data bundles (no plotting).
# ---------------------------------------------------------------------------


def write_report(stats: dict, records, out_dir: str) -> None:
    """Emit the per-figure data files derived from a stats report."""
    os.makedirs(out_dir, exist_ok=True)
    if "relation_effect" in stats:
        block = stats["relation_effect"]
        with open(os.path.join(out_dir, "relation_effect.csv"), "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["model", "relation", "mean_macro_auc"])
            for i, model in enumerate(block["models"]):
                for j, rel in enumerate(block["relations"]):
                    writer.writerow([model, rel, repr(block["cells"][i][j])])
    if "diversity_effect" in stats:
        block = stats["diversity_effect"]
        with open(os.path.join(out_dir, "diversity_effect.csv"), "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["test_set", "train_specialty_count", "mean_macro_auc"])
            for i, test_name in enumerate(block["test_sets"]):
                for j, level in enumerate(block["levels"]):
                    writer.writerow([test_name, level, repr(block["cells"][i][j])])
    with open(os.path.join(out_dir, "auc_vs_mcd.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["train_set", "test_set", "relation", "mcd", "label", "auc", "ppv"])
        for rec in records:
            for cls in CLASS_ORDER:
                writer.writerow(
                    [
                        rec.train_name,
                        rec.test_name,
                        rec.relation.value,
                        repr(rec.mcd),
                        cls,
                        repr(getattr(rec, f"auc_{cls.lower()}")),
                        repr(getattr(rec, f"ppv_{cls.lower()}")),
                    ]
                )
    _write_json(
        os.path.join(out_dir, "regressions.json"),
        {"ols_auc": stats.get("ols_auc", {}), "ols_ppv": stats.get("ols_ppv", {})},
    )
    _write_json(
        os.path.join(out_dir, "mcd_groups.json"),
        {
            "mcd_by_relation": stats.get("mcd_by_relation", {}),
            "mcd_anova": stats.get("mcd_anova"),
            "intra_vs_native": stats.get("intra_vs_native"),
        },
    )
