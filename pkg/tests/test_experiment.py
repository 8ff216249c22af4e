import hashlib
import json
import os
import shutil

import numpy as np
import pytest

from semshift.config import ConfigError, load_config
from semshift.cohorts import Relation
from semshift.experiment import (
    ExperimentError,
    compute_summary_stats,
    load_reference_tables,
    parse_dataset_name,
    reproduce_reference_stats,
    run_experiment,
    write_report,
)

from synth import write_corpus_tree


class TestParseDatasetName:
    def test_aliases(self):
        specs, role = parse_dataset_name("cancer train")
        assert specs == frozenset({"oncology"}) and role == "train"
        specs, _ = parse_dataset_name("cardiac pulmonary test")
        assert specs == frozenset({"cardiology", "pulmonology"})

    def test_all_three(self):
        specs, role = parse_dataset_name("all three test")
        assert specs == frozenset({"oncology", "cardiology", "pulmonology"}) and role == "test"

    def test_plain_specialty_tokens(self):
        specs, _ = parse_dataset_name("alpha beta train")
        assert specs == frozenset({"alpha", "beta"})

    def test_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_dataset_name("nonsense")


class TestReferenceTables:
    def test_shape_and_relations(self):
        records, intra = load_reference_tables()
        assert len(records) == 49
        assert len(intra) == 14
        census = {}
        for rec in records:
            census[rec.relation] = census.get(rec.relation, 0) + 1
        assert census == {Relation.NATIVE: 7, Relation.PARTIAL: 30, Relation.EXTERNAL: 12}

    def test_external_fixture_dir(self, tmp_path):
        import semshift

        src = os.path.join(os.path.dirname(semshift.__file__), "fixtures")
        for name in os.listdir(src):
            shutil.copy(os.path.join(src, name), tmp_path / name)
        records, intra = load_reference_tables(str(tmp_path))
        assert len(records) == 49 and len(intra) == 14

    def test_malformed_fixture_names_row(self, tmp_path):
        import semshift

        src = os.path.join(os.path.dirname(semshift.__file__), "fixtures")
        for name in os.listdir(src):
            shutil.copy(os.path.join(src, name), tmp_path / name)
        target = tmp_path / "pair_auc.csv"
        lines = target.read_text().splitlines()
        lines[3] = "cancer train,cardiac test,,0.5,0.5,0.5"
        target.write_text("\n".join(lines) + "\n")
        with pytest.raises(ValueError, match="line 4"):
            load_reference_tables(str(tmp_path))

    def test_reproduction_report_structure(self):
        stats = reproduce_reference_stats()
        assert stats["relation_census"] == {"native": 7, "partial": 30, "external": 12}
        test_names = {entry["test"] for entry in stats["tests"]}
        assert {
            "ols_auc_yes",
            "ols_ppv_no",
            "mcd_one_way_anova",
            "intra_vs_native_t",
            "relation_effect_rm_anova",
            "diversity_effect_rm_anova",
        } <= test_names
        for entry in stats["tests"]:
            assert set(entry) == {"test", "statistic", "df", "p_value", "inputs_digest"}
            assert 0.0 < entry["p_value"] <= 1.0


class TestConfig:
    def test_parse_and_overrides(self, tmp_path):
        config_path = write_corpus_tree(str(tmp_path), seed=3)
        cfg = load_config(config_path)
        assert cfg.seed == 3
        assert cfg.embedding.kind == "test" and cfg.embedding.dim == 48
        assert cfg.train.epochs == 60
        assert set(cfg.lexicon_paths) == {"alpha", "beta", "gamma"}
        overridden = load_config(config_path, seed_override=9, out_override=str(tmp_path / "x"))
        assert overridden.seed == 9
        assert overridden.out_dir == str(tmp_path / "x")
        # train/embedding seeds fall back to the run seed unless given
        assert overridden.train.seed == 9

    def test_relative_paths_resolve_against_config_dir(self, tmp_path):
        config_path = write_corpus_tree(str(tmp_path), seed=0)
        cfg = load_config(config_path)
        for path in cfg.corpus_paths:
            assert os.path.isabs(path) and os.path.exists(path)

    def test_missing_lexicon_fails_before_any_compute(self, tmp_path):
        config_path = write_corpus_tree(str(tmp_path), seed=0)
        os.remove(tmp_path / "lexicon_beta.txt")
        cfg = load_config(config_path)
        with pytest.raises(ExperimentError) as err:
            run_experiment(cfg)
        assert err.value.stage == "validate"
        assert not os.path.exists(os.path.join(cfg.out_dir, "records.jsonl"))

    def test_bad_embedding_kind(self, tmp_path):
        config_path = write_corpus_tree(str(tmp_path), seed=0)
        text = open(config_path).read().replace("kind = test", "kind = mystery")
        open(config_path, "w").write(text)
        with pytest.raises(ConfigError, match="unknown embedding kind"):
            load_config(config_path)

    def test_embedding_source_validation(self):
        from semshift.config import EmbeddingSourceConfig

        with pytest.raises(ConfigError, match="dim"):
            EmbeddingSourceConfig(kind="test", dim=1)
        with pytest.raises(ConfigError, match="endpoint"):
            EmbeddingSourceConfig(kind="service", endpoint="not-a-url")
        with pytest.raises(ConfigError, match="path"):
            EmbeddingSourceConfig(kind="file", path="")
        EmbeddingSourceConfig(kind="service", endpoint="http://127.0.0.1:9")
        EmbeddingSourceConfig(kind="test", dim=2)


def _tree_digests(root):
    digests = {}
    for dirpath, _dirnames, filenames in os.walk(root):
        for name in filenames:
            path = os.path.join(dirpath, name)
            rel = os.path.relpath(path, root)
            digests[rel] = hashlib.md5(open(path, "rb").read()).hexdigest()
    return digests


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    base = tmp_path_factory.mktemp("synthcorpus")
    write_corpus_tree(str(base), seed=0)
    return base


class TestRunExperiment:
    def test_full_run_census_and_artifacts(self, corpus_dir, tmp_path):
        cfg = load_config(str(corpus_dir / "experiment.ini"), out_override=str(tmp_path / "run"))
        result = run_experiment(cfg)
        assert len(result.records) == 49
        assert result.stats["relation_census"] == {"native": 7, "partial": 30, "external": 12}
        assert len(result.intra) == 14
        out = result.out_dir
        for artifact in (
            "records.jsonl",
            "extraction_summary.json",
            "embeddings.emb",
            "performance.csv",
            "distances.csv",
            "stats.json",
            "status.json",
        ):
            assert os.path.exists(os.path.join(out, artifact)), artifact
        assert len(os.listdir(os.path.join(out, "cohorts"))) == 14
        assert len(os.listdir(os.path.join(out, "heads"))) == 7
        status = json.load(open(os.path.join(out, "status.json")))
        assert status["state"] == "complete"

    def test_rerun_is_byte_identical(self, corpus_dir, tmp_path):
        cfg_a = load_config(str(corpus_dir / "experiment.ini"), out_override=str(tmp_path / "a"))
        cfg_b = load_config(str(corpus_dir / "experiment.ini"), out_override=str(tmp_path / "b"))
        run_experiment(cfg_a)
        run_experiment(cfg_b)
        assert _tree_digests(tmp_path / "a") == _tree_digests(tmp_path / "b")

    def test_deleted_artifacts_regenerate_identically(self, corpus_dir, tmp_path):
        cfg = load_config(str(corpus_dir / "experiment.ini"), out_override=str(tmp_path / "run"))
        run_experiment(cfg)
        before = _tree_digests(cfg.out_dir)
        os.remove(os.path.join(cfg.out_dir, "performance.csv"))
        os.remove(os.path.join(cfg.out_dir, "embeddings.emb"))
        run_experiment(cfg)
        assert _tree_digests(cfg.out_dir) == before

    def test_failed_stage_marks_status(self, corpus_dir, tmp_path):
        cfg = load_config(str(corpus_dir / "experiment.ini"), out_override=str(tmp_path / "run"))
        # corrupt the labels so cohort construction fails mid-pipeline
        bad_labels = tmp_path / "labels.csv"
        bad_labels.write_text("sentence_id,label\n")
        cfg.labels_path = str(bad_labels)
        with pytest.raises(ExperimentError) as err:
            run_experiment(cfg)
        assert err.value.stage == "cohorts"
        status = json.load(open(os.path.join(cfg.out_dir, "status.json")))
        assert status["state"] == "failed" and status["stage"] == "cohorts"

    def test_stats_match_performance_csv(self, corpus_dir, tmp_path):
        from semshift.metrics import read_performance_csv

        cfg = load_config(str(corpus_dir / "experiment.ini"), out_override=str(tmp_path / "run"))
        result = run_experiment(cfg)
        on_disk = read_performance_csv(os.path.join(cfg.out_dir, "performance.csv"))
        assert on_disk == result.records

    def test_write_report_outputs(self, corpus_dir, tmp_path):
        cfg = load_config(str(corpus_dir / "experiment.ini"), out_override=str(tmp_path / "run"))
        result = run_experiment(cfg)
        report_dir = os.path.join(cfg.out_dir, "report")
        write_report(result.stats, result.records, report_dir)
        for name in (
            "relation_effect.csv",
            "diversity_effect.csv",
            "auc_vs_mcd.csv",
            "regressions.json",
            "mcd_groups.json",
        ):
            assert os.path.exists(os.path.join(report_dir, name)), name
        rows = open(os.path.join(report_dir, "auc_vs_mcd.csv")).read().splitlines()
        assert len(rows) == 1 + 49 * 3


class TestComputeSummaryStatsEdges:
    def test_two_specialty_data_still_reports(self):
        from semshift.metrics import PerformanceRecord

        records = []
        names = {"a": frozenset({"a"}), "b": frozenset({"b"}), "a b": frozenset({"a", "b"})}
        rng = np.random.default_rng(0)
        for train, tspec in names.items():
            for test, uspec in names.items():
                rel = (
                    Relation.NATIVE
                    if tspec == uspec
                    else (Relation.EXTERNAL if not tspec & uspec else Relation.PARTIAL)
                )
                records.append(
                    PerformanceRecord(
                        train_name=f"{train} train",
                        test_name=f"{test} test",
                        relation=rel,
                        mcd=float(rng.uniform(0.2, 0.3)),
                        auc_yes=float(rng.uniform(0.6, 1.0)),
                        auc_no=float(rng.uniform(0.6, 1.0)),
                        auc_maybe=float(rng.uniform(0.6, 1.0)),
                        ppv_yes=0.5,
                        ppv_no=0.5,
                        ppv_maybe=0.5,
                    )
                )
        intra = {f"{n} train": 0.25 for n in names}
        stats = compute_summary_stats(records, intra)
        assert stats["relation_census"] == {"native": 3, "partial": 4, "external": 2}
        assert "diversity_effect" in stats
