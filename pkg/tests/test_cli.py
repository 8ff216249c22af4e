import json
import os

import pytest

from semshift.cli import main

from synth import write_corpus_tree


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    base = tmp_path_factory.mktemp("clicorpus")
    config_path = write_corpus_tree(str(base), seed=1)
    return base, config_path


def test_stagewise_pipeline_matches_full_run(corpus, capsys):
    base, config_path = corpus
    args = ["--config", config_path, "--out", str(base / "stagewise")]
    for command in ("extract", "embed", "cohorts", "train", "evaluate", "stats", "report"):
        assert main(args + [command]) == 0
    out = capsys.readouterr().out
    assert "extracted" in out and "trained 7 heads" in out

    assert main(["--config", config_path, "--out", str(base / "full"), "run"]) == 0
    stage_perf = open(base / "stagewise" / "performance.csv").read()
    full_perf = open(base / "full" / "performance.csv").read()
    assert stage_perf == full_perf


def test_distances_command(corpus, capsys):
    base, config_path = corpus
    out_dir = str(base / "stagewise")
    assert main(["--config", config_path, "--out", out_dir, "distances"]) == 0
    lines = open(os.path.join(out_dir, "distances.csv")).read().splitlines()
    assert lines[0] == "train_name,test_name,relation,pair_count,mcd"
    assert len(lines) == 1 + 49 + 14


def test_project_pca_and_tsne(corpus, capsys):
    base, config_path = corpus
    out_dir = str(base / "stagewise")
    emb = os.path.join(out_dir, "embeddings.emb")
    records = os.path.join(out_dir, "records.jsonl")
    pca_csv = os.path.join(out_dir, "pca.csv")
    assert (
        main(
            [
                "--config",
                config_path,
                "project",
                "--method",
                "pca",
                "--input",
                emb,
                "--records",
                records,
                "--output",
                pca_csv,
            ]
        )
        == 0
    )
    header = open(pca_csv).read().splitlines()[0]
    assert header == "sentence_id,x,y,note_type,specialty"

    tsne_csv = os.path.join(out_dir, "tsne.csv")
    assert (
        main(
            [
                "--config",
                config_path,
                "--seed",
                "5",
                "project",
                "--method",
                "tsne",
                "--input",
                emb,
                "--records",
                records,
                "--output",
                tsne_csv,
                "--iterations",
                "60",
                "--perplexity",
                "10",
            ]
        )
        == 0
    )
    assert len(open(tsne_csv).read().splitlines()) == len(open(pca_csv).read().splitlines())


def test_reproduce_command(tmp_path, capsys):
    report_path = str(tmp_path / "reference_stats.json")
    assert main(["reproduce", "--json", report_path]) == 0
    out = capsys.readouterr().out
    assert "relation census" in out
    assert "mcd means" in out
    stats = json.load(open(report_path))
    assert stats["relation_census"] == {"native": 7, "partial": 30, "external": 12}


def test_missing_config_is_an_error():
    with pytest.raises(SystemExit):
        main(["extract"])
