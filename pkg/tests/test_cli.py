import csv
import io
import json

import numpy as np
import pytest

from helpers import make_dataset
from mtmeta import cli
from mtmeta.cli import main
from mtmeta.data_model import DA_HEADER, load_score_matrix


def run(*argv):
    return main([str(a) for a in argv])


def csv_rows(path):
    text = "".join(line for line in path.read_text().splitlines(keepends=True)
                   if not line.startswith("#"))
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    return make_dataset(tmp_path_factory.mktemp("data"), "xx-yy", n_systems=5, n_segments=30)


@pytest.fixture(scope="module")
def small(tmp_path_factory):
    return make_dataset(tmp_path_factory.mktemp("small"), "aa-bb", n_systems=3, n_segments=20,
                        seed=1, outlier=False)


def write_da_and_scores(root, da_by_system, metric_by_system=None, n_segments=4):
    """DA rows whose per-system mean is the given value, plus a score matrix."""
    lines = ["\t".join(DA_HEADER)]
    for s, v in da_by_system.items():
        for i, dz in enumerate(np.linspace(-0.1, 0.1, n_segments)):
            lines.append(f"{s}\t{i}\t\t\t{float(v + dz)!r}")
    (root / "da.tsv").write_text("\n".join(lines) + "\n")
    rows = ["metric\tsystem\tlevel\tsegment\tscore"]
    for s, v in (metric_by_system or da_by_system).items():
        rows.append(f"m\t{s}\tsys\t\t{v!r}")
    (root / "scores.tsv").write_text("\n".join(rows) + "\n")
    return root / "da.tsv", root / "scores.tsv"


# --------------------------------------------------------------------------
# score

def test_score_two_systems(tmp_path, dataset):
    out = tmp_path / "scores.tsv"
    systems = sorted((dataset / "systems").glob("*.txt"))[:2]
    assert run("score", "--reference", dataset / "reference.txt",
               *[x for s in systems for x in ("--system", s)], "--output", out) == 0
    matrix = load_score_matrix(out)
    assert len(matrix.system_scores) == 6
    assert matrix.metrics == ("BLEU", "TER", "chrF")
    assert out.read_text().startswith("# tool: mtmeta")


def test_score_missing_reference(tmp_path, dataset, capsys):
    missing = tmp_path / "nope.txt"
    assert run("score", "--reference", missing, "--system", dataset / "systems" / "sys0.txt") == 2
    assert str(missing) in capsys.readouterr().err


def test_score_is_deterministic(tmp_path, dataset):
    a, b = tmp_path / "a.tsv", tmp_path / "b.tsv"
    assert run("score", "--data", dataset, "--output", a) == 0
    assert run("score", "--data", dataset, "--output", b) == 0
    assert a.read_bytes() == b.read_bytes()


def test_score_to_stdout_with_metric_subset(dataset, capsys):
    assert run("score", "--data", dataset, "--metrics", "BLEU", "--segment-level", "") == 0
    body = [line for line in capsys.readouterr().out.splitlines() if not line.startswith("#")]
    assert len(body) == 1 + 5 and all(line.startswith("BLEU") for line in body[1:])


# --------------------------------------------------------------------------
# outliers

def test_outliers_flags_the_bad_system(tmp_path, dataset):
    out = tmp_path / "o.json"
    assert run("outliers", "--data", dataset, "--output", out) == 0
    [report] = json.loads(out.read_text())["reports"]
    assert report["outliers"] == ["sys4"]
    assert report["language_pair"] == "xx-yy"


def test_outliers_constant_scores(tmp_path):
    da, _ = write_da_and_scores(tmp_path, {f"s{i}": 0.3 for i in range(5)})
    out = tmp_path / "o.json"
    assert run("outliers", "--da", da, "--output", out) == 0
    assert json.loads(out.read_text())["reports"][0]["outliers"] == []


def test_outlier_cutoff_monotone(tmp_path):
    rng = np.random.default_rng(4)
    da, _ = write_da_and_scores(tmp_path, {f"s{i}": float(v) for i, v in
                                           enumerate(rng.standard_t(2, 25))})
    flagged = {}
    for cutoff in (1.0, 2.5):
        out = tmp_path / f"o{cutoff}.csv"
        assert run("outliers", "--da", da, "--outlier-cutoff", cutoff,
                   "--format", "csv", "--output", out) == 0
        flagged[cutoff] = {r["system"] for r in csv_rows(out) if r["outlier"] == "true"}
    assert flagged[2.5] <= flagged[1.0]
    assert flagged[2.5] < flagged[1.0]


# --------------------------------------------------------------------------
# correlate

def test_correlate_metric_equal_to_da(tmp_path):
    values = {f"s{i}": 0.1 * i ** 1.5 for i in range(10)}
    da, scores = write_da_and_scores(tmp_path, values)
    out = tmp_path / "out"
    assert run("correlate", "--da", da, "--scores", scores, "--window", 4, "--window", 8,
               "--output-dir", out) == 0
    for row in csv_rows(out / "correlations.csv"):
        assert float(row["r"]) == pytest.approx(1.0, abs=1e-12)
    assert len(csv_rows(out / "window-4.csv")) == 10 - 3
    assert len(csv_rows(out / "window-8.csv")) == 10 - 7
    assert len(csv_rows(out / "topn.csv")) == 10 - 3


def test_correlate_native_scores_and_json(tmp_path, dataset):
    out = tmp_path / "out"
    assert run("correlate", "--data", dataset, "--format", "json", "--output-dir", out,
               "--subsample-size", 4, "--subsample-trials", 20, "--seed", 3) == 0
    rows = json.loads((out / "correlations.json").read_text())["rows"]
    conditions = {(r["metric"], r["condition"]) for r in rows}
    assert ("TER", "without-outliers") in conditions
    # the outlier is worst by DA and by every metric, so oriented r is positive
    assert all(r["r"] > 0 for r in rows if r["condition"] == "all")
    sub = json.loads((out / "subsample.json").read_text())
    assert sub["provenance"]["seed"] == 3


def test_correlate_subsample_needs_seed(tmp_path, dataset):
    assert run("correlate", "--data", dataset, "--subsample-size", 4,
               "--output-dir", tmp_path) == 2


# --------------------------------------------------------------------------
# compare

def test_compare_three_systems(tmp_path, small):
    out = tmp_path / "out"
    assert run("compare", "--data", small, "--seed", 1, "--bootstrap-samples", 200,
               "--output-dir", out) == 0
    rows = csv_rows(out / "decisions.csv")
    per_metric = {}
    for r in rows:
        per_metric[r["metric"]] = per_metric.get(r["metric"], 0) + 1
    assert per_metric == {"BLEU": 3, "TER": 3, "chrF": 3}
    agreement = json.loads((out / "agreement.json").read_text())
    assert agreement["total_pairs"] == 3


def test_compare_is_deterministic(tmp_path, small):
    for name in ("a", "b"):
        assert run("compare", "--data", small, "--seed", 9, "--bootstrap-samples", 200,
                   "--output-dir", tmp_path / name) == 0
    for f in ("decisions.csv", "summary.json", "agreement.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_compare_requires_seed_for_bootstrap(tmp_path, small, capsys):
    assert run("compare", "--data", small, "--output-dir", tmp_path) == 2
    assert "--seed" in capsys.readouterr().err
    # no bootstrap metric selected: no seed needed
    assert run("compare", "--data", small, "--metrics", "chrF", "--output-dir", tmp_path) == 0


# --------------------------------------------------------------------------
# report

def test_report_summary(tmp_path, dataset):
    out = tmp_path / "out"
    assert run("report", "--data", dataset, "--seed", 2, "--bootstrap-samples", 200,
               "--output-dir", out) == 0
    summary = (out / "summary.txt").read_text()
    assert "xx-yy: 5 systems, outliers: sys4" in summary
    assert "r(all)" in summary and "r(-out)" in summary
    assert "winners (all systems)" in summary
    assert "type-1 (miss)" in summary
    report = json.loads((out / "report.json").read_text())
    assert report["totals"]["errors"]["BLEU"]["pairs"] == 10


def test_report_empty_metric_selection(tmp_path, dataset):
    assert run("report", "--data", dataset, "--metrics", "", "--seed", 1,
               "--output-dir", tmp_path) == 2


def test_report_cache_equivalence(tmp_path, dataset):
    args = ["report", "--data", dataset, "--seed", 5, "--bootstrap-samples", 200,
            "--cache-dir", tmp_path / "cache"]
    assert run(*args, "--output-dir", tmp_path / "fresh") == 0
    cached = list((tmp_path / "cache").glob("*.json"))
    assert len(cached) == 1
    assert run(*args, "--output-dir", tmp_path / "again") == 0
    assert (tmp_path / "fresh" / "report.json").read_bytes() == \
        (tmp_path / "again" / "report.json").read_bytes()
    assert run("report", "--data", dataset, "--seed", 5, "--bootstrap-samples", 200,
               "--output-dir", tmp_path / "nocache") == 0
    assert (tmp_path / "nocache" / "report.json").read_bytes() == \
        (tmp_path / "fresh" / "report.json").read_bytes()


# --------------------------------------------------------------------------
# configuration, provenance and exit codes

def test_config_file_and_flag_override(tmp_path, dataset):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# outlier settings\noutlier-cutoff = 1000\nformat = csv\n")
    out = tmp_path / "o.csv"
    assert run("outliers", "--config", cfg, "--data", dataset, "--output", out) == 0
    assert not any(r["outlier"] == "true" for r in csv_rows(out))
    assert run("outliers", "--config", cfg, "--data", dataset, "--outlier-cutoff", 2.5,
               "--output", out) == 0
    assert {r["system"] for r in csv_rows(out) if r["outlier"] == "true"} == {"sys4"}


def test_bad_config_key(tmp_path, dataset):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("bootstrap-samples = 10\n")
    assert run("outliers", "--config", cfg, "--data", dataset) == 2


def test_provenance_header_tracks_inputs(tmp_path, dataset):
    out = tmp_path / "o.json"
    assert run("outliers", "--data", dataset, "--output", out) == 0
    first = json.loads(out.read_text())["provenance"]
    assert first["tool"].startswith("mtmeta ") and first["command"] == "outliers"
    assert run("outliers", "--data", dataset, "--outlier-cutoff", 3, "--output", out) == 0
    assert json.loads(out.read_text())["provenance"]["config-hash"] != first["config-hash"]


def test_usage_errors_exit_2(capsys):
    assert run("outliers") == 2
    assert run("nonsense") == 2
    assert run("outliers", "--outlier-cutoff", "abc", "--da", "x.tsv") == 2


def test_internal_errors_exit_1(monkeypatch, dataset, capsys):
    def boom(cfg):
        raise RuntimeError("unexpected")
    monkeypatch.setitem(cli.COMMANDS, "outliers", boom)
    assert run("outliers", "--data", dataset) == 1
    assert "internal error" in capsys.readouterr().err


def test_version(capsys):
    assert run("--version") == 0
    assert capsys.readouterr().out.startswith("mtmeta ")
