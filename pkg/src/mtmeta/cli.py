"""Command-line front end: ``mtmeta {score,outliers,correlate,compare,report}``.

Every option can also be set in a config file passed with ``--config``.  The
file holds one ``key = value`` per line, keys being the long option names
without the leading dashes (``outlier-cutoff = 2.5``); list options take
comma-separated values and ``#`` starts a comment line.  Flags on the command
line override the file.

A dataset directory (``--data``) is named after its language pair and holds
``da.tsv`` plus either ``scores.tsv`` or system outputs (``source.txt``,
``reference.txt``, ``systems/*.txt``), or both.  Metrics tested by bootstrap
need the system outputs.

Exit codes: 0 success, 1 internal error, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import Callable, Sequence

from . import __version__
from .data_model import (
    EvalCorpus,
    ScoreMatrix,
    load_assessment,
    load_corpus,
    load_score_matrix,
    score_matrix_text,
)
from .errors import InvalidInputError, MetaEvalError, MissingDataError
from .meta_eval import (
    ALL,
    WITHOUT_OUTLIERS,
    correlations_with_without_outliers,
    rank_metrics,
    rolling_window_curve,
    subsample_correlations,
    topn_curve,
    write_curve_csv,
)
from .metrics.scoring import NATIVE_METRICS, score_all_systems
from .pairwise import (
    DECISION_COLUMNS,
    DeltaBins,
    LanguagePairData,
    PairDecision,
    PairwiseConfig,
    agreement_matrix,
    analyze_all_pairs,
    binned_summary,
    decisions_to_csv,
)
from .robust_stats import DEFAULT_CUTOFF, detect_outliers
from .significance import BOOTSTRAP, SignificancePolicy


class UsageError(Exception):
    pass


def _str_list(values) -> list[str]:
    out = []
    for v in values:
        out.extend(p.strip() for p in str(v).split(",") if p.strip())
    return out


def _typed_list(cast) -> Callable:
    def convert(values):
        try:
            return [cast(v) for v in _str_list(values)]
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return convert


def _scalar(cast) -> Callable:
    def convert(values):
        value = values[-1] if isinstance(values, list) else values
        try:
            return cast(value)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return convert


def _bool(value) -> bool:
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


# dest -> (converter, default); flags parse to raw strings, defaults are final values
OPTIONS = {
    "data": (_str_list, []),
    "source": (_scalar(str), None),
    "reference": (_scalar(str), None),
    "system": (_str_list, []),
    "da": (_scalar(str), None),
    "scores": (_scalar(str), None),
    "language_pair": (_scalar(str), ""),
    "metrics": (_str_list, None),
    "segment_level": (_str_list, ["chrF"]),
    "lowercase": (_scalar(_bool), False),
    "outlier_cutoff": (_scalar(float), DEFAULT_CUTOFF),
    "top_n_min": (_scalar(int), 4),
    "window": (_typed_list(int), [4]),
    "subsample_size": (_scalar(int), None),
    "subsample_trials": (_scalar(int), 1000),
    "alpha": (_scalar(float), 0.05),
    "human_alpha": (_scalar(float), 0.05),
    "bootstrap_samples": (_scalar(int), 1000),
    "seed": (_scalar(int), None),
    "bin_edges": (_typed_list(float), [0.0, 1.0, 2.0, 3.0, 5.0, 10.0]),
    "policy": (_scalar(str), None),
    "systems": (_str_list, None),
    "skip_pairs": (_scalar(_bool), False),
    "format": (_scalar(str), None),
    "output": (_scalar(str), "-"),
    "output_dir": (_scalar(str), None),
    "cache_dir": (_scalar(str), None),
}
# options that name outputs rather than affect results
_OUTPUT_OPTIONS = {"format", "output", "output_dir", "cache_dir"}
_PATH_OPTIONS = {"data", "source", "reference", "system", "da", "scores", "policy"}


# --------------------------------------------------------------------------
# argument parsing

def _add(p: argparse.ArgumentParser, dest: str, help: str, repeat: bool = False,
         flag: bool = False, choices=None):
    name = "--" + dest.replace("_", "-")
    if flag:
        p.add_argument(name, dest=dest, action="store_const", const="true", help=help)
    elif repeat:
        p.add_argument(name, dest=dest, action="append", metavar="VALUE", help=help)
    else:
        p.add_argument(name, dest=dest, choices=choices, help=help)


def _add_inputs(p):
    _add(p, "data", "dataset directory named after its language pair (repeatable)", repeat=True)
    _add(p, "da", "DA TSV file, instead of --data")
    _add(p, "scores", "score matrix TSV file, used with --da")
    _add(p, "language_pair", "language pair label for --da/--scores inputs")


def _add_correlation(p):
    _add(p, "outlier_cutoff", f"robust z-score cutoff (default {DEFAULT_CUTOFF})")
    _add(p, "top_n_min", "smallest N for the top-N curve (default 4)")
    _add(p, "window", "rolling window size (repeatable, default 4)", repeat=True)
    _add(p, "subsample_size", "systems per random subsample; enables subsampling")
    _add(p, "subsample_trials", "number of random subsamples (default 1000)")


def _add_pairwise(p):
    _add(p, "alpha", "significance level for metric tests (default 0.05)")
    _add(p, "human_alpha", "significance level for the human test (default 0.05)")
    _add(p, "bootstrap_samples", "bootstrap resamples (default 1000)")
    _add(p, "bin_edges", "comma-separated delta bin edges starting at 0")
    _add(p, "policy", "JSON file mapping metric ids to test ids")
    _add(p, "systems", "restrict comparisons to these systems (comma-separated)", repeat=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtmeta", description="Meta-evaluation of machine translation metrics.")
    parser.add_argument("--version", action="version", version=f"mtmeta {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, help):
        p = sub.add_parser(name, help=help, description=help)
        p.add_argument("--config", help="key = value config file; flags override it")
        return p

    p = command("score", "Score system outputs with BLEU, TER and chrF.")
    _add(p, "data", "dataset directory with source.txt, reference.txt and systems/", repeat=True)
    _add(p, "source", "source segment file")
    _add(p, "reference", "reference segment file")
    _add(p, "system", "system output file; the id is the file stem (repeatable)", repeat=True)
    _add(p, "language_pair", "language pair label")
    _add(p, "metrics", "comma-separated metrics (default BLEU,TER,chrF)", repeat=True)
    _add(p, "segment_level", "metrics that also get segment scores (default chrF)", repeat=True)
    _add(p, "lowercase", "lowercase before BLEU/TER tokenization", flag=True)
    _add(p, "output", "output TSV path (default stdout)")

    p = command("outliers", "Flag outlier systems by robust z-score of DA.")
    _add_inputs(p)
    _add(p, "outlier_cutoff", f"robust z-score cutoff (default {DEFAULT_CUTOFF})")
    _add(p, "format", "output format (default json)", choices=("json", "csv"))
    _add(p, "output", "output path (default stdout)")

    p = command("correlate", "Correlate metrics with DA: with/without outliers, top-N, windows.")
    _add_inputs(p)
    _add(p, "metrics", "comma-separated metrics (default all)", repeat=True)
    _add_correlation(p)
    _add(p, "seed", "random seed, required with --subsample-size")
    _add(p, "format", "table format (default csv)", choices=("csv", "json"))
    _add(p, "output_dir", "directory for output files")

    p = command("compare", "Decide all system pairs with metric and human significance tests.")
    _add_inputs(p)
    _add(p, "metrics", "comma-separated metrics (default all)", repeat=True)
    _add_pairwise(p)
    _add(p, "seed", "random seed, required when a metric uses the bootstrap")
    _add(p, "format", "decision table format (default csv)", choices=("csv", "json"))
    _add(p, "output_dir", "directory for output files")

    p = command("report", "Run all analyses and write a consolidated report.")
    _add_inputs(p)
    _add(p, "metrics", "comma-separated metrics (default all)", repeat=True)
    _add(p, "outlier_cutoff", f"robust z-score cutoff (default {DEFAULT_CUTOFF})")
    _add_pairwise(p)
    _add(p, "skip_pairs", "skip the pairwise analysis", flag=True)
    _add(p, "seed", "random seed, required when a metric uses the bootstrap")
    _add(p, "format", "report format (json only)", choices=("json",))
    _add(p, "cache_dir", "reuse per-language-pair intermediates stored here")
    _add(p, "output_dir", "directory for report.json and summary.txt")
    return parser


def read_config(path: str | Path) -> dict[str, str]:
    """Parse a ``key = value`` config file into raw strings keyed by option dest."""
    out = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def resolve(args: argparse.Namespace) -> dict:
    """Merge flags over the config file over built-in defaults."""
    known = {k for k in vars(args) if k in OPTIONS}
    config = read_config(args.config) if args.config else {}
    unknown = set(config) - known
    if unknown:
        raise UsageError(f"{args.config}: unknown keys for {args.command}: "
                         + ", ".join(sorted(k.replace('_', '-') for k in unknown)))
    resolved = {}
    for dest in sorted(known):
        convert, default = OPTIONS[dest]
        raw = getattr(args, dest)
        if raw is None:
            raw = config.get(dest)
        resolved[dest] = default if raw is None else convert(raw)
    return resolved


# --------------------------------------------------------------------------
# provenance and output

def _digest_path(path: Path) -> list[list[str]]:
    files = sorted(p for p in path.rglob("*") if p.is_file()) if path.is_dir() else [path]
    base = path if path.is_dir() else path.parent
    return [[f"{path.name}/{f.relative_to(base).as_posix()}" if path.is_dir() else f.name,
             hashlib.sha256(f.read_bytes()).hexdigest()] for f in files]


def config_hash(command: str, cfg: dict) -> str:
    """Hash of the result-affecting config, with input paths replaced by content digests."""
    body = {"command": command}
    for key, value in sorted(cfg.items()):
        if key in _OUTPUT_OPTIONS:
            continue
        if key in _PATH_OPTIONS and value:
            paths = value if isinstance(value, list) else [value]
            value = [_digest_path(Path(p)) for p in paths]
        body[key] = value
    text = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def provenance(command: str, cfg: dict) -> dict:
    return {"tool": f"mtmeta {__version__}", "command": command,
            "config-hash": config_hash(command, cfg),
            "seed": cfg.get("seed")}


def _header_lines(prov: dict) -> list[str]:
    seed = "none" if prov["seed"] is None else prov["seed"]
    return [f"tool: {prov['tool']}", f"command: {prov['command']}",
            f"config-hash: {prov['config-hash']}", f"seed: {seed}"]


def _with_header(prov: dict, text: str) -> str:
    return "".join(f"# {line}\n" for line in _header_lines(prov)) + text


def _json(prov: dict, payload) -> str:
    return json.dumps({"provenance": prov, **payload}, indent=2, ensure_ascii=False) + "\n"


def _emit(text: str, target: str | None) -> None:
    if target in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(target).parent.mkdir(parents=True, exist_ok=True)
        Path(target).write_text(text, encoding="utf-8")


def _out_dir(cfg: dict) -> Path:
    if not cfg["output_dir"]:
        raise UsageError("--output-dir is required")
    out = Path(cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _json_safe(value):
    # inf is not valid JSON; strings keep the files portable
    if isinstance(value, float) and value in (float("inf"), float("-inf")):
        return "inf" if value > 0 else "-inf"
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


# --------------------------------------------------------------------------
# inputs

def _require_file(path: str | Path, what: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise MissingDataError(f"{what} not found: {p}")
    return p


def _corpus_from_dir(path: Path, language_pair: str) -> EvalCorpus | None:
    systems_dir = path / "systems"
    if not (path / "reference.txt").is_file():
        return None
    files = sorted(systems_dir.glob("*.txt")) if systems_dir.is_dir() else []
    if not files:
        raise MissingDataError(f"{path}: reference.txt present but no systems/*.txt")
    source = path / "source.txt"
    return load_corpus(source if source.is_file() else path / "reference.txt",
                       path / "reference.txt", files, language_pair)


def load_dataset(path: str | Path) -> LanguagePairData:
    """Load a dataset directory; native scores are computed when scores.tsv is absent."""
    path = Path(path)
    if not path.is_dir():
        raise MissingDataError(f"dataset directory not found: {path}")
    lp = path.name
    assessment = load_assessment(_require_file(path / "da.tsv", "DA file"))
    corpus = _corpus_from_dir(path, lp)
    if (path / "scores.tsv").is_file():
        matrix = load_score_matrix(path / "scores.tsv")
    elif corpus is not None:
        matrix = score_all_systems(corpus)
    else:
        raise MissingDataError(f"{path}: needs scores.tsv or system outputs")
    return LanguagePairData(lp, matrix, assessment, corpus)


def load_inputs(cfg: dict, need_scores: bool = True) -> list[LanguagePairData]:
    if cfg["data"] and cfg["da"]:
        raise UsageError("use either --data or --da, not both")
    if cfg["data"]:
        datasets = [load_dataset(p) for p in cfg["data"]]
        lps = [d.language_pair for d in datasets]
        if len(set(lps)) != len(lps):
            raise UsageError("dataset directories must have distinct names")
        return datasets
    if not cfg["da"]:
        raise UsageError("give --data or --da")
    assessment = load_assessment(_require_file(cfg["da"], "DA file"))
    if cfg.get("scores"):
        matrix = load_score_matrix(_require_file(cfg["scores"], "score file"))
    elif need_scores:
        raise UsageError("--scores is required with --da")
    else:
        matrix = ScoreMatrix({})
    return [LanguagePairData(cfg["language_pair"], matrix, assessment)]


def select_metrics(cfg: dict, datasets: Sequence[LanguagePairData]) -> list[str]:
    available = list(dict.fromkeys(m for d in datasets for m in d.matrix.metrics))
    if cfg["metrics"] is None:
        if not available:
            raise UsageError("no metric scores found")
        return available
    if not cfg["metrics"]:
        raise UsageError("empty metric selection")
    missing = [m for m in cfg["metrics"] if m not in available]
    if missing:
        raise InvalidInputError(f"no scores for metrics: {', '.join(missing)}")
    return list(dict.fromkeys(cfg["metrics"]))


def _pairwise_config(cfg: dict, metrics: Sequence[str]) -> PairwiseConfig:
    policy = SignificancePolicy.load(_require_file(cfg["policy"], "policy file")) \
        if cfg["policy"] else SignificancePolicy()
    if cfg["seed"] is None and any(policy.test_for(m) == BOOTSTRAP for m in metrics):
        raise UsageError("--seed is required when a metric uses the bootstrap")
    return PairwiseConfig(
        bins=DeltaBins(tuple(cfg["bin_edges"])), alpha=cfg["alpha"],
        human_alpha=cfg["human_alpha"], bootstrap_samples=cfg["bootstrap_samples"],
        seed=cfg["seed"] if cfg["seed"] is not None else 0, policy=policy)


# --------------------------------------------------------------------------
# commands

def cmd_score(cfg: dict) -> None:
    if cfg["data"]:
        if cfg["source"] or cfg["reference"] or cfg["system"]:
            raise UsageError("use either --data or --source/--reference/--system")
        if len(cfg["data"]) != 1:
            raise UsageError("score takes a single --data directory")
        path = Path(cfg["data"][0])
        if not path.is_dir():
            raise MissingDataError(f"dataset directory not found: {path}")
        corpus = _corpus_from_dir(path, cfg["language_pair"] or path.name)
        if corpus is None:
            raise MissingDataError(f"reference file not found: {path / 'reference.txt'}")
    else:
        if not cfg["reference"] or not cfg["system"]:
            raise UsageError("give --reference and at least one --system (or --data)")
        ref = _require_file(cfg["reference"], "reference file")
        src = _require_file(cfg["source"], "source file") if cfg["source"] else ref
        systems = [_require_file(p, "system file") for p in cfg["system"]]
        corpus = load_corpus(src, ref, systems, cfg["language_pair"])
    metrics = NATIVE_METRICS if cfg["metrics"] is None else cfg["metrics"]
    if not metrics:
        raise UsageError("empty metric selection")
    matrix = score_all_systems(corpus, metrics, cfg["segment_level"], cfg["lowercase"])
    prov = provenance("score", cfg)
    _emit(score_matrix_text(matrix, _header_lines(prov)), cfg["output"])


def cmd_outliers(cfg: dict) -> None:
    datasets = load_inputs(cfg, need_scores=False)
    reports = {d.language_pair: detect_outliers(d.assessment.da_scores, cfg["outlier_cutoff"])
               for d in datasets}
    prov = provenance("outliers", cfg)
    if (cfg["format"] or "json") == "json":
        text = _json(prov, {"reports": [{"language_pair": lp, **r.to_dict()}
                                        for lp, r in reports.items()]})
    else:
        rows = [{"language_pair": lp, "system": s, "z": r.to_dict()["z"][s],
                 "outlier": str(s in r.outliers).lower()}
                for lp, r in reports.items() for s in sorted(r.z)]
        text = _with_header(prov, write_curve_csv(rows))
    _emit(text, cfg["output"])


def cmd_correlate(cfg: dict) -> None:
    if cfg["subsample_size"] is not None and cfg["seed"] is None:
        raise UsageError("--seed is required with --subsample-size")
    datasets = load_inputs(cfg)
    metrics = select_metrics(cfg, datasets)
    out = _out_dir(cfg)
    fmt = cfg["format"] or "csv"
    prov = provenance("correlate", cfg)

    tables, topn, windows, subsamples = [], [], {w: [] for w in cfg["window"]}, []
    for d in datasets:
        da = d.assessment.da_scores
        lp_metrics = [m for m in metrics if m in d.matrix.metrics]
        tables.append(correlations_with_without_outliers(
            da, d.matrix, cfg["outlier_cutoff"], d.language_pair, lp_metrics))
        for m in lp_metrics:
            scores = d.matrix.oriented_scores(m)
            topn.extend({"language_pair": d.language_pair, "metric": m, "n": n, "r": r}
                        for n, r in topn_curve(da, scores, cfg["top_n_min"]))
            for w in cfg["window"]:
                windows[w].extend({"language_pair": d.language_pair, **row}
                                  for row in rolling_window_curve(da, scores, w).rows(m))
        if cfg["subsample_size"] is not None:
            result = subsample_correlations(
                da, {m: d.matrix.oriented_scores(m) for m in lp_metrics},
                cfg["subsample_size"], cfg["subsample_trials"], cfg["seed"])
            subsamples.append({"language_pair": d.language_pair, **result.to_dict()})

    rows = [row for t in tables for row in t.rows()]
    outputs = {"correlations": rows, "topn": topn,
               **{f"window-{w}": windows[w] for w in cfg["window"]}}
    for name, table in outputs.items():
        if fmt == "json":
            (out / f"{name}.json").write_text(_json(prov, {"rows": table}), encoding="utf-8")
        else:
            (out / f"{name}.csv").write_text(_with_header(prov, write_curve_csv(table)),
                                            encoding="utf-8")
    if subsamples:
        (out / "subsample.json").write_text(_json(prov, {"results": subsamples}), encoding="utf-8")


def cmd_compare(cfg: dict) -> None:
    datasets = load_inputs(cfg)
    metrics = select_metrics(cfg, datasets)
    config = _pairwise_config(cfg, metrics)
    out = _out_dir(cfg)
    analysis = analyze_all_pairs(datasets, metrics, config, cfg["systems"])
    prov = provenance("compare", cfg)
    if (cfg["format"] or "csv") == "csv":
        (out / "decisions.csv").write_text(
            _with_header(prov, decisions_to_csv(analysis.decisions)), encoding="utf-8")
    else:
        (out / "decisions.json").write_text(
            _json(prov, {"decisions": [d.to_dict() for d in analysis.decisions]}),
            encoding="utf-8")
    (out / "summary.json").write_text(_json(prov, analysis.to_dict()), encoding="utf-8")
    matrix = agreement_matrix(analysis.decisions, metrics)
    (out / "agreement.json").write_text(_json(prov, matrix.to_dict()), encoding="utf-8")


# --------------------------------------------------------------------------
# report

def _winners(da, scores, exclude=()) -> list[str] | None:
    try:
        return sorted(rank_metrics(da, scores, exclude=exclude))
    except MetaEvalError:
        return None


def report_section(data: LanguagePairData, metrics: Sequence[str], cfg: dict,
                   config: PairwiseConfig | None) -> dict:
    """All intermediates for one language pair, in serialized (JSON) form."""
    da = data.assessment.da_scores
    lp_metrics = [m for m in metrics if m in data.matrix.metrics]
    outliers = detect_outliers(da, cfg["outlier_cutoff"])
    table = correlations_with_without_outliers(
        da, data.matrix, language_pair=data.language_pair, metrics=lp_metrics, report=outliers)
    scores = {m: data.matrix.oriented_scores(m) for m in lp_metrics}
    section = {
        "language_pair": data.language_pair,
        "n_systems": len(da),
        "outliers": outliers.to_dict(),
        "correlations": table.to_dict(),
        "winners": {ALL: _winners(da, scores),
                    WITHOUT_OUTLIERS: _winners(da, scores, outliers.outliers)},
        "decisions": None,
    }
    if config is not None:
        analysis = analyze_all_pairs(data, lp_metrics, config, cfg["systems"])
        section["decisions"] = [d.to_dict() for d in analysis.decisions]
    # normalise through JSON so fresh and cached sections are identical values
    return json.loads(json.dumps(_json_safe(section)))


def _decision_from_dict(d: dict) -> PairDecision:
    return PairDecision(**{k: d[k] for k in DECISION_COLUMNS if k != "error_name"})


def build_report(sections: Sequence[dict], metrics: Sequence[str], bins: DeltaBins) -> dict:
    decisions = [_decision_from_dict(d) for s in sections for d in (s["decisions"] or [])]
    totals: dict = {"language_pairs": len(sections)}
    if decisions:
        used = [m for m in metrics if any(d.metric == m for d in decisions)]
        tally = {m: {"pairs": 0, "type-1": 0, "type-2": 0} for m in used}
        for d in decisions:
            tally[d.metric]["pairs"] += 1
            if d.error != "none":
                tally[d.metric][d.error] += 1
        totals["errors"] = tally
        totals["binned"] = binned_summary(decisions, bins, used)
        try:
            totals["agreement"] = agreement_matrix(decisions, used).to_dict()
        except MetaEvalError as exc:
            totals["agreement"] = {"error": str(exc)}
    return {"metrics": list(metrics), "language_pairs": list(sections), "totals": totals}


def _fmt_r(value) -> str:
    return "-" if value is None else f"{value:.3f}"


def summary_text(report: dict) -> str:
    prov = report["provenance"]
    lines = [f"mtmeta report (config-hash {prov['config-hash']}, seed {prov['seed']})", ""]
    for s in report["language_pairs"]:
        outliers = s["outliers"]["outliers"]
        lines.append(f"== {s['language_pair'] or '(unnamed)'}: {s['n_systems']} systems, "
                     f"outliers: {', '.join(outliers) if outliers else 'none'}")
        r = {(row["metric"], row["condition"]): row["r"] for row in s["correlations"]["rows"]}
        width = max([len(m) for m, _ in r] + [6])
        lines.append(f"  {'metric':<{width}}  {'r(all)':>7}  {'r(-out)':>7}")
        for m in dict.fromkeys(m for m, _ in r):
            lines.append(f"  {m:<{width}}  {_fmt_r(r[(m, ALL)]):>7}  "
                         f"{_fmt_r(r.get((m, WITHOUT_OUTLIERS))):>7}")
        for cond, label in ((ALL, "all systems"), (WITHOUT_OUTLIERS, "without outliers")):
            w = s["winners"][cond]
            lines.append(f"  winners ({label}): {'undetermined' if w is None else ', '.join(w)}")
        lines.append("")
    errors = report["totals"].get("errors")
    if errors:
        lines.append("== pairwise decisions")
        for m, t in errors.items():
            lines.append(f"  {m}: {t['pairs']} pairs, {t['type-1']} type-1 (miss), "
                         f"{t['type-2']} type-2 (false alarm)")
    return "\n".join(lines).rstrip() + "\n"


def cmd_report(cfg: dict) -> None:
    datasets = load_inputs(cfg)
    metrics = select_metrics(cfg, datasets)
    config = None if cfg["skip_pairs"] else _pairwise_config(cfg, metrics)
    bins = DeltaBins(tuple(cfg["bin_edges"]))
    out = _out_dir(cfg)
    prov = provenance("report", cfg)
    cache = Path(cfg["cache_dir"]) if cfg["cache_dir"] else None

    sections = []
    for d in datasets:
        cached = None
        if cache is not None:
            # keyed by the whole config, so any change in inputs or options misses
            cached = cache / f"{d.language_pair or 'data'}-{prov['config-hash']}.json"
            if cached.is_file():
                sections.append(json.loads(cached.read_text(encoding="utf-8")))
                continue
        section = report_section(d, metrics, cfg, config)
        if cached is not None:
            cache.mkdir(parents=True, exist_ok=True)
            cached.write_text(json.dumps(section, indent=2, ensure_ascii=False), encoding="utf-8")
        sections.append(section)

    report = {"provenance": prov, **build_report(sections, metrics, bins)}
    (out / "report.json").write_text(
        json.dumps(report, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    (out / "summary.txt").write_text(summary_text(report), encoding="utf-8")


COMMANDS = {"score": cmd_score, "outliers": cmd_outliers, "correlate": cmd_correlate,
            "compare": cmd_compare, "report": cmd_report}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve(args)
        COMMANDS[args.command](cfg)
    except (UsageError, MetaEvalError, OSError, json.JSONDecodeError) as exc:
        print(f"mtmeta {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - last-resort exit code
        print(f"mtmeta {args.command}: internal error: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
