"""System-pair decisions: does a metric's verdict match the human one?

For each pair of systems the metric difference is tested for significance
and, when significant, binned by size; the human difference is tested with a
Wilcoxon rank-sum test on segment z-scores.  Disagreements are classed as

* ``type-1`` (a *miss*): metric difference insignificant, human difference
  significant;
* ``type-2`` (a *false alarm*): metric difference significant, human
  difference insignificant.

A pair where both are significant counts as agreement (error ``none``) even if
the two verdicts point in opposite directions; ``PairDecision.directions_agree``
exposes that case separately.
"""

from __future__ import annotations

import csv
import io
import math
import zlib
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .data_model import EvalCorpus, HumanAssessment, ScoreMatrix
from .errors import AlignmentError, DuplicateKeyError, InvalidInputError, MissingDataError
from .metrics.base import corpus_statistics
from .metrics.scoring import native_metric
from .significance import (
    BOOTSTRAP,
    FIRST_BETTER,
    SECOND_BETTER,
    T_TEST,
    SignificancePolicy,
    TestResult,
    paired_bootstrap_statistics,
    paired_t_test,
    wilcoxon_rank_sum,
)

NS = "NS"
A_BETTER = "a-significantly-better"
B_BETTER = "b-significantly-better"
INSIGNIFICANT = "insignificant"

NO_ERROR = "none"
TYPE_1 = "type-1"
TYPE_2 = "type-2"
ERROR_NAMES = {NO_ERROR: "none", TYPE_1: "miss", TYPE_2: "false-alarm"}

HUMAN_BETTER = "human-better"
HUMAN_WORSE = "human-worse"
HUMAN_INSIGNIFICANT = "human-insignificant"


def classify_error(metric_significant: bool, human_verdict: str) -> str:
    human_significant = human_verdict != INSIGNIFICANT
    if human_significant and not metric_significant:
        return TYPE_1
    if metric_significant and not human_significant:
        return TYPE_2
    return NO_ERROR


def _bin_label(lo: float, hi: float) -> str:
    return f"[{lo:g},{'inf' if math.isinf(hi) else format(hi, 'g')})"


@dataclass(frozen=True)
class DeltaBins:
    """Half-open bins over [0, inf) for oriented metric deltas.

    ``scale`` multiplies a metric's delta before binning, to put it on a
    points scale; TER is stored as a ratio, so its default scale is 100.
    """

    edges: tuple[float, ...] = (0.0, 1.0, 2.0, 3.0, 5.0, 10.0)
    scale: Mapping[str, float] = field(default_factory=lambda: {"TER": 100.0})

    def __post_init__(self):
        edges = tuple(float(e) for e in self.edges)
        if not edges or edges[0] != 0.0:
            raise InvalidInputError("bin edges must start at 0")
        if any(b <= a for a, b in zip(edges, edges[1:])) or not all(map(math.isfinite, edges)):
            raise InvalidInputError(f"bin edges must be finite and increasing: {edges}")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "scale", dict(self.scale))

    @property
    def labels(self) -> tuple[str, ...]:
        bounds = (*self.edges, math.inf)
        return tuple(_bin_label(lo, hi) for lo, hi in zip(bounds, bounds[1:]))

    @property
    def all_labels(self) -> tuple[str, ...]:
        return (NS, *self.labels)

    def label(self, metric: str, delta: float) -> str:
        if not delta >= 0 or math.isinf(delta):
            raise InvalidInputError(f"delta must be finite and >= 0, got {delta}")
        scaled = delta * self.scale.get(metric, 1.0)
        idx = int(np.searchsorted(self.edges, scaled, side="right")) - 1
        return self.labels[idx]


@dataclass(frozen=True)
class PairwiseConfig:
    bins: DeltaBins = field(default_factory=DeltaBins)
    alpha: float = 0.05
    human_alpha: float = 0.05
    bootstrap_samples: int = 1000
    seed: int = 0
    policy: SignificancePolicy = field(default_factory=SignificancePolicy)


@dataclass(frozen=True)
class LanguagePairData:
    """Everything needed to decide pairs within one language pair.

    ``corpus`` is only needed for metrics tested by bootstrap resampling.
    """

    language_pair: str
    matrix: ScoreMatrix
    assessment: HumanAssessment
    corpus: EvalCorpus | None = None


@dataclass(frozen=True)
class PairDecision:
    """Metric and human verdicts for one system pair; ``system_a`` is the metric's winner."""

    language_pair: str
    system_a: str
    system_b: str
    metric: str
    delta: float
    metric_p: float
    metric_significant: bool
    bin: str
    human_delta: float
    human_p: float
    human_verdict: str
    error: str

    @property
    def error_name(self) -> str:
        return ERROR_NAMES[self.error]

    @property
    def pair(self) -> tuple[str, str, str]:
        return (self.language_pair, *sorted((self.system_a, self.system_b)))

    @property
    def directions_agree(self) -> bool | None:
        """None unless both verdicts are significant."""
        if not self.metric_significant or self.human_verdict == INSIGNIFICANT:
            return None
        return self.human_verdict == A_BETTER

    def to_dict(self) -> dict:
        return {
            "language_pair": self.language_pair, "system_a": self.system_a,
            "system_b": self.system_b, "metric": self.metric, "delta": self.delta,
            "bin": self.bin, "metric_p": self.metric_p,
            "metric_significant": self.metric_significant,
            "human_delta": self.human_delta, "human_p": self.human_p,
            "human_verdict": self.human_verdict, "error": self.error,
            "error_name": self.error_name,
        }


def pair_seed(seed: int, language_pair: str, metric: str, a: str, b: str) -> list[int]:
    """Entropy for one pair's bootstrap, independent of the order pairs are visited."""
    first, second = sorted((a, b))
    key = "\t".join((language_pair, metric, first, second)).encode("utf-8")
    return [int(seed), zlib.crc32(key)]


def _metric_test(data: LanguagePairData, metric: str, a: str, b: str,
                 config: PairwiseConfig, cache: dict) -> TestResult:
    test = config.policy.test_for(metric)
    if test == BOOTSTRAP:
        if data.corpus is None:
            raise MissingDataError(
                f"{data.language_pair}: bootstrap test for {metric} needs system outputs")
        scorer = native_metric(metric)
        stats = []
        for s in (a, b):
            key = (data.language_pair, metric, s)
            if key not in cache:
                if s not in data.corpus.systems:
                    raise MissingDataError(f"{data.language_pair}: no output for system {s!r}")
                cache[key] = corpus_statistics(scorer, data.corpus.systems[s], data.corpus.references)
            stats.append(cache[key])
        return paired_bootstrap_statistics(
            scorer, stats[0], stats[1], config.bootstrap_samples,
            pair_seed(config.seed, data.language_pair, metric, a, b), config.alpha)
    seg_a = data.matrix.segments(metric, a)
    seg_b = data.matrix.segments(metric, b)
    if not data.matrix.higher_is_better[metric]:
        seg_a, seg_b = -seg_a, -seg_b
    if test == T_TEST:
        return paired_t_test(seg_a, seg_b, config.alpha)
    return wilcoxon_rank_sum(seg_a, seg_b, config.alpha)


def decide_pair(data: LanguagePairData, metric: str, a: str, b: str,
                config: PairwiseConfig | None = None, cache: dict | None = None) -> PairDecision:
    """Metric and human verdicts for systems ``a`` and ``b`` under ``metric``.

    The pair is reordered so the metric delta is >= 0 (ties: by system id).
    """
    config = config or PairwiseConfig()
    cache = {} if cache is None else cache
    if a == b:
        raise InvalidInputError(f"cannot compare system {a!r} with itself")
    m = data.matrix
    delta = m.oriented(metric, m.system_scores[(metric, a)]) - m.oriented(metric, m.system_scores[(metric, b)])
    if delta < 0 or (delta == 0 and b < a):
        a, b, delta = b, a, -delta
    delta = abs(delta)

    result = _metric_test(data, metric, a, b, config, cache)
    # a significant verdict that points the other way cannot occur for the
    # t-test; for safety it is treated as insignificant
    metric_significant = result.significant and result.direction == FIRST_BETTER
    human = wilcoxon_rank_sum(data.assessment.segment_scores(a),
                              data.assessment.segment_scores(b), config.human_alpha)
    verdict = {FIRST_BETTER: A_BETTER, SECOND_BETTER: B_BETTER}.get(human.direction, INSIGNIFICANT)
    return PairDecision(
        language_pair=data.language_pair, system_a=a, system_b=b, metric=metric,
        delta=float(delta), metric_p=result.p_value, metric_significant=metric_significant,
        bin=config.bins.label(metric, delta) if metric_significant else NS,
        human_delta=data.assessment.da_scores[a] - data.assessment.da_scores[b],
        human_p=human.p_value, human_verdict=verdict,
        error=classify_error(metric_significant, verdict),
    )


@dataclass(frozen=True)
class PairwiseAnalysis:
    """All decisions in sorted order and the per-(metric, bin) summary.

    ``summary[metric][bin]`` counts pairs by human verdict relative to the
    metric's winner: better, worse, or insignificant.
    """

    decisions: tuple[PairDecision, ...]
    summary: Mapping[str, Mapping[str, Mapping[str, int]]]

    def pair_counts(self) -> dict[str, int]:
        counts: dict[str, int] = defaultdict(int)
        for d in self.decisions:
            counts[d.metric] += 1
        return dict(counts)

    def error_counts(self) -> dict[str, dict[str, int]]:
        out: dict[str, dict[str, int]] = {}
        for d in self.decisions:
            tally = out.setdefault(d.metric, {NO_ERROR: 0, TYPE_1: 0, TYPE_2: 0})
            tally[d.error] += 1
        return out

    def to_dict(self) -> dict:
        return {"pairs": self.pair_counts(), "errors": self.error_counts(),
                "summary": {m: {b: dict(c) for b, c in bins.items()}
                            for m, bins in self.summary.items()}}


def binned_summary(decisions: Iterable[PairDecision], bins: DeltaBins,
                   metrics: Sequence[str]) -> dict[str, dict[str, dict[str, int]]]:
    summary = {m: {label: {HUMAN_BETTER: 0, HUMAN_WORSE: 0, HUMAN_INSIGNIFICANT: 0}
                   for label in bins.all_labels} for m in metrics}
    key = {A_BETTER: HUMAN_BETTER, B_BETTER: HUMAN_WORSE, INSIGNIFICANT: HUMAN_INSIGNIFICANT}
    for d in decisions:
        summary[d.metric][d.bin][key[d.human_verdict]] += 1
    return summary


def analyze_all_pairs(
    datasets: LanguagePairData | Sequence[LanguagePairData],
    metrics: Sequence[str] | None = None,
    config: PairwiseConfig | None = None,
    systems: Iterable[str] | None = None,
) -> PairwiseAnalysis:
    """Decide every unordered system pair for every selected metric.

    Within a language pair, the systems compared for a metric are those with
    both metric scores and DA records, optionally restricted to ``systems``.
    """
    config = config or PairwiseConfig()
    if isinstance(datasets, LanguagePairData):
        datasets = [datasets]
    if metrics is None:
        metrics = list(dict.fromkeys(m for d in datasets for m in d.matrix.metrics))
    metrics = list(metrics)
    if not metrics:
        raise InvalidInputError("no metrics selected")
    keep = None if systems is None else set(systems)
    lps = [d.language_pair for d in datasets]
    if len(set(lps)) != len(lps):
        raise DuplicateKeyError("language pairs must be unique")

    cache: dict = {}
    decisions = []
    for data in datasets:
        for metric in metrics:
            if metric not in data.matrix.metrics:
                continue
            candidates = sorted(set(data.matrix.systems(metric)) & set(data.assessment.systems))
            if keep is not None:
                candidates = [s for s in candidates if s in keep]
            if len(candidates) < 2:
                raise InvalidInputError(
                    f"{data.language_pair}/{metric}: need >= 2 systems, got {len(candidates)}")
            for a, b in combinations(candidates, 2):
                decisions.append(decide_pair(data, metric, a, b, config, cache))
    decisions.sort(key=lambda d: (d.metric, *d.pair))
    return PairwiseAnalysis(tuple(decisions), binned_summary(decisions, config.bins, metrics))


@dataclass(frozen=True)
class AgreementMatrix:
    """Entry (m, m') counts pairs where m errs and m' does not; the diagonal counts m's errors."""

    metrics: tuple[str, ...]
    counts: np.ndarray
    total_pairs: int

    def __getitem__(self, key: tuple[str, str]) -> int:
        i, j = (self.metrics.index(k) for k in key)
        return int(self.counts[i, j])

    def to_dict(self) -> dict:
        return {"metrics": list(self.metrics), "total_pairs": self.total_pairs,
                "counts": self.counts.tolist()}


def agreement_matrix(decisions: Iterable[PairDecision],
                     metrics: Sequence[str] | None = None) -> AgreementMatrix:
    """Cross-metric error tally; every metric must have decided the same pairs."""
    by_metric: dict[str, dict[tuple, bool]] = defaultdict(dict)
    for d in decisions:
        if d.pair in by_metric[d.metric]:
            raise DuplicateKeyError(f"{d.metric}: pair {d.pair} decided twice")
        by_metric[d.metric][d.pair] = d.error != NO_ERROR
    if metrics is None:
        metrics = sorted(by_metric)
    metrics = tuple(metrics)
    if not metrics:
        raise InvalidInputError("no decisions")
    pairs = set(by_metric[metrics[0]])
    for m in metrics:
        if set(by_metric.get(m, {})) != pairs:
            raise AlignmentError(f"metric {m!r} did not decide the same pairs as {metrics[0]!r}")
    order = sorted(pairs)
    errs = np.array([[by_metric[m][p] for p in order] for m in metrics], dtype=bool)
    errs = errs.reshape(len(metrics), len(order))
    counts = (errs.astype(np.int64) @ (~errs).T.astype(np.int64))
    np.fill_diagonal(counts, errs.sum(axis=1))
    return AgreementMatrix(metrics, counts, len(order))


DECISION_COLUMNS = ("language_pair", "system_a", "system_b", "metric", "delta", "bin",
                    "metric_p", "metric_significant", "human_delta", "human_p",
                    "human_verdict", "error", "error_name")


def decisions_to_csv(decisions: Iterable[PairDecision]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(DECISION_COLUMNS)
    for d in decisions:
        row = d.to_dict()
        writer.writerow([repr(row[c]) if isinstance(row[c], float) else str(row[c]).lower()
                         if isinstance(row[c], bool) else row[c] for c in DECISION_COLUMNS])
    return buf.getvalue()
