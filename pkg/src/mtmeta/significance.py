"""Significance tests for differences between two systems.

* humans: two-sided Wilcoxon rank-sum test on segment z-scores
* corpus-level metrics (BLEU, TER): paired bootstrap resampling of segments
* segment-averaged metrics (chrF as micro-average, ingested neural metrics):
  two-sided paired t-test

Which test a metric gets is set by a :class:`SignificancePolicy`.

Random numbers come from numpy's PCG64 bit generator.  Bootstrap resample ``i``
draws from the ``i``-th child of ``SeedSequence(seed)``, so a given seed
reproduces the same resamples on every platform and in any evaluation order.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

from .data_model import EvalCorpus
from .errors import (
    AlignmentError,
    InsufficientDataError,
    InvalidInputError,
    UndefinedMetricError,
)
from .metrics.base import CorpusMetric, corpus_statistics

FIRST_BETTER = "first-better"
SECOND_BETTER = "second-better"
NO_DIFFERENCE = "none"

BOOTSTRAP = "bootstrap"
T_TEST = "t-test"
WILCOXON = "wilcoxon"
TESTS = (BOOTSTRAP, T_TEST, WILCOXON)

EXACT_WILCOXON_MAX = 8


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    alpha: float
    significant: bool
    direction: str
    method: str

    __test__ = False  # not a pytest class

    def to_dict(self) -> dict:
        d = asdict(self)
        if not math.isfinite(d["statistic"]):
            d["statistic"] = "inf" if d["statistic"] > 0 else "-inf"
        return d


def _result(statistic: float, p: float, alpha: float, sign: float, method: str) -> TestResult:
    if not 0 < alpha < 1:
        raise InvalidInputError(f"alpha must lie in (0, 1), got {alpha}")
    p = min(max(float(p), 0.0), 1.0)
    significant = p < alpha
    if not significant or sign == 0:
        direction = NO_DIFFERENCE
    else:
        direction = FIRST_BETTER if sign > 0 else SECOND_BETTER
    return TestResult(float(statistic), p, alpha, significant and sign != 0, direction, method)


def _sample(values: Sequence[float], name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise InvalidInputError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return arr


# --------------------------------------------------------------------------
# Wilcoxon rank-sum

def _exact_rank_sum_counts(doubled_ranks: np.ndarray, n1: int) -> np.ndarray:
    """Number of size-n1 subsets per doubled rank sum (index = doubled sum)."""
    total = int(doubled_ranks.sum())
    # counts[k, s]: subsets of size k with doubled rank sum s
    counts = np.zeros((n1 + 1, total + 1), dtype=np.int64)
    counts[0, 0] = 1
    for r in doubled_ranks:
        r = int(r)
        for k in range(n1, 0, -1):
            counts[k, r:] += counts[k - 1, :total + 1 - r]
    return counts[n1]


def wilcoxon_rank_sum(scores_a: Sequence[float], scores_b: Sequence[float],
                      alpha: float = 0.05, exact: bool | None = None) -> TestResult:
    """Two-sided rank-sum test; the statistic is the rank sum of ``scores_a``.

    Ties get midranks.  With both samples of size <= 8 (or ``exact=True``) the
    p-value is exact, from the permutation distribution of the rank sum given
    the observed ranks; otherwise it uses the normal approximation with
    tie-corrected variance and continuity correction.
    """
    a = _sample(scores_a, "first sample")
    b = _sample(scores_b, "second sample")
    n1, n2 = a.size, b.size
    if n1 < 2 or n2 < 2:
        raise InsufficientDataError(f"each sample needs >= 2 values, got {n1} and {n2}")
    n = n1 + n2
    ranks = stats.rankdata(np.concatenate([a, b]))
    w = float(ranks[:n1].sum())
    expected = n1 * (n + 1) / 2
    sign = float(np.sign(w - expected))

    if exact is None:
        exact = n1 <= EXACT_WILCOXON_MAX and n2 <= EXACT_WILCOXON_MAX
    if exact:
        doubled = np.rint(2 * ranks).astype(np.int64)
        counts = _exact_rank_sum_counts(doubled, n1)
        centre = n1 * (n + 1)  # doubled expectation, always an integer
        observed = abs(int(doubled[:n1].sum()) - centre)
        sums = np.arange(counts.size)
        extreme = counts[np.abs(sums - centre) >= observed].sum()
        p = extreme / counts.sum()
        return _result(w, p, alpha, sign, "wilcoxon-exact")

    _, tie_counts = np.unique(ranks, return_counts=True)
    tie_term = float(np.sum(tie_counts ** 3 - tie_counts)) / (n * (n - 1))
    var = n1 * n2 / 12 * ((n + 1) - tie_term)
    if var <= 0:
        return _result(w, 1.0, alpha, 0.0, "wilcoxon-normal")
    z = max(abs(w - expected) - 0.5, 0.0) / math.sqrt(var)
    p = min(1.0, 2 * stats.norm.sf(z))
    return _result(w, p, alpha, sign, "wilcoxon-normal")


# --------------------------------------------------------------------------
# Paired t-test

def paired_t_test(seg_scores_a: Sequence[float], seg_scores_b: Sequence[float],
                  alpha: float = 0.05) -> TestResult:
    """Two-sided paired t-test on per-segment differences ``a - b``.

    Constant differences give p = 0 (nonzero mean) or p = 1 (zero mean).
    """
    a = _sample(seg_scores_a, "first sample")
    b = _sample(seg_scores_b, "second sample")
    if a.size != b.size:
        raise AlignmentError(f"paired samples differ in length: {a.size} vs {b.size}")
    m = a.size
    if m < 2:
        raise InsufficientDataError("paired t-test needs >= 2 pairs")
    d = a - b
    mean = float(d.mean())
    sd = float(d.std(ddof=1)) if not np.all(d == d[0]) else 0.0
    if sd == 0:
        # constant differences, or a spread that underflows
        if mean == 0:
            return _result(0.0, 1.0, alpha, 0.0, "paired-t")
        return _result(math.copysign(math.inf, mean), 0.0, alpha, math.copysign(1.0, mean), "paired-t")
    t = mean / (sd / math.sqrt(m))
    p = 2 * stats.t.sf(abs(t), m - 1)
    return _result(t, p, alpha, float(np.sign(t)), "paired-t")


# --------------------------------------------------------------------------
# Paired bootstrap

def paired_bootstrap_statistics(
    metric: CorpusMetric,
    stats_a: np.ndarray,
    stats_b: np.ndarray,
    n_samples: int = 1000,
    seed: int | Sequence[int] = 0,
    alpha: float = 0.05,
    max_rejected: float = 0.1,
) -> TestResult:
    """Paired bootstrap on precomputed per-segment metric statistics.

    The winner is fixed by the full-corpus delta; p is the fraction of
    resamples in which that winner does not score strictly better.  Resamples
    on which the metric is undefined are redrawn; more than ``max_rejected``
    of ``n_samples`` rejections raises :class:`UndefinedMetricError`.
    ``seed`` is anything ``numpy.random.SeedSequence`` accepts as entropy.
    """
    if stats_a.shape != stats_b.shape:
        raise AlignmentError(f"statistics shapes differ: {stats_a.shape} vs {stats_b.shape}")
    if n_samples < 100:
        raise InvalidInputError(f"need >= 100 bootstrap samples, got {n_samples}")
    orient = 1.0 if metric.higher_is_better else -1.0
    m = stats_a.shape[0]
    observed = orient * (metric.score(stats_a.sum(axis=0)) - metric.score(stats_b.sum(axis=0)))
    if observed == 0:
        return _result(0.0, 1.0, alpha, 0.0, "paired-bootstrap")
    winner = math.copysign(1.0, observed)

    losses = 0
    rejected = 0
    for child in np.random.SeedSequence(seed).spawn(n_samples):
        rng = np.random.Generator(np.random.PCG64(child))
        while True:
            weights = np.bincount(rng.integers(0, m, size=m), minlength=m)
            try:
                delta = orient * (metric.score(weights @ stats_a) - metric.score(weights @ stats_b))
                break
            except UndefinedMetricError:
                rejected += 1
                if rejected > max_rejected * n_samples:
                    raise UndefinedMetricError(
                        f"metric undefined on {rejected} resamples (limit {max_rejected:.0%})") from None
        if winner * delta <= 0:
            losses += 1
    return _result(observed, losses / n_samples, alpha, winner, "paired-bootstrap")


def paired_bootstrap(
    metric: CorpusMetric,
    corpus: EvalCorpus,
    system_a: str,
    system_b: str,
    n_samples: int = 1000,
    seed: int = 0,
    alpha: float = 0.05,
) -> TestResult:
    """Paired bootstrap test of ``system_a`` against ``system_b`` on ``corpus``.

    The statistic is the orientation-adjusted full-corpus delta (positive when
    ``system_a`` is better).
    """
    for s in (system_a, system_b):
        if s not in corpus.systems:
            raise InvalidInputError(f"system {s!r} not in corpus")
    stats_a = corpus_statistics(metric, corpus.systems[system_a], corpus.references)
    stats_b = corpus_statistics(metric, corpus.systems[system_b], corpus.references)
    return paired_bootstrap_statistics(metric, stats_a, stats_b, n_samples, seed, alpha)


# --------------------------------------------------------------------------
# Policy

@dataclass(frozen=True)
class SignificancePolicy:
    """Maps metric ids to a test id (``bootstrap``, ``t-test`` or ``wilcoxon``).

    The JSON form is an object of metric id to test id; the optional keys
    ``"*"`` and ``"@human"`` set the default metric test and the human test.
    """

    tests: Mapping[str, str] = field(
        default_factory=lambda: {"BLEU": BOOTSTRAP, "TER": BOOTSTRAP})
    default: str = T_TEST
    human: str = WILCOXON

    def __post_init__(self):
        for test in (*self.tests.values(), self.default, self.human):
            if test not in TESTS:
                raise InvalidInputError(f"unknown test {test!r}; expected one of {TESTS}")
        if self.human == BOOTSTRAP:
            raise InvalidInputError("human scores cannot use the corpus bootstrap")

    def test_for(self, metric: str) -> str:
        return self.tests.get(metric, self.default)

    def to_dict(self) -> dict:
        return {**self.tests, "*": self.default, "@human": self.human}

    @classmethod
    def from_dict(cls, d: Mapping[str, str]) -> "SignificancePolicy":
        d = dict(d)
        default = d.pop("*", T_TEST)
        human = d.pop("@human", WILCOXON)
        return cls(d, default, human)

    @classmethod
    def load(cls, path: str | Path) -> "SignificancePolicy":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
