"""Correlation-based meta-evaluation of metrics against human system scores.

Correlations use orientation-adjusted metric scores: lower-is-better metrics
such as TER are negated first, so a positive r always means agreement with
the human scores.  Functions taking plain score mappings expect them already
oriented (``ScoreMatrix.oriented_scores``).  Wherever Pearson's r is undefined
(a constant input), ``None`` is reported.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np
from scipy import stats

from .data_model import ScoreMatrix
from .errors import (
    InsufficientDataError,
    InvalidInputError,
    InvalidMatrixError,
    UndefinedCorrelationError,
)
from .robust_stats import DEFAULT_CUTOFF, OutlierReport, detect_outliers, pearson

ALL = "all"
WITHOUT_OUTLIERS = "without-outliers"


def _safe_pearson(x: Sequence[float], y: Sequence[float]) -> float | None:
    try:
        return pearson(x, y)
    except (UndefinedCorrelationError, InsufficientDataError):
        return None


def _common_systems(da: Mapping[str, float], *score_maps: Mapping[str, float]) -> list[str]:
    common = set(da)
    for m in score_maps:
        common &= set(m)
    return sorted(common)


def _r_over(systems: Iterable[str], da: Mapping[str, float],
            scores: Mapping[str, float]) -> float | None:
    # summing in DA order makes r bitwise independent of how systems were
    # selected and, for tie-free DA, of their ids
    systems = sorted(systems, key=lambda s: (da[s], s))
    return _safe_pearson([da[s] for s in systems], [scores[s] for s in systems])


@dataclass(frozen=True)
class CorrelationTable:
    """Pearson's r per (metric, condition), as in a with/without-outliers table."""

    language_pair: str
    r: Mapping[tuple[str, str], float | None]
    n_systems: Mapping[tuple[str, str], int]
    outliers: frozenset[str] = frozenset()

    @property
    def metrics(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(m for m, _ in self.r))

    @property
    def conditions(self) -> tuple[str, ...]:
        return (ALL, WITHOUT_OUTLIERS) if self.outliers else (ALL,)

    def rows(self) -> list[dict]:
        return [
            {"language_pair": self.language_pair, "metric": m, "condition": c,
             "n_systems": self.n_systems[(m, c)], "r": self.r[(m, c)]}
            for (m, c) in self.r
        ]

    def to_dict(self) -> dict:
        return {"language_pair": self.language_pair,
                "outliers": sorted(self.outliers), "rows": self.rows()}

    @classmethod
    def from_dict(cls, d: Mapping) -> "CorrelationTable":
        r, n = {}, {}
        for row in d["rows"]:
            key = (row["metric"], row["condition"])
            r[key] = row["r"]
            n[key] = row["n_systems"]
        return cls(d["language_pair"], r, n, frozenset(d["outliers"]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["language_pair", "metric", "condition", "n_systems", "r"])
        for row in self.rows():
            writer.writerow([row["language_pair"], row["metric"], row["condition"],
                             row["n_systems"], _fmt(row["r"])])
        return buf.getvalue()


def _fmt(r: float | None) -> str:
    return "undefined" if r is None else repr(r)


def correlations_with_without_outliers(
    da: Mapping[str, float],
    matrix: ScoreMatrix,
    cutoff: float = DEFAULT_CUTOFF,
    language_pair: str = "",
    metrics: Sequence[str] | None = None,
    report: OutlierReport | None = None,
) -> CorrelationTable:
    """r over all systems and, when outliers exist, over the retained ones.

    Outliers are detected on the DA scores alone.  Each metric is correlated
    over the systems it shares with ``da``.
    """
    if report is None:
        report = detect_outliers(da, cutoff)
    r, n = {}, {}
    for metric in metrics or matrix.metrics:
        scores = matrix.oriented_scores(metric)
        systems = _common_systems(da, scores)
        if len(systems) < 4:
            raise InsufficientDataError(
                f"{metric}: {len(systems)} systems scored by both DA and metric, need >= 4")
        r[(metric, ALL)] = _r_over(systems, da, scores)
        n[(metric, ALL)] = len(systems)
        if report.outliers:
            kept = [s for s in systems if s not in report.outliers]
            r[(metric, WITHOUT_OUTLIERS)] = _r_over(kept, da, scores)
            n[(metric, WITHOUT_OUTLIERS)] = len(kept)
    return CorrelationTable(language_pair, r, n, report.outliers)


def _sorted_by_da(da: Mapping[str, float], systems: Iterable[str], descending: bool) -> list[str]:
    # ties broken by system id in both directions
    sign = -1.0 if descending else 1.0
    return sorted(systems, key=lambda s: (sign * da[s], s))


def topn_curve(da: Mapping[str, float], scores: Mapping[str, float],
               n_min: int = 4) -> list[tuple[int, float | None]]:
    """r over the N best systems by DA, for N from all systems down to ``n_min``."""
    if n_min < 3:
        raise InvalidInputError(f"n_min must be >= 3, got {n_min}")
    ranked = _sorted_by_da(da, _common_systems(da, scores), descending=True)
    if len(ranked) < n_min:
        raise InsufficientDataError(f"{len(ranked)} systems, need >= {n_min}")
    return [(top, _r_over(ranked[:top], da, scores))
            for top in range(len(ranked), n_min - 1, -1)]


@dataclass(frozen=True)
class WindowCurve:
    """Rolling-window correlations; ``systems`` is in ascending DA order."""

    window: int
    systems: tuple[str, ...]
    values: tuple[float | None, ...]

    def window_systems(self, start: int) -> tuple[str, ...]:
        return self.systems[start:start + self.window]

    def rows(self, metric: str = "") -> list[dict]:
        return [{"metric": metric, "window": self.window, "start": i,
                 "systems": " ".join(self.window_systems(i)), "r": v}
                for i, v in enumerate(self.values)]


def rolling_window_curve(da: Mapping[str, float], scores: Mapping[str, float],
                         window: int = 4) -> WindowCurve:
    """r over consecutive windows of ``window`` systems, worst systems first."""
    if window < 3:
        raise InvalidInputError(f"window must be >= 3, got {window}")
    ranked = _sorted_by_da(da, _common_systems(da, scores), descending=False)
    if len(ranked) < window:
        raise InsufficientDataError(f"{len(ranked)} systems, window of {window}")
    values = tuple(_r_over(ranked[i:i + window], da, scores)
                   for i in range(len(ranked) - window + 1))
    return WindowCurve(window, tuple(ranked), values)


@dataclass(frozen=True)
class SubsampleResult:
    """r samples grouped by which designated outliers were in the subsample.

    ``samples[group][metric]`` lists one r per trial in that group; ``group``
    is a tuple of the outlier ids present (empty tuple: none of them).
    """

    k: int
    trials: int
    seed: int
    designated: tuple[str, ...]
    samples: Mapping[tuple[str, ...], Mapping[str, list[float | None]]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "k": self.k, "trials": self.trials, "seed": self.seed,
            "designated": list(self.designated),
            "groups": [{"present": list(g), "r": {m: v for m, v in by_metric.items()}}
                       for g, by_metric in self.samples.items()],
        }


def subsample_correlations(
    da: Mapping[str, float],
    metric_scores: Mapping[str, Mapping[str, float]],
    k: int,
    trials: int,
    seed: int,
    designated: Iterable[str] | None = None,
) -> SubsampleResult:
    """Correlations over random k-system subsets, drawn without replacement.

    Trial ``i`` uses its own PCG64 stream spawned from ``SeedSequence(seed)``,
    so results do not depend on evaluation order.  ``designated`` defaults to
    the outliers detected on ``da``.
    """
    systems = _common_systems(da, *metric_scores.values())
    if trials < 1:
        raise InvalidInputError(f"trials must be >= 1, got {trials}")
    if not 3 <= k <= len(systems):
        raise InvalidInputError(f"subset size {k} outside [3, {len(systems)}]")
    if designated is None:
        designated = detect_outliers({s: da[s] for s in systems}).outliers
    designated = tuple(sorted(designated))

    samples: dict[tuple[str, ...], dict[str, list]] = {}
    for child in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.Generator(np.random.PCG64(child))
        idx = np.sort(rng.choice(len(systems), size=k, replace=False))
        subset = [systems[i] for i in idx]
        group = tuple(s for s in designated if s in subset)
        by_metric = samples.setdefault(group, {m: [] for m in metric_scores})
        for metric, scores in metric_scores.items():
            by_metric[metric].append(_r_over(subset, da, scores))
    return SubsampleResult(k, trials, seed, designated, samples)


class WilliamsResult(NamedTuple):
    t: float
    p: float


def williams_test(r12: float, r13: float, r23: float, n: int) -> WilliamsResult:
    """Williams test for r12 > r13, where both correlations share variable 1.

    Returns the t statistic and its one-sided p-value under Student's t with
    n - 3 degrees of freedom.
    """
    if n < 4:
        raise InsufficientDataError(f"Williams test needs n >= 4, got {n}")
    for r in (r12, r13, r23):
        if not -1.0 <= r <= 1.0:
            raise InvalidInputError(f"correlation {r} outside [-1, 1]")
    k = 1 - r12 ** 2 - r13 ** 2 - r23 ** 2 + 2 * r12 * r13 * r23
    if k < -1e-12:
        raise InvalidMatrixError(f"correlations are not jointly attainable (K = {k:.3g})")
    k = max(k, 0.0)
    num = (r12 - r13) * math.sqrt((n - 1) * (1 + r23))
    den = math.sqrt(2 * k * (n - 1) / (n - 3) + ((r12 + r13) ** 2 / 4) * (1 - r23) ** 3)
    if num == 0:
        t = 0.0
    elif den == 0:
        t = math.copysign(math.inf, num)
    else:
        t = num / den
    return WilliamsResult(t, float(stats.t.sf(t, n - 3)))


def rank_metrics(
    da: Mapping[str, float],
    metric_scores: Mapping[str, Mapping[str, float]],
    alpha: float = 0.05,
    exclude: Iterable[str] = (),
) -> set[str]:
    """Metrics not significantly outperformed by any other metric.

    Metric m' outperforms m when the one-sided Williams test of r(m') > r(m)
    gives p < alpha.  Scores must be oriented so that larger is better.  All
    metrics are compared on the systems they share with ``da``, minus
    ``exclude``.
    """
    if not 0 < alpha <= 0.5:
        raise InvalidInputError(f"alpha must lie in (0, 0.5], got {alpha}")
    if not metric_scores:
        raise InvalidInputError("no metrics to rank")
    excluded = set(exclude)
    systems = [s for s in _common_systems(da, *metric_scores.values()) if s not in excluded]
    human = [da[s] for s in systems]
    vectors = {m: [scores[s] for s in systems] for m, scores in metric_scores.items()}
    r = {m: pearson(human, v) for m, v in vectors.items()}

    winners = set(metric_scores)
    for m, m2 in ((a, b) for a in metric_scores for b in metric_scores if a != b):
        r_between = pearson(vectors[m], vectors[m2])
        if williams_test(r[m2], r[m], r_between, len(systems)).p < alpha:
            winners.discard(m)
    return winners


def write_curve_csv(rows: Sequence[Mapping]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if rows:
        keys = list(rows[0])
        writer.writerow(keys)
        for row in rows:
            writer.writerow([_fmt(row[k]) if k == "r" else row[k] for k in keys])
    return buf.getvalue()
