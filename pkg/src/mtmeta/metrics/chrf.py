"""chrF: character n-gram F-score over whitespace-stripped text."""

from __future__ import annotations

import re
from collections import Counter
from typing import Sequence

import numpy as np

from ..errors import InvalidInputError, UndefinedMetricError
from .base import MetricScore, check_aligned, corpus_statistics

_WS = re.compile(r"\s+")


def char_ngrams(text: str, n: int) -> Counter:
    text = _WS.sub("", text)
    return Counter(text[i:i + n] for i in range(len(text) - n + 1))


class ChrF:
    """Statistics layout: ``[hyp_1, ref_1, match_1, ..., hyp_N, ref_N, match_N]``."""

    higher_is_better = True

    def __init__(self, n_max: int = 6, beta: float = 2.0):
        if n_max < 1:
            raise InvalidInputError(f"n_max must be >= 1, got {n_max}")
        if beta <= 0:
            raise InvalidInputError(f"beta must be positive, got {beta}")
        self.n_max = n_max
        self.beta = beta
        self.name = "chrF"

    def segment_statistics(self, hypothesis: str, reference: str) -> np.ndarray:
        stats = np.zeros(3 * self.n_max, dtype=np.int64)
        for n in range(1, self.n_max + 1):
            h, r = char_ngrams(hypothesis, n), char_ngrams(reference, n)
            stats[3 * n - 3] = sum(h.values())
            stats[3 * n - 2] = sum(r.values())
            stats[3 * n - 1] = sum((h & r).values())
        return stats

    def score(self, statistics: np.ndarray) -> float:
        if statistics[1] == 0:
            raise UndefinedMetricError("chrF is undefined for an empty reference")
        precisions, recalls = [], []
        for n in range(self.n_max):
            hyp, ref, match = statistics[3 * n:3 * n + 3]
            if hyp == 0 and ref == 0:
                continue
            precisions.append(match / hyp if hyp else 0.0)
            recalls.append(match / ref if ref else 0.0)
        p = sum(precisions) / len(precisions)
        r = sum(recalls) / len(recalls)
        if p == 0 and r == 0:
            return 0.0
        b2 = self.beta ** 2
        return 100.0 * (1 + b2) * p * r / (b2 * p + r)


def sentence_chrf(hypothesis: str, reference: str, n_max: int = 6, beta: float = 2.0) -> MetricScore:
    metric = ChrF(n_max, beta)
    return MetricScore("chrF", metric.score(metric.segment_statistics(hypothesis, reference)),
                       level="segment")


def corpus_chrf(hypotheses: Sequence[str], references: Sequence[str], mode: str = "macro",
                n_max: int = 6, beta: float = 2.0) -> MetricScore:
    """Corpus chrF.

    ``macro`` pools character n-gram counts over the test set before computing
    the F-score (the standard system score); ``micro`` averages sentence chrF,
    the form used for paired t-tests.
    """
    metric = ChrF(n_max, beta)
    stats = corpus_statistics(metric, hypotheses, references)
    if mode == "macro":
        return MetricScore("chrF", metric.score(stats.sum(axis=0)))
    if mode == "micro":
        return MetricScore("chrF", float(np.mean([metric.score(s) for s in stats])))
    raise InvalidInputError(f"mode must be 'macro' or 'micro', got {mode!r}")


def segment_chrf(hypotheses: Sequence[str], references: Sequence[str],
                 n_max: int = 6, beta: float = 2.0) -> np.ndarray:
    check_aligned(hypotheses, references)
    metric = ChrF(n_max, beta)
    return np.array([metric.score(metric.segment_statistics(h, r))
                     for h, r in zip(hypotheses, references)])
