"""BLEU with clipped n-gram precision and brevity penalty."""

from __future__ import annotations

import math
from collections import Counter
from typing import Sequence

import numpy as np

from ..errors import InvalidInputError
from .base import MetricScore, corpus_statistics
from .tokenizer import tokenize

SMOOTHING = ("none", "exp-floor")


def ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


class BLEU:
    """Statistics layout: ``[hyp_len, ref_len, match_1..N, total_1..N]``."""

    higher_is_better = True

    def __init__(self, max_n: int = 4, smoothing: str = "none", lowercase: bool = False):
        if max_n < 1:
            raise InvalidInputError(f"max_n must be >= 1, got {max_n}")
        if smoothing not in SMOOTHING:
            raise InvalidInputError(f"unknown smoothing {smoothing!r}; expected one of {SMOOTHING}")
        self.max_n = max_n
        self.smoothing = smoothing
        self.lowercase = lowercase
        self.name = "BLEU"

    def segment_statistics(self, hypothesis: str, reference: str) -> np.ndarray:
        hyp = tokenize(hypothesis, self.lowercase).tokens
        ref = tokenize(reference, self.lowercase).tokens
        stats = np.zeros(2 + 2 * self.max_n, dtype=np.int64)
        stats[0], stats[1] = len(hyp), len(ref)
        for n in range(1, self.max_n + 1):
            h, r = ngram_counts(hyp, n), ngram_counts(ref, n)
            stats[1 + n] = sum((h & r).values())
            stats[1 + self.max_n + n] = max(len(hyp) - n + 1, 0)
        return stats

    def score(self, statistics: np.ndarray) -> float:
        hyp_len, ref_len = int(statistics[0]), int(statistics[1])
        if hyp_len == 0:
            return 0.0
        matches = statistics[2:2 + self.max_n]
        totals = statistics[2 + self.max_n:]
        # no unigram match means no match at any order; smoothing does not apply
        if matches[0] == 0:
            return 0.0

        log_p = []
        decay = 1.0
        for m, t in zip(matches, totals):
            if t == 0:
                if self.smoothing == "none":
                    return 0.0
                # exp-floor uses the effective order: only n-gram orders present
                break
            if m > 0:
                log_p.append(math.log(m / t))
            elif self.smoothing == "exp-floor":
                decay *= 2.0
                log_p.append(math.log(1.0 / (decay * t)))
            else:
                return 0.0

        bp = 1.0 if hyp_len >= ref_len else math.exp(1.0 - ref_len / hyp_len)
        return 100.0 * bp * math.exp(math.fsum(log_p) / len(log_p))


def corpus_bleu(hypotheses: Sequence[str], references: Sequence[str], max_n: int = 4,
                smoothing: str = "none", lowercase: bool = False) -> MetricScore:
    """Corpus BLEU from pooled n-gram statistics.

    >>> round(corpus_bleu(["the cat sat on mat"], ["the cat sat on the mat"]).value, 2)
    57.89
    """
    metric = BLEU(max_n, smoothing, lowercase)
    stats = corpus_statistics(metric, hypotheses, references).sum(axis=0)
    return MetricScore("BLEU", metric.score(stats))


def sentence_bleu(hypothesis: str, reference: str, max_n: int = 4,
                  smoothing: str = "exp-floor", lowercase: bool = False) -> MetricScore:
    if smoothing == "none":
        raise InvalidInputError("sentence BLEU requires smoothing")
    metric = BLEU(max_n, smoothing, lowercase)
    return MetricScore("BLEU", metric.score(metric.segment_statistics(hypothesis, reference)),
                       level="segment")
