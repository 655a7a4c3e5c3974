"""Translation edit rate with greedy block shifts.

Edits are unit-cost insertions, deletions and substitutions (Levenshtein
distance) plus one unit per block shift.  Shifts are applied greedily: at each
step every block of up to ``MAX_SHIFT_SIZE`` tokens is tried at every insertion
point within ``MAX_SHIFT_DIST`` positions, and the shift giving the lowest
remaining edit distance is applied (ties: smallest source index, then shortest
block, then smallest destination).  The loop stops when no shift lowers the
edit distance.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from numba import njit

from ..errors import UndefinedMetricError
from .base import MetricScore, check_aligned, corpus_statistics
from .tokenizer import tokenize

MAX_SHIFT_SIZE = 10
MAX_SHIFT_DIST = 50


@njit(cache=True)
def _prefix_table(h, r):
    # F[t, k] = ED(h[:t], r[:k])
    n, m = h.shape[0], r.shape[0]
    F = np.empty((n + 1, m + 1), dtype=np.int64)
    for k in range(m + 1):
        F[0, k] = k
    for t in range(1, n + 1):
        F[t, 0] = t
        for k in range(1, m + 1):
            sub = F[t - 1, k - 1] + (0 if h[t - 1] == r[k - 1] else 1)
            F[t, k] = min(sub, F[t - 1, k] + 1, F[t, k - 1] + 1)
    return F


@njit(cache=True)
def _suffix_table(h, r):
    # G[t, k] = ED(h[t:], r[k:])
    n, m = h.shape[0], r.shape[0]
    G = np.empty((n + 1, m + 1), dtype=np.int64)
    for k in range(m + 1):
        G[n, k] = m - k
    for t in range(n - 1, -1, -1):
        G[t, m] = n - t
        for k in range(m - 1, -1, -1):
            sub = G[t + 1, k + 1] + (0 if h[t] == r[k] else 1)
            G[t, k] = min(sub, G[t + 1, k] + 1, G[t, k + 1] + 1)
    return G


@njit(cache=True)
def _best_shift(h, r, max_size, max_dist):
    """Return (edit distance after best shift, i, length, j), or i = -1 if none.

    A shift moves ``h[i:i+length]`` so it starts at index ``j`` of the result.
    Only the rows inside the changed window ``[min(i, j), max(i, j) + length)``
    are recomputed; the prefix table supplies the row before it and the suffix
    table completes the distance after it.
    """
    n, m = h.shape[0], r.shape[0]
    F = _prefix_table(h, r)
    G = _suffix_table(h, r)
    best_ed = F[n, m]
    best_i, best_len, best_j = -1, 0, 0
    window = np.empty(n, dtype=h.dtype)
    row = np.empty(m + 1, dtype=np.int64)
    nxt = np.empty(m + 1, dtype=np.int64)
    for i in range(n):
        for length in range(1, min(max_size, n - i) + 1):
            for j in range(max(0, i - max_dist), min(n - length, i + max_dist) + 1):
                if j == i:
                    continue
                if j < i:
                    p0, q = j, i + length
                    w = 0
                    for t in range(i, i + length):
                        window[w] = h[t]
                        w += 1
                    for t in range(j, i):
                        window[w] = h[t]
                        w += 1
                else:
                    p0, q = i, j + length
                    w = 0
                    for t in range(i + length, j + length):
                        window[w] = h[t]
                        w += 1
                    for t in range(i, i + length):
                        window[w] = h[t]
                        w += 1
                for k in range(m + 1):
                    row[k] = F[p0, k]
                abandoned = False
                for w in range(q - p0):
                    tok = window[w]
                    nxt[0] = row[0] + 1
                    lo = nxt[0]
                    for k in range(1, m + 1):
                        v = row[k - 1] + (0 if tok == r[k - 1] else 1)
                        if row[k] + 1 < v:
                            v = row[k] + 1
                        if nxt[k - 1] + 1 < v:
                            v = nxt[k - 1] + 1
                        nxt[k] = v
                        if v < lo:
                            lo = v
                    for k in range(m + 1):
                        row[k] = nxt[k]
                    # row minima never decrease, so this candidate cannot win
                    if lo >= best_ed:
                        abandoned = True
                        break
                if abandoned:
                    continue
                ed = row[0] + G[q, 0]
                for k in range(1, m + 1):
                    if row[k] + G[q, k] < ed:
                        ed = row[k] + G[q, k]
                if ed < best_ed:
                    best_ed, best_i, best_len, best_j = ed, i, length, j
    return best_ed, best_i, best_len, best_j


def apply_shift(tokens: Sequence, i: int, length: int, j: int) -> list:
    """Move ``tokens[i:i+length]`` so that it starts at index ``j``."""
    block = list(tokens[i:i + length])
    rest = list(tokens[:i]) + list(tokens[i + length:])
    return rest[:j] + block + rest[j:]


def _encode(hyp: Sequence[str], ref: Sequence[str]) -> tuple[np.ndarray, np.ndarray]:
    vocab: dict[str, int] = {}
    h = np.array([vocab.setdefault(t, len(vocab)) for t in hyp], dtype=np.int64)
    r = np.array([vocab.setdefault(t, len(vocab)) for t in ref], dtype=np.int64)
    return h, r


def ter_edits(hyp_tokens: Sequence[str], ref_tokens: Sequence[str],
              max_shift_size: int = MAX_SHIFT_SIZE,
              max_shift_dist: int = MAX_SHIFT_DIST) -> tuple[int, int]:
    """Greedy TER edit count on token sequences: ``(total_edits, n_shifts)``."""
    h, r = _encode(hyp_tokens, ref_tokens)
    if len(h) == 0 or len(r) == 0:
        return max(len(h), len(r)), 0
    current = int(_prefix_table(h, r)[-1, -1])
    shifts = 0
    while current > 0:
        ed, i, length, j = _best_shift(h, r, max_shift_size, max_shift_dist)
        if i < 0 or ed >= current:
            break
        h = np.asarray(apply_shift(h, i, length, j), dtype=np.int64)
        current = int(ed)
        shifts += 1
    return shifts + current, shifts


class TER:
    """Statistics layout: ``[edits, ref_len]``; lower scores are better."""

    higher_is_better = False

    def __init__(self, lowercase: bool = False):
        self.lowercase = lowercase
        self.name = "TER"

    def segment_statistics(self, hypothesis: str, reference: str) -> np.ndarray:
        hyp = tokenize(hypothesis, self.lowercase).tokens
        ref = tokenize(reference, self.lowercase).tokens
        edits, _ = ter_edits(hyp, ref)
        return np.array([edits, len(ref)], dtype=np.int64)

    def score(self, statistics: np.ndarray) -> float:
        if statistics[1] == 0:
            raise UndefinedMetricError("TER is undefined for an empty reference")
        return float(statistics[0] / statistics[1])


def ter(hypothesis: str, reference: str, lowercase: bool = False) -> MetricScore:
    """Segment TER as a ratio of edits to reference tokens.

    >>> ter("c a b", "a b c").value
    0.3333333333333333
    """
    metric = TER(lowercase)
    return MetricScore("TER", metric.score(metric.segment_statistics(hypothesis, reference)),
                       level="segment")


def corpus_ter(hypotheses: Sequence[str], references: Sequence[str],
               lowercase: bool = False) -> MetricScore:
    """Total edits over total reference tokens."""
    metric = TER(lowercase)
    return MetricScore("TER", metric.score(corpus_statistics(metric, hypotheses, references).sum(axis=0)))


def segment_ter(hypotheses: Sequence[str], references: Sequence[str],
                lowercase: bool = False) -> np.ndarray:
    check_aligned(hypotheses, references)
    metric = TER(lowercase)
    return np.array([metric.score(metric.segment_statistics(h, r))
                     for h, r in zip(hypotheses, references)])
