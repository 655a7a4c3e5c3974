from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from ..errors import AlignmentError, InvalidInputError


@dataclass(frozen=True)
class MetricScore:
    """A metric value.  BLEU and chrF are on a 0-100 scale, TER is a ratio."""

    metric: str
    value: float
    level: str = "corpus"

    def __float__(self) -> float:
        return self.value


class CorpusMetric(Protocol):
    """A corpus metric that decomposes into additive per-segment statistics.

    Summing ``segment_statistics`` over any multiset of segments and passing the
    sum to ``score`` gives the corpus score of that multiset, which is what the
    paired bootstrap relies on.
    """

    name: str
    higher_is_better: bool

    def segment_statistics(self, hypothesis: str, reference: str) -> np.ndarray: ...

    def score(self, statistics: np.ndarray) -> float: ...


def corpus_statistics(metric: CorpusMetric, hypotheses: Sequence[str],
                      references: Sequence[str]) -> np.ndarray:
    """Per-segment statistics stacked into an (n_segments, k) array."""
    check_aligned(hypotheses, references)
    return np.stack([metric.segment_statistics(h, r) for h, r in zip(hypotheses, references)])


def check_aligned(hypotheses: Sequence[str], references: Sequence[str]) -> None:
    if len(hypotheses) != len(references):
        raise AlignmentError(
            f"{len(hypotheses)} hypotheses but {len(references)} references")
    if not hypotheses:
        raise InvalidInputError("no segments to score")
