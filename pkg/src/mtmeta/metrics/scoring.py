from __future__ import annotations

from typing import Iterable

from ..data_model import EvalCorpus, ScoreMatrix
from ..errors import InvalidInputError
from .base import corpus_statistics
from .bleu import BLEU
from .chrf import ChrF
from .ter import TER

NATIVE_METRICS = ("BLEU", "TER", "chrF")


def native_metric(name: str, lowercase: bool = False):
    """The decomposable corpus metric object for a native metric id."""
    if name == "BLEU":
        return BLEU(lowercase=lowercase)
    if name == "TER":
        return TER(lowercase=lowercase)
    if name == "chrF":
        return ChrF()
    raise InvalidInputError(f"unknown native metric {name!r}; expected one of {NATIVE_METRICS}")


def score_all_systems(
    corpus: EvalCorpus,
    metrics: Iterable[str] = NATIVE_METRICS,
    segment_level: Iterable[str] = ("chrF",),
    lowercase: bool = False,
) -> ScoreMatrix:
    """System-level scores for every system and selected native metric.

    ``segment_level`` names the metrics that also get per-segment vectors;
    sentence BLEU uses exp-floor smoothing.  Systems are scored in sorted id
    order so the result does not depend on insertion order.
    """
    metrics = list(dict.fromkeys(metrics))
    if not metrics:
        raise InvalidInputError("no metrics selected")
    segment_level = set(segment_level)
    sys_scores, seg_scores, orientation = {}, {}, {}
    for name in metrics:
        metric = native_metric(name, lowercase)
        orientation[name] = metric.higher_is_better
        seg_metric = BLEU(smoothing="exp-floor", lowercase=lowercase) if name == "BLEU" else metric
        for sys_id in corpus.system_ids:
            stats = corpus_statistics(metric, corpus.systems[sys_id], corpus.references)
            sys_scores[(name, sys_id)] = metric.score(stats.sum(axis=0))
            if name in segment_level:
                # same statistics layout; only the smoothing differs
                seg_scores[(name, sys_id)] = tuple(seg_metric.score(s) for s in stats)
    return ScoreMatrix(sys_scores, seg_scores, orientation)
