"""Native lexical metrics: BLEU, TER and chrF over a shared v13a tokenizer."""

from .base import CorpusMetric, MetricScore, corpus_statistics
from .bleu import BLEU, corpus_bleu, sentence_bleu
from .chrf import ChrF, corpus_chrf, segment_chrf, sentence_chrf
from .scoring import NATIVE_METRICS, native_metric, score_all_systems
from .ter import TER, corpus_ter, segment_ter, ter, ter_edits
from .tokenizer import TokenizedSegment, tokenize

__all__ = [
    "BLEU", "ChrF", "CorpusMetric", "MetricScore", "NATIVE_METRICS", "TER",
    "TokenizedSegment", "corpus_bleu", "corpus_chrf", "corpus_statistics",
    "corpus_ter", "native_metric", "score_all_systems", "segment_chrf",
    "segment_ter", "sentence_bleu", "sentence_chrf", "ter", "ter_edits", "tokenize",
]
