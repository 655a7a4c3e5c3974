"""Meta-evaluation of machine translation metrics against human judgements."""

__version__ = "0.1.0"

from .data_model import (
    EvalCorpus,
    HumanAssessment,
    ScoreMatrix,
    load_assessment,
    load_corpus,
    load_score_matrix,
    standardize_annotator,
    system_da_scores,
)
from .meta_eval import (
    CorrelationTable,
    correlations_with_without_outliers,
    rank_metrics,
    rolling_window_curve,
    subsample_correlations,
    topn_curve,
    williams_test,
)
from .metrics import corpus_bleu, corpus_chrf, score_all_systems, sentence_bleu, sentence_chrf, ter
from .pairwise import PairDecision, agreement_matrix, analyze_all_pairs, decide_pair
from .robust_stats import OutlierReport, detect_outliers, mad, pearson, robust_z
from .significance import TestResult, paired_bootstrap, paired_t_test, wilcoxon_rank_sum
