"""How two bad systems inflate a metric's correlation with humans.

Builds one language pair with eight ordinary systems and two far worse
ones, scores it natively, then compares Pearson's r with and without the
outliers flagged by the MAD rule, and over top-N and rolling windows.

Run:  python3 demos/02_outliers_and_correlation.py
"""

import tempfile

import numpy as np

from mtmeta.data_model import load_assessment, load_corpus
from mtmeta.meta_eval import (
    correlations_with_without_outliers,
    rank_metrics,
    rolling_window_curve,
    topn_curve,
)
from mtmeta.metrics import score_all_systems
from mtmeta.robust_stats import detect_outliers
from synthetic import write_language_pair

rates = {f"sys{i}": r for i, r in enumerate(np.linspace(0.10, 0.25, 8))}
rates.update({"broken-a": 0.85, "broken-b": 0.9})

with tempfile.TemporaryDirectory() as tmp:
    path = write_language_pair(tmp, "xx-en", rates, seed=7)
    corpus = load_corpus(path / "reference.txt", path / "reference.txt",
                         sorted((path / "systems").glob("*.txt")), "xx-en")
    da = load_assessment(path / "da.tsv").da_scores
    matrix = score_all_systems(corpus, ["BLEU", "TER", "chrF"], segment_level=())

report = detect_outliers(da)
print(f"median DA {report.median:+.3f}, MAD {report.mad:.3f}")
for s in sorted(da, key=da.get):
    flag = "  <- outlier" if s in report.outliers else ""
    print(f"  {s:<9} DA {da[s]:+.3f}  z {report.z[s]:+7.2f}{flag}")

table = correlations_with_without_outliers(da, matrix, language_pair="xx-en", report=report)
print()
print("metric   r(all)  r(-out)   (TER negated so larger is better)")
for m in table.metrics:
    print(f"{m:<7} {table.r[(m, 'all')]:7.3f}  {table.r[(m, 'without-outliers')]:7.3f}")

scores = {m: matrix.oriented_scores(m) for m in table.metrics}
print()
print("winners, all systems:     ", sorted(rank_metrics(da, scores)))
print("winners, outliers removed:", sorted(rank_metrics(da, scores, exclude=report.outliers)))

print()
print("BLEU r over the top-N systems by DA:")
for n, r in topn_curve(da, scores["BLEU"]):
    print(f"  N={n:2d}  r={r:+.3f}")
curve = rolling_window_curve(da, scores["BLEU"], window=4)
print("BLEU r over windows of 4 systems, worst first:",
      " ".join("undef" if r is None else f"{r:+.2f}" for r in curve.values))
