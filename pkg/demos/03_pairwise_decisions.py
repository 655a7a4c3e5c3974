"""Do metric wins agree with human wins?  Type I/II errors per metric.

Decides every system pair with the metric's significance test (bootstrap for
BLEU/TER, paired t-test for segment-level chrF) and a Wilcoxon rank-sum test
on the human scores, then tallies misses and false alarms.

Run:  python3 demos/03_pairwise_decisions.py
"""

import tempfile

import numpy as np

from mtmeta.data_model import load_assessment, load_corpus
from mtmeta.metrics import score_all_systems
from mtmeta.pairwise import LanguagePairData, PairwiseConfig, agreement_matrix, analyze_all_pairs
from synthetic import write_language_pair

rates = {f"sys{i}": r for i, r in enumerate(np.linspace(0.08, 0.30, 7))}

with tempfile.TemporaryDirectory() as tmp:
    path = write_language_pair(tmp, "xx-en", rates, n_segments=80, seed=3)
    corpus = load_corpus(path / "reference.txt", path / "reference.txt",
                         sorted((path / "systems").glob("*.txt")), "xx-en")
    assessment = load_assessment(path / "da.tsv")

matrix = score_all_systems(corpus, ["BLEU", "TER", "chrF"], segment_level=("chrF",))
data = LanguagePairData("xx-en", matrix, assessment, corpus)
analysis = analyze_all_pairs(data, config=PairwiseConfig(seed=1, bootstrap_samples=500))

print(f"{'metric':<6} {'pairs':>5} {'miss':>5} {'false alarm':>12}")
for m, tally in analysis.error_counts().items():
    print(f"{m:<6} {sum(tally.values()):5d} {tally['type-1']:5d} {tally['type-2']:12d}")

print()
print("BLEU pairs by delta bin (human better / worse / insignificant):")
for label, counts in analysis.summary["BLEU"].items():
    print(f"  {label:<9} {counts['human-better']:3d} {counts['human-worse']:3d} "
          f"{counts['human-insignificant']:3d}")

am = agreement_matrix(analysis.decisions)
print()
print("agreement matrix (row errs where column is right; diagonal = total errors):")
print("       " + " ".join(f"{m:>5}" for m in am.metrics))
for i, m in enumerate(am.metrics):
    print(f"{m:<6} " + " ".join(f"{v:5d}" for v in am.counts[i]))
