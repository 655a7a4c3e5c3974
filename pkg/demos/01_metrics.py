"""Scoring a toy corpus with the three lexical metrics.

Run:  python3 demos/01_metrics.py
"""

from mtmeta.metrics import corpus_bleu, corpus_chrf, sentence_bleu, sentence_chrf, ter, ter_edits

refs = ["The cat sat on the mat.", "It is raining today.", "He bought three apples."]
hyps = ["The cat sat on a mat.", "Today it is raining.", "He bought 3 apples."]

print("corpus BLEU  %.2f" % corpus_bleu(hyps, refs).value)
print("corpus chrF  %.2f" % corpus_chrf(hyps, refs).value)
print()
print(f"{'hypothesis':<24} {'sBLEU':>6} {'chrF':>6} {'TER':>6}")
for h, r in zip(hyps, refs):
    print(f"{h:<24} {sentence_bleu(h, r).value:6.2f} {sentence_chrf(h, r).value:6.2f} "
          f"{ter(h, r).value:6.3f}")

# TER moves a whole block for the price of one edit, so moving "today" to
# the end costs a single shift; ter_edits returns (total edits, shifts)
print()
print("(edits, shifts), reordered:", ter_edits("today it is raining .", "it is raining today ."))

# greedy shift search is not always optimal: two edits would suffice here
print("(edits, shifts), greedy miss:", ter_edits("a b c c", "c a c b"))
