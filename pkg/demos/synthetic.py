"""Small synthetic WMT-style data shared by the demo scripts.

Systems translate a random reference corpus with a per-system error rate.
Their DA scores follow the same quality ordering plus annotator noise, and
a couple of systems can be made much worse than the rest to play the role of
outliers.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

WORDS = ("the a cat dog bird sat ran flew on over under near mat house tree "
         "river road red small big old quickly slowly").split()


def sentence(rng, lo=5, hi=14):
    return " ".join(rng.choice(WORDS, size=int(rng.integers(lo, hi + 1))))


def degrade(rng, text, rate):
    out = []
    for tok in text.split():
        u = rng.random()
        if u < rate / 2:
            out.append(str(rng.choice(WORDS)))
        elif u >= rate:
            out.append(tok)
    return " ".join(out) or str(rng.choice(WORDS))


def write_language_pair(root, lp, rates, n_segments=60, seed=0):
    """Write ``root/lp`` with reference, system outputs and raw DA rows."""
    rng = np.random.default_rng(seed)
    path = Path(root) / lp
    (path / "systems").mkdir(parents=True, exist_ok=True)
    refs = [sentence(rng) for _ in range(n_segments)]
    (path / "reference.txt").write_text("\n".join(refs) + "\n", encoding="utf-8")
    da = ["system\tsegment\tannotator\traw\tz"]
    for name, rate in rates.items():
        hyps = [degrade(rng, r, rate) for r in refs]
        (path / "systems" / f"{name}.txt").write_text("\n".join(hyps) + "\n", encoding="utf-8")
        for i in range(n_segments):
            raw = float(np.clip(rng.normal(95 - 90 * rate, 12), 0, 100))
            da.append(f"{name}\t{i}\tann{i % 4}\t{raw!r}\t")
    (path / "da.tsv").write_text("\n".join(da) + "\n", encoding="utf-8")
    return path
