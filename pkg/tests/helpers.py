"""Synthetic corpora and DA files shared by the tests and demos."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from mtmeta.data_model import DA_HEADER

WORDS = ("the cat dog sat on a mat house red blue runs quickly over under "
         "small big tree river road car sun moon").split()


def random_sentence(rng: np.random.Generator, lo: int = 3, hi: int = 9) -> str:
    return " ".join(rng.choice(WORDS, size=int(rng.integers(lo, hi + 1))))


def corrupt(rng: np.random.Generator, sentence: str, rate: float) -> str:
    """Replace, drop or swap tokens with probability ``rate`` each."""
    tokens = sentence.split()
    out = []
    for tok in tokens:
        u = rng.random()
        if u < rate / 2:
            out.append(str(rng.choice(WORDS)))
        elif u < rate:
            continue
        else:
            out.append(tok)
    if len(out) > 2 and rng.random() < rate:
        i = int(rng.integers(0, len(out) - 1))
        out[i], out[i + 1] = out[i + 1], out[i]
    return " ".join(out) or str(rng.choice(WORDS))


def make_dataset(root: Path, language_pair: str = "xx-yy", n_systems: int = 5,
                 n_segments: int = 30, seed: int = 0, outlier: bool = True) -> Path:
    """Write a dataset directory with outputs, references and segment-level DA.

    System ``sys{i}`` gets corruption rate rising with ``i``; with ``outlier``
    the last system is far worse than the rest, in both outputs and DA.
    """
    rng = np.random.default_rng(seed)
    path = Path(root) / language_pair
    (path / "systems").mkdir(parents=True, exist_ok=True)
    refs = [random_sentence(rng) for _ in range(n_segments)]
    (path / "source.txt").write_text("\n".join(refs) + "\n", encoding="utf-8")
    (path / "reference.txt").write_text("\n".join(refs) + "\n", encoding="utf-8")
    rates = list(np.linspace(0.05, 0.35, n_systems))
    if outlier:
        rates[-1] = 0.9
    lines = ["\t".join(DA_HEADER)]
    for i, rate in enumerate(rates):
        name = f"sys{i}"
        hyps = [corrupt(rng, r, rate) for r in refs]
        (path / "systems" / f"{name}.txt").write_text("\n".join(hyps) + "\n", encoding="utf-8")
        for seg in range(n_segments):
            raw = float(np.clip(rng.normal(90 - 80 * rate, 10), 0, 100))
            lines.append(f"{name}\t{seg}\tann{seg % 3}\t{raw!r}\t")
    (path / "da.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
