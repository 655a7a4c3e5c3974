"""Median/MAD outlier detection over human system scores, and Pearson's r."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    AlignmentError,
    InsufficientDataError,
    InvalidInputError,
    UndefinedCorrelationError,
)

# Consistency constant printed with the MAD formula; 1/Phi^-1(3/4) = 1.4826...
MAD_SCALE = 1.483
DEFAULT_CUTOFF = 2.5


def _as_array(values: Sequence[float], min_len: int = 1) -> np.ndarray:
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size < min_len:
        if arr.size == 0:
            raise InvalidInputError("empty input")
        raise InsufficientDataError(f"need at least {min_len} values, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("input contains non-finite values")
    return arr


def median(values: Sequence[float]) -> float:
    return float(np.median(_as_array(values)))


def mad(values: Sequence[float]) -> float:
    """Scaled median absolute deviation, ``1.483 * median(|s - median(s)|)``."""
    arr = _as_array(values)
    return MAD_SCALE * float(np.median(np.abs(arr - np.median(arr))))


def robust_z(values: Sequence[float]) -> np.ndarray:
    """``(s - median) / MAD``.

    When MAD is zero, points at the median get 0 and every other point gets
    +/-inf, so a lone deviant in an otherwise constant sample is always flagged.
    """
    arr = _as_array(values, min_len=2)
    med = np.median(arr)
    scale = mad(arr)
    dev = arr - med
    if scale > 0:
        with np.errstate(over="ignore"):
            return dev / scale
    return np.where(dev == 0, 0.0, np.copysign(np.inf, dev))


@dataclass(frozen=True)
class OutlierReport:
    median: float
    mad: float
    cutoff: float
    z: Mapping[str, float]
    outliers: frozenset[str]
    retained: frozenset[str]

    def to_dict(self) -> dict:
        def enc(v: float):
            return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")

        return {
            "median": self.median,
            "mad": self.mad,
            "cutoff": self.cutoff,
            "z": {s: enc(v) for s, v in sorted(self.z.items())},
            "outliers": sorted(self.outliers),
            "retained": sorted(self.retained),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: Mapping) -> "OutlierReport":
        return cls(
            float(d["median"]), float(d["mad"]), float(d["cutoff"]),
            {s: float(v) for s, v in d["z"].items()},
            frozenset(d["outliers"]), frozenset(d["retained"]))


def detect_outliers(scores: Mapping[str, float], cutoff: float = DEFAULT_CUTOFF) -> OutlierReport:
    """Flag systems whose robust z-score magnitude strictly exceeds ``cutoff``."""
    if cutoff <= 0:
        raise InvalidInputError(f"cutoff must be positive, got {cutoff}")
    if len(scores) < 3:
        raise InsufficientDataError(f"outlier detection needs >= 3 systems, got {len(scores)}")
    systems = sorted(scores)
    values = np.array([scores[s] for s in systems], dtype=float)
    z = robust_z(values)
    flagged = np.abs(z) > cutoff
    return OutlierReport(
        median=median(values),
        mad=mad(values),
        cutoff=float(cutoff),
        z={s: float(v) for s, v in zip(systems, z)},
        outliers=frozenset(s for s, f in zip(systems, flagged) if f),
        retained=frozenset(s for s, f in zip(systems, flagged) if not f),
    )


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation; raises if either input is constant."""
    x = _as_array(x)
    y = _as_array(y)
    if x.size != y.size:
        raise AlignmentError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 3:
        raise InsufficientDataError(f"Pearson's r needs >= 3 points, got {x.size}")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise UndefinedCorrelationError("zero variance: correlation undefined")
    dx = x - x.mean()
    dy = y - y.mean()
    # r is scale free; rescaling keeps the sums of squares away from under/overflow
    dx /= np.abs(dx).max()
    dy /= np.abs(dy).max()
    sxx, syy = float(np.dot(dx, dx)), float(np.dot(dy, dy))
    return float(np.clip(float(np.dot(dx, dy)) / math.sqrt(sxx * syy), -1.0, 1.0))
