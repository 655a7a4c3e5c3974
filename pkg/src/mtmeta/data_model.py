"""Corpora, human assessments and metric score tables, plus their file formats.

File formats (all UTF-8, LF line endings):

* segment files: one segment per line; a single trailing newline is ignored.
* DA file: TSV with header ``system, segment, annotator, raw, z``. ``annotator``
  and ``z`` may be empty; missing z-scores are computed by per-annotator
  standardization of ``raw``.
* score matrix file: TSV with header ``metric, system, level, segment, score``,
  ``level`` in {sys, seg}, ``segment`` empty for sys rows.

TSV files may start with ``#`` comment lines.  The score matrix writer uses one
of them (``# lower-is-better: TER,...``) to persist metric orientation.
"""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    AlignmentError,
    DuplicateKeyError,
    InvalidInputError,
    MissingDataError,
    RangeError,
)

PathLike = str | Path

DA_HEADER = ("system", "segment", "annotator", "raw", "z")
SCORE_HEADER = ("metric", "system", "level", "segment", "score")

# Edit-rate style metrics where a lower score is better.
DEFAULT_LOWER_IS_BETTER = frozenset({"TER", "WER", "PER", "CDER", "CharacTER", "EED"})

_ORIENTATION_PREFIX = "# lower-is-better:"


def _read_segments(path: PathLike) -> list[str]:
    data = Path(path).read_bytes().decode("utf-8")
    if not data:
        raise InvalidInputError(f"{path}: empty file")
    lines = data.split("\n")
    if lines[-1] == "":
        lines.pop()
    return lines


@dataclass(frozen=True)
class EvalCorpus:
    """Source, reference and per-system outputs for one language pair."""

    language_pair: str
    sources: tuple[str, ...]
    references: tuple[str, ...]
    systems: Mapping[str, tuple[str, ...]]

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(self.sources))
        object.__setattr__(self, "references", tuple(self.references))
        object.__setattr__(
            self, "systems", {k: tuple(v) for k, v in self.systems.items()})
        n = len(self.references)
        if n == 0:
            raise InvalidInputError("corpus has no segments")
        if len(self.sources) != n:
            raise AlignmentError(
                f"sources have {len(self.sources)} segments, references {n}")
        for sys_id, outputs in self.systems.items():
            if len(outputs) != n:
                raise AlignmentError(
                    f"system {sys_id!r} has {len(outputs)} segments, references {n}")

    @property
    def n_segments(self) -> int:
        return len(self.references)

    @property
    def system_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.systems))


def load_corpus(
    source: PathLike,
    reference: PathLike,
    systems: Mapping[str, PathLike] | Sequence[PathLike],
    language_pair: str = "",
) -> EvalCorpus:
    """Load aligned segment files.

    ``systems`` is either a mapping of system id to path or a sequence of paths,
    in which case each file's name (without its last suffix) is the system id.
    """
    if not isinstance(systems, Mapping):
        named = {}
        for p in systems:
            sys_id = Path(p).stem
            if sys_id in named:
                raise DuplicateKeyError(f"system id {sys_id!r} given twice")
            named[sys_id] = p
        systems = named
    if not systems:
        raise InvalidInputError("no system output files given")

    refs = _read_segments(reference)
    srcs = _read_segments(source)
    if len(srcs) != len(refs):
        raise AlignmentError(
            f"{source}: {len(srcs)} lines, but reference {reference} has {len(refs)}")
    outputs = {}
    for sys_id, p in systems.items():
        lines = _read_segments(p)
        if len(lines) != len(refs):
            raise AlignmentError(
                f"{p}: {len(lines)} lines, but reference {reference} has {len(refs)}")
        outputs[sys_id] = lines
    return EvalCorpus(language_pair, srcs, refs, outputs)


# --------------------------------------------------------------------------
# Direct assessment

def standardize_annotator(
    raw_scores: Sequence[tuple[str | None, float]],
    check_range: bool = True,
) -> list[float]:
    """Per-annotator z-scores, ``(raw - mean) / sd`` with the n-1 divisor.

    Annotators with a single score or zero deviation get z = 0 throughout.
    """
    groups: dict[str | None, list[int]] = defaultdict(list)
    values = np.empty(len(raw_scores))
    for i, (annotator, value) in enumerate(raw_scores):
        value = float(value)
        if check_range and not 0.0 <= value <= 100.0:
            raise RangeError(f"raw score {value} outside [0, 100]")
        values[i] = value
        groups[annotator].append(i)

    z = np.zeros(len(raw_scores))
    for idx in groups.values():
        if len(idx) < 2:
            continue
        v = values[idx]
        # compare values directly: the float mean of equal values can be off by an ulp
        if np.all(v == v[0]):
            continue
        sd = v.std(ddof=1)
        if sd > 0:  # zero only through underflow
            z[idx] = (v - v.mean()) / sd
    return z.tolist()


@dataclass(frozen=True)
class AssessmentRecord:
    system: str
    segment: int
    annotator: str | None
    raw: float | None
    z: float


@dataclass(frozen=True)
class HumanAssessment:
    """Segment-level DA records and the derived system scores."""

    records: tuple[AssessmentRecord, ...]
    da_scores: Mapping[str, float] = field(init=False, compare=False)
    counts: Mapping[str, int] = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        by_system: dict[str, list[float]] = defaultdict(list)
        for rec in self.records:
            if rec.raw is not None and not 0.0 <= rec.raw <= 100.0:
                raise RangeError(f"raw score {rec.raw} outside [0, 100]")
            if not math.isfinite(rec.z):
                raise InvalidInputError(f"non-finite z-score for {rec.system!r}")
            by_system[rec.system].append(rec.z)
        # fsum is exactly rounded, so the mean does not depend on record order
        object.__setattr__(
            self, "da_scores",
            {s: math.fsum(v) / len(v) for s, v in by_system.items()})
        object.__setattr__(
            self, "counts", {s: len(v) for s, v in by_system.items()})

    @classmethod
    def from_rows(cls, rows: Iterable[tuple[str, int, str | None, float | None, float | None]]):
        """Build from ``(system, segment, annotator, raw, z)`` tuples.

        Rows with ``z`` of None are standardized per annotator, using the raw
        scores of every such row by that annotator.
        """
        rows = list(rows)
        pending = [i for i, r in enumerate(rows) if r[4] is None]
        for i in pending:
            if rows[i][3] is None:
                raise InvalidInputError(
                    f"row for system {rows[i][0]!r} has neither raw nor z score")
        zs = standardize_annotator([(rows[i][2], rows[i][3]) for i in pending])
        z_by_row = dict(zip(pending, zs))
        records = [
            AssessmentRecord(s, int(seg), ann, None if raw is None else float(raw),
                             float(z) if z is not None else z_by_row[i])
            for i, (s, seg, ann, raw, z) in enumerate(rows)
        ]
        return cls(tuple(records))

    @classmethod
    def from_system_scores(cls, scores: Mapping[str, float]) -> "HumanAssessment":
        """One pseudo-record per system, for data that ships only system means."""
        return cls(tuple(
            AssessmentRecord(s, 0, None, None, float(v)) for s, v in scores.items()))

    @property
    def systems(self) -> tuple[str, ...]:
        return tuple(sorted(self.da_scores))

    def segment_scores(self, system: str) -> np.ndarray:
        """All z-scores recorded for ``system``, in record order."""
        z = [r.z for r in self.records if r.system == system]
        if not z:
            raise MissingDataError(f"no DA records for system {system!r}")
        return np.asarray(z)


def system_da_scores(
    assessment: HumanAssessment, systems: Iterable[str] | None = None
) -> dict[str, float]:
    """Mean z-score per system, optionally restricted to ``systems``."""
    if systems is None:
        return dict(assessment.da_scores)
    out = {}
    for s in systems:
        if s not in assessment.da_scores:
            raise MissingDataError(f"no DA records for system {s!r}")
        out[s] = assessment.da_scores[s]
    return out


def _data_lines(text: str) -> tuple[list[str], list[str]]:
    comments, body = [], []
    for line in text.split("\n"):
        if not body and line.startswith("#"):
            comments.append(line)
        elif line.strip():
            body.append(line)
    return comments, body


def _parse_float(cell: str, what: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise InvalidInputError(f"non-numeric {what}: {cell!r}") from None
    if not math.isfinite(value):
        raise InvalidInputError(f"non-finite {what}: {cell!r}")
    return value


def _check_header(header: list[str], expected: tuple[str, ...], path) -> None:
    if tuple(h.strip() for h in header) != expected:
        raise InvalidInputError(f"{path}: expected header {expected}, got {tuple(header)}")


def load_assessment(path: PathLike) -> HumanAssessment:
    _, lines = _data_lines(Path(path).read_text(encoding="utf-8"))
    if not lines:
        raise InvalidInputError(f"{path}: empty file")
    reader = csv.reader(lines, delimiter="\t", quoting=csv.QUOTE_NONE)
    _check_header(next(reader), DA_HEADER, path)
    rows = []
    for lineno, cells in enumerate(reader, start=2):
        if len(cells) != len(DA_HEADER):
            raise InvalidInputError(f"{path}:{lineno}: expected 5 columns, got {len(cells)}")
        system, segment, annotator, raw, z = cells
        try:
            seg = int(segment)
        except ValueError:
            raise InvalidInputError(f"{path}:{lineno}: bad segment index {segment!r}") from None
        rows.append((
            system,
            seg,
            annotator or None,
            _parse_float(raw, "raw score") if raw else None,
            _parse_float(z, "z-score") if z else None,
        ))
    return HumanAssessment.from_rows(rows)


def write_assessment(assessment: HumanAssessment, path: PathLike, header: Sequence[str] = ()) -> None:
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n", quoting=csv.QUOTE_NONE)
    writer.writerow(DA_HEADER)
    for r in assessment.records:
        writer.writerow([
            r.system, r.segment, r.annotator or "",
            "" if r.raw is None else repr(r.raw), repr(r.z)])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


# --------------------------------------------------------------------------
# Metric scores

@dataclass(frozen=True)
class ScoreMatrix:
    """System-level (and optionally segment-level) scores keyed by (metric, system)."""

    system_scores: Mapping[tuple[str, str], float]
    segment_scores: Mapping[tuple[str, str], tuple[float, ...]] = field(default_factory=dict)
    higher_is_better: Mapping[str, bool] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "system_scores", dict(self.system_scores))
        object.__setattr__(
            self, "segment_scores",
            {k: tuple(float(x) for x in v) for k, v in self.segment_scores.items()})
        orient = {m: m not in DEFAULT_LOWER_IS_BETTER for m in self.metrics}
        orient.update(self.higher_is_better)
        object.__setattr__(self, "higher_is_better", orient)
        for key in self.segment_scores:
            if key not in self.system_scores:
                raise MissingDataError(f"segment scores without system score for {key}")
        for metric in self.metrics:
            lengths = {len(self.segment_scores[(metric, s)])
                       for s in self.systems(metric) if (metric, s) in self.segment_scores}
            if len(lengths) > 1:
                raise AlignmentError(f"{metric}: segment vectors of differing lengths {sorted(lengths)}")

    @property
    def metrics(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(m for m, _ in self.system_scores))

    @property
    def warnings(self) -> tuple[str, ...]:
        """One message per metric whose system set differs from the union."""
        by_metric: dict[str, set[str]] = defaultdict(set)
        for m, s in self.system_scores:
            by_metric[m].add(s)
        union = set().union(*by_metric.values()) if by_metric else set()
        return tuple(
            f"{m}: missing systems {sorted(union - got)}"
            for m, got in by_metric.items() if got != union)

    def systems(self, metric: str) -> tuple[str, ...]:
        found = tuple(sorted(s for m, s in self.system_scores if m == metric))
        if not found:
            raise MissingDataError(f"no scores for metric {metric!r}")
        return found

    def scores(self, metric: str) -> dict[str, float]:
        return {s: self.system_scores[(metric, s)] for s in self.systems(metric)}

    def oriented_scores(self, metric: str) -> dict[str, float]:
        """System scores negated for lower-is-better metrics, so larger is better."""
        return {s: self.oriented(metric, v) for s, v in self.scores(metric).items()}

    def segments(self, metric: str, system: str) -> np.ndarray:
        try:
            return np.asarray(self.segment_scores[(metric, system)])
        except KeyError:
            raise MissingDataError(f"no segment scores for {metric!r}/{system!r}") from None

    def has_segments(self, metric: str, system: str) -> bool:
        return (metric, system) in self.segment_scores

    def oriented(self, metric: str, value: float) -> float:
        """``value`` signed so that larger always means better."""
        return value if self.higher_is_better[metric] else -value

    def merged(self, other: "ScoreMatrix") -> "ScoreMatrix":
        overlap = set(self.system_scores) & set(other.system_scores)
        if overlap:
            raise DuplicateKeyError(f"both matrices score {sorted(overlap)[0]}")
        return ScoreMatrix(
            {**self.system_scores, **other.system_scores},
            {**self.segment_scores, **other.segment_scores},
            {**self.higher_is_better, **other.higher_is_better},
        )


def load_score_matrix(path: PathLike, lower_is_better: Iterable[str] | None = None) -> ScoreMatrix:
    """Read a score matrix TSV.

    A (metric, system) with segment rows but no sys row gets the mean of its
    segment scores as system score.  Systems missing for some metrics are
    reported in ``warnings`` rather than rejected.
    """
    comments, lines = _data_lines(Path(path).read_text(encoding="utf-8"))
    if not lines:
        raise InvalidInputError(f"{path}: empty file")
    lower = set(DEFAULT_LOWER_IS_BETTER)
    for c in comments:
        if c.startswith(_ORIENTATION_PREFIX):
            lower = {m.strip() for m in c[len(_ORIENTATION_PREFIX):].split(",") if m.strip()}
    if lower_is_better is not None:
        lower = set(lower_is_better)

    reader = csv.reader(lines, delimiter="\t", quoting=csv.QUOTE_NONE)
    _check_header(next(reader), SCORE_HEADER, path)
    sys_scores: dict[tuple[str, str], float] = {}
    seg_cells: dict[tuple[str, str], dict[int, float]] = defaultdict(dict)
    for lineno, cells in enumerate(reader, start=2):
        if len(cells) != len(SCORE_HEADER):
            raise InvalidInputError(f"{path}:{lineno}: expected 5 columns, got {len(cells)}")
        metric, system, level, segment, score = cells
        value = _parse_float(score, f"score at line {lineno}")
        key = (metric, system)
        if level == "sys":
            if key in sys_scores:
                raise DuplicateKeyError(f"{path}:{lineno}: duplicate sys row for {key}")
            sys_scores[key] = value
        elif level == "seg":
            try:
                seg = int(segment)
            except ValueError:
                raise InvalidInputError(f"{path}:{lineno}: bad segment index {segment!r}") from None
            if seg in seg_cells[key]:
                raise DuplicateKeyError(f"{path}:{lineno}: duplicate seg row for {key}, segment {seg}")
            seg_cells[key][seg] = value
        else:
            raise InvalidInputError(f"{path}:{lineno}: level must be 'sys' or 'seg', got {level!r}")

    seg_scores = {}
    for key, cells in seg_cells.items():
        n = max(cells) + 1
        if sorted(cells) != list(range(n)):
            raise AlignmentError(f"{path}: segment indices for {key} are not 0..{n - 1}")
        seg_scores[key] = tuple(cells[i] for i in range(n))
        if key not in sys_scores:
            sys_scores[key] = math.fsum(seg_scores[key]) / n
    metrics = dict.fromkeys(m for m, _ in sys_scores)
    return ScoreMatrix(sys_scores, seg_scores, {m: m not in lower for m in metrics})


def score_matrix_text(matrix: ScoreMatrix, header: Sequence[str] = ()) -> str:
    """The TSV form of ``matrix``, each ``header`` line written as a comment."""
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\n")
    lower = [m for m in matrix.metrics if not matrix.higher_is_better[m]]
    buf.write(f"{_ORIENTATION_PREFIX} {','.join(lower)}\n")
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n", quoting=csv.QUOTE_NONE)
    writer.writerow(SCORE_HEADER)
    for (metric, system), value in matrix.system_scores.items():
        writer.writerow([metric, system, "sys", "", repr(float(value))])
    for (metric, system), values in matrix.segment_scores.items():
        for i, value in enumerate(values):
            writer.writerow([metric, system, "seg", i, repr(float(value))])
    return buf.getvalue()


def write_score_matrix(matrix: ScoreMatrix, path: PathLike, header: Sequence[str] = ()) -> None:
    Path(path).write_text(score_matrix_text(matrix, header), encoding="utf-8")
