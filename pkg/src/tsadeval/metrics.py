"""Binary series containers, run-length segmentation and the point-wise rates.

Everything downstream (protocols, the random-flag study, the PCA baseline)
is built on the primitives here. Conventions used throughout the package:

* indices are 0-based; segments are inclusive on both ends,
* labels and predictions must be exactly 0/1 (booleans are accepted,
  anything else is rejected rather than coerced),
* precision, recall and F1 are defined as 0.0 whenever their denominator
  is 0, and the false-alarm rate of a series with no normal points is 0.0.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

__all__ = [
    "Segment",
    "LabelSeries",
    "PredictionSeries",
    "ConfusionCounts",
    "as_binary_array",
    "segmentize",
    "point_confusion",
    "precision_recall_f1",
    "prf_from_counts",
    "harmonic_f1",
    "false_alarm_rate",
]

FlagsLike = Union[Sequence[int], Iterable[int], np.ndarray]


@dataclass(frozen=True, order=True)
class Segment:
    """Maximal run of consecutive positive points, both ends inclusive."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0:
            raise ValueError(f"segment start must be >= 0, got {self.start}")
        if self.end < self.start:
            raise ValueError(
                f"segment end {self.end} precedes start {self.start}"
            )

    @property
    def length(self) -> int:
        return self.end - self.start + 1

    def overlaps(self, other: "Segment") -> bool:
        return self.start <= other.end and other.start <= self.end


def as_binary_array(flags: FlagsLike) -> np.ndarray:
    """Validate a 0/1 sequence and return it as a 1-D int8 array.

    Raises ValueError on any value other than 0 or 1; nothing is rounded
    or clipped on the way in.
    """
    arr = np.asarray(flags)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D sequence, got shape {arr.shape}")
    if arr.dtype == bool:
        return arr.astype(np.int8)
    if arr.dtype.kind not in "iuf":
        raise ValueError(f"flags must be numeric 0/1, got dtype {arr.dtype}")
    bad = (arr != 0) & (arr != 1)
    if bad.any():
        first = int(np.flatnonzero(bad)[0])
        raise ValueError(
            f"flags must be exactly 0 or 1; index {first} holds {arr[first]!r}"
        )
    return arr.astype(np.int8)


def segmentize(flags: FlagsLike) -> list[Segment]:
    """Extract the maximal runs of 1s as inclusive segments, in order."""
    values = as_binary_array(flags)
    edges = np.diff(values, prepend=np.int8(0), append=np.int8(0))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    return [Segment(int(s), int(e)) for s, e in zip(starts, ends)]


class _BinarySeries:
    """Immutable 0/1 series with lazily cached run segments."""

    __slots__ = ("values", "_segments")

    def __init__(self, values: FlagsLike):
        arr = as_binary_array(values)
        if arr.size == 0:
            raise ValueError("series must hold at least one point")
        arr.setflags(write=False)
        self.values: np.ndarray = arr
        self._segments: list[Segment] | None = None

    def __len__(self) -> int:
        return int(self.values.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, type(self)):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    @property
    def n_points(self) -> int:
        return int(self.values.size)

    @property
    def n_positive(self) -> int:
        return int(np.count_nonzero(self.values))

    def _runs(self) -> list[Segment]:
        if self._segments is None:
            self._segments = segmentize(self.values)
        return self._segments


class LabelSeries(_BinarySeries):
    """Ground-truth series; its positive runs are the anomalous events."""

    @property
    def events(self) -> list[Segment]:
        return self._runs()

    @property
    def n_events(self) -> int:
        return len(self._runs())

    @property
    def n_anomalous(self) -> int:
        return self.n_positive

    @property
    def n_normal(self) -> int:
        return self.n_points - self.n_positive

    @property
    def contamination_rate(self) -> float:
        return self.n_positive / self.n_points


class PredictionSeries(_BinarySeries):
    """Detector output series; its positive runs are predicted segments."""

    @property
    def segments(self) -> list[Segment]:
        return self._runs()


@dataclass(frozen=True)
class ConfusionCounts:
    """Point-level confusion counts for one (labels, predictions) pair."""

    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self) -> None:
        for name in ("tp", "fp", "fn", "tn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def point_confusion(
    labels: LabelSeries, preds: PredictionSeries
) -> ConfusionCounts:
    """Count point-level TP/FP/FN/TN; series lengths must match."""
    if len(labels) != len(preds):
        raise ValueError(
            f"length mismatch: {len(labels)} labels vs {len(preds)} predictions"
        )
    lv = labels.values
    pv = preds.values
    tp = int(np.count_nonzero(lv & pv))
    fp = int(np.count_nonzero(pv)) - tp
    fn = int(np.count_nonzero(lv)) - tp
    tn = lv.size - tp - fp - fn
    return ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn)


def harmonic_f1(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall, 0.0 when both are 0."""
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def prf_from_counts(
    tp: float, fp: float, fn: float
) -> tuple[float, float, float]:
    """(precision, recall, f1) from possibly fractional expected counts.

    Zero denominators yield 0.0 rather than raising, so degenerate series
    (no positives anywhere) score 0 instead of crashing a sweep.
    """
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    return precision, recall, harmonic_f1(precision, recall)


def precision_recall_f1(counts: ConfusionCounts) -> tuple[float, float, float]:
    """(precision, recall, f1) under the zero-denominator-is-zero convention."""
    return prf_from_counts(counts.tp, counts.fp, counts.fn)


def false_alarm_rate(counts: ConfusionCounts) -> float:
    """FP / (FP + TN). A series with no normal points has FAR 0.0."""
    normal = counts.fp + counts.tn
    if normal == 0:
        warnings.warn(
            "false_alarm_rate over a series with no normal points; "
            "returning 0.0 by convention",
            stacklevel=2,
        )
        return 0.0
    return counts.fp / normal
