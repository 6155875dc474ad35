"""The four scoring protocols over one (labels, predictions) pair.

* point-wise: plain point-level precision/recall/F1.
* point-adjust: any hit inside a true event first marks the whole event as
  detected, then point-wise rates are computed on the adjusted series. Kept
  because it is widespread, flagged as deprecated because a skill-free
  random predictor can saturate it (see tsadeval.adversary).
* composite: event-level recall paired with unadjusted point-level
  precision.
* event-wise: event-level recall paired with an event-level precision that
  is discounted by the point-level false-alarm rate.

All scorers return a ProtocolReport with the same shape so reports can be
tabulated uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from tsadeval.metrics import (
    ConfusionCounts,
    LabelSeries,
    PredictionSeries,
    false_alarm_rate,
    harmonic_f1,
    point_confusion,
)

__all__ = [
    "Protocol",
    "DEPRECATED_PROTOCOLS",
    "ProtocolReport",
    "point_adjust",
    "score_point_wise",
    "score_point_adjust",
    "score_composite",
    "score_event_wise",
    "score",
    "score_all",
]


class Protocol(str, Enum):
    """Scoring protocol identifiers; values double as CLI/CSV spellings."""

    POINT_WISE = "point-wise"
    POINT_ADJUST = "point-adjust"
    COMPOSITE = "composite"
    EVENT_WISE = "event-wise"


# Protocols that are implemented for comparability but should not be used
# to rank detectors. Their report rows carry deprecated_protocol=True.
DEPRECATED_PROTOCOLS = frozenset({Protocol.POINT_ADJUST})


@dataclass(frozen=True)
class ProtocolReport:
    """Scores of one protocol, plus event counts where the protocol has them.

    tp_e/fn_e are populated for the event-aware protocols (composite and
    event-wise); fp_e only for event-wise, whose precision is defined over
    predicted segments. far is the point-level false-alarm rate of the
    predictions as scored (for point-adjust, of the adjusted series, which
    equals the raw one since adjustment never adds false positives).
    """

    protocol: Protocol
    precision: float
    recall: float
    f1: float
    far: float
    tp_e: Optional[int] = None
    fp_e: Optional[int] = None
    fn_e: Optional[int] = None

    def __post_init__(self) -> None:
        for name in ("precision", "recall", "f1", "far"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if abs(self.f1 - harmonic_f1(self.precision, self.recall)) > 1e-12:
            raise ValueError("f1 inconsistent with precision/recall")

    @property
    def deprecated(self) -> bool:
        return self.protocol in DEPRECATED_PROTOCOLS


def _require_same_length(labels: LabelSeries, preds: PredictionSeries) -> None:
    if len(labels) != len(preds):
        raise ValueError(
            f"length mismatch: {len(labels)} labels vs {len(preds)} predictions"
        )


def point_adjust(
    labels: LabelSeries, preds: PredictionSeries
) -> PredictionSeries:
    """Expand predictions to cover every true event they touch.

    For each ground-truth event with at least one predicted-positive point,
    all points of that event are marked positive. Points outside true
    events are untouched, so the operation is idempotent and never
    increases the false-positive count.
    """
    _require_same_length(labels, preds)
    adjusted = preds.values.copy()
    for ev in labels.events:
        window = adjusted[ev.start : ev.end + 1]
        if window.any():
            window[:] = 1
    return PredictionSeries(adjusted)


def _detected_event_count(labels: LabelSeries, preds: PredictionSeries) -> int:
    """Number of true events containing at least one positive prediction."""
    if not labels.events:
        return 0
    prefix = np.concatenate(([0], np.cumsum(preds.values, dtype=np.int64)))
    hits = 0
    for ev in labels.events:
        if prefix[ev.end + 1] > prefix[ev.start]:
            hits += 1
    return hits


def _false_segment_count(labels: LabelSeries, preds: PredictionSeries) -> int:
    """Number of predicted segments containing no anomalous point at all."""
    if not preds.segments:
        return 0
    prefix = np.concatenate(([0], np.cumsum(labels.values, dtype=np.int64)))
    false_segments = 0
    for seg in preds.segments:
        if prefix[seg.end + 1] == prefix[seg.start]:
            false_segments += 1
    return false_segments


def _event_recall(labels: LabelSeries, tp_e: int) -> float:
    return tp_e / labels.n_events if labels.n_events > 0 else 0.0


def score_point_wise(
    labels: LabelSeries, preds: PredictionSeries
) -> ProtocolReport:
    """Plain point-level precision/recall/F1 plus the false-alarm rate."""
    counts = point_confusion(labels, preds)
    precision, recall, f1 = _prf(counts)
    return ProtocolReport(
        protocol=Protocol.POINT_WISE,
        precision=precision,
        recall=recall,
        f1=f1,
        far=false_alarm_rate(counts),
    )


def score_point_adjust(
    labels: LabelSeries, preds: PredictionSeries
) -> ProtocolReport:
    """Point-wise rates computed after the point-adjust expansion."""
    adjusted = point_adjust(labels, preds)
    counts = point_confusion(labels, adjusted)
    precision, recall, f1 = _prf(counts)
    return ProtocolReport(
        protocol=Protocol.POINT_ADJUST,
        precision=precision,
        recall=recall,
        f1=f1,
        far=false_alarm_rate(counts),
    )


def score_composite(
    labels: LabelSeries, preds: PredictionSeries
) -> ProtocolReport:
    """Event-level recall harmonically paired with point-level precision."""
    _require_same_length(labels, preds)
    counts = point_confusion(labels, preds)
    precision = _precision(counts)
    tp_e = _detected_event_count(labels, preds)
    recall = _event_recall(labels, tp_e)
    return ProtocolReport(
        protocol=Protocol.COMPOSITE,
        precision=precision,
        recall=recall,
        f1=harmonic_f1(precision, recall),
        far=false_alarm_rate(counts),
        tp_e=tp_e,
        fn_e=labels.n_events - tp_e,
    )


def score_event_wise(
    labels: LabelSeries, preds: PredictionSeries
) -> ProtocolReport:
    """Event-level recall and FAR-discounted event-level precision.

    Precision is tp_e / (tp_e + fp_e) scaled by (1 - FAR), where fp_e
    counts predicted segments that touch no anomalous point and FAR is the
    point-level false-alarm rate. The FAR factor is what makes the
    all-positive prediction score 0 whenever any normal point exists, a
    degenerate case the segment counts alone would reward.
    """
    _require_same_length(labels, preds)
    counts = point_confusion(labels, preds)
    far = false_alarm_rate(counts)
    tp_e = _detected_event_count(labels, preds)
    fp_e = _false_segment_count(labels, preds)
    base = tp_e / (tp_e + fp_e) if tp_e + fp_e > 0 else 0.0
    precision = base * (1.0 - far)
    recall = _event_recall(labels, tp_e)
    return ProtocolReport(
        protocol=Protocol.EVENT_WISE,
        precision=precision,
        recall=recall,
        f1=harmonic_f1(precision, recall),
        far=far,
        tp_e=tp_e,
        fp_e=fp_e,
        fn_e=labels.n_events - tp_e,
    )


_SCORERS = {
    Protocol.POINT_WISE: score_point_wise,
    Protocol.POINT_ADJUST: score_point_adjust,
    Protocol.COMPOSITE: score_composite,
    Protocol.EVENT_WISE: score_event_wise,
}


def score(
    labels: LabelSeries, preds: PredictionSeries, protocol: Protocol
) -> ProtocolReport:
    """Score one pair under one protocol."""
    return _SCORERS[Protocol(protocol)](labels, preds)


def score_all(
    labels: LabelSeries,
    preds: PredictionSeries,
    protocols: tuple[Protocol, ...] = tuple(Protocol),
) -> list[ProtocolReport]:
    """Score one pair under several protocols, in the order given."""
    return [score(labels, preds, p) for p in protocols]


def _precision(counts: ConfusionCounts) -> float:
    denom = counts.tp + counts.fp
    return counts.tp / denom if denom > 0 else 0.0


def _prf(counts: ConfusionCounts) -> tuple[float, float, float]:
    precision = _precision(counts)
    denom = counts.tp + counts.fn
    recall = counts.tp / denom if denom > 0 else 0.0
    return precision, recall, harmonic_f1(precision, recall)
