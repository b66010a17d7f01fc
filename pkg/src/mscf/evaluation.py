"""One-pass evaluation: center error, IoU, precision and success curves."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .core import BoundingBox, InvalidArgument

PRECISION_THRESHOLDS = np.arange(0, 51, dtype=float)
SUCCESS_THRESHOLDS = np.linspace(0.0, 1.0, 51)


@dataclass
class SequenceResult:
    """Per-frame predictions and ground truth; ``None`` truth marks an absent target."""

    predicted: list[BoundingBox]
    truth: list[Optional[BoundingBox]]
    elapsed_per_frame: list[float] = field(default_factory=list)

    def __post_init__(self):
        if len(self.predicted) != len(self.truth) or not self.predicted:
            raise InvalidArgument("predicted and truth must be non-empty and of equal length")
        if self.elapsed_per_frame and len(self.elapsed_per_frame) != len(self.predicted):
            raise InvalidArgument("elapsed_per_frame length mismatch")

    def valid_pairs(self) -> list[tuple[BoundingBox, BoundingBox]]:
        return [(p, t) for p, t in zip(self.predicted, self.truth) if t is not None]

    @property
    def excluded(self) -> int:
        return sum(t is None for t in self.truth)


@dataclass
class CurveData:
    thresholds: list[float]
    values: list[float]

    def at(self, threshold: float) -> float:
        idx = int(np.argmin(np.abs(np.asarray(self.thresholds) - threshold)))
        return self.values[idx]

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["threshold", "value"])
            for t, v in zip(self.thresholds, self.values):
                writer.writerow([repr(float(t)), repr(float(v))])


def cle(a: BoundingBox, b: BoundingBox) -> float:
    (ax, ay), (bx, by) = a.center(), b.center()
    return math.hypot(ax - bx, ay - by)


def iou(a: BoundingBox, b: BoundingBox) -> float:
    iw = min(a.x + a.w, b.x + b.w) - max(a.x, b.x)
    ih = min(a.y + a.h, b.y + b.h) - max(a.y, b.y)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    return inter / (a.w * a.h + b.w * b.h - inter)


def precision_curve(res: SequenceResult, thresholds: Sequence[float] = PRECISION_THRESHOLDS) -> CurveData:
    errors = np.array([cle(p, t) for p, t in res.valid_pairs()])
    thresholds = np.asarray(thresholds, dtype=float)
    if errors.size == 0:
        values = np.zeros_like(thresholds)
    else:
        values = (errors[None, :] <= thresholds[:, None]).mean(axis=1)
    return CurveData(thresholds.tolist(), values.tolist())


def success_auc(
    res: SequenceResult, thresholds: Sequence[float] = SUCCESS_THRESHOLDS
) -> tuple[CurveData, float]:
    overlaps = np.array([iou(p, t) for p, t in res.valid_pairs()])
    thresholds = np.asarray(thresholds, dtype=float)
    if overlaps.size == 0:
        values = np.zeros_like(thresholds)
    else:
        values = (overlaps[None, :] > thresholds[:, None]).mean(axis=1)
    return CurveData(thresholds.tolist(), values.tolist()), float(values.mean())


def fps(res: SequenceResult) -> float | None:
    total = float(sum(res.elapsed_per_frame))
    if total <= 0:
        return None
    return len(res.elapsed_per_frame) / total


def summarize(res: SequenceResult) -> dict:
    prec = precision_curve(res)
    _, auc = success_auc(res)
    return {
        "precision20": prec.at(20.0),
        "auc": auc,
        "fps": fps(res),
        "frames": len(res.predicted),
        "excluded": res.excluded,
    }


def write_report(res: SequenceResult, prefix: str | Path) -> dict:
    """Write ``<prefix>_precision.csv``, ``<prefix>_success.csv`` and ``<prefix>_summary.json``."""
    prefix = str(prefix)
    precision_curve(res).to_csv(prefix + "_precision.csv")
    curve, _ = success_auc(res)
    curve.to_csv(prefix + "_success.csv")
    summary = summarize(res)
    Path(prefix + "_summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary
