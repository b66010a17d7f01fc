"""Sub-peak detection and the mutation threat factor (MTF) of a response map."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DegenerateResponse, InvalidArgument, ResponseMap, circular_shift

__all__ = [
    "ResponseMap", "DistanceWeights", "MtfResult",
    "detect_subpeaks", "build_pi", "compute_mtf", "d_min_for_target",
]

_EXP_CLAMP = 700.0
_FLUSH = 1e-300


@dataclass(frozen=True)
class DistanceWeights:
    weights: np.ndarray
    nu: float
    delta: float
    d_min: float


@dataclass(frozen=True)
class MtfResult:
    threat_map: np.ndarray
    mtf: float
    psi: float


def detect_subpeaks(r: ResponseMap | np.ndarray) -> np.ndarray:
    """Boolean mask of strict 8-neighbourhood maxima, with wrap-around borders."""
    values = r.values if isinstance(r, ResponseMap) else np.asarray(r, dtype=float)
    mask = np.ones(values.shape, dtype=bool)
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            if dr or dc:
                mask &= values > np.roll(values, (dr, dc), axis=(0, 1))
    return mask


def grid_center(rows: int, cols: int) -> tuple[int, int]:
    return rows // 2, cols // 2


def build_pi(rows: int, cols: int, nu: float, delta: float, d_min: float) -> DistanceWeights:
    if rows < 1 or cols < 1:
        raise InvalidArgument("grid must be at least 1x1")
    if nu <= 0 or delta <= 0 or d_min < 0:
        raise InvalidArgument("require nu > 0, delta > 0, d_min >= 0")
    i = np.arange(rows)[:, None] - (rows - 1) / 2
    j = np.arange(cols)[None, :] - (cols - 1) / 2
    d = np.hypot(i, j)
    weights = nu / (1.0 + delta * np.exp(np.minimum(d, _EXP_CLAMP)))
    weights[d <= d_min] = 0.0
    weights[weights < _FLUSH] = 0.0
    return DistanceWeights(weights, nu, delta, d_min)


def compute_mtf(r: ResponseMap, pi: DistanceWeights) -> MtfResult:
    """Distance-weighted relative height of the most threatening sub-peak.

    The map is first rolled so its global maximum sits on the centre cell,
    which puts the main peak inside the zero disk of ``pi``.
    """
    if r.values.shape != pi.weights.shape:
        raise InvalidArgument(f"shape mismatch: {r.values.shape} vs {pi.weights.shape}")
    if not r.max_value > 0:
        raise DegenerateResponse(f"response maximum {r.max_value} is not positive")
    rows, cols = r.values.shape
    cr, cc = grid_center(rows, cols)
    shifted = circular_shift(r.values, cr - r.max_pos[0], cc - r.max_pos[1])
    peaks = detect_subpeaks(shifted)
    threat = np.where(peaks, shifted, 0.0) / r.max_value * pi.weights
    mtf = float(threat.max())
    return MtfResult(threat, mtf, min(max(mtf, 0.0), 1.0))


def d_min_for_target(target_cells: tuple[int, int]) -> float:
    """Half the target diagonal, in cells."""
    return 0.5 * math.hypot(*target_cells)
