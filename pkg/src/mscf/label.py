"""Regression-label shapes: Gaussian peak, cruciform pedestal and their MTF-weighted blend.

All labels are anchored on the centre cell ``(rows // 2, cols // 2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import InvalidArgument


@dataclass(frozen=True)
class GaussianLabel:
    values: np.ndarray
    sigma: float


@dataclass(frozen=True)
class CruciformLabel:
    values: np.ndarray
    bar_width_cells: int
    bar_height_cells: int
    arm_len_rows: int
    arm_len_cols: int
    altitude: float


@dataclass(frozen=True)
class IdealLabel:
    values: np.ndarray
    theta: float
    psi_used: float


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _anchored(n: int, length: int) -> slice:
    start = n // 2 - length // 2
    return slice(start, start + length)


def gaussian_label(
    rows: int, cols: int, target_cells: tuple[int, int], sigma_factor: float
) -> GaussianLabel:
    if rows < 1 or cols < 1:
        raise InvalidArgument("label grid must be at least 1x1")
    sigma = sigma_factor * math.sqrt(target_cells[0] * target_cells[1])
    if sigma <= 0:
        raise InvalidArgument("Gaussian width must be positive")
    dr = np.arange(rows)[:, None] - rows // 2
    dc = np.arange(cols)[None, :] - cols // 2
    values = np.exp(-(dr ** 2 + dc ** 2) / (2 * sigma ** 2))
    return GaussianLabel(values, sigma)


def cruciform_label(
    rows: int, cols: int, target_cells: tuple[int, int], ratio: float, base_altitude: float
) -> CruciformLabel:
    if ratio <= 0:
        raise InvalidArgument("pedestal ratio must be positive")
    rows_t = min(max(int(target_cells[0]), 1), rows)
    cols_t = min(max(int(target_cells[1]), 1), cols)
    arm_cols = min(max(_round_half_up(ratio * cols_t), 1), cols)
    arm_rows = min(max(_round_half_up(ratio * rows_t), 1), rows)
    support = np.zeros((rows, cols), dtype=bool)
    support[_anchored(rows, rows_t), _anchored(cols, arm_cols)] = True
    support[_anchored(rows, arm_rows), _anchored(cols, cols_t)] = True
    return CruciformLabel(
        values=np.where(support, float(base_altitude), 0.0),
        bar_width_cells=cols_t,
        bar_height_cells=rows_t,
        arm_len_rows=arm_rows,
        arm_len_cols=arm_cols,
        altitude=float(base_altitude),
    )


def ideal_label(y1: GaussianLabel, y2: CruciformLabel, theta: float, psi: float) -> IdealLabel:
    if not 0 <= psi <= 1:
        raise InvalidArgument(f"psi must lie in [0, 1], got {psi}")
    if not 0 <= theta * psi <= 1:
        raise InvalidArgument(f"theta * psi must lie in [0, 1], got {theta * psi}")
    return IdealLabel(y1.values + (1 - theta * psi) * y2.values, theta, psi)


def roll_to_origin(label: np.ndarray) -> np.ndarray:
    """Move the centre cell to index (0, 0), the zero-displacement bin."""
    rows, cols = label.shape
    return np.roll(label, (-(rows // 2), -(cols // 2)), axis=(0, 1))
