"""Appearance features: search-patch sampling, 31-channel HOG, color names, gray.

Images are ``(height, width, 3)`` uint8 RGB arrays throughout.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import BoundingBox, ConfigError, InvalidArgument

logger = logging.getLogger(__name__)

CN_ROWS = 32768
CN_DIMS = 10
HOG_CHANNELS = 31

_HOG_TRUNC = 0.2
_HOG_EPS = 1e-4
_TEXTURE_SCALE = 0.2357


@dataclass(frozen=True)
class FeatureParams:
    cell_size: int = 4
    hog_orientations: int = 9
    use_cn: bool = True
    use_gray: bool = True

    def __post_init__(self):
        if self.cell_size < 1:
            raise InvalidArgument("cell_size must be >= 1")


class CnTable:
    """Color-name lookup: 5-bit quantized RGB -> 10 color-name probabilities."""

    def __init__(self, entries: np.ndarray):
        entries = np.asarray(entries, dtype=np.float64)
        if entries.shape != (CN_ROWS, CN_DIMS):
            raise InvalidArgument(f"CN table must be {CN_ROWS}x{CN_DIMS}, got {entries.shape}")
        if entries.min() < 0 or entries.max() > 1:
            raise InvalidArgument("CN probabilities must lie in [0, 1]")
        if np.max(np.abs(entries.sum(axis=1) - 1)) > 1e-3:
            raise InvalidArgument("CN table rows must sum to 1")
        self.entries = entries
        self.entries.flags.writeable = False

    @classmethod
    def load(cls, path: str | os.PathLike) -> "CnTable":
        """Read little-endian float32, 32768 rows x 10 columns, row-major."""
        raw = np.fromfile(Path(path), dtype="<f4")
        if raw.size != CN_ROWS * CN_DIMS:
            raise InvalidArgument(f"{path}: expected {CN_ROWS * CN_DIMS} floats, got {raw.size}")
        return cls(raw.reshape(CN_ROWS, CN_DIMS))

    def save(self, path: str | os.PathLike) -> None:
        self.entries.astype("<f4").tofile(Path(path))

    @staticmethod
    def index(rgb: np.ndarray) -> np.ndarray:
        rgb = np.asarray(rgb).astype(np.int64) // 8
        return rgb[..., 0] + 32 * rgb[..., 1] + 1024 * rgb[..., 2]

    def lookup(self, rgb: np.ndarray) -> np.ndarray:
        return self.entries[self.index(rgb)]


def check_image(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3 or img.shape[0] < 1 or img.shape[1] < 1:
        raise InvalidArgument(f"expected an HxWx3 RGB image, got shape {img.shape}")
    if img.dtype != np.uint8:
        raise InvalidArgument(f"expected uint8 pixels, got {img.dtype}")
    return img


def extract_patch(
    img: np.ndarray, box: BoundingBox, padding: float, out_rows: int, out_cols: int
) -> np.ndarray:
    """Bilinear sample of the padded region around ``box`` with edge replication."""
    img = check_image(img)
    if out_rows < 1 or out_cols < 1:
        raise InvalidArgument("output size must be >= 1")
    if not (box.w > 0 and box.h > 0) or padding <= 0:
        raise InvalidArgument("degenerate box or padding")
    cx, cy = box.center()
    region_w, region_h = padding * box.w, padding * box.h
    sx, sy = region_w / out_cols, region_h / out_rows
    # pixel i covers [i, i+1); sample at output pixel centres
    xs = cx - region_w / 2 + (np.arange(out_cols) + 0.5) * sx - 0.5
    ys = cy - region_h / 2 + (np.arange(out_rows) + 0.5) * sy - 0.5
    return _bilinear(img, ys, xs)


def _bilinear(img: np.ndarray, ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
    height, width = img.shape[:2]
    y0 = np.floor(ys).astype(np.int64)
    x0 = np.floor(xs).astype(np.int64)
    wy = (ys - y0)[:, None, None]
    wx = (xs - x0)[None, :, None]
    y0c, y1c = np.clip(y0, 0, height - 1), np.clip(y0 + 1, 0, height - 1)
    x0c, x1c = np.clip(x0, 0, width - 1), np.clip(x0 + 1, 0, width - 1)
    src = img.astype(np.float64)
    top = src[y0c][:, x0c] * (1 - wx) + src[y0c][:, x1c] * wx
    bottom = src[y1c][:, x0c] * (1 - wx) + src[y1c][:, x1c] * wx
    out = top * (1 - wy) + bottom * wy
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def _centered_gray(patch: np.ndarray, cell: int) -> np.ndarray:
    """Cell-mean ITU-R 601 luma in [0, 1] minus the patch mean, via integer sums so flat patches give exact zeros."""
    rgb = patch.astype(np.int64)
    luma_milli = 299 * rgb[..., 0] + 587 * rgb[..., 1] + 114 * rgb[..., 2]
    sums = _cell_sum(luma_milli, cell)
    centered = sums * sums.size - sums.sum()
    return centered / (sums.size * cell * cell * 255.0 * 1000.0)


def _cell_sum(a: np.ndarray, cell: int) -> np.ndarray:
    rows, cols = a.shape[0] // cell, a.shape[1] // cell
    return a.reshape(rows, cell, cols, cell, *a.shape[2:]).sum(axis=(1, 3))


def gradients(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-pixel gradient (dx, dy) of the RGB channel with the largest magnitude."""
    rgb = img.astype(np.float64) / 255.0
    padded = np.pad(rgb, ((1, 1), (1, 1), (0, 0)), mode="edge")
    dx = (padded[1:-1, 2:] - padded[1:-1, :-2]) / 2
    dy = (padded[2:, 1:-1] - padded[:-2, 1:-1]) / 2
    mag2 = dx * dx + dy * dy
    best = np.argmax(mag2, axis=2)[..., None]
    return (np.take_along_axis(dx, best, axis=2)[..., 0],
            np.take_along_axis(dy, best, axis=2)[..., 0])


def orientation_bins(dx: np.ndarray, dy: np.ndarray, n_orient: int = 9) -> np.ndarray:
    """Nearest of ``2 * n_orient`` signed directions, bin 0 pointing along +x."""
    n_signed = 2 * n_orient
    theta = np.arctan2(dy, dx) % (2 * np.pi)
    return np.rint(theta / (2 * np.pi / n_signed)).astype(np.int64) % n_signed


def hog_features(img: np.ndarray, cell: int, n_orient: int = 9) -> np.ndarray:
    """Felzenszwalb HOG: 2n signed + n unsigned + 4 texture channels per cell."""
    dx, dy = gradients(img)
    mag = np.hypot(dx, dy)
    bins = orientation_bins(dx, dy, n_orient)
    n_signed = 2 * n_orient
    rows, cols = img.shape[0] // cell, img.shape[1] // cell
    # hard assignment of each pixel to its own cell
    onehot = np.zeros(mag.shape + (n_signed,))
    np.put_along_axis(onehot, bins[..., None], mag[..., None], axis=2)
    hist = _cell_sum(onehot[: rows * cell, : cols * cell], cell)

    unsigned = hist[..., :n_orient] + hist[..., n_orient:]
    energy = np.pad((unsigned ** 2).sum(axis=2), 1, mode="edge")
    norms = []
    for dr in (-1, 1):
        for dc in (-1, 1):
            block = (energy[1:-1, 1:-1]
                     + energy[1 + dr: rows + 1 + dr, 1:-1]
                     + energy[1:-1, 1 + dc: cols + 1 + dc]
                     + energy[1 + dr: rows + 1 + dr, 1 + dc: cols + 1 + dc])
            norms.append(1.0 / np.sqrt(block + _HOG_EPS))

    signed_out = np.zeros((rows, cols, n_signed))
    unsigned_out = np.zeros((rows, cols, n_orient))
    texture = np.zeros((rows, cols, 4))
    for k, nk in enumerate(norms):
        hs = np.minimum(hist * nk[..., None], _HOG_TRUNC)
        signed_out += 0.5 * hs
        unsigned_out += 0.5 * np.minimum(unsigned * nk[..., None], _HOG_TRUNC)
        texture[..., k] = _TEXTURE_SCALE * hs.sum(axis=2)
    return np.concatenate([signed_out, unsigned_out, texture], axis=2)


def extract_features(
    patch: np.ndarray, params: FeatureParams, cn: CnTable | None = None
) -> np.ndarray:
    """HOG, then color names, then gray, concatenated along the channel axis."""
    patch = check_image(patch)
    cell = params.cell_size
    if patch.shape[0] % cell or patch.shape[1] % cell:
        raise InvalidArgument(
            f"patch {patch.shape[0]}x{patch.shape[1]} not divisible by cell size {cell}"
        )
    if params.use_cn and cn is None:
        raise ConfigError("color-name features requested but no CN table supplied")
    area = float(cell * cell)
    parts = [hog_features(patch, cell, params.hog_orientations)]
    if params.use_cn:
        parts.append(_cell_sum(cn.lookup(patch), cell) / area)
    if params.use_gray:
        parts.append(_centered_gray(patch, cell)[..., None])
    return np.concatenate(parts, axis=2)


def hann_window(rows: int, cols: int) -> np.ndarray:
    if rows < 1 or cols < 1:
        raise InvalidArgument("window size must be >= 1")
    return np.outer(np.hanning(rows), np.hanning(cols))
