"""MSCF tracking loop: localize, score mutations, rebuild the label, retrain."""
from __future__ import annotations

import dataclasses
import logging
import math
import time
from dataclasses import dataclass

import numpy as np

from . import features, label, mutation, solver, spectral
from .core import (
    BoundingBox,
    DegenerateResponse,
    GridShape,
    InvalidArgument,
    MscfConfig,
    ResponseMap,
)
from .features import CnTable, FeatureParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchGeometry:
    """Fixed sampling layout derived from the first-frame box."""

    grid: GridShape
    out_rows: int
    out_cols: int
    patch_scale: tuple[float, float]  # source pixels per patch pixel (y, x)
    target_cells: tuple[int, int]
    window: np.ndarray
    omega_base: tuple[label.GaussianLabel, label.CruciformLabel]
    pi: mutation.DistanceWeights


@dataclass(frozen=True)
class TrackerState:
    cfg: MscfConfig
    box: BoundingBox
    model_hat: np.ndarray
    g_hat: np.ndarray
    r_hat: np.ndarray
    r_prev_hat: np.ndarray
    psi: float
    frame_index: int
    geometry: SearchGeometry
    params: FeatureParams
    cn: CnTable | None = None

    @property
    def grid(self) -> GridShape:
        return self.geometry.grid

    @property
    def target_cells(self) -> tuple[int, int]:
        return self.geometry.target_cells


@dataclass(frozen=True)
class FrameReport:
    box: BoundingBox
    response_max: float | None
    mtf: float
    trained: bool
    elapsed: float
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "box": self.box.as_list(),
            "response_max": self.response_max,
            "mtf": self.mtf,
            "trained": self.trained,
            "elapsed": self.elapsed,
            "degenerate": self.degenerate,
        }


def feature_params(cfg: MscfConfig, cn: CnTable | None) -> FeatureParams:
    use_cn = cfg.use_cn and cn is not None
    if cfg.use_cn and cn is None:
        logger.warning("no color-name table available; using HOG + gray features only")
    return FeatureParams(cell_size=cfg.cell_size, use_cn=use_cn, use_gray=cfg.use_gray)


def search_geometry(box: BoundingBox, cfg: MscfConfig, n_channels: int) -> SearchGeometry:
    cell = cfg.cell_size
    region_h, region_w = cfg.search_padding * box.h, cfg.search_padding * box.w
    # shrink so the feature grid stays within max_grid_cells per side
    shrink = max(1.0, max(region_h, region_w) / (cfg.max_grid_cells * cell))
    rows = max(1, int(math.floor(region_h / (shrink * cell) + 0.5)))
    cols = max(1, int(math.floor(region_w / (shrink * cell) + 0.5)))
    out_rows, out_cols = rows * cell, cols * cell
    scale = (region_h / out_rows, region_w / out_cols)
    target_cells = (
        min(rows, max(1, int(math.floor(box.h / (scale[0] * cell) + 0.5)))),
        min(cols, max(1, int(math.floor(box.w / (scale[1] * cell) + 0.5)))),
    )
    y1 = label.gaussian_label(rows, cols, target_cells, cfg.output_sigma_factor)
    y2 = label.cruciform_label(rows, cols, target_cells, cfg.pedestal_ratio, cfg.base_altitude)
    if cfg.d_min_mode == "half_diagonal":
        d_min = mutation.d_min_for_target(target_cells)
    else:
        d_min = cfg.d_min
    return SearchGeometry(
        grid=GridShape(rows, cols, n_channels),
        out_rows=out_rows,
        out_cols=out_cols,
        patch_scale=scale,
        target_cells=target_cells,
        window=features.hann_window(rows, cols),
        omega_base=(y1, y2),
        pi=mutation.build_pi(rows, cols, cfg.nu, cfg.delta, d_min),
    )


def _sample(frame, box, cfg, geometry, params, cn) -> np.ndarray:
    patch = features.extract_patch(frame, box, cfg.search_padding, geometry.out_rows, geometry.out_cols)
    feats = features.extract_features(patch, params, cn if params.use_cn else None)
    return spectral.dft2(feats * geometry.window[..., None])


def _omega_hat(geometry: SearchGeometry, cfg: MscfConfig, psi: float) -> np.ndarray:
    y1, y2 = geometry.omega_base
    omega = label.ideal_label(y1, y2, cfg.theta, psi)
    return spectral.dft2(label.roll_to_origin(omega.values))


def init(frame: np.ndarray, box: BoundingBox, cfg: MscfConfig, cn: CnTable | None = None) -> TrackerState:
    frame = features.check_image(frame)
    if not (box.w > 0 and box.h > 0):
        raise InvalidArgument("degenerate box")
    height, width = frame.shape[:2]
    cx, cy = box.center()
    if not (0 <= cx <= width and 0 <= cy <= height):
        raise InvalidArgument(f"box centre ({cx}, {cy}) outside the {width}x{height} frame")
    params = feature_params(cfg, cn)
    n_channels = features.HOG_CHANNELS + features.CN_DIMS * params.use_cn + params.use_gray
    geometry = search_geometry(box, cfg, n_channels)
    x_hat = _sample(frame, box, cfg, geometry, params, cn)
    omega_hat = _omega_hat(geometry, cfg, 0.0)
    g_hat, r_hat = solver.train(
        solver.TrainInputs(x_hat, omega_hat, omega_hat, 0.0, cfg, geometry.target_cells)
    )
    return TrackerState(
        cfg=cfg,
        box=box,
        model_hat=x_hat,
        g_hat=g_hat,
        r_hat=r_hat,
        r_prev_hat=r_hat,
        psi=0.0,
        frame_index=1,
        geometry=geometry,
        params=params,
        cn=cn,
    )


def localize(
    r: ResponseMap,
    grid: GridShape,
    cell_size: float,
    patch_scale: float | tuple[float, float],
) -> tuple[float, float]:
    """Peak displacement in source pixels as ``(dx, dy)``."""
    if np.isscalar(patch_scale):
        sy = sx = float(patch_scale)
    else:
        sy, sx = patch_scale
    i, j = r.max_pos
    if i > (grid.rows - 1) / 2:
        i -= grid.rows
    if j > (grid.cols - 1) / 2:
        j -= grid.cols
    return j * cell_size * sx, i * cell_size * sy


def clamp_box(box: BoundingBox, width: int, height: int) -> BoundingBox:
    cx, cy = box.center()
    cx = min(max(cx, 1.0), width - 1.0)
    cy = min(max(cy, 1.0), height - 1.0)
    return box.moved_to(cx, cy)


def track(state: TrackerState, frame: np.ndarray) -> tuple[TrackerState, FrameReport]:
    start = time.perf_counter()
    frame = features.check_image(frame)
    cfg, geometry = state.cfg, state.geometry
    frame_index = state.frame_index + 1

    z_hat = _sample(frame, state.box, cfg, geometry, state.params, state.cn)
    response = spectral.correlate(z_hat, state.g_hat)
    box, psi, mtf, degenerate = state.box, state.psi, 0.0, False
    try:
        result = mutation.compute_mtf(response, geometry.pi)
    except DegenerateResponse:
        degenerate = True
        logger.debug("frame %d: degenerate response, box kept", frame_index)
    else:
        mtf = result.mtf
        psi = result.psi if cfg.mtf_enabled else 0.0
        dx, dy = localize(response, geometry.grid, cfg.cell_size, geometry.patch_scale)
        cx, cy = state.box.center()
        box = clamp_box(state.box.moved_to(cx + dx, cy + dy), frame.shape[1], frame.shape[0])

    new_state = dataclasses.replace(state, box=box, psi=psi, frame_index=frame_index)
    trained = frame_index % cfg.train_interval == 0
    if trained:
        x_hat = _sample(frame, box, cfg, geometry, state.params, state.cn)
        model_hat = (1 - cfg.learning_rate) * state.model_hat + cfg.learning_rate * x_hat
        omega_hat = _omega_hat(geometry, cfg, psi)
        g_hat, r_hat = solver.train(
            solver.TrainInputs(model_hat, omega_hat, state.r_hat, psi, cfg,
                               geometry.target_cells, g_init_hat=state.g_hat)
        )
        new_state = dataclasses.replace(
            new_state, model_hat=model_hat, g_hat=g_hat, r_hat=r_hat, r_prev_hat=state.r_hat
        )
    elapsed = time.perf_counter() - start
    report = FrameReport(box, response.max_value, mtf, trained, elapsed, degenerate)
    return new_state, report


class Tracker:
    """Stateful convenience wrapper around :func:`init` / :func:`track`."""

    def __init__(self, cfg: MscfConfig | None = None, cn: CnTable | None = None):
        self.cfg = cfg or MscfConfig()
        self.cn = cn
        self.state: TrackerState | None = None

    def init(self, frame: np.ndarray, box: BoundingBox) -> None:
        self.state = init(frame, box, self.cfg, self.cn)

    def update(self, frame: np.ndarray) -> FrameReport:
        if self.state is None:
            raise RuntimeError("tracker not initialised")
        self.state, report = track(self.state, frame)
        return report
