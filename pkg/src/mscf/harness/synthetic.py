"""Seeded synthetic sequences: a textured rectangle drifting over a noise background."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from ..core import BoundingBox, InvalidArgument
from .sequences import write_groundtruth, write_image


@dataclass(frozen=True)
class Distractor:
    appear_frame: int = 40  # 1-based
    offset: tuple[float, float] = (-22.0, 0.0)  # (dx, dy) from the target, pixels
    similarity: float = 0.9


@dataclass(frozen=True)
class SynthSpec:
    frame_size: tuple[int, int] = (128, 128)  # (width, height)
    target_size: tuple[int, int] = (24, 24)
    velocity: tuple[float, float] = (2.0, 1.0)
    texture_seed: int = 0
    n_frames: int = 100
    start: Optional[tuple[float, float]] = None  # top-left; default centres the target
    noise_sigma: float = 3.0
    distractor: Optional[Distractor] = None

    def __post_init__(self):
        (fw, fh), (tw, th) = self.frame_size, self.target_size
        if not (0 < tw < fw and 0 < th < fh):
            raise InvalidArgument("target must fit strictly inside the frame")
        if self.n_frames < 1:
            raise InvalidArgument("n_frames must be >= 1")
        if self.distractor is not None and not 0 <= self.distractor.similarity <= 1:
            raise InvalidArgument("distractor similarity must lie in [0, 1]")

    @classmethod
    def from_dict(cls, data: dict) -> "SynthSpec":
        data = dict(data)
        for key in ("frame_size", "target_size", "velocity", "start"):
            if data.get(key) is not None:
                data[key] = tuple(data[key])
        if data.get("distractor") is not None:
            d = dict(data["distractor"])
            if "offset" in d:
                d["offset"] = tuple(d["offset"])
            data["distractor"] = Distractor(**d)
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> "SynthSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return asdict(self)


def _texture(rng: np.random.Generator, h: int, w: int, block: int) -> np.ndarray:
    """Blocky colour texture with fine detail, zero-mean unit-variance per channel."""
    coarse = rng.standard_normal((-(-h // block), -(-w // block), 3))
    tex = np.repeat(np.repeat(coarse, block, axis=0), block, axis=1)[:h, :w]
    tex = tex + 0.5 * rng.standard_normal((h, w, 3))
    return (tex - tex.mean(axis=(0, 1))) / tex.std(axis=(0, 1))


def trajectory(spec: SynthSpec) -> list[BoundingBox]:
    """Constant-velocity top-left positions, reflecting off the frame borders."""
    (fw, fh), (tw, th) = spec.frame_size, spec.target_size
    x, y = spec.start if spec.start is not None else ((fw - tw) / 2, (fh - th) / 2)
    vx, vy = spec.velocity
    boxes = []
    for _ in range(spec.n_frames):
        boxes.append(BoundingBox(x, y, tw, th))
        x, vx = _reflect(x + vx, vx, fw - tw)
        y, vy = _reflect(y + vy, vy, fh - th)
    return boxes


def _reflect(pos: float, vel: float, hi: float) -> tuple[float, float]:
    if pos < 0:
        return -pos, -vel
    if pos > hi:
        return 2 * hi - pos, -vel
    return pos, vel


def _paste(canvas: np.ndarray, patch: np.ndarray, x: float, y: float) -> None:
    h, w = patch.shape[:2]
    x0, y0 = int(round(x)), int(round(y))
    cx0, cy0 = max(x0, 0), max(y0, 0)
    cx1, cy1 = min(x0 + w, canvas.shape[1]), min(y0 + h, canvas.shape[0])
    if cx1 > cx0 and cy1 > cy0:
        canvas[cy0:cy1, cx0:cx1] = patch[cy0 - y0: cy1 - y0, cx0 - x0: cx1 - x0]


def generate_synthetic(spec: SynthSpec) -> tuple[list[np.ndarray], list[BoundingBox]]:
    fw, fh = spec.frame_size
    tw, th = spec.target_size
    rng = np.random.default_rng(spec.texture_seed)
    background = 128 + 20 * _texture(rng, fh, fw, 8)
    target_tex = _texture(rng, th, tw, 4)
    target = np.clip(128 + 60 * target_tex, 0, 255)
    distractor = None
    if spec.distractor is not None:
        s = spec.distractor.similarity
        mixed = s * target_tex + np.sqrt(1 - s * s) * _texture(rng, th, tw, 4)
        mixed = (mixed - mixed.mean(axis=(0, 1))) / mixed.std(axis=(0, 1))
        distractor = np.clip(128 + 60 * mixed, 0, 255)

    truth = trajectory(spec)
    frames = []
    for k, box in enumerate(truth, start=1):
        canvas = background.copy()
        if distractor is not None and k >= spec.distractor.appear_frame:
            dx, dy = spec.distractor.offset
            _paste(canvas, distractor, box.x + dx, box.y + dy)
        _paste(canvas, target, box.x, box.y)
        noise_rng = np.random.default_rng([spec.texture_seed, k])
        canvas = canvas + spec.noise_sigma * noise_rng.standard_normal(canvas.shape)
        frames.append(np.clip(np.rint(canvas), 0, 255).astype(np.uint8))
    return frames, truth


def materialize(spec: SynthSpec, out_dir: str | Path) -> Path:
    """Write ``img/0001.png ...`` and ``groundtruth_rect.txt`` (1-based) under ``out_dir``."""
    out_dir = Path(out_dir)
    img_dir = out_dir / "img"
    img_dir.mkdir(parents=True, exist_ok=True)
    frames, truth = generate_synthetic(spec)
    for k, frame in enumerate(frames, start=1):
        write_image(img_dir / f"{k:04d}.png", frame)
    write_groundtruth(out_dir / "groundtruth_rect.txt", truth)
    (out_dir / "synth_spec.json").write_text(json.dumps(spec.to_dict(), indent=2) + "\n")
    return out_dir
