"""Benchmark-style sequence directories and ground-truth files."""
from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional

import numpy as np
from PIL import Image

from ..core import BoundingBox, MscfError

logger = logging.getLogger(__name__)

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".ppm", ".bmp"}
GT_NAMES = ("groundtruth_rect.txt", "groundtruth.txt", "gt.txt")


class ParseError(MscfError):
    pass


@dataclass
class SequenceSpec:
    frames_dir: Path
    groundtruth: Path
    name: str = ""
    attributes: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.frames_dir = Path(self.frames_dir)
        self.groundtruth = Path(self.groundtruth)
        if not self.name:
            self.name = self.frames_dir.parent.name if self.frames_dir.name == "img" else self.frames_dir.name


def parse_box_line(line: str, lineno: int = 0) -> Optional[BoundingBox]:
    """Parse one ``x,y,w,h`` line (1-based origin). Returns ``None`` for absent targets."""
    fields = [f for f in re.split(r"[,\s]+", line.strip()) if f]
    if len(fields) != 4:
        raise ParseError(f"line {lineno}: expected 4 fields, got {len(fields)}")
    try:
        x, y, w, h = (float(f) for f in fields)
    except ValueError:
        raise ParseError(f"line {lineno}: non-numeric field in {line.strip()!r}") from None
    if any(math.isnan(v) for v in (x, y, w, h)) or w <= 0 or h <= 0:
        return None
    return BoundingBox(x - 1, y - 1, w, h)


def read_groundtruth(path: str | Path) -> list[Optional[BoundingBox]]:
    path = Path(path)
    boxes = []
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        if line.strip():
            boxes.append(parse_box_line(line, lineno))
    return boxes


def format_box_line(box: Optional[BoundingBox]) -> str:
    if box is None:
        return "NaN,NaN,NaN,NaN"
    return ",".join(_num(v) for v in (box.x + 1, box.y + 1, box.w, box.h))


def _num(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def write_groundtruth(path: str | Path, boxes) -> None:
    Path(path).write_text("".join(format_box_line(b) + "\n" for b in boxes))


def _numeric_key(path: Path):
    digits = re.findall(r"\d+", path.stem)
    return (int(digits[-1]) if digits else math.inf, path.name)


def list_frames(frames_dir: str | Path) -> list[Path]:
    frames = [p for p in Path(frames_dir).iterdir() if p.suffix.lower() in IMAGE_SUFFIXES]
    return sorted(frames, key=_numeric_key)


def read_image(path: str | Path) -> np.ndarray:
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


def write_image(path: str | Path, img: np.ndarray) -> None:
    Image.fromarray(np.ascontiguousarray(img, dtype=np.uint8)).save(path)


def load_sequence(spec: SequenceSpec) -> tuple[Iterator[np.ndarray], list[Optional[BoundingBox]]]:
    """Lazy frame iterator plus ground truth, truncated to the shorter of the two."""
    if not spec.frames_dir.is_dir():
        raise FileNotFoundError(spec.frames_dir)
    if not spec.groundtruth.is_file():
        raise FileNotFoundError(spec.groundtruth)
    truth = read_groundtruth(spec.groundtruth)
    frames = list_frames(spec.frames_dir)
    n = min(len(frames), len(truth))
    if len(frames) != len(truth):
        logger.warning("%s: %d frames but %d ground-truth rows; using %d",
                       spec.name, len(frames), len(truth), n)
    return (read_image(p) for p in frames[:n]), truth[:n]


def find_groundtruth(seq_dir: Path) -> Path:
    for name in GT_NAMES:
        if (seq_dir / name).is_file():
            return seq_dir / name
    candidates = sorted(p for p in seq_dir.glob("*.txt") if p.name != "attributes.txt")
    if not candidates:
        raise FileNotFoundError(f"no ground-truth file in {seq_dir}")
    return candidates[0]


def discover(root: str | Path) -> list[SequenceSpec]:
    """Every ``<root>/<name>/img/`` directory with a ground-truth file, by name."""
    specs = []
    for seq_dir in sorted(p for p in Path(root).iterdir() if p.is_dir()):
        if not (seq_dir / "img").is_dir():
            continue
        attrs_file = seq_dir / "attributes.txt"
        attrs = attrs_file.read_text().split() if attrs_file.is_file() else []
        specs.append(SequenceSpec(seq_dir / "img", find_groundtruth(seq_dir), seq_dir.name, attrs))
    return specs
