"""Shared domain types, configuration and grid arithmetic."""
from __future__ import annotations

import dataclasses
import logging
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

logger = logging.getLogger(__name__)


class MscfError(Exception):
    """Base class for errors raised by the tracker."""


class InvalidArgument(MscfError, ValueError):
    pass


class ConfigError(MscfError):
    pass


class DegenerateResponse(MscfError):
    """Response map whose maximum is not positive."""


@dataclass(frozen=True)
class BoundingBox:
    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if not (self.w > 0 and self.h > 0):
            raise InvalidArgument(f"box must have positive size, got w={self.w}, h={self.h}")

    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2, self.y + self.h / 2)

    def moved_to(self, cx: float, cy: float) -> "BoundingBox":
        return BoundingBox(cx - self.w / 2, cy - self.h / 2, self.w, self.h)

    def as_list(self) -> list[float]:
        return [self.x, self.y, self.w, self.h]


class GridShape(NamedTuple):
    rows: int
    cols: int
    channels: int = 1

    @property
    def size(self) -> int:
        return self.rows * self.cols


@dataclass(frozen=True)
class ResponseMap:
    values: np.ndarray
    max_value: float
    max_pos: tuple[int, int]

    @classmethod
    def from_values(cls, values: np.ndarray) -> "ResponseMap":
        values = np.asarray(values, dtype=float)
        if not np.all(np.isfinite(values)):
            raise InvalidArgument("response map contains non-finite values")
        flat = int(np.argmax(values))
        pos = np.unravel_index(flat, values.shape)
        return cls(values, float(values[pos]), (int(pos[0]), int(pos[1])))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def centered_window(n: int, size: int) -> slice:
    """Index range of a ``size``-long window centred in ``n`` (top-left bias on odd slack)."""
    start = (n - size) // 2
    return slice(start, start + size)


def crop_mask_apply(t: np.ndarray, target_rows: int, target_cols: int) -> np.ndarray:
    """Zero every entry outside the centred ``target_rows x target_cols`` window."""
    t = np.asarray(t)
    rows, cols = t.shape[:2]
    if not (1 <= target_rows <= rows and 1 <= target_cols <= cols):
        raise InvalidArgument(
            f"window {target_rows}x{target_cols} does not fit grid {rows}x{cols}"
        )
    out = np.zeros_like(t)
    sr, sc = centered_window(rows, target_rows), centered_window(cols, target_cols)
    out[sr, sc, ...] = t[sr, sc, ...]
    return out


def circular_shift(m: np.ndarray, dr: int, dc: int) -> np.ndarray:
    """out[i, j] = m[(i - dr) % rows, (j - dc) % cols]."""
    return np.roll(m, (int(dr), int(dc)), axis=(0, 1))


_UNHOUSED_KEYS = ("gamma", "gamma_max")
_D_MIN_MODES = ("half_diagonal", "fixed")


@dataclass(frozen=True)
class MscfConfig:
    lambda1: float = 20.0
    lambda2: float = 840.0
    phi: float = 1.0
    mu0: float = 0.1
    mu_max: float = 10000.0
    beta: float = 10.0
    admm_iters: int = 3
    theta: float = 0.044
    nu: float = 1.0
    delta: float = 0.01
    pedestal_ratio: float = 2.5
    base_altitude: float = 0.1
    learning_rate: float = 0.0158
    train_interval: int = 2
    cell_size: int = 4
    search_padding: float = 4.0
    output_sigma_factor: float = 1.0 / 16
    max_grid_cells: int = 50
    d_min_mode: str = "half_diagonal"
    d_min: float = 0.0
    mtf_enabled: bool = True
    use_gray: bool = True
    use_cn: bool = True
    cn_table: str = ""

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "phi", "nu", "delta", "theta", "base_altitude"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        if not 0 < self.mu0 <= self.mu_max:
            raise ConfigError("require 0 < mu0 <= mu_max")
        if self.beta <= 1:
            raise ConfigError("beta must exceed 1")
        if self.admm_iters < 1:
            raise ConfigError("admm_iters must be >= 1")
        if not 0 < self.learning_rate <= 1:
            raise ConfigError("learning_rate must lie in (0, 1]")
        if self.train_interval < 1 or self.cell_size < 1 or self.max_grid_cells < 1:
            raise ConfigError("train_interval, cell_size and max_grid_cells must be >= 1")
        if self.search_padding <= 0 or self.pedestal_ratio <= 0:
            raise ConfigError("search_padding and pedestal_ratio must be positive")
        if self.d_min_mode not in _D_MIN_MODES:
            raise ConfigError(f"d_min_mode must be one of {_D_MIN_MODES}")

    def replace(self, **changes) -> "MscfConfig":
        return dataclasses.replace(self, **changes)

    # -- flat key = value text format ---------------------------------------

    def dumps(self) -> str:
        lines = ["# MSCF tracker configuration"]
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool):
                text = "true" if value else "false"
            elif isinstance(value, float):
                text = repr(value)
            else:
                text = str(value)
            lines.append(f"{f.name} = {text}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "MscfConfig":
        values: dict[str, str] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"line {lineno}: expected 'key = value'")
            values[key.strip()] = value.strip()
        return cls.from_strings(values)

    @classmethod
    def from_strings(cls, values: dict[str, str]) -> "MscfConfig":
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, text in values.items():
            if key in _UNHOUSED_KEYS:
                logger.warning("config key %r is not used by any update rule; ignored", key)
                continue
            if key not in types:
                raise ConfigError(f"unknown config key {key!r}")
            kwargs[key] = _parse_value(key, types[key], text)
        return cls(**kwargs)

    @classmethod
    def load(cls, path: str | os.PathLike, env: dict[str, str] | None = None) -> "MscfConfig":
        """Read a config file, then apply ``MSCF_<KEY>`` environment overrides."""
        cfg = cls.loads(Path(path).read_text())
        return cfg.with_env(env)

    def with_env(self, env: dict[str, str] | None = None) -> "MscfConfig":
        env = os.environ if env is None else env
        names = {f.name for f in dataclasses.fields(self)}
        overrides = {}
        for key, text in env.items():
            if key.startswith("MSCF_"):
                name = key[5:].lower()
                if name in names:
                    overrides[name] = text
        if not overrides:
            return self
        current = {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}
        parsed = MscfConfig.from_strings(overrides)
        for name in overrides:
            current[name] = getattr(parsed, name)
        return MscfConfig(**current)

    def save(self, path: str | os.PathLike) -> None:
        Path(path).write_text(self.dumps())


def _parse_value(key: str, type_name, text: str):
    type_name = getattr(type_name, "__name__", type_name)
    try:
        if type_name == "bool":
            lowered = text.lower()
            if lowered in ("true", "1", "yes", "on"):
                return True
            if lowered in ("false", "0", "no", "off"):
                return False
            raise ValueError(text)
        if type_name == "int":
            return int(text)
        if type_name == "float":
            value = float(text)
            if not math.isfinite(value):
                raise ValueError(text)
            return value
        return text.strip("'\"")
    except ValueError:
        raise ConfigError(f"bad value for {key}: {text!r}") from None
