"""Mutation-sensitive correlation filter (MSCF) visual tracker."""
from .core import BoundingBox, GridShape, MscfConfig, ResponseMap
from .tracker import FrameReport, Tracker, TrackerState, init, localize, track

__version__ = "0.1.0"

__all__ = [
    "BoundingBox", "GridShape", "MscfConfig", "ResponseMap",
    "FrameReport", "Tracker", "TrackerState", "init", "localize", "track",
]
