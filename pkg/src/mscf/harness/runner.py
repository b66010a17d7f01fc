"""Run the tracker over sequences and serialise the per-frame trace."""
from __future__ import annotations

import dataclasses
import json
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .. import tracker
from ..core import BoundingBox, InvalidArgument, MscfConfig
from ..evaluation import SequenceResult, summarize
from ..features import CnTable
from .sequences import SequenceSpec, load_sequence, read_groundtruth

SCHEMA_VERSION = 1


def run_frames(
    frames: Iterable[np.ndarray],
    init_box: BoundingBox,
    cfg: MscfConfig,
    cn: Optional[CnTable] = None,
    timing: bool = True,
) -> list[tracker.FrameReport]:
    """Track from ``init_box`` on the first frame; one report per frame."""
    frames = iter(frames)
    try:
        first = next(frames)
    except StopIteration:
        raise InvalidArgument("sequence has no frames") from None
    start = time.perf_counter()
    state = tracker.init(first, init_box, cfg, cn)
    elapsed = time.perf_counter() - start
    reports = [tracker.FrameReport(init_box, None, 0.0, True, elapsed if timing else 0.0)]
    for frame in frames:
        state, report = tracker.track(state, frame)
        if not timing:
            report = dataclasses.replace(report, elapsed=0.0)
        reports.append(report)
    return reports


def trace_document(name: str, cfg: MscfConfig, reports: list[tracker.FrameReport]) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "sequence": name,
        "box_origin": 0,
        "config": dataclasses.asdict(cfg),
        "frames": [r.to_dict() for r in reports],
    }


def dump_json(doc: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def first_valid(truth: list[Optional[BoundingBox]]) -> tuple[int, BoundingBox]:
    for i, box in enumerate(truth):
        if box is not None:
            return i, box
    raise InvalidArgument("ground truth has no valid box")


def track_sequence(
    spec: SequenceSpec, cfg: MscfConfig, cn: Optional[CnTable] = None, timing: bool = True
) -> dict:
    frames, truth = load_sequence(spec)
    start, box = first_valid(truth)
    if start:
        frames = (f for i, f in enumerate(frames) if i >= start)
    reports = run_frames(frames, box, cfg, cn, timing)
    # leading absent-target frames keep the first valid box, untracked
    padding = [tracker.FrameReport(box, None, 0.0, False, 0.0) for _ in range(start)]
    return trace_document(spec.name, cfg, padding + reports)


def load_trace(path: str | Path) -> dict:
    doc = json.loads(Path(path).read_text())
    if doc.get("schema") != SCHEMA_VERSION:
        raise InvalidArgument(f"{path}: unsupported trace schema {doc.get('schema')!r}")
    return doc


def trace_result(doc: dict, truth: list[Optional[BoundingBox]]) -> SequenceResult:
    frames = doc["frames"]
    n = min(len(frames), len(truth))
    predicted = [BoundingBox(*f["box"]) for f in frames[:n]]
    elapsed = [float(f["elapsed"]) for f in frames[:n]]
    return SequenceResult(predicted, list(truth[:n]), elapsed)


def _bench_one(args) -> tuple[str, dict, dict]:
    spec, cfg, cn_path, timing = args
    cn = CnTable.load(cn_path) if cn_path else None
    doc = track_sequence(spec, cfg, cn, timing)
    summary = summarize(trace_result(doc, read_groundtruth(spec.groundtruth)))
    return spec.name, doc, summary


def bench(
    specs: list[SequenceSpec],
    cfg: MscfConfig,
    out_dir: str | Path,
    cn_path: str = "",
    jobs: int = 1,
    timing: bool = True,
) -> dict:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    work = [(s, cfg, cn_path, timing) for s in sorted(specs, key=lambda s: s.name)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_bench_one, work))
    else:
        results = [_bench_one(w) for w in work]
    per_sequence = {}
    for (name, doc, summary), (spec, *_rest) in zip(results, work):
        dump_json(doc, out_dir / f"{name}.json")
        per_sequence[name] = dict(summary, attributes=spec.attributes)
    aggregate = aggregate_summaries(list(per_sequence.values()))
    report = {"schema": SCHEMA_VERSION, "sequences": per_sequence, "mean": aggregate}
    dump_json(report, out_dir / "summary.json")
    return report


def aggregate_summaries(summaries: list[dict]) -> dict:
    """Arithmetic mean of per-sequence precision20 / auc / fps."""
    out = {"count": len(summaries)}
    for key in ("precision20", "auc", "fps"):
        vals = [s[key] for s in summaries if s.get(key) is not None]
        out[key] = float(np.mean(vals)) if vals else None
    return out
