"""Command-line entry point: ``mscf {track,eval,bench,synth}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .core import MscfConfig, MscfError
from .evaluation import write_report
from .features import CnTable
from .harness import runner
from .harness.sequences import SequenceSpec, discover, read_groundtruth
from .harness.synthetic import SynthSpec, materialize

EXIT_USAGE = 2
EXIT_FAILURE = 1


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str, path: str | None = None):
        super().__init__(message)
        self.code, self.kind, self.path = code, kind, path


def _require(path: str, what: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise CliError(EXIT_USAGE, "missing_path", f"{what} not found: {path}", path)
    return p


def _config(args) -> MscfConfig:
    if getattr(args, "config", None):
        return MscfConfig.load(_require(args.config, "config file"))
    return MscfConfig().with_env()


def _cn(cfg: MscfConfig, args) -> str:
    path = getattr(args, "cn_table", None) or cfg.cn_table
    if path:
        _require(path, "color-name table")
    return path or ""


def _frames_dir(seq: Path) -> Path:
    return seq / "img" if (seq / "img").is_dir() else seq


def cmd_track(args) -> int:
    seq = _require(args.seq, "sequence directory")
    gt = _require(args.gt, "ground-truth file")
    cfg = _config(args)
    cn_path = _cn(cfg, args)
    cn = CnTable.load(cn_path) if cn_path else None
    spec = SequenceSpec(_frames_dir(seq), gt, args.name or "")
    doc = runner.track_sequence(spec, cfg, cn, timing=not args.no_timing)
    runner.dump_json(doc, args.out)
    return 0


def cmd_eval(args) -> int:
    doc = runner.load_trace(_require(args.pred, "prediction file"))
    truth = read_groundtruth(_require(args.gt, "ground-truth file"))
    summary = write_report(runner.trace_result(doc, truth), args.out_csv)
    print(json.dumps(summary, sort_keys=True))
    return 0


def cmd_bench(args) -> int:
    root = _require(args.root, "dataset root")
    cfg = _config(args)
    specs = discover(root)
    if args.attribute:
        specs = [s for s in specs if args.attribute in s.attributes]
    if not specs:
        raise CliError(EXIT_USAGE, "empty_dataset", f"no sequences found under {root}", str(root))
    report = runner.bench(specs, cfg, args.out, _cn(cfg, args), args.jobs, not args.no_timing)
    print(json.dumps(report["mean"], sort_keys=True))
    return 0


def cmd_synth(args) -> int:
    spec = SynthSpec.load(_require(args.spec, "synthetic spec")) if args.spec else SynthSpec()
    materialize(spec, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mscf", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("track", help="run the tracker over one sequence")
    p.add_argument("--seq", required=True, help="frame directory (or a directory holding img/)")
    p.add_argument("--gt", required=True, help="ground-truth file; its first valid box initialises")
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.add_argument("--name")
    p.add_argument("--cn-table")
    p.add_argument("--no-timing", action="store_true", help="write elapsed = 0 for reproducible output")
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("eval", help="precision/success curves for a trace")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--out-csv", required=True, help="output prefix")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="track and evaluate every sequence under a root")
    p.add_argument("--root", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config")
    p.add_argument("--cn-table")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--attribute", help="only sequences carrying this tag")
    p.add_argument("--no-timing", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("synth", help="write a synthetic sequence")
    p.add_argument("--spec", help="JSON spec; defaults to the built-in constant-velocity scene")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)
    return parser


def _fail(code: int, kind: str, message: str, path: str | None = None) -> int:
    err = {"error": kind, "message": message}
    if path is not None:
        err["path"] = path
    print(json.dumps(err, sort_keys=True), file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        return _fail(exc.code, exc.kind, str(exc), exc.path)
    except FileNotFoundError as exc:
        return _fail(EXIT_USAGE, "missing_path", str(exc), str(exc.filename or exc.args[0]))
    except (MscfError, ValueError, OSError) as exc:
        return _fail(EXIT_FAILURE, type(exc).__name__, " ".join(str(exc).split()))


if __name__ == "__main__":
    sys.exit(main())
