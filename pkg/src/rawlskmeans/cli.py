"""Command-line driver: preprocess -> scan -> traverse -> report.

Every option can also be supplied through an environment variable named
``RAWLSKM_<DEST>`` (for example ``RAWLSKM_K=5`` or ``RAWLSKM_DATASET=data.json``);
explicit flags take precedence.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .clustering import load_assignment, save_assignment
from .dataset import DatasetError, encode, ingest_adult, load_dataset, sample_for_parity, save_dataset
from .operators import PruneConfig
from .report import ReportError, read_points, read_trajectory, render_svg
from .scan import FILTERS, ScanError, scan, write_points
from .traverse import traverse, write_trajectory

ENV_PREFIX = "RAWLSKM_"
log = logging.getLogger("rawlskmeans")


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _percent(text: str) -> float:
    v = float(text)
    if not 0 < v <= 100:
        raise argparse.ArgumentTypeError(f"must lie in (0, 100], got {v}")
    return v


def _group_map(text: str) -> dict[str, int]:
    try:
        pairs = [part.split("=") for part in text.split(",")]
        m = {name.strip(): int(g) for name, g in pairs}
    except ValueError:
        raise argparse.ArgumentTypeError("expected NAME=GROUP,NAME=GROUP") from None
    if sorted(m.values()) != [0, 1]:
        raise argparse.ArgumentTypeError("group map must assign groups 0 and 1")
    return m


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rawlskmeans", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    pre = sub.add_parser("preprocess", help="encode and sample the Adult CSV")
    pre.add_argument("--input", required=True, help="Adult-format CSV")
    pre.add_argument("--out", required=True, help="dataset JSON to write")
    pre.add_argument("--per-class", type=_positive_int, default=500)
    pre.add_argument("--seed", type=int, default=0)
    pre.add_argument("--group-map", type=_group_map, default="Female=0,Male=1")
    pre.add_argument("--full-out", help="also write the encoded dataset before sampling")

    sc = sub.add_parser("scan", help="multi-restart k-means scan")
    sc.add_argument("--dataset", required=True)
    sc.add_argument("--out", required=True, help="output directory")
    sc.add_argument("--k", type=_positive_int, default=5)
    sc.add_argument("--runs", type=_positive_int, default=500)
    sc.add_argument("--seed", type=int, default=0, help="first seed")
    sc.add_argument("--filter", choices=FILTERS, default="minority-lag")
    sc.add_argument("--max-iters", type=_positive_int, default=300)
    sc.add_argument("--init", choices=("random", "kmeans++"), default="random")
    sc.add_argument("--threads", type=_positive_int, default=1)
    sc.add_argument("--svg", action="store_true", help="also write scan.svg")

    tr = sub.add_parser("traverse", help="raise the LAG utility from a start assignment")
    tr.add_argument("--dataset", required=True)
    tr.add_argument("--start", required=True, help="assignment JSON")
    tr.add_argument("--out", required=True, help="trajectory CSV")
    tr.add_argument("--operator", type=str.lower, choices=("r1", "r2"), default="r1")
    tr.add_argument("--p", type=_percent, default=5.0, help="top percent by LAG utility (R2)")
    tr.add_argument("--q", type=_percent, default=5.0, help="top percent by overall utility (R2)")
    tr.add_argument("--pool", choices=("improving", "all"), default="improving",
                    help="single moves ranked for R2 pairs")
    tr.add_argument("--pool-cap", type=_positive_int, default=None)
    tr.add_argument("--cap", type=_nonneg_int, default=2000, help="iteration cap")
    tr.add_argument("--pin-lag", type=int, choices=(0, 1), default=None,
                    help="treat this group as the LAG throughout (ablation)")
    tr.add_argument("--threads", type=_positive_int, default=1)
    tr.add_argument("--svg", help="write the trajectory plot here")
    tr.add_argument("--points", help="scan points CSV drawn behind --svg")
    tr.add_argument("--dump-candidates", help="CSV of every generated candidate")

    rp = sub.add_parser("report", help="render scan points and trajectories to SVG")
    rp.add_argument("--points")
    rp.add_argument("--trajectory", action="append", default=[])
    rp.add_argument("--out", required=True)
    rp.add_argument("--title", default="")
    return p


def _apply_env(parser: argparse.ArgumentParser, environ) -> None:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for sp in action.choices.values():
                _apply_env(sp, environ)
            continue
        if not action.option_strings or action.dest in ("help", "version"):
            continue
        key = ENV_PREFIX + action.dest.upper()
        if key not in environ:
            continue
        value = environ[key]
        if isinstance(action, argparse._StoreTrueAction):
            action.default = value.lower() in ("1", "true", "yes")
        elif isinstance(action, argparse._AppendAction):
            action.default = value.split(os.pathsep)
        else:
            action.default = value  # string defaults go through ``type``
        action.required = False


def _write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("verbose",)}


def cmd_preprocess(args) -> int:
    ingested = ingest_adult(args.input)
    if not ingested.records:
        raise DatasetError(f"{args.input}: no complete records")
    full = encode(ingested.records, args.group_map)
    if args.full_out:
        save_dataset(full, args.full_out)
    data = sample_for_parity(full, args.per_class, args.seed)
    save_dataset(data, args.out)
    n0, n1 = data.group_counts()
    stats = {
        "config": _config(args),
        "ingested": len(ingested.records),
        "rejected": {"missing": ingested.n_missing, "unparseable": ingested.n_unparseable},
        "encoded": full.n,
        "examples": data.n,
        "feature_count": data.feature_count,
        "delta": data.delta,
        "group_counts": {data.group_labels[0]: n0, data.group_labels[1]: n1},
        "scaling": {b.name: [b.lo, b.hi] for b in data.layout if b.kind == "continuous"},
        "dataset_hash": data.content_hash(),
    }
    _write_json(str(args.out) + ".stats.json", stats)
    print(json.dumps(stats, indent=2, sort_keys=True))
    return 0


def cmd_scan(args) -> int:
    data = load_dataset(args.dataset)
    res = scan(data, args.k, args.runs, args.seed, args.filter, args.threads, args.max_iters, args.init)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_points(res.records, out / "points.csv")
    meta = {"dataset_hash": data.content_hash(), "config": _config(args)}
    save_assignment(res.utilitarian_record.assignment, out / "utilitarian.json", **meta)
    save_assignment(res.rawlsian_record.assignment, out / "approx_rawlsian.json", **meta)
    summary = res.summary()
    summary.update(meta)
    _write_json(out / "summary.json", summary)
    if args.svg:
        (out / "scan.svg").write_text(render_svg(read_points(out / "points.csv")))
    u, r = res.utilitarian_record.point, res.rawlsian_record.point
    print(f"retained {len(res.records)}/{res.total_runs} runs; "
          f"utilitarian seed {res.utilitarian_record.seed} (lag {u.lag:.6f}, overall {u.overall:.6f}); "
          f"approx-Rawlsian seed {res.rawlsian_record.seed} (lag {r.lag:.6f}, overall {r.overall:.6f})")
    return 0


def cmd_traverse(args) -> int:
    data = load_dataset(args.dataset)
    start = load_assignment(args.start, data)
    prune = PruneConfig(args.p, args.q, args.pool_cap, args.pool)

    dump = None
    hook = None
    if args.dump_candidates:
        dump = open(args.dump_candidates, "w", newline="")
        writer = csv.writer(dump, lineterminator="\n")
        writer.writerow(["iteration", "index", "op", "U0", "U1", "lag", "mag", "overall"])

        def hook(it, cands):
            for c in cands:
                p = c.point
                writer.writerow([it, c.index, str(c.op), repr(p.u0), repr(p.u1),
                                 repr(p.lag), repr(p.mag), repr(p.overall)])
    try:
        traj = traverse(data, start, args.operator, prune, args.cap, args.threads, args.pin_lag, hook)
    finally:
        if dump is not None:
            dump.close()

    out = Path(args.out)
    write_trajectory(traj, out)
    stem = out.with_suffix("")
    meta = {"dataset_hash": data.content_hash(), "config": _config(args)}
    save_assignment(traj.final, f"{stem}.final.json", **meta)
    end = traj.end
    meta.update({
        "k": start.k,
        "start_seed": start.seed,
        "steps": len(traj),
        "reason": traj.reason,
        "lag_mag_gap": traj.gap,
        "start": {"lag": traj.start.lag, "mag": traj.start.mag, "overall": traj.start.overall},
        "end": {"lag": end.lag, "mag": end.mag, "overall": end.overall},
    })
    _write_json(f"{stem}.meta.json", meta)
    if args.svg:
        bg = read_points(args.points) if args.points else []
        Path(args.svg).write_text(render_svg(bg, [read_trajectory(out)]))
    print(f"{args.operator}: {len(traj)} steps ({traj.reason}); lag {traj.start.lag:.6f} -> {end.lag:.6f}, "
          f"overall {traj.start.overall:.6f} -> {end.overall:.6f}, |lag-mag| {traj.gap:.3g}")
    return 0


def cmd_report(args) -> int:
    scatter = read_points(args.points) if args.points else []
    trajs = [read_trajectory(t) for t in args.trajectory]
    Path(args.out).write_text(render_svg(scatter, trajs, args.title))
    return 0


COMMANDS = {
    "preprocess": cmd_preprocess,
    "scan": cmd_scan,
    "traverse": cmd_traverse,
    "report": cmd_report,
}


def main(argv=None, environ=None) -> int:
    parser = build_parser()
    _apply_env(parser, os.environ if environ is None else environ)
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (DatasetError, ScanError, ReportError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
