"""Full desk-scale experiment: preprocess, scan, R1 and R2 traversals,
wasted-pair estimate and the overlay figure.

    python scripts/run_desk.py                 # 500-run scan
    python scripts/run_desk.py --runs 5000     # scan at the original scale

Everything lands in --out (default results/desk); summary.json collects the
numbers reported in the README.
"""

import argparse
import json
import sys
from pathlib import Path

from rawlskmeans.cli import main as cli
from rawlskmeans.clustering import load_assignment
from rawlskmeans.dataset import load_dataset
from rawlskmeans.operators import estimate_wasted_pairs, r2_space_size
from rawlskmeans.utility import evaluate

ROOT = Path(__file__).resolve().parents[1]


def run(argv) -> None:
    print("$ rawlskmeans " + " ".join(argv))
    code = cli(argv)
    if code != 0:
        sys.exit(code)


def main() -> int:
    ap = argparse.ArgumentParser(description="desk-scale experiment")
    ap.add_argument("--input", default=str(ROOT / "data" / "adult.csv"))
    ap.add_argument("--out", type=Path, default=ROOT / "results" / "desk")
    ap.add_argument("--sample-seed", type=int, default=7)
    ap.add_argument("--scan-seed", type=int, default=1)
    ap.add_argument("--runs", type=int, default=500)
    ap.add_argument("--k", type=int, default=5)
    ap.add_argument("--p", type=float, default=5.0)
    ap.add_argument("--q", type=float, default=5.0)
    ap.add_argument("--pool", choices=("improving", "all"), default="improving")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--waste-samples", type=int, default=100_000)
    args = ap.parse_args()

    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    data = out / "data.json"
    scan_dir = out / "scan"
    t = str(args.threads)

    run(["preprocess", "--input", args.input, "--per-class", "500",
         "--seed", str(args.sample_seed), "--out", str(data)])
    run(["scan", "--dataset", str(data), "--k", str(args.k), "--runs", str(args.runs),
         "--seed", str(args.scan_seed), "--filter", "minority-lag", "--threads", t,
         "--out", str(scan_dir), "--svg"])
    start = scan_dir / "utilitarian.json"
    for op in ("r1", "r2"):
        run(["traverse", "--dataset", str(data), "--start", str(start), "--operator", op,
             "--p", str(args.p), "--q", str(args.q), "--pool", args.pool, "--threads", t,
             "--out", str(out / f"traj_{op}.csv")])
    run(["report", "--points", str(scan_dir / "points.csv"),
         "--trajectory", str(out / "traj_r1.csv"), "--trajectory", str(out / "traj_r2.csv"),
         "--title", "R1 (orange) and R2 (green) from the utilitarian start",
         "--out", str(out / "overlay.svg")])

    dataset = load_dataset(data)
    a = load_assignment(start, dataset)
    w = estimate_wasted_pairs(dataset, evaluate(dataset, a), a, samples=args.waste_samples, seed=0)
    scan_summary = json.loads((scan_dir / "summary.json").read_text())
    metas = {op: json.loads((out / f"traj_{op}.meta.json").read_text()) for op in ("r1", "r2")}
    summary = {
        "dataset_hash": dataset.content_hash(),
        "group_counts": dict(zip(dataset.group_labels, dataset.group_counts())),
        "scan": {key: scan_summary[key] for key in
                 ("retained_runs", "total_runs", "lag_group_counts", "utilitarian", "approx_rawlsian")},
        "traverse": {op: {key: m[key] for key in ("steps", "reason", "lag_mag_gap", "start", "end")}
                     for op, m in metas.items()},
        "wasted_pairs": {
            "space": r2_space_size(dataset.n, args.k),
            "sampled": w.sampled,
            "emptied": w.emptied,
            "fraction_lowered": w.fraction_lowered,
        },
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(json.dumps(summary, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
