"""How the desk results move with the sampling seed.

For each sample seed: scan, then R1 and R2 from the utilitarian start. Prints
one CSV row per seed. The R2 pool can be the LAG-raising single moves
(default) or every single move.
"""

import argparse
import csv
import sys
from pathlib import Path

from rawlskmeans.dataset import encode, ingest_adult, sample_for_parity
from rawlskmeans.operators import PruneConfig
from rawlskmeans.scan import ScanError, scan
from rawlskmeans.traverse import traverse

ROOT = Path(__file__).resolve().parents[1]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--input", default=str(ROOT / "data" / "adult.csv"))
    ap.add_argument("--seeds", type=int, nargs="+", default=list(range(1, 9)))
    ap.add_argument("--scan-seed", type=int, default=1)
    ap.add_argument("--runs", type=int, default=500)
    ap.add_argument("--k", type=int, default=5)
    ap.add_argument("--pools", nargs="+", choices=("improving", "all"), default=["improving"])
    args = ap.parse_args()

    full = encode(ingest_adult(args.input).records)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["sample_seed", "female", "kept", "lag_util", "lag_rawls", "r1_steps"]
               + [f"r2_{p}_steps" for p in args.pools])
    for seed in args.seeds:
        d = sample_for_parity(full, 500, seed)
        try:
            res = scan(d, args.k, args.runs, args.scan_seed)
        except ScanError as e:
            w.writerow([seed, d.group_counts()[0], 0, "", "", ""] + [""] * len(args.pools))
            print(f"# seed {seed}: {e}", file=sys.stderr)
            continue
        start = res.utilitarian_record.assignment
        row = [seed, d.group_counts()[0], len(res.records),
               f"{res.utilitarian_record.point.lag:.6f}", f"{res.rawlsian_record.point.lag:.6f}",
               len(traverse(d, start, "r1"))]
        for pool in args.pools:
            row.append(len(traverse(d, start, "r2", PruneConfig(5, 5, pool=pool))))
        w.writerow(row)
        sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
