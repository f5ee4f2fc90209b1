"""Multi-restart k-means scan over MAG-LAG space.

Each seed gives one k-means assignment and one utility point. Among the kept
runs, the utilitarian run maximises overall utility and the approximate
Rawlsian run maximises the LAG utility.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

from .clustering import ClusterAssignment, kmeans
from .dataset import Dataset
from .utility import UtilityPoint, evaluate

FILTERS = ("minority-lag", "none")
POINT_COLUMNS = ["seed", "U0", "U1", "lag", "mag", "overall", "lag_group"]


class ScanError(RuntimeError):
    pass


@dataclass(frozen=True)
class ScanRecord:
    seed: int
    point: UtilityPoint
    assignment: ClusterAssignment


@dataclass
class ScanResult:
    records: list[ScanRecord]
    utilitarian: int
    rawlsian: int
    filter_mode: str
    total_runs: int
    lag_counts: dict = field(default_factory=dict)
    minority: int | None = None

    @property
    def utilitarian_record(self) -> ScanRecord:
        return self.records[self.utilitarian]

    @property
    def rawlsian_record(self) -> ScanRecord:
        return self.records[self.rawlsian]

    def summary(self) -> dict:
        u, r = self.utilitarian_record, self.rawlsian_record
        return {
            "filter": self.filter_mode,
            "total_runs": self.total_runs,
            "retained_runs": len(self.records),
            "lag_group_counts": self.lag_counts,
            "minority_group": self.minority,
            "utilitarian": {"index": self.utilitarian, "seed": u.seed,
                            "lag": u.point.lag, "mag": u.point.mag, "overall": u.point.overall},
            "approx_rawlsian": {"index": self.rawlsian, "seed": r.seed,
                                "lag": r.point.lag, "mag": r.point.mag, "overall": r.point.overall},
        }


def minority_group(dataset: Dataset) -> int:
    n0, n1 = dataset.group_counts()
    if n0 == n1:
        raise ScanError("groups are the same size; the minority group is undefined")
    return 0 if n0 < n1 else 1


def _run(dataset, k, max_iters, init, seed) -> ScanRecord:
    a = kmeans(dataset, k, seed, max_iters=max_iters, init=init)
    return ScanRecord(seed, evaluate(dataset, a).point, a)


def _argmax(values) -> int:
    best = 0
    for i, v in enumerate(values):
        if v > values[best]:
            best = i
    return best


def scan(
    dataset: Dataset,
    k: int,
    num_runs: int,
    base_seed: int = 0,
    filter_mode: str = "minority-lag",
    threads: int = 1,
    max_iters: int = 300,
    init: str = "random",
) -> ScanResult:
    """Run k-means with seeds ``base_seed .. base_seed+num_runs-1``.

    ``minority-lag`` keeps only runs where the smaller group is strictly worse
    off. Records come back in ascending seed order whatever ``threads`` is.
    """
    if num_runs < 1:
        raise ValueError("num_runs must be >= 1")
    if filter_mode not in FILTERS:
        raise ValueError(f"unknown filter {filter_mode!r}")
    minority = minority_group(dataset) if filter_mode == "minority-lag" else None
    seeds = range(base_seed, base_seed + num_runs)

    run = partial(_run, dataset, k, max_iters, init)
    if threads > 1 and num_runs > 1:
        chunk = max(1, num_runs // (4 * threads))
        with ProcessPoolExecutor(threads) as pool:
            runs = list(pool.map(run, seeds, chunksize=chunk))
    else:
        runs = [run(s) for s in seeds]

    counts = {"0": 0, "1": 0, "tie": 0}
    for r in runs:
        lg = r.point.lag_group
        counts["tie" if lg is None else str(lg)] += 1
    kept = runs if minority is None else [r for r in runs if r.point.lag_group == minority]
    if not kept:
        raise ScanError(
            f"no run has group {minority} as the less advantaged group "
            f"(LAG counts over {num_runs} runs: {counts})"
        )
    return ScanResult(
        records=kept,
        utilitarian=_argmax([r.point.overall for r in kept]),
        rawlsian=_argmax([r.point.lag for r in kept]),
        filter_mode=filter_mode,
        total_runs=num_runs,
        lag_counts=counts,
        minority=minority,
    )


def write_points(records, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(POINT_COLUMNS)
        for r in records:
            p = r.point
            lg = p.lag_group
            w.writerow([r.seed, repr(p.u0), repr(p.u1), repr(p.lag), repr(p.mag),
                        repr(p.overall), "tie" if lg is None else lg])
