"""Reassignment operators: single moves (R1) and pruned pair moves (R2)."""

from __future__ import annotations

import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .clustering import ClusterAssignment, EmptyClusterError
from .dataset import Dataset
from .policy import CandidateEvaluation
from .utility import UtilityPoint, UtilityState, evaluate_moves

CHUNK = 4096

_MOVE_RE = re.compile(r"^x(\d+)->(\d+)$")


@dataclass(frozen=True)
class ReassignmentOp:
    moves: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not 1 <= len(self.moves) <= 2:
            raise ValueError("an operation moves one or two examples")
        if len({m[0] for m in self.moves}) != len(self.moves):
            raise ValueError("examples in an operation must be distinct")

    def __str__(self) -> str:
        return ";".join(f"x{x}->{c}" for x, c in self.moves)

    @classmethod
    def parse(cls, text: str) -> "ReassignmentOp":
        moves = []
        for part in text.split(";"):
            m = _MOVE_RE.match(part.strip())
            if not m:
                raise ValueError(f"bad move {part!r}")
            moves.append((int(m.group(1)), int(m.group(2))))
        return cls(tuple(moves))


@dataclass(frozen=True)
class PruneConfig:
    p_pct: float = 5.0
    q_pct: float = 5.0
    cap: int | None = None
    pool: str = "improving"  # rank only LAG-raising single moves, or "all" of them

    def __post_init__(self):
        for v in (self.p_pct, self.q_pct):
            if not 0 < v <= 100:
                raise ValueError(f"percentages must lie in (0, 100], got {v}")
        if self.pool not in ("all", "improving"):
            raise ValueError(f"unknown pool {self.pool!r}")
        if self.cap is not None and self.cap < 1:
            raise ValueError("cap must be positive")


def apply(dataset: Dataset, assignment: ClusterAssignment, op: ReassignmentOp) -> ClusterAssignment:
    """New assignment with ``op`` applied; the input is left untouched."""
    labels = assignment.labels.copy()
    for x, c in op.moves:
        if not 0 <= c < assignment.k:
            raise ValueError(f"target cluster {c} out of range")
        labels[x] = c
    sizes = np.bincount(labels, minlength=assignment.k)
    if (sizes == 0).any():
        raise EmptyClusterError(f"{op} would empty cluster(s) {np.flatnonzero(sizes == 0).tolist()}")
    centroids = assignment.centroids.copy()
    for c in {assignment.labels[x] for x, _ in op.moves} | {c for _, c in op.moves}:
        centroids[c] = dataset.features[labels == c].mean(axis=0)
    for arr in (labels, centroids, sizes):
        arr.setflags(write=False)
    return ClusterAssignment(labels, assignment.k, centroids, sizes, assignment.seed)


def single_moves(assignment: ClusterAssignment) -> tuple[np.ndarray, np.ndarray]:
    """All (example, target) pairs with target != label, in lexicographic order."""
    n, k = assignment.n, assignment.k
    ex = np.repeat(np.arange(n), k)
    tg = np.tile(np.arange(k), n)
    keep = tg != assignment.labels[ex]
    return ex[keep], tg[keep]


def _chunks(P: int) -> Iterator[slice]:
    for s in range(0, P, CHUNK):
        yield slice(s, min(P, s + CHUNK))


def evaluate_batch(state, dataset, labels, ex, tg, threads: int = 1):
    """Chunked, optionally threaded evaluate_moves; output order is enumeration order."""
    parts = list(_chunks(len(ex)))
    if not parts:
        z = np.zeros(0)
        return z, z, z, np.zeros(0, dtype=bool)
    ex = ex.reshape(len(ex), -1)
    tg = tg.reshape(len(tg), -1)

    def run(sl):
        return evaluate_moves(state, dataset, labels, ex[sl], tg[sl])

    if threads > 1 and len(parts) > 1:
        with ThreadPoolExecutor(threads) as pool:
            res = list(pool.map(run, parts))
    else:
        res = [run(sl) for sl in parts]
    return tuple(np.concatenate([r[i] for r in res]) for i in range(4))


def _lag_mag(u0, u1, pinned):
    if pinned is None:
        return np.minimum(u0, u1), np.maximum(u0, u1)
    return (u0, u1) if pinned == 0 else (u1, u0)


def _collect(ex, tg, u0, u1, overall, keep, pinned) -> list[CandidateEvaluation]:
    out = []
    for i in np.flatnonzero(keep):
        moves = tuple((int(a), int(b)) for a, b in zip(ex[i], tg[i]))
        pt = UtilityPoint(float(u0[i]), float(u1[i]), float(overall[i]), pinned)
        out.append(CandidateEvaluation(ReassignmentOp(moves), pt, int(i)))
    return out


def generate_r1(
    dataset: Dataset,
    state: UtilityState,
    assignment: ClusterAssignment,
    threads: int = 1,
) -> list[CandidateEvaluation]:
    """Single moves that strictly raise the LAG utility and empty no cluster."""
    ex, tg = single_moves(assignment)
    u0, u1, overall, valid = evaluate_batch(state, dataset, assignment.labels, ex, tg, threads)
    pinned = state.point.pinned
    lag, _ = _lag_mag(u0, u1, pinned)
    keep = valid & (lag > state.point.lag)
    return _collect(ex[:, None], tg[:, None], u0, u1, overall, keep, pinned)


def _top(values: np.ndarray, pct: float) -> np.ndarray:
    """Indices in the top ``pct`` percent by value; ties at the cutoff all kept."""
    if len(values) == 0:
        return np.zeros(0, dtype=np.int64)
    count = math.ceil(pct / 100.0 * len(values))
    order = np.argsort(-values, kind="stable")
    cutoff = values[order[count - 1]]
    return np.flatnonzero(values >= cutoff)


def good_tuples(
    dataset: Dataset,
    state: UtilityState,
    assignment: ClusterAssignment,
    prune: PruneConfig,
    threads: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """The pruned single-move pool for pair composition, in enumeration order.

    With the default ``pool="improving"`` only LAG-raising single moves are
    ranked. ``pool="all"`` ranks every single move, those that would empty a
    cluster on their own last; with p = q = 100 the pair search is exhaustive.
    """
    ex, tg = single_moves(assignment)
    u0, u1, overall, valid = evaluate_batch(state, dataset, assignment.labels, ex, tg, threads)
    lag, _ = _lag_mag(u0, u1, state.point.pinned)
    if prune.pool == "improving":
        keep = valid & (lag > state.point.lag)
        ex, tg, lag, overall = ex[keep], tg[keep], lag[keep], overall[keep]
    else:
        # a move that empties a cluster alone can still be half of a valid
        # pair (its partner refills the cluster), so rank it last, not out
        lag = np.where(valid, lag, -np.inf)
        overall = np.where(valid, overall, -np.inf)
    by_lag = _top(lag, prune.p_pct)
    chosen = np.union1d(by_lag, _top(overall, prune.q_pct))
    if prune.cap is not None and len(chosen) > prune.cap:
        ranked = chosen[np.lexsort((chosen, -lag[chosen]))]
        chosen = np.sort(ranked[: prune.cap])
    return ex[chosen], tg[chosen]


def pair_indices(ex: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs i < j over a tuple pool whose examples differ."""
    i, j = np.triu_indices(len(ex), k=1)
    keep = ex[i] != ex[j]
    return i[keep], j[keep]


def generate_r2(
    dataset: Dataset,
    state: UtilityState,
    assignment: ClusterAssignment,
    prune: PruneConfig | None = None,
    threads: int = 1,
) -> list[CandidateEvaluation]:
    """Pair moves from the pruned pool that strictly raise the LAG utility."""
    prune = prune or PruneConfig()
    ex, tg = good_tuples(dataset, state, assignment, prune, threads)
    i, j = pair_indices(ex)
    pex = np.stack([ex[i], ex[j]], axis=1)
    ptg = np.stack([tg[i], tg[j]], axis=1)
    u0, u1, overall, valid = evaluate_batch(state, dataset, assignment.labels, pex, ptg, threads)
    pinned = state.point.pinned
    lag, _ = _lag_mag(u0, u1, pinned)
    keep = valid & (lag > state.point.lag)
    return _collect(pex, ptg, u0, u1, overall, keep, pinned)


def r1_space_size(n: int, k: int) -> int:
    return n * (k - 1)


def r2_space_size(n: int, k: int) -> int:
    return math.comb(n, 2) * (k - 1) ** 2


@dataclass(frozen=True)
class WasteEstimate:
    sampled: int
    lowered: int
    raised: int
    unchanged: int
    emptied: int

    @property
    def fraction_lowered(self) -> float:
        valid = self.sampled - self.emptied
        return self.lowered / valid if valid else float("nan")


def estimate_wasted_pairs(
    dataset: Dataset,
    state: UtilityState,
    assignment: ClusterAssignment,
    samples: int = 100_000,
    seed: int = 0,
    threads: int = 1,
) -> WasteEstimate:
    """Share of uniformly drawn pair moves that lower the LAG utility.

    Pairs are drawn uniformly from the full unpruned pair space; pairs that
    would empty a cluster are counted separately and excluded from the fraction.
    """
    n, k = assignment.n, assignment.k
    if n < 2 or k < 2:
        raise ValueError("pair moves need n >= 2 and k >= 2")
    rng = np.random.default_rng(seed)
    a = rng.integers(0, n, samples)
    b = rng.integers(0, n - 1, samples)
    b = b + (b >= a)  # distinct from a, uniform over the rest
    # target uniform over the k-1 other clusters
    ta = rng.integers(0, k - 1, samples)
    tb = rng.integers(0, k - 1, samples)
    labels = assignment.labels
    ta = ta + (ta >= labels[a])
    tb = tb + (tb >= labels[b])
    u0, u1, _, valid = evaluate_batch(
        state, dataset, labels, np.stack([a, b], 1), np.stack([ta, tb], 1), threads
    )
    lag, _ = _lag_mag(u0, u1, state.point.pinned)
    cur = state.point.lag
    return WasteEstimate(
        sampled=samples,
        lowered=int((valid & (lag < cur)).sum()),
        raised=int((valid & (lag > cur)).sum()),
        unchanged=int((valid & (lag == cur)).sum()),
        emptied=int((~valid).sum()),
    )
