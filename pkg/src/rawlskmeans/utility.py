"""Example, group and overall utilities, with incremental evaluation of moves.

The utility of an example is ``delta - d(x, centroid(label(x)))`` with ``d`` the
squared Euclidean distance and centroids recomputed from the current labels.
Group utility is the mean over the group's examples; overall utility the mean
over all examples.

Move evaluation uses per-cluster, per-group sufficient statistics (member count,
feature sum, sum of squared norms). The summed squared distance of a group's
members in cluster ``c`` to a centroid ``m`` is ``Q - 2 m.S + cnt |m|^2``, so a
candidate only needs the statistics of the clusters it touches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .clustering import ClusterAssignment, EmptyClusterError, sq_dists_to
from .dataset import Dataset

TIE = None


@dataclass(frozen=True)
class UtilityPoint:
    """One assignment's location in MAG-LAG space.

    With ``pinned`` set, that group is treated as the LAG regardless of the
    values (ablation mode); otherwise the LAG is whichever group is worse off.
    """

    u0: float
    u1: float
    overall: float
    pinned: int | None = None

    @property
    def group_utility(self) -> tuple[float, float]:
        return (self.u0, self.u1)

    @property
    def lag_group(self) -> int | None:
        if self.pinned is not None:
            return self.pinned
        if self.u0 == self.u1:
            return TIE
        return 0 if self.u0 < self.u1 else 1

    @property
    def lag(self) -> float:
        if self.pinned is not None:
            return self.group_utility[self.pinned]
        return min(self.u0, self.u1)

    @property
    def mag(self) -> float:
        if self.pinned is not None:
            return self.group_utility[1 - self.pinned]
        return max(self.u0, self.u1)

    def as_row(self) -> list:
        lg = self.lag_group
        return [self.u0, self.u1, self.lag, self.mag, self.overall, "tie" if lg is None else lg]


@dataclass(frozen=True, eq=False)
class UtilityState:
    utilities: np.ndarray
    group_sums: tuple[float, float]
    group_counts: tuple[int, int]
    members: tuple[np.ndarray, ...]
    point: UtilityPoint
    delta: float
    # sufficient statistics, indexed [cluster, group]
    counts: np.ndarray
    sums: np.ndarray
    sqnorms: np.ndarray


def _group_utilities(sums: Sequence[float], counts: Sequence[int], delta: float):
    """Group means; an empty group takes the overall mean so lag = mag = overall."""
    n = counts[0] + counts[1]
    overall = (sums[0] + sums[1]) / n if n else delta
    u = [sums[g] / counts[g] if counts[g] else overall for g in (0, 1)]
    return u[0], u[1], overall


def evaluate(
    dataset: Dataset,
    assignment: ClusterAssignment,
    pin_lag: int | None = None,
    mode: str = "assigned",
) -> UtilityState:
    """From-scratch utilities of ``assignment``.

    ``mode="nearest"`` measures each example against its nearest centroid instead
    of its assigned one; it is for inspection and is not used by the search.
    """
    X = dataset.features
    labels = assignment.labels
    k = assignment.k
    C = assignment.centroids
    if mode == "assigned":
        diff = X - C[labels]
        d = np.einsum("nf,nf->n", diff, diff)
    elif mode == "nearest":
        d = sq_dists_to(X, C).min(axis=1)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    u = dataset.delta - d
    g = dataset.groups
    counts_g = (int((g == 0).sum()), int((g == 1).sum()))
    sums_g = (math.fsum(u[g == 0]), math.fsum(u[g == 1]))
    u0, u1, overall = _group_utilities(sums_g, counts_g, dataset.delta)

    F = X.shape[1]
    counts = np.zeros((k, 2))
    sums = np.zeros((k, 2, F))
    sq = np.zeros((k, 2))
    norms = np.einsum("nf,nf->n", X, X)
    members = []
    for c in range(k):
        idx = np.flatnonzero(labels == c)
        members.append(idx)
        for grp in (0, 1):
            sel = idx[g[idx] == grp]
            counts[c, grp] = len(sel)
            sums[c, grp] = X[sel].sum(axis=0)
            sq[c, grp] = math.fsum(norms[sel])
    u.setflags(write=False)
    return UtilityState(
        utilities=u,
        group_sums=sums_g,
        group_counts=counts_g,
        members=tuple(members),
        point=UtilityPoint(u0, u1, overall, pin_lag),
        delta=dataset.delta,
        counts=counts,
        sums=sums,
        sqnorms=sq,
    )


def _cluster_group_dist(cnt, S, Q):
    """Summed squared distance to the cluster mean, per group.

    Shapes: cnt (..., 2), S (..., 2, F), Q (..., 2). Returns (..., 2) and a mask
    of non-empty clusters (...,).
    """
    tot = cnt.sum(axis=-1)
    nonempty = tot > 0
    m = S.sum(axis=-2) / np.where(nonempty, tot, 1.0)[..., None]
    mm = np.einsum("...f,...f->...", m, m)
    mS = np.einsum("...f,...gf->...g", m, S)
    D = Q - 2.0 * mS + cnt * mm[..., None]
    return D, nonempty


def evaluate_moves(
    state: UtilityState,
    dataset: Dataset,
    labels: np.ndarray,
    examples: np.ndarray,
    targets: np.ndarray,
):
    """Vectorised evaluation of P candidates of m moves each.

    ``examples`` and ``targets`` have shape (P, m). Returns ``(u0, u1, overall,
    valid)`` arrays; ``valid`` is False where a candidate would empty a cluster.
    Examples within a candidate must be distinct.
    """
    examples = np.asarray(examples, dtype=np.int64)
    targets = np.asarray(targets, dtype=np.int64)
    P, m = examples.shape
    X = dataset.features
    grp = dataset.groups
    rows = np.arange(P)
    src = labels[examples]

    # affected clusters per candidate; duplicates fold into their first slot
    slots = np.concatenate([src, targets], axis=1)  # (P, 2m)
    ns = slots.shape[1]
    canon = np.tile(np.arange(ns), (P, 1))
    for j in range(ns - 1, 0, -1):
        for i in range(j - 1, -1, -1):
            same = slots[:, i] == slots[:, j]
            canon[same, j] = i
    active = canon == np.arange(ns)

    cnt = state.counts[slots].copy()  # (P, ns, 2)
    S = state.sums[slots].copy()  # (P, ns, 2, F)
    Q = state.sqnorms[slots].copy()  # (P, ns, 2)
    base_D, _ = _cluster_group_dist(cnt, S, Q)

    norms = np.einsum("pmf,pmf->pm", X[examples], X[examples])
    for j in range(m):
        x = X[examples[:, j]]
        g = grp[examples[:, j]]
        a = canon[:, j]
        b = canon[:, m + j]
        cnt[rows, a, g] -= 1
        S[rows, a, g] -= x
        Q[rows, a, g] -= norms[:, j]
        cnt[rows, b, g] += 1
        S[rows, b, g] += x
        Q[rows, b, g] += norms[:, j]

    new_D, nonempty = _cluster_group_dist(cnt, S, Q)
    valid = (nonempty | ~active).all(axis=1)
    change = np.where(active[..., None], new_D - base_D, 0.0).sum(axis=1)  # (P, 2)

    delta = state.delta
    n0, n1 = state.group_counts
    d0 = n0 * delta - state.group_sums[0]
    d1 = n1 * delta - state.group_sums[1]
    D0 = d0 + change[:, 0]
    D1 = d1 + change[:, 1]
    n = n0 + n1
    overall = delta - (D0 + D1) / n
    u0 = delta - D0 / n0 if n0 else overall
    u1 = delta - D1 / n1 if n1 else overall
    u0 = np.broadcast_to(u0, (P,)).copy()
    u1 = np.broadcast_to(u1, (P,)).copy()
    return u0, u1, overall, valid


def evaluate_move_delta(
    state: UtilityState,
    dataset: Dataset,
    assignment: ClusterAssignment,
    moves: Sequence[tuple[int, int]],
) -> UtilityPoint:
    """Point of the assignment after ``moves``, without touching ``state``.

    Raises EmptyClusterError if the moves would leave a cluster empty.
    """
    moves = list(moves)
    if not moves:
        return state.point
    ex = np.array([[mv[0] for mv in moves]])
    tg = np.array([[mv[1] for mv in moves]])
    if len(set(ex[0].tolist())) != len(moves):
        raise ValueError("moves must concern distinct examples")
    if (assignment.labels[ex[0]] == tg[0]).any():
        raise ValueError("move target equals the current label")
    u0, u1, overall, valid = evaluate_moves(state, dataset, assignment.labels, ex, tg)
    if not valid[0]:
        raise EmptyClusterError("move would empty a cluster")
    return UtilityPoint(float(u0[0]), float(u1[0]), float(overall[0]), state.point.pinned)
