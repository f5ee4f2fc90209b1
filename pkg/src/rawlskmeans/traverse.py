"""Hill-climb on the LAG utility by repeated operator application."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from typing import Callable

from .clustering import ClusterAssignment
from .dataset import Dataset
from .operators import PruneConfig, ReassignmentOp, apply, generate_r1, generate_r2
from .policy import NULL, select_best
from .utility import UtilityPoint, evaluate

log = logging.getLogger(__name__)

NULL_OP = "null-op"
ITERATION_CAP = "iteration-cap"
TRAJECTORY_COLUMNS = ["iteration", "op", "branch", "U0", "U1", "lag", "mag", "overall"]


@dataclass(frozen=True)
class Step:
    iteration: int
    op: ReassignmentOp
    point: UtilityPoint
    branch: str


@dataclass
class Trajectory:
    start: UtilityPoint
    steps: list[Step] = field(default_factory=list)
    reason: str = NULL_OP
    final: ClusterAssignment | None = None

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def end(self) -> UtilityPoint:
        return self.steps[-1].point if self.steps else self.start

    @property
    def gap(self) -> float:
        """|lag - mag| at the final point."""
        return abs(self.end.mag - self.end.lag)

    def points(self) -> list[UtilityPoint]:
        return [self.start] + [s.point for s in self.steps]


def traverse(
    dataset: Dataset,
    start: ClusterAssignment,
    operator: str = "r1",
    prune: PruneConfig | None = None,
    cap: int = 2000,
    threads: int = 1,
    pin_lag: int | None = None,
    on_iteration: Callable[[int, list], None] | None = None,
) -> Trajectory:
    """Apply the best LAG-raising operation until none exists or ``cap`` is hit.

    ``on_iteration(iteration, candidates)`` sees every generated candidate list,
    e.g. for debug dumps.
    """
    operator = operator.lower()
    if operator not in ("r1", "r2"):
        raise ValueError(f"unknown operator {operator!r}")
    if cap < 0:
        raise ValueError("cap must be non-negative")
    assignment = start
    state = evaluate(dataset, assignment, pin_lag=pin_lag)
    traj = Trajectory(start=state.point, final=assignment, reason=ITERATION_CAP)
    for it in range(1, cap + 1):
        if operator == "r1":
            cands = generate_r1(dataset, state, assignment, threads)
        else:
            cands = generate_r2(dataset, state, assignment, prune, threads)
        if on_iteration is not None:
            on_iteration(it, cands)
        sel = select_best(state.point, cands)
        if sel.branch == NULL:
            traj.reason = NULL_OP
            break
        assignment = apply(dataset, assignment, sel.candidate.op)
        state = evaluate(dataset, assignment, pin_lag=pin_lag)
        traj.steps.append(Step(it, sel.candidate.op, state.point, sel.branch))
        traj.final = assignment
        if it % 25 == 0:
            log.info("iteration %d: lag=%.6f mag=%.6f overall=%.6f (%d candidates)",
                     it, state.point.lag, state.point.mag, state.point.overall, len(cands))
    log.info("traverse %s stopped after %d steps (%s), |lag-mag|=%.6g",
             operator, len(traj), traj.reason, traj.gap)
    return traj


def replay(dataset: Dataset, start: ClusterAssignment, ops) -> ClusterAssignment:
    a = start
    for op in ops:
        a = apply(dataset, a, op)
    return a


def write_trajectory(traj: Trajectory, path) -> None:
    """Trajectory CSV. Row 0 is the start assignment (empty op, branch "null")."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRAJECTORY_COLUMNS)
        p = traj.start
        w.writerow([0, "", NULL, repr(p.u0), repr(p.u1), repr(p.lag), repr(p.mag), repr(p.overall)])
        for s in traj.steps:
            p = s.point
            w.writerow([s.iteration, str(s.op), s.branch,
                        repr(p.u0), repr(p.u1), repr(p.lag), repr(p.mag), repr(p.overall)])
