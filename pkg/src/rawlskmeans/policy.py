"""Candidate selection in MAG-LAG space, and the skyline it relies on."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

from .utility import UtilityPoint

if TYPE_CHECKING:
    from .operators import ReassignmentOp

NE = "NE"
NW = "NW"
NULL = "null"


@dataclass(frozen=True)
class CandidateEvaluation:
    op: "ReassignmentOp"
    point: UtilityPoint
    index: int


@dataclass(frozen=True)
class Selection:
    candidate: CandidateEvaluation | None
    branch: str

    @property
    def is_null(self) -> bool:
        return self.candidate is None


def skyline(points: Sequence[UtilityPoint]) -> list[UtilityPoint]:
    """Points not strictly dominated in both LAG and MAG utility.

    ``p`` is dropped iff some ``s`` has ``s.lag > p.lag`` and ``s.mag > p.mag``.
    Input order is preserved.
    """
    return [points[i] for i in skyline_indices([(p.lag, p.mag) for p in points])]


def skyline_indices(coords: Sequence[tuple[float, float]]) -> list[int]:
    # Sweep by decreasing lag; a point is dominated iff the best mag among
    # strictly larger lags beats it.
    order = sorted(range(len(coords)), key=lambda i: -coords[i][0])
    keep = []
    best_mag = float("-inf")
    j = 0
    while j < len(order):
        lag = coords[order[j]][0]
        block = []
        while j < len(order) and coords[order[j]][0] == lag:
            block.append(order[j])
            j += 1
        keep.extend(i for i in block if not coords[i][1] < best_mag)
        best_mag = max(best_mag, max(coords[i][1] for i in block))
    return sorted(keep)


def _best(cands: Sequence[CandidateEvaluation]) -> CandidateEvaluation:
    return min(cands, key=lambda c: (-c.point.overall, c.index))


def select_best(current: UtilityPoint, candidates: Sequence[CandidateEvaluation]) -> Selection:
    """Pick the candidate to apply.

    North-east candidates (MAG no worse than now) win, highest overall utility
    first. Failing that, the highest-overall member of the north-west skyline.
    An empty candidate set yields the null operation. Overall-utility ties go
    to the lowest enumeration index.
    """
    if not candidates:
        return Selection(None, NULL)
    ne = [c for c in candidates if c.point.mag >= current.mag]
    if ne:
        return Selection(_best(ne), NE)
    keep = skyline_indices([(c.point.lag, c.point.mag) for c in candidates])
    return Selection(_best([candidates[i] for i in keep]), NW)
