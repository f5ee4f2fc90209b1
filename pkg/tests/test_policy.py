import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from rawlskmeans.operators import ReassignmentOp
from rawlskmeans.policy import NE, NULL, NW, CandidateEvaluation, select_best, skyline, skyline_indices
from rawlskmeans.utility import UtilityPoint


def _pt(mag, lag, overall=0.0):
    return UtilityPoint(lag, mag, overall)


def _cand(i, mag, lag, overall):
    return CandidateEvaluation(ReassignmentOp(((i, 0),)), _pt(mag, lag, overall), i)


def test_skyline_example():
    pts = [_pt(3, 1), _pt(2, 2), _pt(1, 3), _pt(1, 1)]
    assert skyline(pts) == pts[:3]


def test_skyline_single_and_empty():
    assert skyline([_pt(1, 1)]) == [_pt(1, 1)]
    assert skyline([]) == []


def test_skyline_keeps_weakly_dominated():
    # equal in one coordinate is not strict dominance
    assert skyline_indices([(1.0, 2.0), (1.0, 3.0), (2.0, 3.0)]) == [1, 2]
    assert skyline_indices([(1.0, 1.0), (1.0, 1.0)]) == [0, 1]


def test_skyline_random_trials_match_brute_force():
    rng = np.random.default_rng(0)
    for trial in range(100):
        m = int(rng.integers(1, 201))
        if trial % 3 == 0:  # coarse grid to force ties
            coords = rng.integers(0, 6, (m, 2)).astype(float)
        else:
            coords = rng.random((m, 2))
        coords = [tuple(c) for c in coords.tolist()]
        assert skyline_indices(coords) == oracles.skyline(coords)


CURRENT = _pt(2.0, 1.0, 1.5)
A = (2.1, 1.2, 1.9)
B = (1.8, 1.5, 1.7)
C = (1.9, 1.1, 1.8)


def test_select_ne_branch():
    cands = [_cand(i, *v) for i, v in enumerate([A, B, C])]
    sel = select_best(CURRENT, cands)
    assert sel.branch == NE and sel.candidate.index == 0


def test_select_nw_skyline():
    cands = [_cand(1, *B), _cand(2, *C)]
    sel = select_best(CURRENT, cands)
    assert sel.branch == NW and sel.candidate.index == 2


def test_select_empty_is_null():
    sel = select_best(CURRENT, [])
    assert sel.is_null and sel.branch == NULL


def test_select_nw_ignores_dominated_high_overall():
    # d has the highest overall but is strictly dominated by e
    d = _cand(0, 1.5, 1.1, 1.95)
    e = _cand(1, 1.6, 1.2, 1.3)
    sel = select_best(CURRENT, [d, e])
    assert sel.candidate is e


def test_select_tie_goes_to_lowest_index():
    cands = [_cand(5, 2.5, 1.2, 1.8), _cand(3, 2.2, 1.3, 1.8)]
    assert select_best(CURRENT, cands).candidate.index == 3


def test_select_ne_uses_weak_mag():
    # mag equal to the current mag still counts as north-east
    sel = select_best(CURRENT, [_cand(0, 2.0, 1.2, 1.6), _cand(1, 1.9, 1.3, 1.7)])
    assert sel.branch == NE and sel.candidate.index == 0


points = st.lists(
    st.tuples(st.integers(0, 8), st.integers(0, 8), st.floats(0, 10, allow_nan=False)),
    min_size=0, max_size=40,
)


@settings(max_examples=200, deadline=None)
@given(points, st.integers(0, 8), st.integers(0, 8))
def test_selection_properties(raw, cur_mag, cur_lag):
    current = _pt(float(max(cur_mag, cur_lag)), float(min(cur_mag, cur_lag)))
    cands = [_cand(i, float(max(m, l)), float(min(m, l)), o) for i, (m, l, o) in enumerate(raw)]
    sel = select_best(current, cands)
    if not cands:
        assert sel.is_null
        return
    ne = [c for c in cands if c.point.mag >= current.mag]
    if ne:
        assert sel.branch == NE
        pool = ne
    else:
        assert sel.branch == NW
        pool = [cands[i] for i in oracles.skyline([(c.point.lag, c.point.mag) for c in cands])]
    best = max(c.point.overall for c in pool)
    assert sel.candidate == min((c for c in pool if c.point.overall == best), key=lambda c: c.index)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), max_size=60))
def test_skyline_property(coords):
    keep = skyline_indices(coords)
    assert keep == oracles.skyline(coords)
    # every dropped point is dominated by some kept point
    kept = [coords[i] for i in keep]
    for i, (l, m) in enumerate(coords):
        if i not in keep:
            assert any(l2 > l and m2 > m for l2, m2 in kept)
