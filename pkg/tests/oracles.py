"""Brute-force references. Plain Python loops, no use of the package's maths."""

from __future__ import annotations

import itertools


def centroids(X, labels, k):
    F = len(X[0])
    sums = [[0.0] * F for _ in range(k)]
    counts = [0] * k
    for x, c in zip(X, labels):
        counts[c] += 1
        for f in range(F):
            sums[c][f] += x[f]
    return [[s / counts[c] for s in sums[c]] if counts[c] else None for c in range(k)]


def point(X, groups, labels, k, delta):
    """(U0, U1, overall), or None when a cluster is empty."""
    C = centroids(X, labels, k)
    if any(c is None for c in C):
        return None
    u = [delta - sum((a - b) ** 2 for a, b in zip(x, C[c])) for x, c in zip(X, labels)]
    g0 = [v for v, g in zip(u, groups) if g == 0]
    g1 = [v for v, g in zip(u, groups) if g == 1]
    overall = sum(u) / len(u)
    U0 = sum(g0) / len(g0) if g0 else overall
    U1 = sum(g1) / len(g1) if g1 else overall
    return U0, U1, overall


def sse(X, labels, k):
    C = centroids(X, labels, k)
    return sum(sum((a - b) ** 2 for a, b in zip(x, C[c])) for x, c in zip(X, labels))


def skyline(coords):
    """Indices of (lag, mag) pairs not strictly dominated in both coordinates."""
    return [
        i for i, (l, m) in enumerate(coords)
        if not any(l2 > l and m2 > m for l2, m2 in coords)
    ]


def r1_moves(X, groups, labels, k, delta):
    """{((x, c),): (U0, U1, overall)} for every LAG-raising, non-emptying move."""
    base = point(X, groups, labels, k, delta)
    cur = min(base[0], base[1])
    out = {}
    for x in range(len(X)):
        for c in range(k):
            if c == labels[x]:
                continue
            new = list(labels)
            new[x] = c
            p = point(X, groups, new, k, delta)
            if p is not None and min(p[0], p[1]) > cur:
                out[((x, c),)] = p
    return out


def r2_moves(X, groups, labels, k, delta):
    """Every unordered pair of single moves on distinct examples that raises the LAG."""
    base = point(X, groups, labels, k, delta)
    cur = min(base[0], base[1])
    singles = [(x, c) for x in range(len(X)) for c in range(k) if c != labels[x]]
    out = {}
    for (x1, c1), (x2, c2) in itertools.combinations(singles, 2):
        if x1 == x2:
            continue
        new = list(labels)
        new[x1] = c1
        new[x2] = c2
        p = point(X, groups, new, k, delta)
        if p is not None and min(p[0], p[1]) > cur:
            out[((x1, c1), (x2, c2))] = p
    return out


def best_partition(X, k):
    """Exhaustive minimum-SSE labelling with all k clusters used."""
    best = None
    for labels in itertools.product(range(k), repeat=len(X)):
        if len(set(labels)) < k:
            continue
        v = sse(X, labels, k)
        if best is None or v < best[0] - 1e-15:
            best = (v, labels)
    return best
