"""Shared helpers for the test suite.

Most oracles here are deliberately written the slow, obvious way (plain
Python loops over public scalar API calls) so they stay independent of the
vectorized implementations they check.
"""

from collections import deque

import numpy as np
import pytest

import mvinpaint as mv


def all_descriptors():
    return [
        mv.ManifoldDescriptor.euclidean(1),
        mv.ManifoldDescriptor.euclidean(3),
        mv.ManifoldDescriptor.circle(),
        mv.ManifoldDescriptor.sphere2(),
        mv.ManifoldDescriptor.spd(2),
        mv.ManifoldDescriptor.spd(3),
    ]


@pytest.fixture(params=all_descriptors(), ids=lambda d: d.label())
def descriptor(request):
    return request.param


def make_graph(vertex_count, edges):
    """Build a graph from {u: (ids, weights)} adjacency dictionaries."""
    g = mv.NonlocalGraph.empty(vertex_count)
    for u, (ids, w) in edges.items():
        g.neighbor_ids[u] = np.asarray(ids, dtype=np.int64)
        g.weights[u] = np.asarray(w, dtype=np.float64)
    return g


def path_graph(n, weight=1.0):
    """Chain 0-1-...-(n-1) with unit weights on both directions."""
    edges = {}
    for u in range(n):
        ids = [v for v in (u - 1, u + 1) if 0 <= v < n]
        edges[u] = (ids, [weight] * len(ids))
    return make_graph(n, edges)


def line_image(desc, values):
    data = np.asarray(values, dtype=np.float64).reshape(1, -1, desc.point_len)
    return mv.MvImage(desc, data)


def brute_extremal_pair(graph, img, u):
    """Argmax over all ordered neighbor pairs, ties to the smallest id pair.

    Uses only scalar public API calls, no batching.
    """
    desc = img.descriptor
    ids, w = graph.neighbors(u)
    x = img.flat[u]
    best_key = None
    best_pair = None
    for a in range(len(ids)):
        for b in range(len(ids)):
            la = mv.log_map(desc, x, img.flat[int(ids[a])])
            lb = mv.log_map(desc, x, img.flat[int(ids[b])])
            diff = mv.Tangent(la.base, np.sqrt(w[a]) * la.vec - np.sqrt(w[b]) * lb.vec)
            obj = mv.tangent_norm(desc, x, diff)
            key = (-obj, int(ids[a]), int(ids[b]))
            if best_key is None or key < best_key:
                best_key = key
                best_pair = (int(ids[a]), int(ids[b]))
    return best_pair


def brute_inf_laplacian(graph, img, u):
    """Operator value from the brute-force pair, as a plain tangent vector."""
    desc = img.descriptor
    ids, w = graph.neighbors(u)
    v1, v2 = brute_extremal_pair(graph, img, u)
    a = int(np.flatnonzero(np.asarray(ids) == v1)[0])
    b = a if v1 == v2 else int(np.flatnonzero(np.asarray(ids) == v2)[0])
    x = img.flat[u]
    l1 = mv.log_map(desc, x, img.flat[v1]).vec
    l2 = mv.log_map(desc, x, img.flat[v2]).vec
    s1, s2 = np.sqrt(w[a]), np.sqrt(w[b])
    return (s1 * l1 + s2 * l2) / (s1 + s2)


def bfs_peel_depths(known):
    """Layer index each unknown pixel gets filled at (1-based), by BFS.

    Periodic 4-neighborhood, multi-source from the known set.  Matches the
    border-peeling order of the driver by construction.
    """
    known = np.asarray(known, dtype=bool)
    rows, cols = known.shape
    depth = np.where(known, 0, -1)
    queue = deque((i, j) for i in range(rows) for j in range(cols) if known[i, j])
    while queue:
        i, j = queue.popleft()
        for di, dj in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            ni, nj = (i + di) % rows, (j + dj) % cols
            if depth[ni, nj] < 0:
                depth[ni, nj] = depth[i, j] + 1
                queue.append((ni, nj))
    return depth


def random_image(desc, rows, cols, rng):
    pts = mv.random_point(desc, rng, size=(rows * cols,))
    return mv.MvImage(desc, pts.reshape(rows, cols, desc.point_len))
