"""Nonlocal patch graph over a manifold-valued image.

Each target vertex is compared against candidate pixels inside a periodic
search window through patch distances that only use pixels known in both
patches, and keeps directed edges to its k most similar candidates with
weights w = exp(-d^2 / sigma^2).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import SolverConfig
from .errors import ConfigError, DimensionMismatch, GraphBuildError
from .image import Mask, MvImage
from .manifolds import ManifoldDescriptor


@dataclass
class Patch:
    """A (2p+1) x (2p+1) pixel neighborhood read with periodic wrap.

    values holds the pixel points row-major, known the matching mask flags.
    """

    center: tuple
    radius: int
    values: np.ndarray
    known: np.ndarray


@dataclass
class NonlocalGraph:
    """Directed adjacency lists of a nonlocal graph; non-targets stay empty."""

    vertex_count: int
    neighbor_ids: list
    weights: list
    sigma: float = 0.0

    def degree(self, u: int) -> int:
        return len(self.neighbor_ids[u])

    def neighbors(self, u: int):
        return self.neighbor_ids[u], self.weights[u]

    @classmethod
    def empty(cls, vertex_count: int) -> "NonlocalGraph":
        ids = [np.empty(0, dtype=np.int64) for _ in range(vertex_count)]
        w = [np.empty(0, dtype=np.float64) for _ in range(vertex_count)]
        return cls(vertex_count, ids, w)


def _patch_offsets(rows: int, cols: int, p: int):
    di = np.arange(-p, p + 1)
    dj = np.arange(-p, p + 1)
    return di, dj


def extract_patch(img: MvImage, mask: Mask, center, radius: int) -> Patch:
    """Copy the periodic patch of the given radius around center.

    known flags are copied from the mask; values are copied regardless of
    the flags so callers must consult known before trusting a pixel.
    """
    if radius < 0:
        raise ConfigError(f"patch radius must be nonnegative, got {radius}")
    if mask.known.shape != (img.rows, img.cols):
        raise DimensionMismatch("mask shape does not match image")
    i, j = int(center[0]), int(center[1])
    if not (0 <= i < img.rows and 0 <= j < img.cols):
        raise DimensionMismatch(f"patch center {center} outside the grid")
    di, dj = _patch_offsets(img.rows, img.cols, radius)
    ri = (i + di) % img.rows
    cj = (j + dj) % img.cols
    values = img.data[np.ix_(ri, cj)].reshape(-1, img.descriptor.point_len).copy()
    known = mask.known[np.ix_(ri, cj)].reshape(-1).copy()
    return Patch(center=(i, j), radius=radius, values=values, known=known)


def patch_distance(a: Patch, b: Patch, desc: ManifoldDescriptor) -> float:
    """Masked mean patch distance (1/|I|) * sqrt(sum_I d^2), inf when |I| = 0.

    I is the set of patch positions known in both patches.
    """
    if a.radius != b.radius or a.values.shape != b.values.shape:
        raise DimensionMismatch("patches have different sizes")
    both = a.known & b.known
    cnt = int(both.sum())
    if cnt == 0:
        return float("inf")
    d2 = desc.kernel.dist2(a.values[both], b.values[both])
    return float(np.sqrt(d2.sum()) / cnt)


def _window_ids(i, j, rows, cols, row_off, col_off):
    rr = (i + row_off) % rows
    cc = (j + col_off) % cols
    return (rr[:, None] * cols + cc[None, :]).reshape(-1)


def build_graph(
    img: MvImage,
    mask: Mask,
    cfg: SolverConfig,
    targets,
    candidate_mask: Mask | None = None,
) -> NonlocalGraph:
    """Build directed k-nearest patch adjacency for the target vertices.

    For each target, candidates are the other pixels of its periodic
    (2r+1) x (2r+1) window whose center pixel is known; patch distances are
    computed on the positions known in both patches and the k smallest
    finite ones are kept (ties broken by ascending vertex id).  Weights are
    exp(-d^2 / sigma^2) with sigma either fixed by the config or, for
    "auto", the mean of all selected finite distances of this image.

    candidate_mask, when given, replaces the mask for candidate-center
    eligibility only; patch known flags always come from mask.  The front
    driver uses this to let freshly initialized border pixels contribute
    their values to patch overlaps while keeping them out of the candidate
    set.

    Raises GraphBuildError naming the first target with no finite-distance
    candidate.
    """
    cfg.validate()
    if mask.known.shape != (img.rows, img.cols):
        raise DimensionMismatch("mask shape does not match image")
    if candidate_mask is not None and candidate_mask.known.shape != mask.known.shape:
        raise DimensionMismatch("candidate mask shape does not match image")

    rows, cols = img.rows, img.cols
    V = rows * cols
    targets = np.unique(np.asarray(list(targets), dtype=np.int64).reshape(-1))
    if targets.size == 0:
        return NonlocalGraph.empty(V)
    if targets.min() < 0 or targets.max() >= V:
        raise DimensionMismatch("target ids outside the grid")

    kernel = img.descriptor.kernel
    p = int(cfg.p)
    px = (2 * p + 1) ** 2

    # patch gather table: shifted_ids[u, o] is the vertex at patch offset o of u
    di, dj = _patch_offsets(rows, cols, p)
    gi = np.arange(rows)[:, None, None, None]
    gj = np.arange(cols)[None, :, None, None]
    shifted = ((gi + di[None, None, :, None]) % rows) * cols + (
        (gj + dj[None, None, None, :]) % cols
    )
    shifted = shifted.reshape(V, px)

    P = img.flat[shifted]                 # (V, px, L)
    K = mask.known_flat[shifted]          # (V, px)
    Kf = K.astype(np.float64)
    cand_known = (candidate_mask or mask).known_flat

    row_off = np.unique(np.arange(-cfg.r, cfg.r + 1) % rows)
    col_off = np.unique(np.arange(-cfg.r, cfg.r + 1) % cols)

    sel_ids = [None] * targets.size
    sel_d = [None] * targets.size

    def work(ti: int):
        t = int(targets[ti])
        i, j = divmod(t, cols)
        ids = _window_ids(i, j, rows, cols, row_off, col_off)
        ids = ids[cand_known[ids] & (ids != t)]
        if ids.size == 0:
            raise GraphBuildError(
                f"vertex {t}: no known-center candidate in the search window",
                vertex=t,
            )
        d2 = kernel.dist2(P[t][None, :, :], P[ids])      # (C, px)
        both = Kf[t][None, :] * Kf[ids]
        cnt = np.einsum("cp->c", both)
        ssum = np.einsum("cp,cp->c", d2, both)
        with np.errstate(divide="ignore", invalid="ignore"):
            d = np.where(cnt > 0.0, np.sqrt(ssum) / np.maximum(cnt, 1.0), np.inf)
        finite = np.isfinite(d)
        nfin = int(finite.sum())
        if nfin == 0:
            raise GraphBuildError(
                f"vertex {t}: no candidate with overlapping known pixels",
                vertex=t,
            )
        order = np.lexsort((ids, d))[: min(int(cfg.k), nfin)]
        sel_ids[ti] = ids[order].astype(np.int64)
        sel_d[ti] = d[order]

    workers = min(cfg.resolved_threads(), targets.size)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            # consume to surface the first worker exception
            list(pool.map(work, range(targets.size)))
    else:
        for ti in range(targets.size):
            work(ti)

    if isinstance(cfg.sigma, str):
        all_d = np.concatenate(sel_d)
        sigma = float(all_d.mean())
        if sigma <= 0.0:
            sigma = 1.0
    else:
        sigma = float(cfg.sigma)

    graph = NonlocalGraph.empty(V)
    graph.sigma = sigma
    for ti in range(targets.size):
        t = int(targets[ti])
        with np.errstate(over="ignore"):
            w = np.exp(-((sel_d[ti] / sigma) ** 2))
        if (w == 0.0).any():
            # keeps weights inside (0, 1]; zero weights would poison the solve
            raise GraphBuildError(
                f"vertex {t}: weight underflow, sigma {sigma:g} is too small "
                "for the selected patch distances",
                vertex=t,
            )
        graph.neighbor_ids[t] = sel_ids[ti]
        graph.weights[t] = w
    return graph
