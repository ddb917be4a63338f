"""Front-propagation inpainting driver.

Unknown pixels are filled layer by layer: the current border (unknown pixels
with at least one known 4-neighbor, periodic) is initialized by copying a
known 4-neighbor, a fresh nonlocal graph is built for it, the Dirichlet
problem is solved on the layer, and the layer is absorbed into the known
set.  With cumulative_active enabled, earlier layers keep evolving in every
later solve instead of freezing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import SolverConfig
from .errors import CutLocusError, DimensionMismatch, GraphBuildError, SolverError
from .graph import build_graph
from .image import Mask, MvImage
from .operators import solve_dirichlet


@dataclass
class LayerRecord:
    """Per-layer log entry of one inpainting run."""

    index: int
    border_size: int
    active_size: int
    iterations: int
    residual: float


@dataclass
class FrontState:
    """Mask/active bookkeeping of the front between layers, plus the log."""

    mask_now: Mask
    active: np.ndarray
    layer_index: int
    log: list = field(default_factory=list)


def find_border(mask: Mask) -> np.ndarray:
    """Unknown pixels with a known 4-neighbor (periodic), ascending ids."""
    k = mask.known
    has_known = (
        np.roll(k, 1, axis=0)
        | np.roll(k, -1, axis=0)
        | np.roll(k, 1, axis=1)
        | np.roll(k, -1, axis=1)
    )
    return np.flatnonzero((~k & has_known).reshape(-1))


def initialize_border(img: MvImage, mask: Mask, border) -> MvImage:
    """Copy into each border pixel its first known 4-neighbor (N, E, S, W)."""
    border = np.asarray(list(border), dtype=np.int64).reshape(-1)
    out = img.copy()
    if border.size == 0:
        return out
    if mask.known_flat[border].any():
        raise SolverError("border contains known pixels")
    # neighbor value/flag grids aligned so position (i, j) holds its
    # direction-neighbor's data: N=(i-1,j), E=(i,j+1), S=(i+1,j), W=(i,j-1)
    shifts = [(1, 0), (-1, 1), (-1, 0), (1, 1)]
    assigned = np.zeros(img.vertex_count, dtype=bool)
    for shift, axis in shifts:
        vals = np.roll(img.data, shift, axis=axis).reshape(img.vertex_count, -1)
        flags = np.roll(mask.known, shift, axis=axis).reshape(-1)
        take = border[~assigned[border] & flags[border]]
        out.flat[take] = vals[take]
        assigned[take] = True
    if not assigned[border].all():
        u = int(border[np.argmin(assigned[border])])
        raise SolverError(f"border pixel {u} has no known 4-neighbor", vertex=u)
    return out


def nearest_known_fill(img: MvImage, mask: Mask) -> MvImage:
    """Peel borders copying first known 4-neighbors until nothing is unknown.

    Baseline fill without any solving; deterministic.
    """
    out = img.copy()
    m = mask.copy()
    while not m.known.all():
        border = find_border(m)
        out = initialize_border(out, m, border)
        m.known_flat[border] = True
    return out


def inpaint(img: MvImage, mask: Mask, cfg: SolverConfig):
    """Fill all unknown pixels of img by front propagation.

    Returns:
        (image, front) where front is the final FrontState whose log holds
        one LayerRecord per processed layer.

    Raises:
        DimensionMismatch: mismatched shapes or nothing to inpaint on a
            fully known mask is fine and returns a copy.
        SolverError / GraphBuildError / CutLocusError: numerical failures,
            annotated with the failing layer where possible.
    """
    cfg.validate()
    if mask.known.shape != (img.rows, img.cols):
        raise DimensionMismatch("mask shape does not match image")

    work = img.copy()
    mask_now = mask.copy()
    front = FrontState(mask_now=mask_now, active=np.empty(0, np.int64), layer_index=0)
    if mask_now.known.all():
        return work, front

    active = np.empty(0, dtype=np.int64)
    layer = 0
    while not mask_now.known.all():
        layer += 1
        border = find_border(mask_now)
        work = initialize_border(work, mask_now, border)
        if cfg.cumulative_active:
            active = np.union1d(active, border)
        else:
            active = border

        # patches may read values of the just-initialized border; candidate
        # centers stay restricted to pixels absorbed in earlier layers
        valued_flags = mask_now.known.copy()
        valued_flags.reshape(-1)[active] = True
        valued = Mask(valued_flags)
        if cfg.cumulative_active:
            solve_flags = np.ones(img.vertex_count, dtype=bool)
            solve_flags[active] = False
            solve_mask = Mask(solve_flags.reshape(mask_now.known.shape))
        else:
            solve_mask = mask_now
        try:
            graph = build_graph(work, valued, cfg, active, candidate_mask=mask_now)
            work, iters, trace = solve_dirichlet(graph, work, solve_mask, active, cfg)
        except (SolverError, CutLocusError, GraphBuildError) as e:
            if getattr(e, "layer", None) is None:
                e.layer = layer
            raise
        mask_now.known_flat[border] = True
        front.log.append(
            LayerRecord(
                index=layer,
                border_size=int(border.size),
                active_size=int(active.size),
                iterations=iters,
                residual=float(trace[-1]) if trace else 0.0,
            )
        )

    front.mask_now = mask_now
    front.active = active
    front.layer_index = layer
    return work, front
