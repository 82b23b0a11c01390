"""Sampled outer approximation of the time-``tau`` flow map on a grid."""
from __future__ import annotations

import itertools
import math

import numpy as np

from .expr import VectorField
from .grid import EXTERIOR, CombinatorialMap, Grid

# slack for cell-boundary hits caused by rounding
_EPS = 1e-9


class FieldEvaluationError(ValueError):
    pass


def rk4_step(field: VectorField, points: np.ndarray, tau: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step of size ``tau``."""
    k1 = field(points)
    k2 = field(points + 0.5 * tau * k1)
    k3 = field(points + 0.5 * tau * k2)
    k4 = field(points + tau * k3)
    return points + (tau / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def sample_offsets(dim: int) -> np.ndarray:
    """Corners and facet midpoints of the unit cube."""
    corners = list(itertools.product((0.0, 1.0), repeat=dim))
    mids = []
    for a in range(dim):
        for v in (0.0, 1.0):
            p = [0.5] * dim
            p[a] = v
            mids.append(tuple(p))
    return np.array(corners + mids)


def _axis_range(lo, hi, x0, h):
    i_lo = math.floor((lo - x0) / h + _EPS)
    i_hi = math.ceil((hi - x0) / h - _EPS) - 1
    return i_lo, max(i_lo, i_hi)


def cells_meeting(grid: Grid, lo: np.ndarray, hi: np.ndarray) -> frozenset[int]:
    """Cells whose interior meets the box ``[lo, hi]``, plus EXTERIOR when the
    box leaves a non-periodic axis."""
    axes = []
    exterior = False
    for a in range(grid.dim):
        n = grid.subdivisions[a]
        i_lo, i_hi = _axis_range(lo[a], hi[a], grid.origin[a], grid.widths[a])
        if grid.periodic[a]:
            if i_hi - i_lo + 1 >= n:
                axes.append(range(n))
            else:
                axes.append(sorted({k % n for k in range(i_lo, i_hi + 1)}))
        else:
            if i_lo < 0 or i_hi >= n:
                exterior = True
            span = range(max(i_lo, 0), min(i_hi, n - 1) + 1)
            axes.append(span)
    out = set()
    if all(len(ax) for ax in axes):
        for multi in itertools.product(*axes):
            out.add(grid.index(multi))
    if exterior:
        out.add(EXTERIOR)
    return frozenset(out)


def enclose_flow_map(field: VectorField, grid: Grid, tau: float, padding: float = 0.0) -> CombinatorialMap:
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if padding < 0:
        raise ValueError(f"padding must be nonnegative, got {padding}")
    if field.dimension != grid.dim:
        raise ValueError(f"field dimension {field.dimension} != grid dimension {grid.dim}")
    offsets = sample_offsets(grid.dim) * grid.widths
    pts = grid.lower_corners()[:, None, :] + offsets[None, :, :]
    vals = field(pts)
    if not np.all(np.isfinite(vals)):
        bad = np.argwhere(~np.isfinite(vals))[0]
        raise FieldEvaluationError(f"field is not finite at {pts[bad[0], bad[1]].tolist()}")
    end = rk4_step(field, pts, tau)
    if not np.all(np.isfinite(end)):
        raise FieldEvaluationError("integrator produced non-finite endpoints")
    lo = end.min(axis=1) - padding
    hi = end.max(axis=1) + padding
    images = []
    for c in range(grid.size):
        img = cells_meeting(grid, lo[c], hi[c])
        assert img, "empty enclosure image"
        images.append(img)
    return CombinatorialMap(grid, tuple(images), tau, {"padding": padding, "field": list(field.sources)})
