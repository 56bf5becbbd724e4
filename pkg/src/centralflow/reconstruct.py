"""Piecewise-linear MUSCL reconstruction with the minmod-theta limiter.

Slopes are stored *undivided* (per cell width, not per unit length): the
x-slope of cell (j,k) approximates ``dx * dS/dx`` there.  Use sites divide by
``dx``/``dy`` or scale by in-cell offsets as needed.

Cells adjacent to the array boundary get zero slopes (first-order there);
domain-boundary physics is handled by the transport schemes' ghost layers.
"""

from dataclasses import dataclass

import numpy as np

from .grid import ScalarField, StructuredGrid

DEFAULT_THETA = 1.5
THETA_MIN = 1.0
THETA_MAX = 2.0


def _check_theta(theta: float):
    if not (THETA_MIN <= theta <= THETA_MAX):
        raise ValueError(f"limiter parameter theta must be in [1, 2], got {theta}")


def minmod3(a, b, c):
    """Minmod of three values: min if all positive, max if all negative, else 0.

    Accepts scalars or arrays elementwise.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    pos = (a > 0) & (b > 0) & (c > 0)
    neg = (a < 0) & (b < 0) & (c < 0)
    out = np.where(pos, np.minimum(np.minimum(a, b), c),
                   np.where(neg, np.maximum(np.maximum(a, b), c), 0.0))
    return out if out.ndim else float(out)


def minmod_slopes(values: np.ndarray, theta: float = DEFAULT_THETA):
    """Limited undivided slopes (sx, sy) of a 2D cell array.

    sx = minmod3(theta*d-, (d- + d+)/2, theta*d+) with d+/- the forward and
    backward neighbor differences along x, and symmetrically for sy along y.
    First/last rows and columns get zero slopes.
    """
    _check_theta(theta)
    values = np.asarray(values, dtype=np.float64)
    sx = np.zeros_like(values)
    sy = np.zeros_like(values)
    dm = values[:, 1:-1] - values[:, :-2]
    dp = values[:, 2:] - values[:, 1:-1]
    sx[:, 1:-1] = minmod3(theta * dm, 0.5 * (dm + dp), theta * dp)
    dm = values[1:-1, :] - values[:-2, :]
    dp = values[2:, :] - values[1:-1, :]
    sy[1:-1, :] = minmod3(theta * dm, 0.5 * (dm + dp), theta * dp)
    return sx, sy


@dataclass
class SlopeField:
    """Undivided limited slopes of a cell field along x (sx) and y (sy)."""

    grid: StructuredGrid
    sx: np.ndarray
    sy: np.ndarray


def limited_slopes(field: ScalarField, theta: float = DEFAULT_THETA) -> SlopeField:
    """Minmod-theta slopes of a cell field; boundary cells are zero-slope."""
    sx, sy = minmod_slopes(field.values, theta)
    return SlopeField(field.grid, sx, sy)


def flux_slopes(sat: ScalarField, fluid, theta: float = DEFAULT_THETA) -> SlopeField:
    """Minmod-theta slopes of the pointwise fractional-flow field f(S)."""
    f = fluid.fractional_flow(sat.values)
    sx, sy = minmod_slopes(f, theta)
    return SlopeField(sat.grid, sx, sy)
