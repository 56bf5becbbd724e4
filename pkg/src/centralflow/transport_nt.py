"""Staggered second-order central transport step, re-averaged to the base grid.

One convection micro-step runs the classic reconstruct/evolve cycle twice per
half-cell shift: predict cell-center midvalues at t + dt/2 from limited
fractional-flow slopes, evolve staggered-cell averages (vertex-centered dual
cells) with midpoint-in-time flux quadrature, then re-average a limited
reconstruction of the staggered field back onto the original cells.  Both the
staggered averaging and the re-averaging are the same quarter/sixteenth
stencil, applied half a cell apart.

Boundary closure
----------------
The step works on a one-cell ghost ring.  Ghost saturations replicate the
adjacent interior cell everywhere (so the averaging stages are exactly
conservative and boundary-adjacent cells drop to first order); boundary
physics enters through the ghost *flux* values:

* no-flow edge: ghost normal flux mirrors odd (``-F``), tangential flux
  replicates, so wall fluxes cancel exactly;
* inflow edge: ghost normal flux is ``v_ghost * f(s_inj)`` with the ghost
  velocity linearly extrapolated through the prescribed face value;
* outflow edge: ghost normal flux is ``v_ghost * f`` of the adjacent interior
  midvalue (zero-gradient ghost state).

Ghost columns are filled first (on interior rows), then ghost rows across the
full padded width, which also defines the corner values.

The outward volume through each edge over the step is reported exactly: the
telescoped mass identity weights the two outermost flux columns/rows by
1/4, 3/4, 1, ..., 1, 3/4, 1/4 along the edge, so that the change of total
saturation mass equals minus the net reported outflow to machine precision.
"""

import numpy as np

from .grid import FaceVelocityField, ScalarField
from .pressure import BoundarySpec, INFLOW, NOFLOW, OUTFLOW
from .reconstruct import DEFAULT_THETA, SlopeField, minmod_slopes
from .transport_common import EdgeFluxes, TimeStepError

NT_CFL_LIMIT = 0.5


def _staggered_stencil(values, sx, sy):
    """Quarter/sixteenth dual-cell averaging of a limited reconstruction.

    Maps an (m, n) cell array (with its undivided slopes) to the (m-1, n-1)
    averages over the dual cells centered on the interior vertices.
    """
    avg = 0.25 * (values[:-1, :-1] + values[1:, :-1] + values[:-1, 1:] + values[1:, 1:])
    xs = (sx[:-1, :-1] + sx[1:, :-1] - sx[:-1, 1:] - sx[1:, 1:]) / 16.0
    ys = (sy[:-1, :-1] + sy[:-1, 1:] - sy[1:, :-1] - sy[1:, 1:]) / 16.0
    return avg + xs + ys


def predictor_midvalues(sat: ScalarField, slopes_f: SlopeField,
                        vel: FaceVelocityField, dt: float) -> ScalarField:
    """Cell values at t + dt/2 from the conservation-law Taylor step.

    Cell-center velocities are the mean of the two bounding face values.
    """
    g = sat.grid
    vxc, vyc = vel.cell_centered()
    mid = (sat.values
           - 0.5 * (dt / g.dx) * vxc * slopes_f.sx
           - 0.5 * (dt / g.dy) * vyc * slopes_f.sy)
    return ScalarField(g, mid)


def staggered_average_now(sat: ScalarField, slopes_s: SlopeField) -> np.ndarray:
    """Averages of the current reconstruction over the interior dual cells."""
    return _staggered_stencil(sat.values, slopes_s.sx, slopes_s.sy)


def staggered_corrector(staggered_now: np.ndarray, midvalues: ScalarField,
                        vel: FaceVelocityField, fluid, dt: float) -> np.ndarray:
    """Advance the interior dual-cell averages by the midpoint flux quadrature."""
    g = midvalues.grid
    vxc, vyc = vel.cell_centered()
    fm = fluid.fractional_flow(midvalues.values)
    fx = vxc * fm
    fy = vyc * fm
    xdiff = (fx[:-1, 1:] + fx[1:, 1:]) - (fx[:-1, :-1] + fx[1:, :-1])
    ydiff = (fy[1:, :-1] + fy[1:, 1:]) - (fy[:-1, :-1] + fy[:-1, 1:])
    return staggered_now - 0.5 * (dt / g.dx) * xdiff - 0.5 * (dt / g.dy) * ydiff


def reaverage_to_grid(staggered_future: np.ndarray,
                      theta: float = DEFAULT_THETA) -> np.ndarray:
    """Re-average a limited reconstruction of an (m, n) staggered field onto
    the (m-1, n-1) base cells it covers."""
    sx, sy = minmod_slopes(staggered_future, theta)
    return _staggered_stencil(staggered_future, sx, sy)


def _pad_center_velocities(vel: FaceVelocityField):
    vxc, vyc = vel.cell_centered()
    return np.pad(vxc, 1, mode="edge"), np.pad(vyc, 1, mode="edge")


def _apply_flux_ghosts(fx, fy, f_mid, vel, boundary: BoundarySpec, fluid):
    """Fill the ghost ring of the padded cell-flux arrays per the edge rules."""
    f_inj = float(fluid.fractional_flow(boundary.inflow_saturation))
    vxc, vyc = vel.cell_centered()

    def normal_ghost(edge, v_face, v_first, f_first):
        if edge.kind == NOFLOW:
            return None  # caller mirrors
        v_ghost = 2.0 * v_face - v_first
        if edge.kind == INFLOW:
            return v_ghost * f_inj
        return v_ghost * f_first  # outflow: zero-gradient ghost state

    # ghost columns, interior rows only
    ghost = normal_ghost(boundary.left, vel.vx[:, 0], vxc[:, 0], f_mid[1:-1, 1])
    fx[1:-1, 0] = -fx[1:-1, 1] if ghost is None else ghost
    fy[1:-1, 0] = fy[1:-1, 1]
    ghost = normal_ghost(boundary.right, vel.vx[:, -1], vxc[:, -1], f_mid[1:-1, -2])
    fx[1:-1, -1] = -fx[1:-1, -2] if ghost is None else ghost
    fy[1:-1, -1] = fy[1:-1, -2]

    # ghost rows, full padded width (defines the corners)
    ghost = normal_ghost(boundary.bottom, vel.vy[0, :], vyc[0, :], f_mid[1, 1:-1])
    if ghost is None:
        fy[0, :] = -fy[1, :]
    else:
        fy[0, 1:-1] = ghost
        fy[0, 0], fy[0, -1] = fy[1, 0], fy[1, -1]
    fx[0, :] = fx[1, :]
    ghost = normal_ghost(boundary.top, vel.vy[-1, :], vyc[-1, :], f_mid[-2, 1:-1])
    if ghost is None:
        fy[-1, :] = -fy[-2, :]
    else:
        fy[-1, 1:-1] = ghost
        fy[-1, 0], fy[-1, -1] = fy[-2, 0], fy[-2, -1]
    fx[-1, :] = fx[-2, :]


def _edge_weights(n_padded: int) -> np.ndarray:
    w = np.ones(n_padded)
    w[0] = w[-1] = 0.25
    w[1] = w[-2] = 0.75
    return w


def _edge_fluxes(fx, fy, grid, dt) -> EdgeFluxes:
    cy = _edge_weights(fx.shape[0])
    cx = _edge_weights(fy.shape[1])
    half_dy = 0.5 * grid.dy * dt
    half_dx = 0.5 * grid.dx * dt
    return EdgeFluxes(
        left=-half_dy * float(np.sum(cy * (fx[:, 0] + fx[:, 1]))),
        right=half_dy * float(np.sum(cy * (fx[:, -1] + fx[:, -2]))),
        bottom=-half_dx * float(np.sum(cx * (fy[0, :] + fy[1, :]))),
        top=half_dx * float(np.sum(cx * (fy[-1, :] + fy[-2, :]))),
    )


def _check_cfl(sat, vel, fluid, dt, boundary):
    g = sat.grid
    lo = float(sat.values.min())
    hi = float(sat.values.max())
    if any(e.kind == INFLOW for _, e in boundary.edges()):
        lo = min(lo, boundary.inflow_saturation)
        hi = max(hi, boundary.inflow_saturation)
    speed = vel.max_speed() * float(fluid.max_abs_flux_derivative(lo, hi))
    if speed * dt / min(g.dx, g.dy) > NT_CFL_LIMIT + 1e-12:
        raise TimeStepError(
            f"dt={dt} exceeds the stability limit: max |v f'| dt / min(dx,dy) = "
            f"{speed * dt / min(g.dx, g.dy):.3f} > {NT_CFL_LIMIT}"
        )


def nt_step_with_fluxes(sat: ScalarField, vel: FaceVelocityField, fluid, dt: float,
                        theta: float = DEFAULT_THETA,
                        boundary: BoundarySpec = BoundarySpec()):
    """One staggered central micro-step; returns (new field, edge outflow volumes)."""
    g = sat.grid
    _check_cfl(sat, vel, fluid, dt, boundary)
    if not (np.any(vel.vx) or np.any(vel.vy)):
        # nothing moves: skip the averaging stages instead of diffusing in place
        return sat.copy(), EdgeFluxes(0.0, 0.0, 0.0, 0.0)
    ax = dt / g.dx
    ay = dt / g.dy

    sp = np.pad(sat.values, 1, mode="edge")
    sxp, syp = minmod_slopes(sp, theta)
    f_of_s = fluid.fractional_flow(sp)
    fxp, fyp = minmod_slopes(f_of_s, theta)
    vxcp, vycp = _pad_center_velocities(vel)

    mid = sp - 0.5 * ax * vxcp * fxp - 0.5 * ay * vycp * fyp
    f_mid = fluid.fractional_flow(mid)
    fx = vxcp * f_mid
    fy = vycp * f_mid
    _apply_flux_ghosts(fx, fy, f_mid, vel, boundary, fluid)

    staggered = _staggered_stencil(sp, sxp, syp)
    xdiff = (fx[:-1, 1:] + fx[1:, 1:]) - (fx[:-1, :-1] + fx[1:, :-1])
    ydiff = (fy[1:, :-1] + fy[1:, 1:]) - (fy[:-1, :-1] + fy[:-1, 1:])
    staggered -= 0.5 * ax * xdiff + 0.5 * ay * ydiff

    sxs, sys = minmod_slopes(staggered, theta)
    new_values = _staggered_stencil(staggered, sxs, sys)
    return ScalarField(g, new_values), _edge_fluxes(fx, fy, g, dt)


def nt_step(sat: ScalarField, vel: FaceVelocityField, fluid, dt: float,
            theta: float = DEFAULT_THETA,
            boundary: BoundarySpec = BoundarySpec()) -> ScalarField:
    """One staggered central micro-step on the base grid."""
    new_sat, _ = nt_step_with_fluxes(sat, vel, fluid, dt, theta, boundary)
    return new_sat
