"""Independent reference implementations used to pin expected values.

Everything here is deliberately written as plain scalar loops transcribed
from the scheme definitions (and kept separate from the vectorized library
paths), so agreement is meaningful.  Fluid closures are shared: they are
validated on their own against finite differences and dense sampling.
"""

import numpy as np
from scipy.optimize import minimize_scalar


def naive_minmod3(a, b, c):
    if a > 0 and b > 0 and c > 0:
        return min(a, b, c)
    if a < 0 and b < 0 and c < 0:
        return max(a, b, c)
    return 0.0


def naive_slopes(arr, theta):
    """Minmod-theta undivided slopes of a 2D array, zero on the outer ring."""
    m, n = arr.shape
    sx = np.zeros((m, n))
    sy = np.zeros((m, n))
    for k in range(m):
        for j in range(1, n - 1):
            dm = arr[k, j] - arr[k, j - 1]
            dp = arr[k, j + 1] - arr[k, j]
            sx[k, j] = naive_minmod3(theta * dm, 0.5 * (dm + dp), theta * dp)
    for k in range(1, m - 1):
        for j in range(n):
            dm = arr[k, j] - arr[k - 1, j]
            dp = arr[k + 1, j] - arr[k, j]
            sy[k, j] = naive_minmod3(theta * dm, 0.5 * (dm + dp), theta * dp)
    return sx, sy


def _replicate_pad(arr):
    m, n = arr.shape
    out = np.zeros((m + 2, n + 2))
    out[1:-1, 1:-1] = arr
    out[0, 1:-1] = arr[0, :]
    out[-1, 1:-1] = arr[-1, :]
    out[1:-1, 0] = arr[:, 0]
    out[1:-1, -1] = arr[:, -1]
    out[0, 0], out[0, -1] = arr[0, 0], arr[0, -1]
    out[-1, 0], out[-1, -1] = arr[-1, 0], arr[-1, -1]
    return out


def _staggered_average_loops(values, sx, sy):
    """Quarter/sixteenth dual-cell averages of an (m, n) reconstruction."""
    m, n = values.shape
    out = np.zeros((m - 1, n - 1))
    for k in range(m - 1):
        for j in range(n - 1):
            out[k, j] = 0.25 * (values[k, j] + values[k + 1, j]
                                + values[k, j + 1] + values[k + 1, j + 1])
            out[k, j] += (sx[k, j] + sx[k + 1, j] - sx[k, j + 1] - sx[k + 1, j + 1]) / 16.0
            out[k, j] += (sy[k, j] + sy[k, j + 1] - sy[k + 1, j] - sy[k + 1, j + 1]) / 16.0
    return out


def naive_nt_step(grid, s, vel, fluid, dt, theta, boundary):
    """Loop transcription of the staggered step with the documented ghost policy."""
    nx, ny = grid.nx, grid.ny
    ax, ay = dt / grid.dx, dt / grid.dy
    f = fluid.fractional_flow

    sp = _replicate_pad(s)
    sx, sy = naive_slopes(sp, theta)
    fsx, fsy = naive_slopes(f(sp), theta)

    vxc = np.zeros((ny, nx))
    vyc = np.zeros((ny, nx))
    for k in range(ny):
        for j in range(nx):
            vxc[k, j] = 0.5 * (vel.vx[k, j] + vel.vx[k, j + 1])
            vyc[k, j] = 0.5 * (vel.vy[k, j] + vel.vy[k + 1, j])
    vxcp = _replicate_pad(vxc)
    vycp = _replicate_pad(vyc)

    mid = np.zeros_like(sp)
    for k in range(ny + 2):
        for j in range(nx + 2):
            mid[k, j] = (sp[k, j] - 0.5 * ax * vxcp[k, j] * fsx[k, j]
                         - 0.5 * ay * vycp[k, j] * fsy[k, j])
    fmid = f(mid)
    fx = vxcp * fmid
    fy = vycp * fmid

    f_inj = float(f(boundary.inflow_saturation))
    # ghost columns on interior rows
    for k in range(1, ny + 1):
        e = boundary.left
        if e.kind == "noflow":
            fx[k, 0] = -fx[k, 1]
        else:
            vg = 2.0 * vel.vx[k - 1, 0] - vxc[k - 1, 0]
            fx[k, 0] = vg * (f_inj if e.kind == "inflow" else fmid[k, 1])
        fy[k, 0] = fy[k, 1]
        e = boundary.right
        if e.kind == "noflow":
            fx[k, -1] = -fx[k, -2]
        else:
            vg = 2.0 * vel.vx[k - 1, nx] - vxc[k - 1, nx - 1]
            fx[k, -1] = vg * (f_inj if e.kind == "inflow" else fmid[k, -2])
        fy[k, -1] = fy[k, -2]
    # ghost rows across the full padded width
    e = boundary.bottom
    if e.kind == "noflow":
        fy[0, :] = -fy[1, :]
    else:
        for j in range(1, nx + 1):
            vg = 2.0 * vel.vy[0, j - 1] - vyc[0, j - 1]
            fy[0, j] = vg * (f_inj if e.kind == "inflow" else fmid[1, j])
        fy[0, 0], fy[0, -1] = fy[1, 0], fy[1, -1]
    fx[0, :] = fx[1, :]
    e = boundary.top
    if e.kind == "noflow":
        fy[-1, :] = -fy[-2, :]
    else:
        for j in range(1, nx + 1):
            vg = 2.0 * vel.vy[ny, j - 1] - vyc[ny - 1, j - 1]
            fy[-1, j] = vg * (f_inj if e.kind == "inflow" else fmid[-2, j])
        fy[-1, 0], fy[-1, -1] = fy[-2, 0], fy[-2, -1]
    fx[-1, :] = fx[-2, :]

    staggered = _staggered_average_loops(sp, sx, sy)
    for k in range(ny + 1):
        for j in range(nx + 1):
            xd = fx[k, j + 1] + fx[k + 1, j + 1] - fx[k, j] - fx[k + 1, j]
            yd = fy[k + 1, j] + fy[k + 1, j + 1] - fy[k, j] - fy[k, j + 1]
            staggered[k, j] -= 0.5 * ax * xd + 0.5 * ay * yd

    ssx, ssy = naive_slopes(staggered, theta)
    return _staggered_average_loops(staggered, ssx, ssy)


def naive_kt_rhs(grid, s, vel, fluid, theta, boundary):
    """Loop transcription of the semi-discrete flux-difference right-hand side."""
    nx, ny = grid.nx, grid.ny
    f = fluid.fractional_flow
    sp = _replicate_pad(s)
    sx, sy = naive_slopes(sp, theta)

    hx = np.zeros((ny, nx + 1))
    for k in range(ny):
        for i in range(nx + 1):
            s_minus = sp[k + 1, i] + 0.5 * sx[k + 1, i]
            s_plus = sp[k + 1, i + 1] - 0.5 * sx[k + 1, i + 1]
            v = vel.vx[k, i]
            a = abs(v) * float(fluid.max_abs_flux_derivative(min(s_minus, s_plus),
                                                             max(s_minus, s_plus)))
            hx[k, i] = 0.5 * v * (f(s_plus) + f(s_minus)) - 0.5 * a * (s_plus - s_minus)
    hy = np.zeros((ny + 1, nx))
    for i in range(ny + 1):
        for j in range(nx):
            s_minus = sp[i, j + 1] + 0.5 * sy[i, j + 1]
            s_plus = sp[i + 1, j + 1] - 0.5 * sy[i + 1, j + 1]
            v = vel.vy[i, j]
            a = abs(v) * float(fluid.max_abs_flux_derivative(min(s_minus, s_plus),
                                                             max(s_minus, s_plus)))
            hy[i, j] = 0.5 * v * (f(s_plus) + f(s_minus)) - 0.5 * a * (s_plus - s_minus)

    f_inj = float(f(boundary.inflow_saturation))

    def closed(edge, v, s_edge):
        if edge.kind == "noflow":
            return 0.0
        if edge.kind == "inflow":
            return v * f_inj
        return v * float(f(s_edge))

    for k in range(ny):
        hx[k, 0] = closed(boundary.left, vel.vx[k, 0], s[k, 0])
        hx[k, nx] = closed(boundary.right, vel.vx[k, nx], s[k, nx - 1])
    for j in range(nx):
        hy[0, j] = closed(boundary.bottom, vel.vy[0, j], s[0, j])
        hy[ny, j] = closed(boundary.top, vel.vy[ny, j], s[ny - 1, j])

    rhs = np.zeros((ny, nx))
    for k in range(ny):
        for j in range(nx):
            rhs[k, j] = -(hx[k, j + 1] - hx[k, j]) / grid.dx \
                        - (hy[k + 1, j] - hy[k, j]) / grid.dy
    return rhs


def quadrature_staggered_average(values, sx, sy, j, k, panels=4):
    """Numerically integrate the piecewise-linear reconstruction over the
    staggered cell at vertex (j+1, k+1), in cell-local units (midpoint rule,
    exact for linear pieces)."""
    overlaps = [
        (j, k, 0.0, 0.5, 0.0, 0.5),
        (j + 1, k, -0.5, 0.0, 0.0, 0.5),
        (j, k + 1, 0.0, 0.5, -0.5, 0.0),
        (j + 1, k + 1, -0.5, 0.0, -0.5, 0.0),
    ]
    total = 0.0
    for cj, ck, x0, x1, y0, y1 in overlaps:
        hx = (x1 - x0) / panels
        hy = (y1 - y0) / panels
        for a in range(panels):
            for b in range(panels):
                xi = x0 + (a + 0.5) * hx
                eta = y0 + (b + 0.5) * hy
                total += (values[ck, cj] + sx[ck, cj] * xi + sy[ck, cj] * eta) * hx * hy
    return total


def centered_difference(func, s, h=1e-6):
    return (func(s + h) - func(s - h)) / (2.0 * h)


def dense_max_abs_derivative(fluid, lo, hi, samples=2048):
    ss = np.linspace(lo, hi, samples)
    return float(np.abs(fluid.fractional_flow_derivative(ss)).max())


def welge_front(fluid, s_initial):
    """Shock saturation and speed factor of the two-phase displacement.

    The front saturation maximizes the secant slope
    (f(s) - f(s0)) / (s - s0); the shock travels at (that slope) * v.
    """
    f0 = float(fluid.fractional_flow(s_initial))

    def neg_secant(s):
        return -(float(fluid.fractional_flow(s)) - f0) / (s - s_initial)

    ss = np.linspace(s_initial + 1e-9, fluid.s_max, 4001)[1:]
    coarse = ss[np.argmin([neg_secant(s) for s in ss])]
    window = (max(s_initial + 1e-9, coarse - 1e-3), min(fluid.s_max, coarse + 1e-3))
    res = minimize_scalar(neg_secant, bounds=window, method="bounded",
                          options={"xatol": 1e-12})
    s_front = float(res.x)
    return s_front, -float(res.fun)


def smooth_bump(x, center, width):
    """Infinitely differentiable compact bump on |x - center| < width."""
    r = (np.asarray(x) - center) / width
    out = np.zeros_like(r)
    inside = np.abs(r) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - r[inside] ** 2))
    return out


class LinearFlux:
    """f(s) = s stand-in for the fluid closures (pure linear advection)."""

    s_min = 0.0
    s_max = 1.0

    def fractional_flow(self, s):
        return np.asarray(s, dtype=np.float64)

    def fractional_flow_derivative(self, s):
        return np.ones_like(np.asarray(s, dtype=np.float64))

    def max_abs_flux_derivative(self, lo, hi):
        return np.ones_like(np.asarray(lo, dtype=np.float64))


def stream_function_velocity(grid, psi):
    """Exactly divergence-free face velocities from vertex values psi.

    psi has shape (ny+1, nx+1); a constant boundary row/column makes the
    normal velocity vanish on that edge.
    """
    from centralflow import FaceVelocityField

    vx = (psi[1:, :] - psi[:-1, :]) / grid.dy
    vy = -(psi[:, 1:] - psi[:, :-1]) / grid.dx
    return FaceVelocityField(grid, vx, vy)


def closed_box_velocity(grid, rng, amplitude=1.0):
    """Random smooth divergence-free field with no-flow boundaries."""
    x = np.linspace(0.0, np.pi, grid.nx + 1)
    y = np.linspace(0.0, np.pi, grid.ny + 1)
    psi = np.zeros((grid.ny + 1, grid.nx + 1))
    for _ in range(3):
        a, b = rng.integers(1, 4), rng.integers(1, 4)
        amp = rng.normal() * amplitude
        psi += amp * np.outer(np.sin(b * y), np.sin(a * x))
    return stream_function_velocity(grid, psi)
