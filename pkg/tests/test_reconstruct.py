import numpy as np
import pytest

from centralflow import (FluidModel, ScalarField, StructuredGrid, flux_slopes,
                         limited_slopes, minmod3, minmod_slopes)

from oracles import naive_minmod3, naive_slopes


def test_minmod3_examples():
    assert minmod3(2.0, 1.5, 1.0) == 1.0
    assert minmod3(-1.0, 0.5, 2.0) == 0.0
    assert minmod3(-2.0, -3.0, -1.0) == -1.0
    assert minmod3(0.0, 1.0, 2.0) == 0.0  # zero is not positive


def test_minmod3_matches_scalar_reference(rng):
    abc = rng.normal(size=(200, 3))
    got = minmod3(abc[:, 0], abc[:, 1], abc[:, 2])
    want = [naive_minmod3(*row) for row in abc]
    assert np.allclose(got, want, atol=0)


def test_theta_validation():
    g = StructuredGrid(4, 4, 1.0, 1.0)
    field = ScalarField.constant(g, 1.0)
    for bad in (0.5, 2.5):
        with pytest.raises(ValueError):
            limited_slopes(field, theta=bad)


def test_linear_ramp_slope_equals_spacing():
    g = StructuredGrid(6, 4, 6.0, 4.0)
    jj = np.arange(6)[None, :].repeat(4, axis=0).astype(float)
    h = 0.7
    field = ScalarField(g, h * jj)
    for theta in (1.0, 1.5, 2.0):
        s = limited_slopes(field, theta)
        assert np.allclose(s.sx[:, 1:-1], h)
        assert np.allclose(s.sy, 0.0)
        assert np.all(s.sx[:, 0] == 0.0) and np.all(s.sx[:, -1] == 0.0)


def test_isolated_spike_is_clipped():
    g = StructuredGrid(5, 5, 1.0, 1.0)
    values = np.zeros((5, 5))
    values[2, 2] = 1.0
    s = limited_slopes(ScalarField(g, values))
    assert s.sx[2, 2] == 0.0
    assert s.sy[2, 2] == 0.0


def test_three_point_example():
    # neighborhood (0, 1, 3) with theta = 1.5 -> slope 1.5
    arr = np.array([[0.0, 1.0, 3.0]] * 3)
    sx, _ = minmod_slopes(arr, theta=1.5)
    assert sx[1, 1] == pytest.approx(1.5, abs=1e-15)


def test_scaling_equivariance(rng):
    arr = rng.normal(size=(6, 7))
    for c in (3.0, -2.5, 0.1):
        sx1, sy1 = minmod_slopes(arr, 1.5)
        sx2, sy2 = minmod_slopes(c * arr, 1.5)
        assert np.allclose(sx2, c * sx1, atol=1e-14)
        assert np.allclose(sy2, c * sy1, atol=1e-14)


def test_extremum_clipping_everywhere(rng):
    arr = rng.normal(size=(10, 12))
    sx, sy = minmod_slopes(arr, 2.0)
    interior = arr[:, 1:-1]
    is_max = (interior >= arr[:, :-2]) & (interior >= arr[:, 2:])
    is_min = (interior <= arr[:, :-2]) & (interior <= arr[:, 2:])
    assert np.all(sx[:, 1:-1][is_max | is_min] == 0.0)
    interior = arr[1:-1, :]
    is_max = (interior >= arr[:-2, :]) & (interior >= arr[2:, :])
    is_min = (interior <= arr[:-2, :]) & (interior <= arr[2:, :])
    assert np.all(sy[1:-1, :][is_max | is_min] == 0.0)


def test_slopes_match_loop_reference(rng):
    arr = rng.normal(size=(7, 9))
    for theta in (1.0, 1.3, 1.8):
        sx, sy = minmod_slopes(arr, theta)
        rx, ry = naive_slopes(arr, theta)
        assert np.allclose(sx, rx, atol=0)
        assert np.allclose(sy, ry, atol=0)


def test_divided_slope_converges_to_gradient():
    # smooth field: divided slopes approach the derivative away from extrema
    errors = []
    for n in (16, 32, 64, 128):
        g = StructuredGrid(n, 4, 1.0, 1.0)
        x, _ = g.cell_centers()
        field = ScalarField(g, np.tile(np.sin(2.0 * x), (4, 1)))
        s = limited_slopes(field, theta=1.5)
        exact = 2.0 * np.cos(2.0 * x)
        err = np.abs(s.sx[2, 1:-1] / g.dx - exact[1:-1])
        away = np.abs(exact[1:-1]) > 0.5  # skip the extrema neighborhoods
        errors.append(err[away].max())
    rates = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert rates.min() >= 1.0


def test_theta_one_reconstruction_is_tv_bounded(rng):
    values = rng.random(40)
    arr = np.tile(values, (3, 1))
    sx, _ = minmod_slopes(arr, theta=1.0)
    left = arr[1] - 0.5 * sx[1]
    right = arr[1] + 0.5 * sx[1]
    points = np.empty(2 * arr.shape[1])
    points[0::2] = left
    points[1::2] = right
    tv_points = np.abs(np.diff(points)).sum()
    tv_averages = np.abs(np.diff(arr[1])).sum()
    assert tv_points <= tv_averages + 1e-12


def test_flux_slopes_constant_and_clamped(fluid):
    g = StructuredGrid(5, 3, 1.0, 1.0)
    s = flux_slopes(ScalarField.constant(g, 0.5), fluid)
    assert np.all(s.sx == 0.0) and np.all(s.sy == 0.0)
    # a ramp entirely below residual water saturation maps to f identically 0
    ramp = np.tile(np.linspace(0.0, 0.19, 5), (3, 1))
    s = flux_slopes(ScalarField(g, ramp), fluid)
    assert np.all(s.sx == 0.0) and np.all(s.sy == 0.0)


def test_flux_slopes_three_cells(fluid):
    g = StructuredGrid(3, 3, 1.0, 1.0)
    sats = np.tile(np.array([0.3, 0.5, 0.7]), (3, 1))
    s = flux_slopes(ScalarField(g, sats), fluid, theta=1.0)
    f = fluid.fractional_flow(np.array([0.3, 0.5, 0.7]))
    dm, dp = f[1] - f[0], f[2] - f[1]
    expected = naive_minmod3(dm, 0.5 * (dm + dp), dp)
    assert s.sx[1, 1] == pytest.approx(expected, rel=1e-14)
