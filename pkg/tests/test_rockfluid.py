import numpy as np
import pytest

from centralflow import FluidModel

from oracles import centered_difference, dense_max_abs_derivative


def test_default_parameters(fluid):
    assert fluid.mu_o == 10.0
    assert fluid.mu_w == 0.05
    assert fluid.s_rw == 0.2
    assert fluid.s_ro == 0.15


def test_invalid_parameters_rejected():
    with pytest.raises(ValueError):
        FluidModel(mu_w=0.0)
    with pytest.raises(ValueError):
        FluidModel(s_rw=0.9, s_ro=0.2)  # s_rw >= 1 - s_ro


def test_krw_endpoints_and_value(fluid):
    assert fluid.krw(0.2) == 0.0
    assert fluid.krw(1.0) == pytest.approx(1.0, rel=1e-15)
    assert fluid.krw(0.5) == pytest.approx(0.140625, rel=1e-12)


def test_kro_endpoints_and_value(fluid):
    assert fluid.kro(0.85) == 0.0
    assert fluid.kro(0.0) == pytest.approx(1.0, rel=1e-15)
    assert fluid.kro(0.5) == pytest.approx((1.0 - 0.5 / 0.85) ** 2, rel=1e-12)


def test_relative_permeability_monotonicity(fluid):
    s = np.linspace(-0.2, 1.2, 2000)
    krw = fluid.krw(s)
    kro = fluid.kro(s)
    assert np.all(np.diff(krw) >= 0)
    assert np.all(np.diff(kro) <= 0)


def test_total_mobility_values(fluid):
    # at the residual endpoints only one phase contributes
    assert fluid.total_mobility(0.2) == pytest.approx((1.0 - 0.2 / 0.85) ** 2 / 10.0, rel=1e-12)
    assert fluid.total_mobility(0.85) == pytest.approx((0.65 / 0.8) ** 2 / 0.05, rel=1e-12)
    expected_mid = 0.140625 / 0.05 + (1.0 - 0.5 / 0.85) ** 2 / 10.0
    assert fluid.total_mobility(0.5) == pytest.approx(expected_mid, rel=1e-12)


def test_total_mobility_positive_everywhere(fluid):
    s = np.linspace(0.2, 0.85, 10_000)
    assert np.all(fluid.total_mobility(s) > 0)


def test_fractional_flow_endpoints_and_value(fluid):
    assert fluid.fractional_flow(0.2) == 0.0
    assert fluid.fractional_flow(0.85) == 1.0
    expected = (0.140625 / 0.05) / (0.140625 / 0.05 + (1 - 0.5 / 0.85) ** 2 / 10.0)
    assert fluid.fractional_flow(0.5) == pytest.approx(expected, rel=1e-12)


def test_fractional_flow_bounded_and_monotone(fluid):
    s = np.linspace(0.2, 0.85, 10_000)
    f = fluid.fractional_flow(s)
    assert np.all(f >= 0.0) and np.all(f <= 1.0)
    assert np.all(np.diff(f) >= 0.0)


def test_fractional_flow_clamps_outside_physical_range(fluid):
    assert fluid.fractional_flow(0.05) == 0.0
    assert fluid.fractional_flow(0.99) == 1.0


def test_derivative_at_residual_water_is_zero(fluid):
    assert fluid.fractional_flow_derivative(0.2) == 0.0


@pytest.mark.parametrize("s", [0.5, 0.85])
def test_derivative_matches_finite_difference(fluid, s):
    fd = centered_difference(fluid.fractional_flow, s)
    assert fluid.fractional_flow_derivative(s) == pytest.approx(fd, abs=1e-6)


def test_derivative_matches_finite_difference_everywhere(fluid):
    s = np.linspace(0.2 + 1e-5, 0.85 - 1e-5, 10_000)
    fd = (fluid.fractional_flow(s + 1e-6) - fluid.fractional_flow(s - 1e-6)) / 2e-6
    assert np.abs(fluid.fractional_flow_derivative(s) - fd).max() < 1e-6


def test_derivative_nonnegative(fluid):
    s = np.linspace(0.2, 0.85, 10_000)
    assert np.all(fluid.fractional_flow_derivative(s) >= 0.0)


def test_second_derivative_matches_finite_difference(fluid):
    for s in (0.3, 0.5, 0.7):
        fd = centered_difference(fluid.fractional_flow_derivative, s, h=1e-6)
        assert fluid.fractional_flow_second_derivative(s) == pytest.approx(fd, rel=1e-5)


def test_interval_maximization_matches_dense_sampling(fluid, rng):
    for _ in range(50):
        lo, hi = np.sort(0.2 + 0.65 * rng.random(2))
        exact = float(fluid.max_abs_flux_derivative(lo, hi))
        sampled = dense_max_abs_derivative(fluid, lo, hi)
        assert exact >= sampled - 1e-12
        assert exact == pytest.approx(sampled, abs=1e-6 * max(exact, 1.0))


def test_interval_maximization_full_range_hits_critical_point(fluid):
    full = float(fluid.max_abs_flux_derivative(0.2, 0.85))
    assert full == pytest.approx(dense_max_abs_derivative(fluid, 0.2, 0.85, 100_001), rel=1e-9)
    assert len(fluid.flux_derivative_critical_points) >= 1
