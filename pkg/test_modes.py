"""
Tests for the spheroidal mode functions: closed forms, ODE oracle,
Kummer function, comparison equation, σ-map and uniform JWKB.
"""

import math
import sys

import mpmath
import numpy as np
import pandas as pd
import pytest
from scipy.integrate import solve_ivp

from errors import DomainError
from modes import (ModeKind, ModeMethod, SpheroidalParams, boundary_slope, build_sigma_map, chi,
                   chi_turning_point, comparison_residual, comparison_solution,
                   exact_F_alpha0, exact_F_alpha0_reduced, exact_G_alpha0,
                   exact_G_alpha0_reduced, exact_mode, focal_coupling, focal_normalization,
                   integrate_spheroidal_ode, jwkb_F, jwkb_mode, kummer_1f1, Pi,
                   pi_turning_point, sigma_map)


# --- closed forms ----------------------------------------------------------

def test_exact_G_at_equator_and_focus():
    for kappa in (0.7, math.pi, 12.0):
        assert exact_G_alpha0(kappa, 0.0) == pytest.approx(math.sin(kappa), abs=1e-15)
    assert exact_G_alpha0_reduced(math.pi, 1.0) == pytest.approx(math.pi / 2)
    assert exact_G_alpha0_reduced(math.pi, 1.0 - 1e-9) == pytest.approx(math.pi / 2, rel=1e-8)


def test_exact_G_is_finite_next_to_the_far_focus():
    value = exact_G_alpha0(2 * math.pi, -1.0 + 1e-8)
    assert math.isfinite(value)


def test_exact_forms_reject_the_endpoints():
    with pytest.raises(DomainError):
        exact_G_alpha0(1.0, 1.0)
    with pytest.raises(DomainError):
        exact_F_alpha0(1.0, 1.0)


def test_exact_F_zero_and_focal_limit():
    kappa = 7.0
    assert exact_F_alpha0(kappa, 1.0 + math.pi / kappa) == pytest.approx(0.0, abs=1e-14)
    assert exact_F_alpha0_reduced(kappa, 1.0) == pytest.approx(kappa / 2)


def test_exact_F_far_field_envelope():
    # ξF → cos(κξ − (n+1)π/2) up to the constant phase κ
    kappa = 3.0
    xi = np.linspace(400.0, 401.0, 7)
    shifted = np.sin(kappa * (xi - 1.0))
    assert np.max(np.abs(xi * exact_F_alpha0(kappa, xi) - shifted)) < 1e-5


def test_exact_mode_wraps_closed_form():
    mode = exact_mode(SpheroidalParams(5.0), ModeKind.RADIAL_F)
    assert mode.method is ModeMethod.EXACT_ALPHA0
    assert float(mode(1.3)) == pytest.approx(exact_F_alpha0(5.0, 1.3))
    with pytest.raises(DomainError):
        exact_mode(SpheroidalParams(5.0, 0.1), ModeKind.RADIAL_F)


# --- ODE oracle ------------------------------------------------------------

def test_ode_matches_exact_angular_solution():
    kappa = 10.0
    grid = np.linspace(-0.99, 0.99, 199)
    mode = integrate_spheroidal_ode(SpheroidalParams(kappa), ModeKind.ANGULAR_G, grid)
    assert np.max(np.abs(mode.values - exact_G_alpha0(kappa, grid))) < 1e-8


def test_ode_matches_exact_radial_solution():
    kappa, xi_b = 10.0, 2.0
    grid = np.linspace(1.01, xi_b, 150)
    mode = integrate_spheroidal_ode(SpheroidalParams(kappa), ModeKind.RADIAL_F, grid)
    assert np.max(np.abs(mode.values - exact_F_alpha0(kappa, grid))) < 1e-8


def test_ode_solution_is_smooth_in_alpha():
    kappa, h = 8.0, 1e-3
    grid = np.array([1.2, 1.5, 1.9])

    def values(alpha):
        return integrate_spheroidal_ode(SpheroidalParams(kappa, alpha), ModeKind.RADIAL_F, grid).values

    d1 = (values(0.3 + h) - values(0.3 - h)) / (2 * h)
    d2 = (values(0.3 + 2 * h) - values(0.3 - 2 * h)) / (4 * h)
    richardson = (4 * d1 - d2) / 3
    assert np.max(np.abs(d1 - richardson)) < 1e-4 * (np.max(np.abs(richardson)) + 1.0)


def test_mode_table_export(tmp_path):
    grid = np.linspace(1.05, 1.5, 10)
    mode = integrate_spheroidal_ode(SpheroidalParams(4.0), ModeKind.RADIAL_F, grid)
    path = mode.to_csv(tmp_path / "mode.csv")
    frame = pd.read_csv(path)
    assert list(frame.columns) == ["coordinate", "value", "method"]
    assert set(frame["method"]) == {"OdeOracle"}
    assert np.allclose(frame["value"], mode.values, rtol=1e-15, atol=0)


def test_boundary_slope_vanishes_on_quantized_wall():
    kappa = 20.0
    xi_b = 1.0 + 1.5 * math.pi / kappa
    mode = exact_mode(SpheroidalParams(kappa), ModeKind.RADIAL_F)
    assert abs(boundary_slope(mode, xi_b)) < 1e-5 * kappa
    assert abs(boundary_slope(mode, 1.0 + math.pi / kappa)) > 0.5 * kappa


# --- Kummer function -------------------------------------------------------

def test_kummer_at_zero():
    assert kummer_1f1(1.3 - 0.2j, 2.0, 0.0) == 1.0


@pytest.mark.parametrize("z", [0.3, 2.0 + 1.0j, 5.0j, 20.0j, 50.0j, -40.0, 300.0j])
def test_kummer_elementary_case(z):
    expected = (np.exp(z) - 1.0) / z
    assert abs(kummer_1f1(1.0, 2.0, z) - expected) < 1e-10 * abs(expected)


@pytest.mark.parametrize("y", [0.5, 5.0, 9.9, 10.1, 25.0, 29.9, 30.1, 100.0, 1e3, 1e4])
@pytest.mark.parametrize("alpha", [0.0, 0.5, 2.0])
def test_kummer_against_mpmath_across_bands(y, alpha):
    a = 1.0 - 0.25j * alpha
    with mpmath.workdps(40):
        expected = complex(mpmath.hyp1f1(a, 2, 1j * y))
    assert abs(kummer_1f1(a, 2.0, 1j * y) - expected) < 1e-10 * abs(expected)


def test_kummer_against_its_differential_equation():
    # w(iy) with w_yy = i[(2i + y) w_y + a w]/y, started from the series at y = 1
    a = 1.0 - 0.25j
    w0 = kummer_1f1(a, 2.0, 1j)
    dw0 = 1j * (a / 2.0) * kummer_1f1(a + 1.0, 3.0, 1j)

    def rhs(y, w):
        return [w[1], 1j * ((2j + y) * w[1] + a * w[0]) / y]

    solution = solve_ivp(rhs, (1.0, 100.0), [w0, dw0], method="DOP853", rtol=1e-12, atol=1e-14)
    assert solution.success
    integrated = solution.y[0, -1]
    assert abs(kummer_1f1(a, 2.0, 100j) - integrated) < 1e-7 * abs(integrated)


def test_kummer_rejects_nonpositive_integer_b():
    with pytest.raises(DomainError):
        kummer_1f1(1.0, 0.0, 1.0)


# --- comparison equation ---------------------------------------------------

def test_comparison_solution_at_origin_and_alpha_zero():
    assert comparison_solution(0.0, 5.0, 0.7) == 0
    sigma = np.array([0.1, 0.5, 1.0, 3.0, 10.0])
    kappa = 50.0
    expected = 2.0 * np.sin(kappa * sigma ** 2 / 2.0)
    assert np.max(np.abs(comparison_solution(sigma, kappa, 0.0) - expected)) < 1e-9


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
def test_comparison_solution_solves_its_equation(alpha):
    kappa = 50.0
    for sigma in np.linspace(0.1, 10.0, 23):
        assert comparison_residual(sigma, kappa, alpha) < 1e-8


def test_chi_and_pi_poles_and_limits():
    with pytest.raises(DomainError):
        chi(0.0, 1.0)
    with pytest.raises(DomainError):
        Pi(0.0, 1.0)
    assert chi(1e4, 3.0, 0.7) == pytest.approx(9.0, rel=1e-6)
    kappa, alpha = 7.0, 0.4
    sigma0 = pi_turning_point(kappa, alpha)
    assert sigma0 ** 2 == pytest.approx((alpha * kappa + math.sqrt(alpha ** 2 * kappa ** 2 + 3 * kappa ** 2))
                                        / (2 * kappa ** 2))
    assert Pi(sigma0, kappa, alpha) == pytest.approx(0.0, abs=1e-10)
    assert chi(chi_turning_point(kappa, alpha), kappa, alpha) == pytest.approx(0.0, abs=1e-8)


def test_turning_points_merge_for_large_kappa():
    gaps = []
    for kappa in (1e2, 1e4, 1e6):
        x0, sigma0 = chi_turning_point(kappa), pi_turning_point(kappa)
        gaps.append(abs(x0 / sigma0 - 1.0))
    assert gaps[-1] < 1e-3
    assert gaps[0] > gaps[1] > gaps[2]


# --- σ-map -----------------------------------------------------------------

def test_sigma_map_hits_turning_point():
    mapping = build_sigma_map(50.0, 0.5)
    assert mapping(mapping.x0) == pytest.approx(mapping.sigma0, rel=1e-12)


def test_sigma_map_small_x_asymptote():
    x = 1e-3
    assert sigma_map(x, 50.0, 0.0) / x == pytest.approx(1.0, rel=1e-2)


def test_sigma_map_large_x_asymptote():
    x = 1e3
    assert sigma_map(x, 50.0, 0.0) / math.sqrt(2 * x) == pytest.approx(1.0, rel=1e-2)


def test_sigma_map_is_monotone():
    x = np.linspace(1e-4, 20.0, 1000)
    sigma = sigma_map(x, 50.0, 0.5)
    assert np.all(np.diff(sigma) > 0.0)


def test_sigma_map_rejects_negative_x():
    with pytest.raises(DomainError):
        sigma_map(-1.0, 10.0)


# --- uniform JWKB ----------------------------------------------------------

def test_focal_normalization_small_alpha_limit():
    assert focal_normalization(0.0) == 0.5
    assert focal_normalization(1e-6) == pytest.approx(0.5, rel=1e-6)


def test_jwkb_matches_exact_at_alpha_zero():
    kappa = 50.0
    xi = np.linspace(1.05, 3.0, 400)
    envelope = 1.0 / np.sqrt((xi - 1.0) * (xi + 1.0))
    deviation = np.abs(jwkb_F(kappa, xi) - exact_F_alpha0(kappa, xi)) / envelope
    assert np.max(deviation) < 1e-2


def test_jwkb_matches_ode_at_finite_alpha():
    kappa, alpha = 50.0, 0.5
    xi = np.linspace(1.05, 3.0, 400)
    ode = integrate_spheroidal_ode(SpheroidalParams(kappa, alpha), ModeKind.RADIAL_F, xi)
    root = np.sqrt((xi - 1.0) * (xi + 1.0))
    reference = root * ode.values
    approximation = root * jwkb_F(kappa, xi, alpha)
    scale = np.max(np.abs(reference))
    assert np.max(np.abs(approximation - reference)) < 2e-2 * scale


def test_jwkb_mode_wrapper():
    mode = jwkb_mode(SpheroidalParams(50.0), 3.0)
    assert mode.method is ModeMethod.UNIFORM_JWKB
    assert float(mode(2.0)) == pytest.approx(jwkb_F(50.0, 2.0), rel=1e-12)


# --- focal couplings -------------------------------------------------------

def test_focal_coupling_alpha_zero_and_parity():
    kappa = 9.0
    g1, g2 = focal_coupling(kappa, 0.0, 0)
    assert g1 == pytest.approx(kappa ** 2)
    assert g2 == g1
    g1, g2 = focal_coupling(kappa, 0.0, 3)
    assert g2 == -g1


def test_focal_coupling_even_and_decreasing_in_alpha():
    kappa = 4.0
    for alpha in (0.3, 1.0, 5.0):
        assert focal_coupling(kappa, alpha, 0)[0] == pytest.approx(focal_coupling(kappa, -alpha, 0)[0])
    values = [focal_coupling(kappa, a, 0)[0] for a in np.linspace(0.01, 20.0, 200)]
    assert np.all(np.diff(values) < 0.0)


def test_focal_coupling_normalization():
    g1, _ = focal_coupling(3.0, 0.0, 0, normalization=2.0)
    assert g1 == pytest.approx(4.5)


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    print("🧪 Testing mode functions")
    print("=" * 50)
    failures = 0
    for name, test in list(globals().items()):
        if not name.startswith("test_") or not callable(test):
            continue
        if hasattr(test, "pytestmark"):
            print(f"   ⏭️ {name} (parametrized, run with pytest)")
            continue
        try:
            if "tmp_path" in test.__code__.co_varnames[:test.__code__.co_argcount]:
                test(Path(tempfile.mkdtemp()))
            else:
                test()
            print(f"   ✅ {name}")
        except Exception as e:
            failures += 1
            print(f"   ❌ {name}: {e}")
    sys.exit(1 if failures else 0)
