import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from harrod.domain import NumericalDomainError
from harrod.numerics import (GUARD_TRIPPED, REACHED_HORIZON, BracketError, DegenerateFitError,
                             ODEControls, RateFunction, find_root, fit_constrained_polynomial,
                             integrate_linear_ode, quadrature, scan_bracket)

SIGMA = 0.05


def pole_rate(sigma=SIGMA):
    return RateFunction(lambda t: sigma / (1 - sigma * t), lambda t: 1 - sigma * t)


# -- integrator ---------------------------------------------------------------

def test_integrate_matches_closed_form_before_pole():
    sol = integrate_linear_ode(pole_rate(), 1.0, 19.0, ODEControls(rel_tol=1e-8, max_step=0.01))
    assert sol.stop_reason == REACHED_HORIZON
    assert sol.grid[-1] == 19.0
    assert sol.capital[-1] == pytest.approx(1 / (1 - SIGMA * 19), rel=1e-8)


def test_zero_rate_gives_constant_series():
    sol = integrate_linear_ode(RateFunction(lambda t: 0.0), 1.0, 5.0)
    assert sol.stop_reason == REACHED_HORIZON
    assert np.all(sol.capital == 1.0)
    assert sol.grid[-1] == 5.0


def test_guard_trips_before_pole():
    sol = integrate_linear_ode(pole_rate(), 1.0, 25.0)
    assert sol.stop_reason == GUARD_TRIPPED
    assert 19.9 < sol.last_safe_tau < 20.0
    assert sol.denominator_margin >= 1e-6
    # closed form still tracks the solution up to the guard
    assert sol.capital[-1] == pytest.approx(1 / (1 - SIGMA * sol.grid[-1]), rel=1e-6)


def test_fourth_order_convergence_on_constant_rate():
    exact = math.exp(SIGMA * 20)
    errors = []
    for h in (2.0, 1.0, 0.5):
        # loose tolerance so step size is set by max_step alone
        sol = integrate_linear_ode(RateFunction(lambda t: SIGMA), 1.0, 20.0,
                                   ODEControls(rel_tol=1.0, max_step=h))
        errors.append(abs(sol.capital[-1] - exact))
    assert errors[0] / errors[1] >= 12
    assert errors[1] / errors[2] >= 12


def test_non_finite_rate_raises():
    rate = RateFunction(lambda t: math.nan if t > 1 else 0.1)
    with pytest.raises(NumericalDomainError):
        integrate_linear_ode(rate, 1.0, 3.0)


def test_breakpoints_are_on_grid():
    rate = RateFunction(lambda t: 0.1 if t <= 0.37 else 0.2, breakpoints=(0.37,))
    sol = integrate_linear_ode(rate, 1.0, 1.0, ODEControls(max_step=0.1))
    assert 0.37 in sol.grid
    assert sol.capital[-1] == pytest.approx(math.exp(0.1 * 0.37 + 0.2 * 0.63), rel=1e-8)


def test_hermite_interpolant_is_accurate():
    sol = integrate_linear_ode(pole_rate(), 1.0, 10.0, ODEControls(max_step=0.1))
    for t in (0.05, 3.333, 9.97):
        assert sol.interpolate(t) == pytest.approx(1 / (1 - SIGMA * t), rel=1e-8)


# -- quadrature ---------------------------------------------------------------

def test_quadrature_pole_intensity():
    # antiderivative (Y0/sigma)((1 - sigma t)^-1 - 1) is 2 at t = 10
    value = quadrature(lambda t: 0.1 / (1 - SIGMA * t) ** 2, 0.0, 10.0, 1e-12)
    assert value == pytest.approx(2.0, abs=1e-12)


def test_quadrature_zero_and_constant():
    assert quadrature(lambda t: 0.0, -3.0, 7.0) == 0.0
    assert quadrature(lambda t: 2.5, 1.0, 5.0) == 10.0
    assert quadrature(lambda t: 1.0, 2.0, 2.0) == 0.0


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=4, max_size=4),
       st.floats(-10, 10), st.floats(0, 10))
def test_quadrature_exact_on_cubics(c, a, width):
    b = a + width

    def f(t):
        return c[0] + c[1] * t + c[2] * t * t + c[3] * t ** 3

    def F(t):
        return c[0] * t + c[1] * t ** 2 / 2 + c[2] * t ** 3 / 3 + c[3] * t ** 4 / 4

    scale = max(1.0, max(abs(F(a)), abs(F(b))))
    assert quadrature(f, a, b, 1e-9) == pytest.approx(F(b) - F(a), abs=1e-11 * scale)


def test_quadrature_rejects_non_finite():
    with pytest.raises(NumericalDomainError):
        quadrature(lambda t: 1 / (1 - t), 0.0, 1.0)


# -- roots --------------------------------------------------------------------

def test_linear_root():
    assert find_root(lambda t: 1 - 0.05 * t, 0, 40, 1e-12) == pytest.approx(20, abs=1e-12)


def test_quadratic_root_cumulative():
    # sigma rho t^2 + sigma t - 1 with sigma=0.05, rho=0.1
    a, b, c = 0.005, 0.05, -1.0
    oracle = (-b + math.sqrt(b * b - 4 * a * c)) / (2 * a)
    g = lambda t: 1 - 0.05 * t - 0.005 * t * t
    assert oracle == pytest.approx(10.0)
    assert find_root(g, 0, 40, 1e-12, lambda t: -0.05 - 0.01 * t) == pytest.approx(oracle, abs=1e-12)
    assert find_root(g, 0, 40, 1e-12) == pytest.approx(oracle, abs=1e-12)


def test_quadratic_root_decelerated():
    g = lambda t: 0.05 * (t - 0.01 * t * t) - 1
    oracle = 50 - 10 * math.sqrt(5)
    assert find_root(g, 0, 50, 1e-12) == pytest.approx(oracle, abs=1e-11)
    assert find_root(g, 0, 50, 1e-12, lambda t: 0.05 * (1 - 0.02 * t)) == pytest.approx(oracle, abs=1e-11)


def test_root_requires_bracket():
    with pytest.raises(BracketError):
        find_root(lambda t: t * t + 1, -1, 1)


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(0.5, 30))
def test_root_invariant_under_positive_scaling(scale, root):
    g = lambda t: math.tanh(t - root)
    base = find_root(g, 0, 40, 1e-10)
    scaled = find_root(lambda t: scale * g(t), 0, 40, 1e-10)
    assert abs(base - scaled) <= 1e-10
    assert abs(base - root) <= 1e-10


def test_scan_bracket():
    assert scan_bracket(lambda t: t - 3.3, 0, 10, 10) == (3.0, 4.0)
    assert scan_bracket(lambda t: t + 1, 0, 10) is None


# -- constrained polynomial fit -----------------------------------------------

def test_fit_planted_quadratic():
    pts = [(t, t - 0.01 * t * t) for t in range(1, 11)]
    law = fit_constrained_polynomial(pts, 2)
    assert law.coefficients[0] == pytest.approx(-0.01, abs=1e-10)
    assert law.residual_norm < 1e-10


def test_fit_identity_law():
    law = fit_constrained_polynomial([(t, float(t)) for t in range(1, 8)], 3)
    assert law.coefficients == pytest.approx((0.0, 0.0), abs=1e-10)


def test_fit_planted_cubic():
    pts = [(t, t + 0.002 * t ** 3) for t in range(1, 13)]
    a2, a3 = fit_constrained_polynomial(pts, 3).coefficients
    assert a2 == pytest.approx(0.0, abs=1e-10)
    assert a3 == pytest.approx(0.002, abs=1e-10)


def test_fit_constraints_hold_structurally():
    rng = np.random.default_rng(4)
    pts = [(t, t + rng.normal()) for t in np.linspace(0.5, 5, 9)]
    law = fit_constrained_polynomial(pts, 4)
    assert law(0.0) == 0.0
    assert law.derivative(0.0) == 1.0


def test_fit_degenerate_abscissae():
    with pytest.raises(DegenerateFitError):
        fit_constrained_polynomial([(2.0, 1.0)] * 5, 3)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=1, max_size=3))
def test_fit_reproduces_exactly_representable_planted_laws(numerators):
    coeffs = [n / 1024 for n in numerators]
    taus = [0.5 * k for k in range(1, 13)]
    pts = [(t, t + sum(c * t ** (i + 2) for i, c in enumerate(coeffs))) for t in taus]
    law = fit_constrained_polynomial(pts, len(coeffs) + 1)
    assert law.coefficients == pytest.approx(coeffs, abs=1e-10)
