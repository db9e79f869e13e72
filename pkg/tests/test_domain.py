import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from harrod.domain import (CrisisMethod, CrisisReport, GrowthLaw, MuSchedule, ScenarioConfig,
                           Trajectory, ValidationError, Variant, make_params)


def test_baseline_params():
    p = make_params(0.5, 10, 1)
    assert p.sigma == 0.05
    assert p.y0 == 0.1
    assert p.i0 == 0.05
    assert p.crisis_time == 20.0


def test_derived_params_arithmetic():
    p = make_params(0.2, 8, 100)
    assert p.sigma == pytest.approx(0.025, rel=1e-15)
    assert p.y0 == 12.5
    assert p.i0 == pytest.approx(2.5, rel=1e-15)


@pytest.mark.parametrize("mu,nu,k0,field", [
    (0.5, 10, 0, "k0"),
    (0.5, 10, -1, "k0"),
    (0.0, 10, 1, "mu"),
    (1.0, 10, 1, "mu"),
    (0.5, 0, 1, "nu"),
    (0.5, math.inf, 1, "nu"),
])
def test_params_rejected(mu, nu, k0, field):
    with pytest.raises(ValidationError) as err:
        make_params(mu, nu, k0)
    assert err.value.field == field


@given(st.floats(1e-3, 0.999), st.floats(1e-2, 1e3), st.floats(1e-6, 1e9))
def test_params_identities_within_one_ulp(mu, nu, k0):
    p = make_params(mu, nu, k0)
    assert abs(p.i0 - p.mu * p.y0) <= 2 * math.ulp(p.i0)
    assert abs(p.y0 * p.nu - p.k0) <= 2 * math.ulp(p.k0)
    assert p.sigma == mu / nu


def test_params_are_immutable():
    p = make_params(0.5, 10, 1)
    with pytest.raises(AttributeError):
        p.mu = 0.3


def test_growth_law_constraints():
    law = GrowthLaw((-0.01, 0.0003))
    assert law(0.0) == 0.0
    assert law.derivative(0.0) == 1.0
    assert law.degree == 3
    assert GrowthLaw().is_identity
    assert GrowthLaw((0.0, 0.0)).is_identity


def test_growth_law_validity_interval():
    assert GrowthLaw((-0.01,)).validity_end == pytest.approx(50.0)
    assert GrowthLaw((0.01,)).validity_end == math.inf
    assert GrowthLaw().validity_end == math.inf


def test_mu_schedule_piecewise_left_continuous():
    s = MuSchedule.piecewise([(0, 0.5), (5, 0.25)])
    assert s(0) == 0.5
    assert s(5) == 0.5
    assert s(5.000001) == 0.25
    assert s.breakpoints == (5,)


def test_mu_schedule_rejections():
    with pytest.raises(ValidationError):
        MuSchedule.constant(1.2)
    with pytest.raises(ValidationError):
        MuSchedule.piecewise([(0, 0.5), (5, 0.2), (3, 0.1)])
    poly = MuSchedule.polynomial([0.5, 0.01])
    assert poly(10) == pytest.approx(0.6)
    with pytest.raises(ValidationError):
        poly(60)


def test_trajectory_invariants_enforced():
    grid = np.array([0.0, 1.0])
    ones = np.ones(2)
    Trajectory(grid, ones, ones, ones, ones, ones, ones, ones)
    with pytest.raises(ValidationError):
        Trajectory(grid, np.ones(3), ones, ones, ones, ones, ones, ones)
    with pytest.raises(ValidationError):
        Trajectory(np.array([0.0, 0.0]), ones, ones, ones, ones, ones, ones, ones)


def test_crisis_report_horizon_margin():
    r = CrisisReport(Variant.CONTINUOUS, 20.0, CrisisMethod.ANALYTIC, horizon=19.0)
    assert not r.within_horizon
    assert r.margin_to_horizon == 1.0
    assert not CrisisReport(Variant.DISCRETE, None, CrisisMethod.ANALYTIC, horizon=5).within_horizon


def test_scenario_config_variant_gating():
    p = make_params(0.5, 10, 1)
    with pytest.raises(ValidationError):
        ScenarioConfig(Variant.CUMULATIVE, p, 19.0)
    with pytest.raises(ValidationError):
        ScenarioConfig(Variant.CONTINUOUS, p, 19.0, rho=0.1)
    with pytest.raises(ValidationError):
        ScenarioConfig(Variant.CONTINUOUS, p, -1.0)
    cfg = ScenarioConfig(Variant.CUMULATIVE, p, 19.0, rho=0.1)
    assert cfg.rho == 0.1
