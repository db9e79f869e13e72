"""Continuous-time Harrod model with the capital/realized-income balance.

State: ``K = K0/(1 - sigma t)``, ``I = I0/(1 - sigma t)^2``, ``Y = I/mu``,
``C = (1 - mu) Y``. The singularity sits at ``t = 1/sigma = nu/mu``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .domain import (DENOMINATOR_FLOOR, CrisisMethod, CrisisReport, ModelParams,
                     PastCrisisError, Tolerances, Trajectory, Variant)
from .numerics import (ODEControls, ODESolution, RateFunction, find_root,
                       integrate_linear_ode, quadrature)


class State(NamedTuple):
    K: float
    I: float
    Y: float
    C: float


class RealizedFlows(NamedTuple):
    Y_R: float
    K_R: float
    C_R: float
    I_R: float


def _denominator(params: ModelParams, tau: float, floor: float) -> float:
    if tau < 0:
        raise ValueError(f"tau must be non-negative, got {tau}")
    d = 1.0 - params.sigma * tau
    if d < floor:
        raise PastCrisisError(tau, params.crisis_time)
    return d


def closed_form_state(params: ModelParams, tau: float, floor: float = DENOMINATOR_FLOOR) -> State:
    d = _denominator(params, tau, floor)
    capital = params.k0 / d
    investment = params.i0 / (d * d)
    income = investment / params.mu
    return State(capital, investment, income, (1.0 - params.mu) * income)


def realized_flows(params: ModelParams, tau: float, floor: float = DENOMINATOR_FLOOR) -> RealizedFlows:
    """Running integrals of the intensities from 0 to ``tau`` (antiderivatives)."""
    d = _denominator(params, tau, floor)
    # (1/d - 1) written as sigma*tau/d to keep precision for small tau
    y_r = (params.k0 / params.mu) * (params.sigma * tau / d)
    k_r = params.mu * y_r
    return RealizedFlows(y_r, k_r, (1.0 - params.mu) * y_r, k_r)


def baseline_rate(params: ModelParams) -> RateFunction:
    sigma = params.sigma
    return RateFunction(rate=lambda t: sigma / (1.0 - sigma * t),
                        denominator=lambda t: 1.0 - sigma * t)


def trajectory_from_ode(sol: ODESolution, investment_of: Callable[[float, float], float],
                        mu_of: Callable[[float], float], tol: float = 1e-9) -> Trajectory:
    """Build a full trajectory from an integrated capital series.

    ``investment_of(t, K)`` maps capital to the investment intensity for the
    model at hand. Realized flows are running quadratures of the intensities
    along the cubic Hermite interpolant of the ODE solution.
    """
    grid, capital = sol.grid, sol.capital
    investment = np.array([investment_of(t, k) for t, k in zip(grid, capital)])
    mu = np.array([mu_of(t) for t in grid])
    income = investment / mu
    consumption = income - investment

    realized_i = np.zeros_like(grid)
    realized_y = np.zeros_like(grid)
    for j in range(len(grid) - 1):
        a, b = grid[j], grid[j + 1]
        h = b - a

        def inside(t, a=a):
            # intensities may jump at a breakpoint; use the right limit
            return math.nextafter(a, math.inf) if t == a else t

        def inv(t, j=j):
            t = inside(t)
            return investment_of(t, sol.interpolate(t, j))

        def inc(t, j=j):
            t = inside(t)
            return investment_of(t, sol.interpolate(t, j)) / mu_of(t)

        scale = h * max(1.0, abs(income[j + 1]))
        realized_i[j + 1] = realized_i[j] + quadrature(inv, a, b, tol * scale)
        realized_y[j + 1] = realized_y[j] + quadrature(inc, a, b, tol * scale)
    return Trajectory(grid, capital, investment, income, consumption,
                      realized_y, realized_i, realized_y - realized_i)


def crisis_report(variant: Variant, crisis_time: Optional[float], horizon: float,
                  sol: Optional[ODESolution] = None,
                  method: CrisisMethod = CrisisMethod.ANALYTIC, note: str = "") -> CrisisReport:
    """Analytic report when the crisis lies beyond the horizon, guard report otherwise."""
    margin = sol.denominator_margin if sol is not None else None
    if sol is not None and sol.guard_tripped:
        return CrisisReport(variant, crisis_time, CrisisMethod.INTEGRATOR_GUARD, margin,
                            horizon, guard_time=sol.last_safe_tau, note=note)
    return CrisisReport(variant, crisis_time, method, margin, horizon, note=note)


def default_controls(tolerances: Tolerances = Tolerances(), max_step: float = 0.01) -> ODEControls:
    return ODEControls(rel_tol=tolerances.ode_rel, max_step=max_step)


def simulate(params: ModelParams, horizon: float, controls: Optional[ODEControls] = None,
             tolerances: Tolerances = Tolerances()) -> tuple[Trajectory, CrisisReport]:
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    controls = controls or default_controls(tolerances)
    rate = baseline_rate(params)
    sol = integrate_linear_ode(rate, params.k0, horizon, controls)
    traj = trajectory_from_ode(sol, lambda t, k: rate(t) * k, lambda t: params.mu,
                               tolerances.identity_abs)
    return traj, crisis_report(Variant.CONTINUOUS, params.crisis_time, horizon, sol)


@dataclass(frozen=True)
class Milestones:
    balance_time: float
    reformat_time: float
    crisis_time: float
    checks: dict = field(default_factory=dict)


def milestones(params: ModelParams, root_tol: float = 1e-12, quad_tol: float = 1e-12) -> Milestones:
    """Times where realized income meets capital and realized consumption meets K0.

    Both are located by root finding on the antiderivatives and should land
    on ``nu``. ``checks`` carries the boundary values at ``nu`` plus
    quadrature-based realized income and consumption for cross-checking.
    """
    k0, mu, sigma = params.k0, params.mu, params.sigma
    crisis = params.crisis_time
    # realized flows exceed their targets once 1 - sigma t < 1 - mu, i.e. past nu
    hi = 0.5 * (params.nu + crisis)

    def balance(t):
        return realized_flows(params, t).Y_R - closed_form_state(params, t).K

    def d_balance(t):
        d = 1.0 - sigma * t
        # d/dt [(K0/mu)(1/d - 1) - K0/d] = K0 sigma (1/mu - 1) / d^2
        return k0 * sigma * (1.0 / mu - 1.0) / (d * d)

    def reformat(t):
        return realized_flows(params, t).C_R - k0

    def d_reformat(t):
        return closed_form_state(params, t).C

    balance_time = find_root(balance, 0.0, hi, root_tol, d_balance)
    reformat_time = find_root(reformat, 0.0, hi, root_tol, d_reformat)

    nu = params.nu
    at_nu = closed_form_state(params, nu)

    def income(t):
        return closed_form_state(params, t).Y

    y_r_quad = quadrature(income, 0.0, nu, quad_tol)
    c_r_quad = quadrature(lambda t: closed_form_state(params, t).C, 0.0, nu, quad_tol)
    checks = {
        "K_nu": at_nu.K,
        "I_nu": at_nu.I,
        "Y_nu": at_nu.Y,
        "Y_R_nu_quadrature": y_r_quad,
        "C_R_nu_quadrature": c_r_quad,
        "Y_R_nu_closed_form": realized_flows(params, nu).Y_R,
        "C_R_nu_closed_form": realized_flows(params, nu).C_R,
    }
    return Milestones(balance_time, reformat_time, crisis, checks)


def legacy_exponential(params: ModelParams, horizon: float, max_step: float = 0.01) -> Trajectory:
    """The classical unlimited-growth solution, kept only as a baseline for comparison."""
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    n = max(1, math.ceil(horizon / max_step - 1e-9))
    grid = np.linspace(0.0, horizon, n + 1)
    growth = np.exp(params.sigma * grid)
    capital = params.k0 * growth
    income = params.y0 * growth
    investment = params.i0 * growth
    # running integrals of y0 e^{sigma t}
    realized_y = params.y0 * np.expm1(params.sigma * grid) / params.sigma
    realized_i = params.mu * realized_y
    return Trajectory(grid, capital, investment, income, income - investment,
                      realized_y, realized_i, realized_y - realized_i)


@dataclass(frozen=True)
class DimensionalAudit:
    tau: float
    capital: float
    balance: float
    relative_mismatch: float


def dimensional_audit(params: ModelParams, tau: float, quad_tol: float = 1e-12) -> DimensionalAudit:
    """Compare ``K(t)`` with ``(nu/t) * int_0^t Y`` evaluated by quadrature.

    At ``t = 0`` the right side is replaced by its limit ``nu * Y0``.
    """
    if tau < 0:
        raise ValueError("tau must be non-negative")
    capital = closed_form_state(params, tau).K
    if tau == 0:
        balance = params.nu * params.y0
    else:
        integral = quadrature(lambda t: closed_form_state(params, t).Y, 0.0, tau, quad_tol)
        balance = params.nu / tau * integral
    return DimensionalAudit(tau, capital, balance, abs(capital - balance) / abs(capital))
