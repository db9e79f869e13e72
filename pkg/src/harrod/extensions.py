"""Generalized capital law and the three extension models.

Each extension is a scalar linear ODE ``dK/dt = r(t) K`` whose rate has a
denominator that vanishes in finite time. The integrator is ground truth;
closed forms, where they exist, are checked against it.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as P

from .continuous import crisis_report, default_controls, trajectory_from_ode
from .domain import (DENOMINATOR_FLOOR, CrisisMethod, CrisisReport, GrowthLaw, ModelParams,
                     MuSchedule, PastCrisisError, Tolerances, Trajectory, ValidationError,
                     Variant)
from .numerics import (ODEControls, RateFunction, find_root, integrate_linear_ode,
                       scan_bracket)

#: below this rho the crisis formula cancels catastrophically; use 1/sigma
RHO_FALLBACK = 1e-12


@dataclass(frozen=True)
class ExtensionOutcome:
    trajectory: Trajectory
    crisis: CrisisReport
    closed_form_available: bool
    closed_form_discrepancy: Optional[float] = None


# -- generalized law ----------------------------------------------------------

def generalized_capital(params: ModelParams, law: GrowthLaw, tau: float,
                        floor: float = DENOMINATOR_FLOOR) -> float:
    if tau < 0:
        raise ValueError("tau must be non-negative")
    if tau >= law.validity_end:
        raise ValidationError("tau", f"beyond the monotone range of f (ends at {law.validity_end:.12g})")
    d = 1.0 - params.sigma * float(law(tau))
    if d < floor:
        raise PastCrisisError(tau, None)
    return params.k0 / d


def generalized_crisis(params: ModelParams, law: GrowthLaw, root_abs: float = 1e-12,
                       horizon: Optional[float] = None) -> CrisisReport:
    return growth_law_crisis(params.sigma, law, root_abs, horizon)


def growth_law_crisis(sigma: float, law: GrowthLaw, root_abs: float = 1e-12,
                      horizon: Optional[float] = None) -> CrisisReport:
    """Smallest positive solution of ``f(t) = 1/sigma`` on the range where f grows."""
    if law.is_identity:
        return CrisisReport(Variant.GENERALIZED, 1.0 / sigma, CrisisMethod.POLYNOMIAL_ROOT,
                            horizon=horizon)

    def g(t):
        return sigma * float(law(t)) - 1.0

    def dg(t):
        return sigma * float(law.derivative(t))

    end = law.validity_end
    if math.isfinite(end):
        hi = end
        if g(hi) < 0:
            return CrisisReport(Variant.GENERALIZED, None, CrisisMethod.POLYNOMIAL_ROOT,
                                horizon=horizon,
                                note=f"no crisis before f stops growing at tau={end:.12g}")
    else:
        hi = 1.0 / sigma
        for _ in range(200):
            if g(hi) >= 0:
                break
            hi *= 2.0
    root = find_root(g, 0.0, hi, root_abs, dg)
    return CrisisReport(Variant.GENERALIZED, root, CrisisMethod.POLYNOMIAL_ROOT, horizon=horizon)


def generalized_simulate(params: ModelParams, law: GrowthLaw, horizon: float,
                         controls: Optional[ODEControls] = None,
                         tolerances: Tolerances = Tolerances()) -> ExtensionOutcome:
    sigma = params.sigma
    rate = RateFunction(
        rate=lambda t: sigma * float(law.derivative(t)) / (1.0 - sigma * float(law(t))),
        denominator=lambda t: 1.0 - sigma * float(law(t)),
    )
    controls = controls or default_controls(tolerances)
    sol = integrate_linear_ode(rate, params.k0, horizon, controls)
    traj = trajectory_from_ode(sol, lambda t, k: rate(t) * k, lambda t: params.mu,
                               tolerances.identity_abs)
    analytic = generalized_crisis(params, law, tolerances.root_abs, horizon)
    report = crisis_report(Variant.GENERALIZED, analytic.crisis_time, horizon, sol,
                           CrisisMethod.POLYNOMIAL_ROOT, analytic.note)
    return ExtensionOutcome(traj, report, True,
                            _discrepancy(traj, lambda t: generalized_capital(params, law, t),
                                         analytic.crisis_time))


def _discrepancy(traj: Trajectory, closed_form, crisis_time: Optional[float]) -> float:
    """Largest relative gap between the ODE capital and a closed form up to 0.95 crisis."""
    limit = 0.95 * crisis_time if crisis_time is not None else math.inf
    worst = 0.0
    for t, k in zip(traj.grid, traj.capital):
        if t > limit:
            break
        ref = closed_form(t)
        worst = max(worst, abs(k - ref) / abs(ref))
    return worst


# -- time-dependent investment share -----------------------------------------

def variable_mu_crisis(params: ModelParams, schedule: MuSchedule,
                       root_abs: float = 1e-12) -> tuple[Optional[float], CrisisMethod]:
    """First time where ``nu - t mu(t)`` vanishes (or jumps through zero)."""
    nu = params.nu
    if schedule.kind == MuSchedule.CONSTANT:
        return nu / schedule.values[0], CrisisMethod.ANALYTIC
    if schedule.kind == MuSchedule.PIECEWISE:
        rows = schedule.values
        for i, (start, value) in enumerate(rows):
            end = rows[i + 1][0] if i + 1 < len(rows) else math.inf
            if i > 0 and nu - start * value <= 0:
                # the value applies just after its breakpoint
                return start, CrisisMethod.ANALYTIC
            root = nu / value
            if start < root <= end:
                return root, CrisisMethod.ANALYTIC
        return None, CrisisMethod.ANALYTIC
    # polynomial: nu - t p(t)
    q = P.polysub([nu], P.polymulx(schedule.values))
    roots = [r.real for r in P.polyroots(q)
             if abs(r.imag) <= 1e-9 * max(1.0, abs(r)) and r.real > 0]
    if not roots:
        return None, CrisisMethod.POLYNOMIAL_ROOT
    guess = min(roots)

    def g(t):
        return float(P.polyval(t, q))

    bracket = scan_bracket(g, 0.0, guess * (1.0 + 1e-6) + 1e-9, 64)
    if bracket is None:
        return guess, CrisisMethod.POLYNOMIAL_ROOT
    root = find_root(g, bracket[0], bracket[1], root_abs,
                     lambda t: float(P.polyval(t, P.polyder(q))))
    for t in np.linspace(0.0, root, 65):
        schedule(t)  # raises if the share leaves (0, 1) before the crisis
    return root, CrisisMethod.POLYNOMIAL_ROOT


def variable_mu_simulate(params: ModelParams, schedule: MuSchedule, horizon: float,
                         controls: Optional[ODEControls] = None,
                         tolerances: Tolerances = Tolerances()) -> ExtensionOutcome:
    nu = params.nu
    rate = RateFunction(
        rate=lambda t: schedule(t) / (nu - t * schedule(t)),
        # normalized by nu so the floor is dimensionless
        denominator=lambda t: (nu - t * schedule(t)) / nu,
        breakpoints=schedule.breakpoints,
    )
    controls = controls or default_controls(tolerances)
    sol = integrate_linear_ode(rate, params.k0, horizon, controls)
    traj = trajectory_from_ode(sol, lambda t, k: rate(t) * k, schedule, tolerances.identity_abs)
    crisis, method = variable_mu_crisis(params, schedule, tolerances.root_abs)
    closed = None
    available = schedule.kind == MuSchedule.CONSTANT
    if available:
        baseline = ModelParams(schedule.values[0], nu, params.k0)
        closed = _discrepancy(traj, lambda t: params.k0 / (1.0 - baseline.sigma * t), crisis)
    report = crisis_report(Variant.VARIABLE_MU, crisis, horizon, sol, method)
    return ExtensionOutcome(traj, report, available, closed)


# -- amortization -------------------------------------------------------------

def amortized_capital(params: ModelParams, alpha: float, tau: float,
                      floor: float = DENOMINATOR_FLOOR) -> float:
    """``K0 / ((1 - alpha t)(1 - sigma t))``."""
    d1, d2 = 1.0 - alpha * tau, 1.0 - params.sigma * tau
    if d1 <= 0 or d2 <= 0 or d1 * d2 < floor:
        raise PastCrisisError(tau, amortized_crisis_time(params, alpha))
    return params.k0 / (d1 * d2)


def amortized_crisis_time(params: ModelParams, alpha: float) -> float:
    if alpha < 0:
        raise ValidationError("alpha", "must be non-negative")
    sigma_pole = 1.0 / params.sigma
    return min(1.0 / alpha, sigma_pole) if alpha > 0 else sigma_pole


def amortized_simulate(params: ModelParams, alpha: float, horizon: float,
                       controls: Optional[ODEControls] = None,
                       tolerances: Tolerances = Tolerances()) -> ExtensionOutcome:
    if alpha < 0:
        raise ValidationError("alpha", "must be non-negative")
    sigma = params.sigma
    rate = RateFunction(
        rate=lambda t: (alpha + sigma - 2 * alpha * sigma * t)
        / (1.0 - (alpha + sigma) * t + alpha * sigma * t * t),
        denominator=lambda t: 1.0 - (alpha + sigma) * t + alpha * sigma * t * t,
    )
    controls = controls or default_controls(tolerances)
    sol = integrate_linear_ode(rate, params.k0, horizon, controls)

    def investment(t, k):
        # investment feeds the depreciated stock (1 - alpha t) K
        return ((1.0 - alpha * t) * rate(t) - alpha) * k

    traj = trajectory_from_ode(sol, investment, lambda t: params.mu, tolerances.identity_abs)
    crisis = amortized_crisis_time(params, alpha)
    report = crisis_report(Variant.AMORTIZED, crisis, horizon, sol)
    closed = _discrepancy(traj, lambda t: amortized_capital(params, alpha, t), crisis)
    return ExtensionOutcome(traj, report, True, closed)


# -- cumulative effect --------------------------------------------------------

def cumulative_denominator(params: ModelParams, rho: float, tau: float) -> float:
    s = params.sigma
    return 1.0 - s * tau - s * rho * tau * tau


def cumulative_printed_form(params: ModelParams, rho: float, tau: float) -> complex:
    """Evaluate the candidate closed-form expression literally.

    The bracketed base changes sign and has a pole at
    ``tau = (root - sigma) / (2 sigma)``; fractional powers are taken on the
    principal complex branch and the pole returns complex infinity. The
    result is not trusted; it exists to be compared with the integrated
    solution.
    """
    s = params.sigma
    root = math.sqrt(4 * s * rho + s * s)
    first = 1.0 / cmath.sqrt(-s * rho * tau * tau - s * tau + 1.0)
    den = -2 * s * tau - s + root
    if den == 0.0:
        return complex(math.inf, 0.0)
    base = (-2 * s * tau - s - root) / den
    try:
        second = complex(base) ** (s / (2 * root))
    except OverflowError:
        return complex(math.inf, 0.0)
    return params.k0 * (first + second)


def cumulative_crisis(params: ModelParams, rho: float, root_abs: float = 1e-9,
                      horizon: Optional[float] = None) -> CrisisReport:
    """Crisis time ``-1/(2 rho) + sqrt(1/(4 rho^2) + 1/(sigma rho))``.

    The formula is cross-checked against a bracketed root of the
    denominator; if cancellation spoils it the root is reported instead.
    """
    if rho < 0:
        raise ValidationError("rho", "must be non-negative")
    s = params.sigma
    if rho < RHO_FALLBACK:
        return CrisisReport(Variant.CUMULATIVE, 1.0 / s, CrisisMethod.ANALYTIC, horizon=horizon)
    formula = -1.0 / (2 * rho) + math.sqrt(1.0 / (4 * rho * rho) + 1.0 / (s * rho))
    root = find_root(lambda t: cumulative_denominator(params, rho, t), 0.0, 1.0 / s,
                     root_abs * 1e-3, lambda t: -s - 2 * s * rho * t)
    if abs(formula - root) <= root_abs * max(1.0, root):
        return CrisisReport(Variant.CUMULATIVE, formula, CrisisMethod.ANALYTIC, horizon=horizon)
    return CrisisReport(Variant.CUMULATIVE, root, CrisisMethod.POLYNOMIAL_ROOT, horizon=horizon,
                        note=f"formula value {formula:.12g} lost precision; using bracketed root")


def cumulative_simulate(params: ModelParams, rho: float, horizon: float,
                        controls: Optional[ODEControls] = None,
                        tolerances: Tolerances = Tolerances()) -> ExtensionOutcome:
    if rho < 0:
        raise ValidationError("rho", "must be non-negative")
    s = params.sigma
    rate = RateFunction(
        rate=lambda t: s * (1.0 + rho * t) / cumulative_denominator(params, rho, t),
        denominator=lambda t: cumulative_denominator(params, rho, t),
    )
    controls = controls or default_controls(tolerances)
    sol = integrate_linear_ode(rate, params.k0, horizon, controls)

    def investment(t, k):
        # capital grows by (1 + rho t) times the investment intensity
        return rate(t) * k / (1.0 + rho * t)

    traj = trajectory_from_ode(sol, investment, lambda t: params.mu, tolerances.identity_abs)
    analytic = cumulative_crisis(params, rho, tolerances.root_abs, horizon)
    report = crisis_report(Variant.CUMULATIVE, analytic.crisis_time, horizon, sol,
                           analytic.method, analytic.note)
    discrepancy = None
    if rho > 0:
        worst = 0.0
        for t, k in zip(traj.grid, traj.capital):
            printed = cumulative_printed_form(params, rho, float(t))
            # nodes sitting on the expression's own pole say nothing about the gap
            if cmath.isfinite(printed):
                worst = max(worst, abs(printed - k) / abs(k))
        discrepancy = worst
    return ExtensionOutcome(traj, report, False, discrepancy)
