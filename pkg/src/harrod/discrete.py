"""Year-by-year (difference) reading of the Harrod model.

Closed forms and recurrences are computed independently of each other so
they can serve as mutual checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import HarrodError, ModelParams, Trajectory

PRIOR_CAPITAL = "investment-from-prior-capital"
CURRENT_CAPITAL = "investment-from-current-capital"
#: investment read off the closed-form solution itself, I_j = I0 * growth**j
SOLUTION_SERIES = "solution-series"
CONVENTIONS = (PRIOR_CAPITAL, CURRENT_CAPITAL, SOLUTION_SERIES)

EXACT = "exact-12"
APPROX = "approx-14"


class DivergentRecurrenceError(HarrodError, ValueError):
    pass


@dataclass(frozen=True)
class DiscreteSeries:
    n_max: int
    capital: np.ndarray
    income: np.ndarray
    investment: np.ndarray
    consumption: np.ndarray

    @property
    def years(self) -> np.ndarray:
        return np.arange(self.n_max + 1, dtype=float)


def _check_n(n_max):
    if int(n_max) != n_max or n_max < 0:
        raise ValueError(f"n_max must be a non-negative integer, got {n_max!r}")
    return int(n_max)


def _closed_form(params: ModelParams, growth: np.ndarray, n_max: int) -> DiscreteSeries:
    income = params.y0 * growth
    investment = params.i0 * growth
    return DiscreteSeries(n_max, params.k0 * growth, income, investment, income - investment)


def discrete_exact(params: ModelParams, n_max: int) -> DiscreteSeries:
    """``K_n = K0 (1 + sigma)^n`` and likewise for income and investment."""
    n_max = _check_n(n_max)
    n = np.arange(n_max + 1, dtype=float)
    return _closed_form(params, (1.0 + params.sigma) ** n, n_max)


def discrete_approx(params: ModelParams, n_max: int) -> DiscreteSeries:
    """Exponential replacement ``K_n = K0 exp(sigma n)``."""
    n_max = _check_n(n_max)
    n = np.arange(n_max + 1, dtype=float)
    return _closed_form(params, np.exp(params.sigma * n), n_max)


def recurrence_simulate(params: ModelParams, n_max: int,
                        convention: str = PRIOR_CAPITAL) -> DiscreteSeries:
    """Roll out ``K_n = K_{n-1} + I_n`` year by year.

    Income is taken as ``K_n / nu``; consumption is the remainder after the
    investment actually applied that year.
    """
    n_max = _check_n(n_max)
    sigma = params.sigma
    if convention == CURRENT_CAPITAL and sigma >= 1:
        raise DivergentRecurrenceError(f"current-capital recurrence needs sigma < 1, got {sigma}")
    if convention not in (PRIOR_CAPITAL, CURRENT_CAPITAL):
        raise ValueError(f"unknown convention {convention!r}")
    capital = [params.k0]
    investment = [params.i0]
    for _ in range(n_max):
        prev = capital[-1]
        if convention == PRIOR_CAPITAL:
            inv = sigma * prev
            k = prev + inv
        else:
            # K_n (1 - sigma) = K_{n-1}
            k = prev / (1.0 - sigma)
            inv = sigma * k
        capital.append(k)
        investment.append(inv)
    capital = np.array(capital)
    investment = np.array(investment)
    income = capital / params.nu
    return DiscreteSeries(n_max, capital, income, investment, income - investment)


@dataclass(frozen=True)
class AuditResult:
    accumulated_investment: float
    capital_minus_k0: float
    residual: float
    closed_form_residual: float | None = None


def consistency_audit(params: ModelParams, n: int, solution: str = EXACT,
                      convention: str = SOLUTION_SERIES) -> AuditResult:
    """Check ``K_n = K0 + sum_{j=1..n} I_j`` against a closed-form solution.

    ``residual = K_n - K0 - sum I_j`` is summed term by term. For the exact
    solution with investment read from the solution series the residual also
    has the closed form ``-sigma K0 ((1 + sigma)^n - 1)``, reported alongside.
    """
    n = _check_n(n)
    if n < 1:
        raise ValueError("audit needs n >= 1")
    if solution == EXACT:
        series = discrete_exact(params, n)
    elif solution == APPROX:
        series = discrete_approx(params, n)
    else:
        raise ValueError(f"unknown solution {solution!r}")
    k = series.capital
    sigma = params.sigma
    if convention == SOLUTION_SERIES:
        terms = series.investment[1:]
    elif convention == PRIOR_CAPITAL:
        terms = sigma * k[:-1]
    elif convention == CURRENT_CAPITAL:
        terms = sigma * k[1:]
    else:
        raise ValueError(f"unknown convention {convention!r}")
    accumulated = math.fsum(terms)
    gained = k[n] - params.k0
    closed = None
    if solution == EXACT and convention == SOLUTION_SERIES:
        closed = -sigma * params.k0 * ((1.0 + sigma) ** n - 1.0)
    return AuditResult(accumulated, gained, gained - accumulated, closed)


def as_trajectory(series: DiscreteSeries) -> Trajectory:
    """Year grid with realized flows as sums over years ``1..n``."""

    def running(x):
        return np.concatenate(([0.0], np.cumsum(x[1:])))

    y_r = running(series.income)
    k_r = running(series.investment)
    return Trajectory(series.years, series.capital, series.investment, series.income,
                      series.consumption, y_r, k_r, running(series.consumption))
