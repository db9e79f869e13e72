"""Shared value types and parameter validation for the Harrod model family."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

#: denominator value below which a closed form or the integrator treats the
#: capital law as having reached its singularity
DENOMINATOR_FLOOR = 1e-6


class HarrodError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(HarrodError, ValueError):
    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


class PastCrisisError(HarrodError, ValueError):
    """Raised when a closed form is evaluated at or beyond its singularity."""

    def __init__(self, tau: float, crisis_time: Optional[float]):
        self.tau = tau
        self.crisis_time = crisis_time
        where = "unknown" if crisis_time is None else f"{crisis_time:.12g}"
        super().__init__(f"tau={tau:.12g} is at or past the crisis time {where}")


class NumericalDomainError(HarrodError, ArithmeticError):
    pass


class Variant(str, Enum):
    LEGACY = "legacy-exponential"
    DISCRETE = "discrete"
    CONTINUOUS = "continuous"
    GENERALIZED = "generalized"
    VARIABLE_MU = "variable-mu"
    AMORTIZED = "amortized"
    CUMULATIVE = "cumulative"


class CrisisMethod(str, Enum):
    ANALYTIC = "analytic"
    POLYNOMIAL_ROOT = "polynomial-root"
    INTEGRATOR_GUARD = "integrator-guard"


def _check_finite(name: str, value: float) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ValidationError(name, f"not a number: {value!r}") from None
    if not math.isfinite(value):
        raise ValidationError(name, "must be finite")
    return value


@dataclass(frozen=True)
class ModelParams:
    """Baseline parameter bundle.

    ``sigma``, ``y0`` and ``i0`` are derived once at construction so every
    consumer shares the same rounding.
    """

    mu: float
    nu: float
    k0: float
    sigma: float = field(init=False)
    y0: float = field(init=False)
    i0: float = field(init=False)

    def __post_init__(self):
        mu = _check_finite("mu", self.mu)
        nu = _check_finite("nu", self.nu)
        k0 = _check_finite("k0", self.k0)
        if not 0.0 < mu < 1.0:
            raise ValidationError("mu", f"must lie in (0, 1), got {mu}")
        if nu <= 0.0:
            raise ValidationError("nu", f"must be positive, got {nu}")
        if k0 <= 0.0:
            raise ValidationError("k0", f"must be positive, got {k0}")
        sigma = mu / nu
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "k0", k0)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "y0", k0 / nu)
        object.__setattr__(self, "i0", sigma * k0)

    @property
    def crisis_time(self) -> float:
        """Singularity of the continuous model, ``nu/mu``."""
        return self.nu / self.mu


def make_params(mu: float, nu: float, k0: float = 1.0) -> ModelParams:
    return ModelParams(mu, nu, k0)


@dataclass(frozen=True)
class Trajectory:
    """Time grid with aligned stock, intensity and realized-flow series."""

    grid: np.ndarray
    capital: np.ndarray
    investment: np.ndarray
    income: np.ndarray
    consumption: np.ndarray
    realized_income: np.ndarray
    realized_capital: np.ndarray
    realized_consumption: np.ndarray

    def __post_init__(self):
        n = len(self.grid)
        for name in self.series_names():
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (n,):
                raise ValidationError(name, f"length {arr.shape} does not match grid ({n},)")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if n and self.grid[0] != 0.0:
            raise ValidationError("grid", "must start at 0")
        if n > 1 and not np.all(np.diff(self.grid) > 0):
            raise ValidationError("grid", "must be strictly increasing")

    @staticmethod
    def series_names() -> tuple[str, ...]:
        return ("grid", "capital", "investment", "income", "consumption",
                "realized_income", "realized_capital", "realized_consumption")

    @property
    def realized_investment(self) -> np.ndarray:
        # both are the running integral of investment
        return self.realized_capital

    def __len__(self):
        return len(self.grid)


@dataclass(frozen=True)
class CrisisReport:
    variant: Variant
    crisis_time: Optional[float]
    method: CrisisMethod
    denominator_margin: Optional[float] = None
    horizon: Optional[float] = None
    guard_time: Optional[float] = None
    extrapolated: bool = False
    note: str = ""

    @property
    def within_horizon(self) -> bool:
        if self.crisis_time is None or self.horizon is None:
            return False
        return self.crisis_time <= self.horizon

    @property
    def margin_to_horizon(self) -> Optional[float]:
        if self.crisis_time is None or self.horizon is None:
            return None
        return self.crisis_time - self.horizon


@dataclass(frozen=True)
class GrowthLaw:
    """Polynomial ``f(t) = t + a2 t^2 + ... + aN t^N``.

    The constant term is zero and the linear coefficient is one by
    construction, so ``f(0) = 0`` and ``f'(0) = 1`` always hold.
    """

    coefficients: tuple[float, ...] = ()
    residual_norm: Optional[float] = None

    def __post_init__(self):
        coeffs = tuple(_check_finite(f"growth_law.a{n + 2}", c)
                       for n, c in enumerate(self.coefficients))
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coefficients) + 1

    @property
    def power_series(self) -> np.ndarray:
        """All coefficients, lowest order first."""
        return np.array((0.0, 1.0) + self.coefficients)

    def __call__(self, tau):
        if isinstance(tau, (int, float)):
            acc = 0.0
            for c in reversed(self.coefficients):
                acc = (acc + c) * tau
            return (acc + 1.0) * tau
        return P.polyval(tau, self.power_series)

    def derivative(self, tau):
        if isinstance(tau, (int, float)):
            acc = 0.0
            for n in range(len(self.coefficients) + 1, 1, -1):
                acc = acc * tau + n * self.coefficients[n - 2]
            return acc * tau + 1.0
        return P.polyval(tau, P.polyder(self.power_series))

    @property
    def validity_end(self) -> float:
        """First positive zero of ``f'``; ``inf`` when ``f`` grows forever."""
        d = P.polyder(self.power_series)
        if len(d) <= 1:
            return math.inf
        roots = P.polyroots(d)
        real = [r.real for r in roots if abs(r.imag) <= 1e-12 * max(1.0, abs(r)) and r.real > 0]
        return min(real) if real else math.inf

    @property
    def is_identity(self) -> bool:
        return all(c == 0.0 for c in self.coefficients)


class MuSchedule:
    """Investment share as a function of time.

    Three forms: a constant, a left-continuous piecewise-constant table of
    ``(start, value)`` rows, or polynomial coefficients in ``tau`` (lowest
    order first).
    """

    CONSTANT = "constant"
    PIECEWISE = "piecewise"
    POLYNOMIAL = "polynomial"

    def __init__(self, kind: str, values: Sequence):
        if kind == self.CONSTANT:
            values = (_check_finite("mu_schedule", values[0] if isinstance(values, (list, tuple)) else values),)
            _check_share(values[0])
        elif kind == self.PIECEWISE:
            rows = tuple((_check_finite("mu_schedule", t), _check_finite("mu_schedule", v))
                         for t, v in values)
            if not rows:
                raise ValidationError("mu_schedule", "piecewise table is empty")
            if rows[0][0] != 0.0:
                raise ValidationError("mu_schedule", "first breakpoint must be at tau=0")
            if any(b[0] <= a[0] for a, b in zip(rows, rows[1:])):
                raise ValidationError("mu_schedule", "breakpoints must be strictly increasing")
            for _, v in rows:
                _check_share(v)
            values = rows
        elif kind == self.POLYNOMIAL:
            values = tuple(_check_finite("mu_schedule", c) for c in values)
            if not values:
                raise ValidationError("mu_schedule", "polynomial needs at least one coefficient")
            _check_share(values[0])
        else:
            raise ValidationError("mu_schedule", f"unknown schedule kind {kind!r}")
        self.kind = kind
        self.values = values

    @classmethod
    def constant(cls, mu: float) -> "MuSchedule":
        return cls(cls.CONSTANT, (mu,))

    @classmethod
    def piecewise(cls, rows) -> "MuSchedule":
        return cls(cls.PIECEWISE, rows)

    @classmethod
    def polynomial(cls, coefficients) -> "MuSchedule":
        return cls(cls.POLYNOMIAL, coefficients)

    def __call__(self, tau: float) -> float:
        if self.kind == self.CONSTANT:
            value = self.values[0]
        elif self.kind == self.PIECEWISE:
            value = self.values[0][1]
            for start, v in self.values[1:]:
                # left-continuous: the value at a breakpoint is the one before it
                if tau > start:
                    value = v
                else:
                    break
        else:
            value = float(P.polyval(tau, self.values))
        _check_share(value, tau)
        return value

    @property
    def breakpoints(self) -> tuple[float, ...]:
        if self.kind == self.PIECEWISE:
            return tuple(t for t, _ in self.values[1:])
        return ()

    def __eq__(self, other):
        return (isinstance(other, MuSchedule) and self.kind == other.kind
                and self.values == other.values)

    def __hash__(self):
        return hash((self.kind, self.values))

    def __repr__(self):
        return f"MuSchedule({self.kind!r}, {self.values!r})"


def _check_share(value: float, tau: Optional[float] = None) -> None:
    if not 0.0 < value < 1.0:
        at = "" if tau is None else f" at tau={tau:.12g}"
        raise ValidationError("mu_schedule", f"value {value!r}{at} outside (0, 1)")


@dataclass(frozen=True)
class Tolerances:
    ode_rel: float = 1e-8
    root_abs: float = 1e-9
    identity_abs: float = 1e-9

    def __post_init__(self):
        for name in ("ode_rel", "root_abs", "identity_abs"):
            value = _check_finite(f"tolerances.{name}", getattr(self, name))
            if value <= 0:
                raise ValidationError(f"tolerances.{name}", "must be positive")
            object.__setattr__(self, name, value)


OUTPUT_KINDS = ("csv", "report", "svg")

_VARIANT_FIELDS = {
    Variant.AMORTIZED: "alpha",
    Variant.CUMULATIVE: "rho",
    Variant.GENERALIZED: "growth_law",
    Variant.VARIABLE_MU: "mu_schedule",
}


@dataclass(frozen=True)
class ScenarioConfig:
    variant: Variant
    params: ModelParams
    horizon: float
    max_step: float = 0.01
    tolerances: Tolerances = field(default_factory=Tolerances)
    outputs: frozenset = frozenset({"csv", "report"})
    alpha: Optional[float] = None
    rho: Optional[float] = None
    growth_law: Optional[GrowthLaw] = None
    mu_schedule: Optional[MuSchedule] = None
    n_max: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "outputs", frozenset(self.outputs))
        if _check_finite("horizon", self.horizon) <= 0:
            raise ValidationError("horizon", "must be positive")
        if _check_finite("max_step", self.max_step) <= 0:
            raise ValidationError("max_step", "must be positive")
        unknown = self.outputs - set(OUTPUT_KINDS)
        if unknown:
            raise ValidationError("outputs", f"unknown output kinds {sorted(unknown)}")
        for variant, name in _VARIANT_FIELDS.items():
            present = getattr(self, name) is not None
            if present and self.variant is not variant:
                raise ValidationError(name, f"only valid for variant {variant.value}")
            if not present and self.variant is variant:
                raise ValidationError(name, f"required for variant {variant.value}")
        for name in ("alpha", "rho"):
            value = getattr(self, name)
            if value is not None and _check_finite(name, value) < 0:
                raise ValidationError(name, "must be non-negative")
        if self.n_max is not None:
            if self.variant is not Variant.DISCRETE:
                raise ValidationError("n_max", "only valid for variant discrete")
            if int(self.n_max) != self.n_max or self.n_max < 0:
                raise ValidationError("n_max", "must be a non-negative integer")


def default_horizon(params: ModelParams) -> float:
    return 0.95 / params.sigma
