"""Identify nu and the growth law from observed series and extrapolate the crisis."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .domain import CrisisReport, GrowthLaw, HarrodError, ValidationError
from .extensions import growth_law_crisis
from .numerics import fit_constrained_polynomial

CAPITAL = "capital"
INCOME = "income"


class InsufficientObservationError(HarrodError, ValueError):
    pass


@dataclass(frozen=True)
class ObservedSeries:
    tau: np.ndarray
    values: np.ndarray
    kind: str = CAPITAL

    def __post_init__(self):
        tau = np.asarray(self.tau, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if tau.shape != values.shape or tau.ndim != 1:
            raise ValidationError("samples", "tau and values must be 1-d and equally long")
        if len(tau) < 3:
            raise ValidationError("samples", f"need at least 3 samples, got {len(tau)}")
        if not np.all(np.isfinite(tau)) or not np.all(np.isfinite(values)):
            raise ValidationError("samples", "non-finite entries")
        if tau[0] <= 0 or np.any(np.diff(tau) <= 0):
            raise ValidationError("samples", "tau must be positive and strictly increasing")
        if np.any(values <= 0):
            raise ValidationError("samples", "values must be positive")
        if self.kind not in (CAPITAL, INCOME):
            raise ValidationError("kind", f"unknown series kind {self.kind!r}")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, float]], kind: str = CAPITAL):
        arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1], kind)


def read_observations(source: Union[str, Path, io.TextIOBase], kind: str = CAPITAL) -> ObservedSeries:
    """Load a ``tau,value`` CSV."""
    if isinstance(source, (str, Path)):
        with open(source, newline="") as fh:
            return read_observations(fh, kind)
    reader = csv.reader(source)
    header = [h.strip() for h in next(reader, [])]
    if header != ["tau", "value"]:
        raise ValidationError("header", f"expected 'tau,value', got {','.join(header)!r}")
    pairs = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        try:
            pairs.append((float(row[0]), float(row[1])))
        except (ValueError, IndexError):
            raise ValidationError(f"line {lineno}", f"malformed row {row!r}") from None
    return ObservedSeries.from_pairs(pairs, kind)


def estimate_nu(observed: ObservedSeries, mu: float, y0: float) -> float:
    """First time observed income reaches ``y0 / (1 - mu)^2``.

    The crossing is located by linear interpolation between the two
    bracketing samples.
    """
    if observed.kind != INCOME:
        raise ValidationError("kind", "nu estimation needs an income series")
    if not 0 < mu < 1:
        raise ValidationError("mu", "must lie in (0, 1)")
    threshold = y0 / (1.0 - mu) ** 2
    tau, y = observed.tau, observed.values
    hits = np.nonzero(y >= threshold)[0]
    if len(hits) == 0:
        raise InsufficientObservationError(
            f"income never reaches the threshold {threshold:.12g} within the samples")
    j = hits[0]
    if y[j] == threshold or j == 0:
        if y[j] != threshold:
            raise InsufficientObservationError("threshold already exceeded at the first sample")
        return float(tau[j])
    t0, t1, y_lo, y_hi = tau[j - 1], tau[j], y[j - 1], y[j]
    return float(t0 + (threshold - y_lo) * (t1 - t0) / (y_hi - y_lo))


def fit_growth_law(observed: ObservedSeries, sigma: float, k0: float, degree: int) -> GrowthLaw:
    """Invert ``K = K0 / (1 - sigma f)`` sample-wise and fit ``f``.

    ``g = (1 - K0/K) / sigma`` is linear in the unknown coefficients, so
    the fit is an ordinary constrained least-squares problem. The returned
    law carries the residual norm in the transformed space.
    """
    if observed.kind != CAPITAL:
        raise ValidationError("kind", "growth-law fitting needs a capital series")
    if not sigma > 0:
        raise ValidationError("sigma", "must be positive")
    if not k0 > 0:
        raise ValidationError("k0", "must be positive")
    g = (1.0 - k0 / observed.values) / sigma
    return fit_constrained_polynomial(list(zip(observed.tau, g)), degree)


def extrapolate_crisis(law: GrowthLaw, sigma: float, root_abs: float = 1e-12) -> CrisisReport:
    if not sigma > 0:
        raise ValidationError("sigma", "must be positive")
    return replace(growth_law_crisis(sigma, law, root_abs), extrapolated=True)
