"""Scalar numerical engine used as the independent oracle for every closed form.

Everything here works on plain Python callables; nothing knows about the
economic model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg

from .domain import DENOMINATOR_FLOOR, GrowthLaw, HarrodError, NumericalDomainError

REACHED_HORIZON = "reached-horizon"
GUARD_TRIPPED = "guard-tripped"


class BracketError(HarrodError, ValueError):
    pass


class DegenerateFitError(HarrodError, ValueError):
    pass


@dataclass(frozen=True)
class RateFunction:
    """Relative growth rate ``r(t)`` of ``dK/dt = r(t) K``.

    ``denominator`` is the quantity whose vanishing marks the blow-up point;
    ``breakpoints`` are times where ``r`` may jump and the integrator must
    land exactly.
    """

    rate: Callable[[float], float]
    denominator: Optional[Callable[[float], float]] = None
    breakpoints: tuple[float, ...] = ()

    def __call__(self, tau: float) -> float:
        try:
            return self.rate(tau)
        except (ZeroDivisionError, OverflowError) as exc:
            raise NumericalDomainError(f"rate undefined at tau={tau!r}: {exc}") from None

    def right(self, tau: float) -> float:
        """Rate just after ``tau``; differs from ``rate(tau)`` only at breakpoints."""
        if tau in self.breakpoints:
            tau = math.nextafter(tau, math.inf)
        return self(tau)


@dataclass(frozen=True)
class ODEControls:
    rel_tol: float = 1e-8
    max_step: float = 0.01
    denominator_floor: float = DENOMINATOR_FLOOR


@dataclass
class ODESolution:
    grid: np.ndarray
    capital: np.ndarray
    stop_reason: str
    last_safe_tau: float
    denominator_margin: Optional[float]
    rate: RateFunction = field(repr=False)
    n_rejected: int = 0

    @property
    def guard_tripped(self) -> bool:
        return self.stop_reason == GUARD_TRIPPED

    def interpolate(self, tau: float, interval: Optional[int] = None) -> float:
        """Cubic Hermite interpolant of K using the ODE slopes at the nodes."""
        grid = self.grid
        if interval is None:
            interval = int(np.clip(np.searchsorted(grid, tau) - 1, 0, len(grid) - 2))
        t0, t1 = grid[interval], grid[interval + 1]
        k0, k1 = self.capital[interval], self.capital[interval + 1]
        h = t1 - t0
        m0 = self.rate.right(t0) * k0
        m1 = self.rate(t1) * k1
        s = (tau - t0) / h
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        return h00 * k0 + h10 * h * m0 + h01 * k1 + h11 * h * m1


def _rk4_step(rate: RateFunction, t: float, k: float, h: float) -> float:
    k1 = rate.right(t) * k
    k2 = rate(t + 0.5 * h) * (k + 0.5 * h * k1)
    k3 = rate(t + 0.5 * h) * (k + 0.5 * h * k2)
    k4 = rate(t + h) * (k + h * k3)
    return k + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0


def integrate_linear_ode(rate: RateFunction, k0: float, horizon: float,
                         controls: ODEControls = ODEControls()) -> ODESolution:
    """Integrate ``dK/dt = r(t) K`` from ``K(0) = k0`` up to ``horizon``.

    Classical RK4 with step-doubling error control: every step is taken once
    with ``h`` and twice with ``h/2``; the difference estimates the local
    error. The two-half-step value is kept (no extrapolation), so the method
    stays fourth order. If the denominator contract drops below
    ``controls.denominator_floor`` anywhere a step would reach, the step is
    shrunk, and integration stops once no admissible step remains.
    """
    if not k0 > 0:
        raise ValueError("k0 must be positive")
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    floor = controls.denominator_floor
    denominator = rate.denominator
    min_step = 1e-12 * max(1.0, horizon)
    stops = sorted(b for b in rate.breakpoints if 0 < b < horizon) + [horizon]

    t, k = 0.0, float(k0)
    grid, capital = [t], [k]
    h = controls.max_step
    rejected = 0
    stop = REACHED_HORIZON
    next_stop = 0

    def safe(tau):
        return denominator is None or denominator(tau) >= floor

    while t < horizon:
        while stops[next_stop] <= t:
            next_stop += 1
        target = stops[next_stop]
        h = min(h, controls.max_step, target - t)
        landing = h >= target - t
        if not (safe(t + h) and safe(t + 0.5 * h)):
            if h <= min_step:
                stop = GUARD_TRIPPED
                break
            h *= 0.5
            rejected += 1
            continue
        full = _rk4_step(rate, t, k, h)
        half = _rk4_step(rate, t, k, 0.5 * h)
        half = _rk4_step(rate, t + 0.5 * h, half, 0.5 * h)
        if not (math.isfinite(full) and math.isfinite(half)):
            raise NumericalDomainError(f"non-finite rate evaluation near tau={t:.12g}")
        err = abs(half - full) / 15.0 / max(abs(half), 1e-300)
        if err > controls.rel_tol:
            if h <= min_step:
                if denominator is not None:
                    stop = GUARD_TRIPPED
                    break
                raise NumericalDomainError(f"step size underflow at tau={t:.12g}")
            h *= 0.5
            rejected += 1
            continue
        t = target if landing else t + h
        k = half
        grid.append(t)
        capital.append(k)
        if err < controls.rel_tol / 32.0:
            h *= 2.0

    margin = denominator(t) if denominator is not None else None
    return ODESolution(np.array(grid), np.array(capital), stop, t, margin, rate, rejected)


def quadrature(f: Callable[[float], float], a: float, b: float,
               abs_tol: float = 1e-10, max_depth: int = 60) -> float:
    """Adaptive Simpson integral of ``f`` over ``[a, b]``.

    Each accepted panel adds the Richardson correction ``(S2 - S1)/15``,
    which keeps the rule exact for cubics.
    """
    if a > b:
        raise ValueError("quadrature requires a <= b")
    if a == b:
        return 0.0

    def ev(x):
        try:
            y = f(x)
        except (ZeroDivisionError, OverflowError) as exc:
            raise NumericalDomainError(f"integrand undefined at {x!r}: {exc}") from None
        if not math.isfinite(y):
            raise NumericalDomainError(f"non-finite integrand at {x!r}")
        return y

    fa, fb, fm = ev(a), ev(b), ev(0.5 * (a + b))
    whole = (b - a) * (fa + 4 * fm + fb) / 6.0
    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, abs_tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, s, tol, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = ev(lm), ev(rm)
        left = (mid - lo) * (flo + 4 * flm + fmid) / 6.0
        right = (hi - mid) * (fmid + 4 * frm + fhi) / 6.0
        delta = left + right - s
        if abs(delta) <= 15 * tol or depth >= max_depth:
            total += left + right + delta / 15.0
        else:
            stack.append((lo, mid, flo, flm, fmid, left, 0.5 * tol, depth + 1))
            stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * tol, depth + 1))
    return total


def find_root(g: Callable[[float], float], lo: float, hi: float, abs_tol: float = 1e-12,
              dg: Optional[Callable[[float], float]] = None, max_iter: int = 200) -> float:
    """Root of ``g`` in ``[lo, hi]`` by bisection, polished with Newton.

    Bisection runs until the bracket is narrower than ``sqrt(abs_tol)``-ish
    (or ``abs_tol`` when no derivative is given); Newton steps then refine,
    falling back to bisection whenever a step would leave the bracket.
    """
    glo, ghi = g(lo), g(hi)
    if glo == 0:
        return lo
    if ghi == 0:
        return hi
    if not (math.isfinite(glo) and math.isfinite(ghi)) or glo * ghi > 0:
        raise BracketError(f"no sign change on [{lo!r}, {hi!r}]: g={glo!r}, {ghi!r}")
    safe_width = max(abs_tol, min(1e-3, math.sqrt(abs_tol))) if dg is not None else abs_tol
    for _ in range(max_iter):
        if hi - lo <= safe_width:
            break
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0:
            return mid
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi, ghi = mid, gm
    if dg is None:
        return lo if abs(glo) < abs(ghi) else hi

    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        gx = g(x)
        if gx == 0:
            return x
        if (gx > 0) == (glo > 0):
            lo, glo = x, gx
        else:
            hi, ghi = x, gx
        d = dg(x)
        step = gx / d if d else math.inf
        new = x - step
        if not lo <= new <= hi or not math.isfinite(new):
            new = 0.5 * (lo + hi)
        if abs(new - x) <= 0.25 * abs_tol or hi - lo <= abs_tol:
            return new
        x = new
    return x


def scan_bracket(g: Callable[[float], float], lo: float, hi: float,
                 n: int = 256) -> Optional[tuple[float, float]]:
    """First sub-interval of an ``n``-cell uniform scan where ``g`` changes sign."""
    xs = np.linspace(lo, hi, n + 1)
    prev_x, prev = xs[0], g(xs[0])
    for x in xs[1:]:
        cur = g(x)
        if prev == 0:
            return prev_x, prev_x
        if prev * cur < 0 or cur == 0:
            return prev_x, x
        prev_x, prev = x, cur
    return None


def fit_constrained_polynomial(points: Sequence[tuple[float, float]], degree: int) -> GrowthLaw:
    """Least-squares ``f(t) = t + a2 t^2 + ... + aN t^N`` through ``points``.

    The constraints ``f(0) = 0`` and ``f'(0) = 1`` are built into the basis,
    so only ``a2..aN`` are free. Columns are scaled to unit norm before the
    normal equations are factorized (LU with partial pivoting).
    """
    if degree < 2:
        raise ValueError("degree must be at least 2")
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be (tau, value) pairs")
    tau, g = pts[:, 0], pts[:, 1]
    powers = np.arange(2, degree + 1)
    design = tau[:, None] ** powers[None, :]
    target = g - tau
    distinct = np.unique(tau[tau != 0])
    if len(distinct) < degree - 1:
        raise DegenerateFitError(
            f"need {degree - 1} distinct non-zero abscissae, got {len(distinct)}")
    scale = np.linalg.norm(design, axis=0)
    scaled = design / scale
    sv = np.linalg.svd(scaled, compute_uv=False)
    if sv[-1] <= 1e-12 * sv[0]:
        raise DegenerateFitError("design matrix is rank deficient")
    normal = scaled.T @ scaled
    rhs = scaled.T @ target
    coeffs = scipy.linalg.lu_solve(scipy.linalg.lu_factor(normal), rhs) / scale
    # one step of iterative refinement against the original residual
    resid = target - design @ coeffs
    coeffs += scipy.linalg.lu_solve(scipy.linalg.lu_factor(normal), scaled.T @ resid) / scale
    resid = target - design @ coeffs
    return GrowthLaw(tuple(float(c) for c in coeffs), residual_norm=float(np.linalg.norm(resid)))
