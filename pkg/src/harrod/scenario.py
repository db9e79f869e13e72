"""Flat ``key = value`` scenario files.

Example::

    # baseline run
    variant = continuous
    mu = 0.5
    nu = 10
    k0 = 1
    horizon = 25
    outputs = csv, report, svg

Schedules are written ``constant 0.5``, ``piecewise 0:0.5, 5:0.25`` or
``polynomial 0.5, 0.01``; tolerances as ``ode_rel=1e-8, root_abs=1e-9``.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from .domain import (HarrodError, GrowthLaw, ModelParams, MuSchedule, ScenarioConfig,
                     Tolerances, ValidationError, Variant, default_horizon)

KEYS = ("variant", "mu", "nu", "k0", "horizon", "max_step", "alpha", "rho", "growth_law",
        "mu_schedule", "outputs", "tolerances", "n_max")
DEFAULT_OUTPUTS = frozenset({"csv", "report"})


class ScenarioParseError(HarrodError, ValueError):
    def __init__(self, message: str, line: Optional[int] = None, key: Optional[str] = None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


def _number(raw: str, key: str, line: int) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ScenarioParseError(f"malformed number {raw!r}", line, key) from None


def _number_list(raw: str, key: str, line: int) -> list[float]:
    return [_number(part.strip(), key, line) for part in raw.split(",") if part.strip()]


def _schedule(raw: str, line: int) -> MuSchedule:
    kind, _, rest = raw.strip().partition(" ")
    if kind == MuSchedule.PIECEWISE:
        rows = []
        for part in rest.split(","):
            t, sep, v = part.strip().partition(":")
            if not sep:
                raise ScenarioParseError(f"piecewise entry {part.strip()!r} is not time:value",
                                         line, "mu_schedule")
            rows.append((_number(t, "mu_schedule", line), _number(v, "mu_schedule", line)))
        return MuSchedule.piecewise(rows)
    if kind in (MuSchedule.CONSTANT, MuSchedule.POLYNOMIAL):
        return MuSchedule(kind, _number_list(rest, "mu_schedule", line))
    raise ScenarioParseError(f"unknown schedule kind {kind!r}", line, "mu_schedule")


def _tolerances(raw: str, line: int) -> Tolerances:
    values = {}
    for part in raw.split(","):
        if not part.strip():
            continue
        name, sep, value = part.replace(":", "=", 1).partition("=")
        name = name.strip()
        if not sep or name not in ("ode_rel", "root_abs", "identity_abs"):
            raise ScenarioParseError(f"bad tolerance entry {part.strip()!r}", line, "tolerances")
        values[name] = _number(value.strip(), "tolerances", line)
    return Tolerances(**values)


def parse_scenario(text: str) -> ScenarioConfig:
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        key, sep, value = stripped.partition("=")
        key = key.strip()
        if not sep:
            raise ScenarioParseError("expected 'key = value'", lineno)
        if key not in KEYS:
            raise ScenarioParseError("unknown key", lineno, key)
        if key in raw:
            raise ScenarioParseError("duplicate key", lineno, key)
        raw[key] = (value.strip(), lineno)

    def line_of(key):
        return raw[key][1] if key in raw else None

    if "variant" not in raw:
        raise ScenarioParseError("missing required key", None, "variant")
    try:
        variant = Variant(raw["variant"][0])
    except ValueError:
        raise ScenarioParseError(f"unknown variant {raw['variant'][0]!r}", line_of("variant"),
                                 "variant") from None

    required = {"nu", "k0"} | ({"mu_schedule"} if variant is Variant.VARIABLE_MU else {"mu"})
    required |= {Variant.AMORTIZED: {"alpha"}, Variant.CUMULATIVE: {"rho"},
                 Variant.GENERALIZED: {"growth_law"}}.get(variant, set())
    for key in sorted(required):
        if key not in raw:
            raise ScenarioParseError(f"required for variant {variant.value}", None, key)

    try:
        fields = {}
        numbers = {}
        for key in ("mu", "nu", "k0", "horizon", "max_step", "alpha", "rho"):
            if key in raw:
                numbers[key] = _number(raw[key][0], key, line_of(key))
        if "mu_schedule" in raw:
            fields["mu_schedule"] = _schedule(raw["mu_schedule"][0], line_of("mu_schedule"))
        mu = numbers.get("mu")
        if mu is None:
            mu = fields["mu_schedule"](0.0)
        params = ModelParams(mu, numbers["nu"], numbers["k0"])
        if "growth_law" in raw:
            fields["growth_law"] = GrowthLaw(tuple(_number_list(raw["growth_law"][0], "growth_law",
                                                                line_of("growth_law"))))
        if "tolerances" in raw:
            fields["tolerances"] = _tolerances(raw["tolerances"][0], line_of("tolerances"))
        if "outputs" in raw:
            fields["outputs"] = frozenset(p.strip() for p in raw["outputs"][0].split(",") if p.strip())
        if "n_max" in raw:
            n_max = _number(raw["n_max"][0], "n_max", line_of("n_max"))
            if n_max != int(n_max):
                raise ScenarioParseError("must be an integer", line_of("n_max"), "n_max")
            fields["n_max"] = int(n_max)
        for key in ("alpha", "rho", "max_step"):
            if key in numbers:
                fields[key] = numbers[key]
        horizon = numbers.get("horizon", default_horizon(params))
        return ScenarioConfig(variant=variant, params=params, horizon=horizon, **fields)
    except ValidationError as exc:
        key = exc.field.split(".")[0]
        raise ScenarioParseError(str(exc), line_of(key), key) from exc


def load_scenario(path) -> ScenarioConfig:
    return parse_scenario(Path(path).read_text())


def scenario_to_text(config: ScenarioConfig) -> str:
    """Serialize so that ``parse_scenario`` reproduces ``config`` exactly."""
    p = config.params
    lines = [f"variant = {config.variant.value}"]
    if config.variant is not Variant.VARIABLE_MU or config.mu_schedule(0.0) != p.mu:
        lines.append(f"mu = {p.mu!r}")
    lines += [f"nu = {p.nu!r}", f"k0 = {p.k0!r}", f"horizon = {config.horizon!r}",
              f"max_step = {config.max_step!r}"]
    if config.alpha is not None:
        lines.append(f"alpha = {config.alpha!r}")
    if config.rho is not None:
        lines.append(f"rho = {config.rho!r}")
    if config.growth_law is not None:
        lines.append("growth_law = " + ", ".join(repr(c) for c in config.growth_law.coefficients))
    if config.mu_schedule is not None:
        s = config.mu_schedule
        if s.kind == MuSchedule.PIECEWISE:
            body = ", ".join(f"{t!r}:{v!r}" for t, v in s.values)
        else:
            body = ", ".join(repr(v) for v in s.values)
        lines.append(f"mu_schedule = {s.kind} {body}")
    if config.n_max is not None:
        lines.append(f"n_max = {config.n_max}")
    t = config.tolerances
    lines.append(f"tolerances = ode_rel={t.ode_rel!r}, root_abs={t.root_abs!r}, "
                 f"identity_abs={t.identity_abs!r}")
    lines.append("outputs = " + ", ".join(sorted(config.outputs)))
    return "\n".join(lines) + "\n"
