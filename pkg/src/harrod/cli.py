"""Command-line entry point.

Exit status: 0 on success, 2 when the crisis falls inside the horizon,
1 on any error.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import calibration, continuous, discrete, extensions
from .domain import (CrisisMethod, CrisisReport, HarrodError, PastCrisisError, ScenarioConfig,
                     Trajectory, Variant)
from .numerics import ODEControls
from .plotting import emit_plot
from .report import fmt, report_fields, report_machine, report_text, trajectory_csv
from .scenario import load_scenario

log = logging.getLogger("harrod")

EXIT_OK, EXIT_ERROR, EXIT_CRISIS = 0, 1, 2


@dataclass
class RunOutputs:
    trajectory: Trajectory
    crisis: CrisisReport
    extra: dict
    trajectory_csv: str
    report_text: str
    report_machine: str
    plot_svg: Optional[str] = None

    @property
    def status(self) -> int:
        return EXIT_CRISIS if self.crisis.within_horizon else EXIT_OK


def _execute(config: ScenarioConfig) -> tuple[Trajectory, CrisisReport, dict]:
    p = config.params
    tol = config.tolerances
    controls = ODEControls(rel_tol=tol.ode_rel, max_step=config.max_step)
    horizon = config.horizon
    v = config.variant
    if v is Variant.LEGACY:
        traj = continuous.legacy_exponential(p, horizon, config.max_step)
        return traj, CrisisReport(v, None, CrisisMethod.ANALYTIC, horizon=horizon), {}
    if v is Variant.DISCRETE:
        n_max = config.n_max if config.n_max is not None else int(math.floor(horizon))
        traj = discrete.as_trajectory(discrete.discrete_exact(p, n_max))
        return traj, CrisisReport(v, None, CrisisMethod.ANALYTIC, horizon=float(n_max)), {}
    if v is Variant.CONTINUOUS:
        traj, report = continuous.simulate(p, horizon, controls, tol)
        m = continuous.milestones(p)
        extra = {"milestones.balance_time": m.balance_time,
                 "milestones.reformat_time": m.reformat_time,
                 "milestones.crisis_time": m.crisis_time}
        return traj, report, extra
    if v is Variant.GENERALIZED:
        out = extensions.generalized_simulate(p, config.growth_law, horizon, controls, tol)
    elif v is Variant.VARIABLE_MU:
        out = extensions.variable_mu_simulate(p, config.mu_schedule, horizon, controls, tol)
    elif v is Variant.AMORTIZED:
        out = extensions.amortized_simulate(p, config.alpha, horizon, controls, tol)
    else:
        out = extensions.cumulative_simulate(p, config.rho, horizon, controls, tol)
    extra = {"closed_form_available": out.closed_form_available}
    if out.closed_form_discrepancy is not None:
        extra["closed_form_discrepancy"] = out.closed_form_discrepancy
    return out.trajectory, out.crisis, extra


def run_scenario(config: ScenarioConfig, out_dir: Optional[Path] = None,
                 stem: str = "scenario") -> RunOutputs:
    """Run one scenario; write the requested outputs when ``out_dir`` is given."""
    traj, report, extra = _execute(config)
    fields = report_fields(report, extra)
    svg = None
    if "svg" in config.outputs:
        channels = ["K"] if config.variant is not Variant.LEGACY else ["K", "Y", "I"]
        svg = emit_plot(traj, channels, log_scale=config.variant is not Variant.DISCRETE
                        and traj.capital[-1] > 100 * traj.capital[0],
                        title=config.variant.value, crisis_time=report.crisis_time)
    outputs = RunOutputs(traj, report, extra, trajectory_csv(traj), report_text(report, extra),
                         report_machine(fields), svg)
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        if "csv" in config.outputs:
            (out_dir / f"{stem}.csv").write_text(outputs.trajectory_csv)
        if "report" in config.outputs:
            (out_dir / f"{stem}.report.txt").write_text(outputs.report_text)
            (out_dir / f"{stem}.report.kv").write_text(outputs.report_machine)
        if svg is not None:
            (out_dir / f"{stem}.svg").write_text(svg)
    return outputs


def audit_lines(config: ScenarioConfig) -> list[str]:
    """Discrete/continuous comparison at ``n = 1/sigma`` plus consistency audits."""
    p = config.params
    n = max(1, int(math.floor(1.0 / p.sigma + 1e-9)))
    out = [f"sigma={fmt(p.sigma)}", f"n={n}"]
    out.append(f"discrete_exact_K_n={fmt(discrete.discrete_exact(p, n).capital[n])}")
    out.append(f"discrete_recurrence_K_n="
               f"{fmt(discrete.recurrence_simulate(p, n, discrete.PRIOR_CAPITAL).capital[n])}")
    out.append(f"discrete_approx_K_n={fmt(discrete.discrete_approx(p, n).capital[n])}")
    try:
        out.append(f"continuous_K_n={fmt(continuous.closed_form_state(p, float(n)).K)}")
    except PastCrisisError:
        out.append("continuous_K_n=singular")
    for solution in (discrete.EXACT, discrete.APPROX):
        for convention in discrete.CONVENTIONS:
            res = discrete.consistency_audit(p, n, solution, convention)
            key = f"audit.{solution}.{convention}"
            out.append(f"{key}.residual={fmt(res.residual)}")
            if res.closed_form_residual is not None:
                out.append(f"{key}.closed_form_residual={fmt(res.closed_form_residual)}")
    for tau in (0.0, p.nu, 0.95 * p.crisis_time):
        if tau >= p.crisis_time:
            continue
        d = continuous.dimensional_audit(p, tau)
        out.append(f"dimensional.tau={fmt(tau)}.capital={fmt(d.capital)}")
        out.append(f"dimensional.tau={fmt(tau)}.balance={fmt(d.balance)}")
        out.append(f"dimensional.tau={fmt(tau)}.relative_mismatch={fmt(d.relative_mismatch)}")
    return out


def _cmd_run(args) -> int:
    out_dir = Path(args.out_dir)
    status = EXIT_OK
    for path in args.configs:
        path = Path(path)
        try:
            config = load_scenario(path)
            log.debug("running %s (%s)", path, config.variant.value)
            result = run_scenario(config, out_dir, path.stem)
        except (HarrodError, OSError, ValueError, ArithmeticError) as exc:
            print(f"error: {path}: {exc}", file=sys.stderr)
            status = EXIT_ERROR
            continue
        sys.stdout.write(result.report_text)
        if result.status == EXIT_CRISIS and status == EXIT_OK:
            status = EXIT_CRISIS
    return status


def _cmd_crisis(args) -> int:
    config = load_scenario(args.config)
    traj, report, extra = _execute(config)
    sys.stdout.write(report_machine(report_fields(report, extra)))
    return EXIT_CRISIS if report.within_horizon else EXIT_OK


def _cmd_calibrate(args) -> int:
    observed = calibration.read_observations(args.observations)
    law = calibration.fit_growth_law(observed, args.sigma, args.k0, args.degree)
    report = calibration.extrapolate_crisis(law, args.sigma)
    extra = {f"a{n + 2}": c for n, c in enumerate(law.coefficients)}
    extra["residual_norm"] = law.residual_norm
    sys.stdout.write(report_machine(report_fields(report, extra)))
    return EXIT_OK


def _cmd_audit(args) -> int:
    config = load_scenario(args.config)
    sys.stdout.write("".join(line + "\n" for line in audit_lines(config)))
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # usage errors must not collide with the crisis status
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="harrod", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run scenarios and write trajectory/report/plot files")
    run.add_argument("configs", nargs="+", metavar="config-file")
    run.add_argument("--out-dir", default=".")
    run.set_defaults(func=_cmd_run)

    crisis = sub.add_parser("crisis", help="print the crisis report only")
    crisis.add_argument("config")
    crisis.set_defaults(func=_cmd_crisis)

    cal = sub.add_parser("calibrate", help="fit a growth law to observed capital")
    cal.add_argument("observations")
    cal.add_argument("--sigma", type=float, required=True)
    cal.add_argument("--k0", type=float, required=True)
    cal.add_argument("--degree", type=int, required=True)
    cal.set_defaults(func=_cmd_calibrate)

    audit = sub.add_parser("audit", help="discrete/continuous consistency audits")
    audit.add_argument("config")
    audit.set_defaults(func=_cmd_audit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (HarrodError, OSError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
