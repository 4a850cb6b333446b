"""Command-line driver for batch verification runs.

Thin sequential wrapper over the campaign runners: parse arguments, run,
write machine-readable outputs, map the outcome to an exit code. Exit 0
means every asserted inequality held, 1 means at least one bound violation
(outputs are still written, and the offending report paths are printed),
2 means a configuration or input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from .algebra import HermitianOperator, StateVector, random_state
from .bounds import (
    char_times_ti,
    check_inequalities,
    exp_decay_diagnostic,
    state_moments,
    survival_lower_bound_ti,
    write_report_json,
)
from .campaigns import (
    _fallback_horizon,
    load_campaign,
    run_analytic_suite,
    run_campaign,
    run_entanglement_compare,
    run_gue_ensemble,
    run_qac,
    write_campaign_result,
)
from .events import EventQuery, first_antipodal, first_orthogonal
from .hamiltonians import load_ising_instance, random_hermitian
from .propagate import (
    BetaPolicy,
    IntegrationError,
    IntegratorConfig,
    evolve,
    write_trajectory_csv,
)
from .schedules import Schedule, load_schedule

OUT_ENV_VAR = "QSPEEDLIM_OUT"


def parse_seeds(text: str) -> list:
    """Seed sets come as 'a..b' (half-open range) or a comma list."""
    text = text.strip()
    if ".." in text:
        start, _, stop = text.partition("..")
        return list(range(int(start), int(stop)))
    return [int(tok) for tok in text.split(",") if tok.strip()]


def parse_times(text: str) -> list:
    values = [float(tok) for tok in text.split(",") if tok.strip()]
    if not values:
        raise ValueError("expected a comma-separated list of times")
    return values


def parse_schedule(text: str) -> Schedule:
    """'linear', 'poly:<power>', or a path to a schedule JSON file."""
    if text == "linear":
        return Schedule.linear()
    if text.startswith("poly:"):
        return Schedule.polynomial(float(text.partition(":")[2]))
    return load_schedule(text)


def _out_dir(args, default_name: str) -> Path:
    if args.out is not None:
        return Path(args.out)
    base = os.environ.get(OUT_ENV_VAR, "qspeedlim-results")
    return Path(base) / default_name


def _integrator(args) -> IntegratorConfig:
    return IntegratorConfig(method=args.method, dt=args.dt, steps=args.steps,
                            hbar=args.hbar)


def _print_units_header(hbar: float) -> None:
    print(f"units: hbar = {hbar:g}; all energies and times are hbar-relative")


def _finish_campaign(result, out_dir: Path, verbose: bool) -> int:
    """Write artifacts, narrate the outcome, map violations to exit 1.

    Outputs land on disk before any nonzero return."""
    paths = write_campaign_result(result, out_dir)
    summary = result.summary
    print(f"campaign {summary['kind']} (config {summary['config_hash']}): "
          f"{summary['n_runs']} runs, {summary['n_violations']} violations")
    rates = summary["trigger_rates"]
    if rates["orthogonal"] is not None:
        print(f"trigger rates: orthogonal {rates['orthogonal']:.3g}, "
              f"antipodal {rates['antipodal']:.3g}")
    if verbose:
        for idx, rep in enumerate(result.reports):
            state = "ok" if rep.all_satisfied else "VIOLATION"
            print(f"  [{idx:04d}] {json.dumps(rep.provenance, sort_keys=True)}"
                  f" -> {state}")
    print(f"wrote {len(paths['reports'])} reports and summaries to {out_dir}")
    if result.violations:
        print("violating reports:")
        for idx, rep in enumerate(result.reports):
            if not rep.all_satisfied:
                print(f"  {paths['reports'][idx]}")
        return 1
    return 0


def _cmd_verify(args) -> int:
    _print_units_header(args.hbar)
    if args.campaign is not None:
        campaign = load_campaign(args.campaign)
        result = run_campaign(campaign, workers=args.workers)
        return _finish_campaign(result, _out_dir(args, campaign.kind), args.verbose)
    # the closed-form suite is the default verification target
    result = run_analytic_suite(integrator=_integrator(args), workers=args.workers)
    return _finish_campaign(result, _out_dir(args, "verify"), args.verbose)


def _cmd_ensemble(args) -> int:
    _print_units_header(args.hbar)
    result = run_gue_ensemble(dim=args.dim, seeds=parse_seeds(args.seeds),
                              horizon_mult=args.horizon_mult,
                              shift_ground=args.shift_ground,
                              integrator=_integrator(args), workers=args.workers)
    return _finish_campaign(result, _out_dir(args, "ensemble"), args.verbose)


def _cmd_qac(args) -> int:
    _print_units_header(args.hbar)
    instance = load_ising_instance(args.instance)
    sched = parse_schedule(args.schedule)
    result = run_qac(instance, sched=sched, T_values=parse_times(args.T),
                     shift_problem_ground=args.shift_ground,
                     integrator=_integrator(args), workers=args.workers)
    return _finish_campaign(result, _out_dir(args, "qac"), args.verbose)


def _cmd_entangle(args) -> int:
    _print_units_header(args.hbar)
    result = run_entanglement_compare(subsystem_dim=args.subsystem_dim,
                                      seeds=parse_seeds(args.seeds),
                                      horizon_mult=args.horizon_mult,
                                      integrator=_integrator(args),
                                      workers=args.workers)
    return _finish_campaign(result, _out_dir(args, "entangle"), args.verbose)


def _cmd_decay(args) -> int:
    """Single time-independent run: trajectory, survival-bound curve, and one
    inequality report. The curve file carries the data a plot would show."""
    _print_units_header(args.hbar)
    if args.two_level:
        h = HermitianOperator(np.diag([0.0, 1.0]).astype(complex))
        psi0 = StateVector.normalized(np.array([1.0, 1.0]))
        provenance = {"command": "decay", "system": "two-level"}
    else:
        if args.dim is None:
            raise ValueError("decay needs --two-level or --dim")
        h = random_hermitian(args.dim, args.seed)
        psi0 = random_state(args.dim, [args.seed, 17])
        provenance = {"command": "decay", "system": "gue",
                      "dim": args.dim, "seed": args.seed}

    cfg = _integrator(args)
    m = state_moments(h, psi0)
    horizon = args.horizon
    if horizon is None:
        horizon = _fallback_horizon(char_times_ti(m, cfg.hbar), 4.0)
    if args.beta is not None:
        betas = [BetaPolicy.zero(), BetaPolicy.constant(args.beta)]
    else:
        betas = [BetaPolicy.zero(), BetaPolicy.constant(m.energy, name="opt")]
    traj = evolve(h, psi0, horizon, cfg=cfg, betas=betas)
    events = {
        "orthogonal": first_orthogonal(traj, h, EventQuery(kind="orthogonal")),
        "antipodal": first_antipodal(traj, h, EventQuery(kind="antipodal")),
    }
    report = check_inequalities(traj, m, "time-independent", events=events,
                                provenance=provenance)

    out = _out_dir(args, "decay")
    out.mkdir(parents=True, exist_ok=True)
    traj_path = out / "trajectory.csv"
    write_trajectory_csv(traj, traj_path,
                         seed=None if args.two_level else args.seed)
    curve_path = out / "decay.csv"
    with open(curve_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "survival", "survival_bound", "bound_vacuous",
                         "exp_decay_diagnostic", "regime_ok"])
        for t, p in zip(traj.times, traj.survival):
            bound = survival_lower_bound_ti(float(t), m.spread, cfg.hbar)
            diag = exp_decay_diagnostic(float(t), m.spread, m.energy, cfg.hbar)
            writer.writerow([repr(float(t)), repr(float(p)), repr(bound.value),
                             bound.vacuous, repr(diag.value), diag.regime_ok])
    report_path = out / "report.json"
    write_report_json(report, report_path)

    print(f"wrote {traj_path}, {curve_path}, {report_path}")
    if report.measured_orth_time is not None:
        print(f"orthogonality reached at t = {report.measured_orth_time:.9g}")
    if not report.all_satisfied:
        print("violating report:")
        print(f"  {report_path}")
        return 1
    return 0


def _cmd_report(args) -> int:
    """Render an existing results directory as a text summary."""
    summary_path = Path(args.results_dir) / "summary.json"
    if not summary_path.exists():
        raise ValueError(f"no summary.json under {args.results_dir}")
    summary = json.loads(summary_path.read_text())
    print(f"campaign: {summary['kind']} (config {summary['config_hash']})")
    print(f"runs: {summary['n_runs']}, violations: {summary['n_violations']}")
    rates = summary.get("trigger_rates", {})
    if rates:
        fmt = lambda v: "n/a" if v is None else f"{v:.3g}"
        print(f"trigger rates: orthogonal {fmt(rates.get('orthogonal'))}, "
              f"antipodal {fmt(rates.get('antipodal'))}")
    quantiles = summary.get("margin_quantiles", {})
    if quantiles:
        print("margin quantiles (rhs - lhs, positive is headroom):")
        width = max(len(name) for name in quantiles)
        print(f"  {'name'.ljust(width)}  {'min':>12}  {'median':>12}  {'max':>12}")
        for name, stats in sorted(quantiles.items()):
            print(f"  {name.ljust(width)}  {stats['min']:>12.6g}  "
                  f"{stats['median']:>12.6g}  {stats['max']:>12.6g}")
    for violation in summary.get("violations", []):
        print(f"violation: {json.dumps(violation, sort_keys=True)}")
    return 0 if summary.get("n_violations", 0) == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None,
                        help=f"output directory (default: ${OUT_ENV_VAR} or "
                             "./qspeedlim-results/<command>)")
    common.add_argument("--hbar", type=float, default=1.0,
                        help="value of hbar; all quantities are relative to it")
    common.add_argument("--dt", type=float, default=None,
                        help="integrator step size (exclusive with --steps)")
    common.add_argument("--steps", type=int, default=None,
                        help="integrator step count (exclusive with --dt)")
    common.add_argument("--method", default="midpoint-exponential",
                        choices=["midpoint-exponential", "rk4"])
    common.add_argument("--workers", type=int, default=1,
                        help="parallel campaign members")
    common.add_argument("-v", "--verbose", action="store_true",
                        help="print one line per campaign member")

    parser = argparse.ArgumentParser(
        prog="qspeedlim",
        description="Simulate Schrodinger evolution and verify "
                    "time-energy uncertainty bounds.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("verify", parents=[common],
                       help="run the closed-form suite or a campaign file")
    p.add_argument("--analytic", action="store_true",
                   help="run the closed-form two-level suite (the default)")
    p.add_argument("--campaign", default=None,
                   help="path to a campaign definition JSON")
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("ensemble", parents=[common],
                       help="random-matrix ensemble campaign")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--seeds", default="0..8",
                   help="'a..b' half-open range or comma list")
    p.add_argument("--horizon-mult", type=float, default=4.0)
    p.add_argument("--shift-ground", action="store_true",
                   help="shift each sample so its ground energy is zero")
    p.set_defaults(handler=_cmd_ensemble)

    p = sub.add_parser("qac", parents=[common],
                       help="interpolated-Hamiltonian campaign over an Ising instance")
    p.add_argument("--instance", required=True, help="instance JSON path")
    p.add_argument("--schedule", default="linear",
                   help="'linear', 'poly:<power>', or a schedule JSON path")
    p.add_argument("--T", default="1,4,16",
                   help="comma list of total interpolation times")
    p.add_argument("--shift-ground", action="store_true",
                   help="shift the problem term so its ground energy is zero")
    p.set_defaults(handler=_cmd_qac)

    p = sub.add_parser("decay", parents=[common],
                       help="single survival-decay run with bound curves")
    p.add_argument("--two-level", action="store_true",
                   help="the closed-form gap system instead of a random draw")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--horizon", type=float, default=None,
                   help="default: 4x the orthogonality characteristic time")
    p.add_argument("--beta", type=float, default=None,
                   help="constant reference-energy policy to track alongside zero")
    p.set_defaults(handler=_cmd_decay)

    p = sub.add_parser("entangle", parents=[common],
                       help="product versus entangled decay comparison")
    p.add_argument("--subsystem-dim", type=int, default=2)
    p.add_argument("--seeds", default="0..24")
    p.add_argument("--horizon-mult", type=float, default=4.0)
    p.set_defaults(handler=_cmd_entangle)

    p = sub.add_parser("report", parents=[common],
                       help="summarize an existing results directory")
    p.add_argument("results_dir")
    p.set_defaults(handler=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except IntegrationError as exc:
        print(f"error: integration failed at t = {exc.time:.6g}: {exc}",
              file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
