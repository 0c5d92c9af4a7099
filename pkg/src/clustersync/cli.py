"""Command-line front end.

Exit codes: 0 synchronizable / success, 1 not synchronizable, 2 repair
infeasible, 3 input or configuration error, 4 non-finite simulation state.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from .analysis import DEFAULT_TOL, SyncVerdict, classify
from .control import (
    SparsityMask,
    apply_perturbation,
    solve_constrained,
    solve_unconstrained,
)
from .errors import ConfigError, Infeasible, InputError, NonFiniteState
from .io import (
    NetworkFile,
    load_network,
    save_network,
    write_json,
    write_metrics_csv,
    write_trajectory_csv,
)
from .model import CharacteristicBasis, build_inter_cluster_matrix
from .simulator import SimConfig, cluster_step_phases, integrate, phase_spread, frequency_spread

EXIT_OK, EXIT_NOT_SYNC, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_NONFINITE = 0, 1, 2, 3, 4


class Reporter:
    def __init__(self, quiet: bool):
        self.quiet = quiet

    def say(self, msg: str = "") -> None:
        if not self.quiet:
            print(msg)

    def err(self, msg: str) -> None:
        print(msg, file=sys.stderr)


def _describe(verdict: SyncVerdict) -> list[str]:
    lines = [
        "synchronizable" if verdict.synchronizable else "NOT synchronizable",
        f"  weight condition:    {'ok' if verdict.weight_condition_ok else 'violated'}"
        f" (matrix residual {verdict.matrix_residual:.3e})",
        f"  frequency condition: {'ok' if verdict.frequency_condition_ok else 'violated'}",
    ]
    for v in verdict.violations:
        lines.append(
            f"    nodes {v.node_pair[0]},{v.node_pair[1]} of cluster {v.cluster_pair[1]} "
            f"receive different weight from cluster {v.cluster_pair[0]} (gap {v.gap:g})"
        )
    for v in verdict.frequency_violations:
        lines.append(f"    cluster {v.cluster}: omega spread {v.gap:g} (nodes {v.node_pair[0]},{v.node_pair[1]})")
    return lines


def run_check(nf: NetworkFile, tol: float, out: Reporter, report_path=None):
    verdict = classify(nf.net, nf.partition, tol)
    for line in _describe(verdict):
        out.say(line)
    doc = verdict.to_dict()
    out.say(json.dumps(doc))
    if report_path:
        write_json(doc, report_path)
    return verdict, (EXIT_OK if verdict.synchronizable else EXIT_NOT_SYNC)


def run_repair(nf: NetworkFile, args, out: Reporter, out_path, report_path):
    basis = CharacteristicBasis.from_partition(nf.partition)
    a_bar = build_inter_cluster_matrix(nf.net, basis)
    if args.unconstrained:
        result = solve_unconstrained(a_bar, basis)
    else:
        result = solve_constrained(a_bar, basis, SparsityMask(nf.mask_matrix()), args.tol)
    with warnings.catch_warnings():
        if args.allow_sign_flips:
            warnings.simplefilter("ignore")
        repaired_net = apply_perturbation(nf.net, result)
    repaired = NetworkFile(repaired_net, nf.partition, nf.mask)
    save_network(repaired, out_path)
    report = result.report(nf.net.weights)
    write_json(report, report_path)
    out.say(f"repaired network written to {out_path}")
    out.say(f"  |delta|_F = {result.frobenius_norm:.6g}, constraint residual {result.constraint_residual:.3e}, "
            f"{len(report['changed_edges'])} edges changed")
    return repaired, report


def _theta0(spec: str, nf: NetworkFile) -> np.ndarray:
    if spec == "cluster-step":
        return cluster_step_phases(nf.partition)
    try:
        vals = [float(x) for x in spec.split(",")]
    except ValueError:
        raise ConfigError(f"theta0 must be 'cluster-step' or a comma list, got {spec!r}") from None
    if len(vals) != nf.net.n:
        raise ConfigError(f"theta0 has {len(vals)} entries, network has {nf.net.n} nodes")
    return np.array(vals)


def _sim_config(args, nf: NetworkFile) -> SimConfig:
    return SimConfig(
        theta0=_theta0(args.theta0, nf),
        t_final=args.t_final,
        dt=args.dt,
        sample_every=args.sample_every,
    )


def run_simulate(nf: NetworkFile, cfg: SimConfig, out: Reporter, traj_path, metrics_path, label=""):
    traj = integrate(nf.net, cfg)
    if traj_path:
        write_trajectory_csv(traj, traj_path)
    if metrics_path:
        write_metrics_csv(traj, nf.partition, metrics_path)
    ps = phase_spread(traj, nf.partition)
    fs = frequency_spread(traj, nf.partition)
    prefix = f"{label}: " if label else ""
    for k in range(nf.partition.m):
        out.say(f"{prefix}cluster {k}: final phase spread {ps[-1, k]:.3e} rad, "
                f"final frequency spread {fs[-1, k]:.3e} rad/s, max phase spread {ps[:, k].max():.3e} rad")
    return traj


def cmd_check(args, out):
    nf = load_network(args.input)
    return run_check(nf, args.tol, out, args.report)[1]


def cmd_repair(args, out):
    nf = load_network(args.input)
    out_path = Path(args.out)
    report_path = Path(args.report) if args.report else out_path.with_suffix(".report.json")
    try:
        run_repair(nf, args, out, out_path, report_path)
    except Infeasible as exc:
        out.err(f"infeasible: KKT residual {exc.kkt_residual:.6e} (threshold {exc.threshold:.3e})")
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_simulate(args, out):
    nf = load_network(args.input)
    cfg = _sim_config(args, nf)
    if not (args.traj or args.metrics):
        raise ConfigError("give at least one of --traj / --metrics")
    run_simulate(nf, cfg, out, args.traj, args.metrics)
    return EXIT_OK


def cmd_pipeline(args, out):
    nf = load_network(args.input)
    cfg = _sim_config(args, nf)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    summary = {"input": str(args.input)}

    out.say("== check (before)")
    verdict, code = run_check(nf, args.tol, out, outdir / "check_before.json")
    summary["check_before"] = code
    final = nf
    if verdict.weight_condition_ok:
        out.say("== repair skipped: weight condition already holds")
        summary["repair"] = None
    else:
        out.say("== repair")
        try:
            final, report = run_repair(nf, args, out, outdir / "repaired.json", outdir / "repair_report.json")
        except Infeasible as exc:
            out.err(f"infeasible: KKT residual {exc.kkt_residual:.6e} (threshold {exc.threshold:.3e})")
            summary["repair"] = {"feasible": False, "kkt_residual": exc.kkt_residual}
            write_json(summary, outdir / "summary.json")
            return EXIT_INFEASIBLE
        summary["repair"] = report
        out.say("== check (after)")
        _, code = run_check(final, args.tol, out, outdir / "check_after.json")
    summary["check_final"] = code

    out.say("== simulate")
    run_simulate(nf, cfg, out, outdir / "traj_before.csv", outdir / "metrics_before.csv", "before")
    if final is not nf:
        run_simulate(final, cfg, out, outdir / "traj_after.csv", outdir / "metrics_after.csv", "after")
    write_json(summary, outdir / "summary.json")
    return code


def _add_sim_flags(p):
    p.add_argument("--t-final", type=float, default=20.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--theta0", default="cluster-step",
                   help="'cluster-step' (cluster k starts at k rad) or a comma-separated list")
    p.add_argument("--sample-every", type=int, default=1)


class _Parser(argparse.ArgumentParser):
    # usage errors share the input-error exit code; 2 means infeasible here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="clustersync", description=__doc__.splitlines()[0])
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="test whether the partition is synchronizable")
    p.add_argument("input")
    p.add_argument("--report", help="also write the JSON verdict here")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("repair", parents=[common], help="compute the minimal weight perturbation")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="sidecar report path (default: <out>.report.json)")
    p.add_argument("--unconstrained", action="store_true", help="ignore mask_edges")
    p.add_argument("--allow-sign-flips", action="store_true", help="silence sign-flip / new-edge warnings")
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("simulate", parents=[common], help="integrate the dynamics and write CSVs")
    p.add_argument("input")
    p.add_argument("--traj")
    p.add_argument("--metrics")
    _add_sim_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("pipeline", parents=[common], help="check, repair, re-check and simulate")
    p.add_argument("input")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--unconstrained", action="store_true")
    p.add_argument("--allow-sign-flips", action="store_true")
    _add_sim_flags(p)
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Reporter(args.quiet)
    try:
        return args.func(args, out)
    except (InputError, ConfigError) as exc:
        out.err(f"error: {exc}")
        return EXIT_INPUT
    except NonFiniteState as exc:
        out.err(f"error: {exc}; last valid time {exc.last_valid_time!r}")
        return EXIT_NONFINITE
    except ValueError as exc:
        out.err(f"error: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
