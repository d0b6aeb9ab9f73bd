"""Command-line entry point orchestrating all modules.

Exit codes are a stable scripting contract: 0 success, 2 validation error,
3 I/O error. Every command is deterministic given its flags; the only
environment state read is ``BANDITLAB_THREADS`` (parallelism degree, affects
speed only, never output bytes).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, analysis, simulator, transfer
from .concentration import variance_profile
from .core import load_instance, prune, validate_instance
from .policies import parse_policies

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3


def _threads() -> int:
    raw = os.environ.get("BANDITLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _require_input(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise OSError(f"input file not found: {path}")
    return p


def _require_output(path: str) -> Path:
    p = Path(path)
    parent = p.parent if str(p.parent) else Path(".")
    if not parent.is_dir():
        raise OSError(f"output directory does not exist: {parent}")
    return p


def _print_table(rows: list[list[str]], header: list[str]) -> None:
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    print(fmt.format(*header))
    for row in rows:
        print(fmt.format(*[str(x) for x in row]))


def cmd_bounds(args) -> int:
    instance = load_instance(_require_input(args.instance))
    report = validate_instance(instance)
    if not report.ok:
        for v in report.violations:
            print(f"validation: {v}", file=sys.stderr)
        return EXIT_VALIDATION
    pruned = prune(instance.bounds)
    profile = variance_profile(instance.support, instance.bounds.subset(pruned.retained))
    print(f"l_max = {pruned.l_max!r}")
    print(f"global_underexplore = {str(profile.global_underexplore).lower()}")
    dropped = [k for k in range(instance.n_arms) if k not in pruned.mapping]
    for k in dropped:
        print(f"arm {k + 1} pruned (upper bound {instance.arms[k].upper} < l_max)")
    rows = []
    for new, orig in enumerate(pruned.retained):
        arm = instance.arms[orig]
        rows.append(
            [
                f"arm {orig + 1}",
                repr(arm.lower),
                repr(arm.upper),
                repr(profile.sigma_sq[new]),
                repr(profile.pseudo_var[new]),
                profile.regimes[new].value,
            ]
        )
    _print_table(rows, ["arm", "lower", "upper", "sigma_sq", "c", "branch"])
    if args.json:
        payload = {
            "l_max": pruned.l_max,
            "global_underexplore": profile.global_underexplore,
            "pruned": dropped,
            "arms": [
                {
                    "index": orig,
                    "sigma_sq": profile.sigma_sq[new],
                    "c": profile.pseudo_var[new],
                    "branch": profile.regimes[new].value,
                }
                for new, orig in enumerate(pruned.retained)
            ],
        }
        with open(_require_output(args.json), "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


def cmd_simulate(args) -> int:
    policies = parse_policies(args.policies, args.ossb_eps, args.ossb_gamma)
    seeds = tuple(range(args.seeds))
    if args.latent or args.bounds:
        if not (args.latent and args.bounds):
            raise ValueError("contextual mode needs both --latent and --bounds")
        if args.instance:
            raise ValueError("give either an instance file or --latent/--bounds, not both")
        return _simulate_contextual(args, policies, seeds)
    if not args.instance:
        raise ValueError("an instance file is required (or --latent/--bounds)")
    instance = load_instance(_require_input(args.instance))
    report = validate_instance(instance)
    if not report.ok:
        for v in report.violations:
            print(f"validation: {v}", file=sys.stderr)
        return EXIT_VALIDATION
    prefix = args.out_prefix or Path(args.instance).stem
    trace_path = _require_output(f"{prefix}_traces.csv")
    agg_path = _require_output(f"{prefix}_aggregate.csv")
    config = simulator.RunConfig(
        instance=instance,
        policies=policies,
        horizon=args.horizon,
        seeds=seeds,
        root_seed=args.root_seed,
        checkpoints=None,
    )
    result = simulator.run_batch(config, threads=_threads())
    simulator.write_trace_csv(result, trace_path)
    simulator.write_aggregate_csv(result, agg_path)
    rows = []
    for kind in policies:
        agg = result.aggregates[kind.name]
        rows.append([kind.name, repr(float(agg.mean[-1])), repr(float(agg.stderr[-1]))])
    _print_table(rows, ["policy", "final_mean_regret", "stderr"])
    print(f"wrote {trace_path} and {agg_path}")
    return EXIT_OK


def _simulate_contextual(args, policies, seeds) -> int:
    latent = transfer.load_latent(_require_input(args.latent))
    with open(_require_input(args.bounds), "r", encoding="utf-8") as fh:
        data = json.load(fh)
    tb = _bounds_from_dict(data, latent)
    prefix = args.out_prefix or Path(args.latent).stem
    trace_path = _require_output(f"{prefix}_traces.csv")
    agg_path = _require_output(f"{prefix}_aggregate.csv")
    runs = []
    for kind in policies:
        for seed in seeds:
            runs.append(
                simulator.run_contextual(
                    latent, tb, kind, args.horizon, seed, root_seed=args.root_seed
                )
            )
    simulator.write_contextual_trace_csv(runs, trace_path)
    simulator.write_contextual_aggregate_csv(runs, agg_path)
    print(f"wrote {trace_path} and {agg_path}")
    return EXIT_OK


def _bounds_from_dict(data: dict, latent: transfer.LatentInstance) -> transfer.TransferredBounds:
    try:
        lower = np.array([[e["lower"] for e in data[z]] for z in latent.z_labels])
        upper = np.array([[e["upper"] for e in data[z]] for z in latent.z_labels])
        failure = np.array([[e.get("failure_prob", 0.0) for e in data[z]] for z in latent.z_labels])
    except KeyError as exc:
        raise ValueError(f"bounds file is missing entries for context {exc}") from exc
    k0 = latent.n_arms
    return transfer.TransferredBounds(
        z_labels=latent.z_labels,
        lower=lower,
        upper=upper,
        raw_lower=lower,
        raw_upper=upper,
        failure_prob=failure,
        large_reward=np.zeros((len(latent.z_labels), k0, k0), dtype=bool),
    )


def cmd_transfer(args) -> int:
    if bool(args.latent) == bool(args.log):
        raise ValueError("give exactly one input: --latent or --log")
    if args.latent:
        latent = transfer.load_latent(_require_input(args.latent))
        stats = transfer.oracle_statistics(latent)
        tb = transfer.transfer_bounds(stats)
    else:
        if args.gap_lo is None or args.gap_hi is None:
            raise ValueError("--log mode requires --gap-lo and --gap-hi (part of the log)")
        records = transfer.read_log_csv(_require_input(args.log))
        n_arms = args.arms or (max(r.k for r in records) + 1)
        stats = transfer.empirical_log_statistics(records, n_arms, args.gap_lo, args.gap_hi)
        tb = transfer.finite_log_bounds(stats, args.confidence)
    payload = transfer.bounds_to_dict(tb)
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(_require_output(args.out), "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    rows = []
    for zi, z in enumerate(tb.z_labels):
        for k in range(tb.n_arms):
            rows.append(
                [z, f"arm {k + 1}", repr(float(tb.lower[zi, k])), repr(float(tb.upper[zi, k]))]
            )
    _print_table(rows, ["z", "arm", "lower", "upper"])
    return EXIT_OK


def cmd_analyze(args) -> int:
    instance = load_instance(_require_input(args.instance))
    n_list = [int(x) for x in args.n.split(",") if x.strip()] if args.n else []
    reports = analysis.bound_report(instance, n_list)
    rows = [[r.algorithm, repr(float(r.asymptotic))] for r in reports]
    _print_table(rows, ["algorithm", "asymptotic_coefficient"])
    glue = next(r for r in reports if r.algorithm == "glue")
    if glue.finite_time:
        print()
        _print_table(
            [[str(n), repr(float(v))] for n, v in glue.finite_time],
            ["n", "glue_finite_time_bound"],
        )
    if args.json:
        payload = {
            r.algorithm: {
                "asymptotic": r.asymptotic,
                "finite_time": {str(n): v for n, v in r.finite_time},
            }
            for r in reports
        }
        with open(_require_output(args.json), "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


def cmd_heatmap(args) -> int:
    from .core import MeanBounds

    bounds = MeanBounds((args.l, args.l2), (args.u1, args.u2))
    mu1 = np.linspace(args.mu1_min if args.mu1_min is not None else args.l,
                      args.mu1_max if args.mu1_max is not None else args.u1, args.grid)
    mu2 = np.linspace(args.mu2_min if args.mu2_min is not None else args.l2,
                      args.mu2_max if args.mu2_max is not None else args.u2, args.grid)
    ratios = analysis.heatmap(mu1, mu2, bounds)
    out = _require_output(args.out)
    analysis.write_heatmap_csv(mu1, mu2, ratios, out)
    finite = ratios[np.isfinite(ratios)]
    if finite.size:
        print(f"cells below 1: {int((finite < 1.0).sum())} / {finite.size}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_tightness(args) -> int:
    latent = transfer.load_latent(_require_input(args.latent))
    stats = transfer.oracle_statistics(latent)
    tb = transfer.transfer_bounds(stats)
    tol = args.tol
    failures = 0

    upper = transfer.tight_upper_instance(latent)
    ok, violations = transfer.admissible_check(upper, stats, tol)
    hits = np.allclose(upper.agent_means.T, tb.upper, atol=tol, rtol=0.0)
    status = "PASS" if ok and hits else "FAIL"
    failures += status == "FAIL"
    print(f"upper witness: {status}" + ("" if ok else f" ({'; '.join(violations)})"))

    arm_list = (
        [int(x) - 1 for x in args.arms.split(",")] if args.arms else list(range(latent.n_arms))
    )
    for k in arm_list:
        lower_inst = transfer.tight_lower_instance(latent, k)
        ok, violations = transfer.admissible_check(lower_inst, stats, tol)
        hits = np.allclose(lower_inst.agent_means[k], tb.lower[:, k], atol=tol, rtol=0.0)
        status = "PASS" if ok and hits else "FAIL"
        failures += status == "FAIL"
        print(f"lower witness arm {k + 1}: {status}" + ("" if ok else f" ({'; '.join(violations)})"))
    return EXIT_OK if failures == 0 else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="banditlab",
        description="Bandits with mean-bound side information: bounds, simulation, transfer, analysis.",
    )
    parser.add_argument("--version", action="version", version=f"banditlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="per-arm variance/pseudo-variance report for an instance file")
    p.add_argument("instance")
    p.add_argument("--json", help="also write the report as JSON")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("simulate", help="run policies and write trace/aggregate CSVs")
    p.add_argument("instance", nargs="?", help="instance JSON (omit in contextual mode)")
    p.add_argument("--policies", required=True, help="comma list: glue,ucb,b-ucb,kl-ucb,b-kl-ucb,ossb")
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--seeds", type=int, required=True, help="number of independent runs")
    p.add_argument("--root-seed", type=int, default=0)
    p.add_argument("--ossb-eps", type=float, default=0.0)
    p.add_argument("--ossb-gamma", type=float, default=0.0)
    p.add_argument("--out-prefix", help="output prefix (default: instance file stem)")
    p.add_argument("--latent", help="latent instance JSON for contextual mode")
    p.add_argument("--bounds", help="transferred bounds JSON for contextual mode")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("transfer", help="derive mean bounds from a latent instance or log CSV")
    p.add_argument("--latent", help="latent instance JSON (infinite-log path)")
    p.add_argument("--log", help="log CSV with columns z,k,y (finite-log path)")
    p.add_argument("--gap-lo", type=float, help="separation gap lower value (log mode)")
    p.add_argument("--gap-hi", type=float, help="separation gap upper value (log mode)")
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--arms", type=int, help="arm count for log mode (default: max index + 1)")
    p.add_argument("--out", help="bounds JSON output path (default: stdout)")
    p.set_defaults(func=cmd_transfer)

    p = sub.add_parser("analyze", help="asymptotic coefficients and finite-time bounds")
    p.add_argument("instance")
    p.add_argument("--n", help="comma list of horizons for finite-time bounds")
    p.add_argument("--json", help="write the bound report as JSON")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("heatmap", help="two-arm asymptotic bound-ratio grid CSV")
    p.add_argument("--l", type=float, default=0.95, help="arm 1 lower bound")
    p.add_argument("--u1", type=float, default=1.0)
    p.add_argument("--l2", type=float, default=0.0)
    p.add_argument("--u2", type=float, default=1.0)
    p.add_argument("--grid", type=int, default=50)
    p.add_argument("--mu1-min", type=float)
    p.add_argument("--mu1-max", type=float)
    p.add_argument("--mu2-min", type=float)
    p.add_argument("--mu2-max", type=float)
    p.add_argument("--out", default="heatmap.csv")
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("tightness", help="construct and check the extremal transfer instances")
    p.add_argument("latent")
    p.add_argument("--arms", help="1-based arm list for lower witnesses (default: all)")
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_tightness)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except json.JSONDecodeError as exc:
        print(f"validation error: malformed JSON: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
