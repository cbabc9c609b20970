"""Command-line interface.

Exit codes: 0 success; 1 invalid input (bad flags, config, CSV, report
fields); 2 estimator undefined on the data (e.g. an arm without initiators);
3 ``verify`` ran but a check failed.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .dgp import simulate_trial
from .diagnostics import PARTIAL_CHECK_CAVEAT, initiation_balance
from .errors import EstimatorUndefinedError, InputError
from .estimators import itt_estimate, mitt_estimate
from .io import ReportSettings, load_config, load_dataset, write_dataset
from .reporting import ReportInputs, emit_analysis_report, emit_box1
from .verification import assumption_violation_sweep, run_mc, run_proof_checks, write_sweep_csv

EXIT_OK, EXIT_INPUT, EXIT_UNDEFINED, EXIT_CHECK_FAILED = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _probability(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must be in (0, 1), got {text}")
    return value


def _grid(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be comma-separated numbers, got {text!r}") from None


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mittps", description="Modified intention-to-treat as a principal stratum estimator.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, input_=False, config=False, seed=False, mc=False, fmt=None):
        if input_:
            p.add_argument("--input", required=input_ == "required", help="dataset CSV")
        if config:
            p.add_argument("--config", required=config == "required", help="TOML configuration")
        if seed:
            p.add_argument("--seed", type=_seed, help="master seed (overrides the config)")
        if mc:
            p.add_argument("--replications", type=int, help="Monte Carlo replications")
            p.add_argument("--workers", type=int, default=1, help="worker processes for Monte Carlo")
        p.add_argument("--alpha", type=_probability, help="balance test significance level")
        p.add_argument("--level", type=_probability, help="confidence level for intervals")
        p.add_argument("--output", help="output file (default stdout)")
        if fmt:
            p.add_argument("--format", choices=("json", "text"), default=fmt)

    p = sub.add_parser("simulate", help="simulate a dataset and/or a Monte Carlo summary")
    common(p, config="required", seed=True, mc=True, fmt="json")
    p.add_argument("--figure", help="histogram of replicate estimates (PNG)")

    p = sub.add_parser("analyze", help="ITT and mITT estimates with report")
    common(p, input_="required", config=True, fmt="json")

    p = sub.add_parser("diagnose", help="non-initiation balance between arms")
    common(p, input_="required", fmt="json")

    p = sub.add_parser("sweep", help="bias as violating strata grow")
    common(p, config="required", seed=True, mc=True)
    p.add_argument("--grid", type=_grid, help="comma-separated violation shares")
    p.add_argument("--figure", help="bias plot (PNG)")

    p = sub.add_parser("report", help="disclosure text for an mITT analysis")
    common(p, input_=True, config="required", fmt="text")

    p = sub.add_parser("verify", help="exact enumeration and Monte Carlo proof checks")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--replications", type=int, default=2000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output", help="output file (default stdout)")
    return parser


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _settings(args):
    sim = load_config(args.config) if getattr(args, "config", None) else None
    return sim, (sim.mc if sim else None), (sim.report if sim else ReportSettings())


def _report_inputs(report: ReportSettings, **extra) -> ReportInputs:
    return ReportInputs(
        trial_name=report.trial_name,
        intercurrent_event_description=report.intercurrent_event,
        estimand_statement=report.estimand_statement,
        assumption_justification=report.justification,
        verdict=report.verdict(),
        **extra,
    )


def cmd_simulate(args) -> int:
    sim, mc, _ = _settings(args)
    cfg = sim.require_dgp()
    if args.seed is not None:
        cfg = cfg.with_(seed=args.seed)
    replications = args.replications or mc.replications
    if args.output or not replications:
        data = simulate_trial(cfg)
        if args.output:
            with open(args.output, "w", newline="") as fh:
                write_dataset(data, fh)
        else:
            write_dataset(data, sys.stdout)
    if replications:
        level = args.level or mc.level
        summary = run_mc(cfg, replications, level, workers=args.workers, keep_estimates=bool(args.figure))
        if args.figure:
            from .plotting import plot_mc_distribution

            plot_mc_distribution(summary, args.figure)
        sys.stdout.write(_json(summary.to_dict()))
    return EXIT_OK


def cmd_analyze(args) -> int:
    _, mc, report = _settings(args)
    level = args.level or (mc.level if mc else 0.95)
    alpha = args.alpha or (mc.alpha if mc else 0.05)
    data = load_dataset(args.input)
    inputs = _report_inputs(report, itt=itt_estimate(data, level), mitt=mitt_estimate(data, level),
                            balance=initiation_balance(data, alpha))
    text, envelope = emit_analysis_report(inputs)
    _emit(_json(envelope) if args.format == "json" else text, args.output)
    return EXIT_OK


def cmd_diagnose(args) -> int:
    data = load_dataset(args.input)
    b = initiation_balance(data, args.alpha or 0.05)
    if args.format == "json":
        out = _json(b.to_dict())
    else:
        out = "\n".join(f"{k}: {v}" for k, v in b.to_dict().items()) + "\n" + PARTIAL_CHECK_CAVEAT + "\n"
    _emit(out, args.output)
    return EXIT_OK


def cmd_sweep(args) -> int:
    sim, mc, _ = _settings(args)
    cfg = sim.require_dgp()
    if args.seed is not None:
        cfg = cfg.with_(seed=args.seed)
    rows = assumption_violation_sweep(cfg, args.grid or mc.grid, args.replications or mc.replications or 1000,
                                      args.level or mc.level, workers=args.workers)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            write_sweep_csv(rows, fh)
    else:
        write_sweep_csv(rows, sys.stdout)
    if args.figure:
        from .plotting import plot_sweep

        plot_sweep(rows, args.figure)
    return EXIT_OK


def cmd_report(args) -> int:
    _, mc, report = _settings(args)
    if args.input:
        level = args.level or mc.level
        data = load_dataset(args.input)
        inputs = _report_inputs(report, itt=itt_estimate(data, level), mitt=mitt_estimate(data, level),
                                balance=initiation_balance(data, args.alpha or mc.alpha))
        text, envelope = emit_analysis_report(inputs)
        _emit(_json(envelope) if args.format == "json" else text, args.output)
        return EXIT_OK
    inputs = _report_inputs(report)
    box1 = emit_box1(inputs)
    _emit(_json({"verdict": inputs.verdict.to_dict(), "box1": box1}) if args.format == "json" else box1, args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = run_proof_checks(args.seed, args.replications, args.workers)
    width = max(len(c.name) for c in checks)
    lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.name:<{width}}  {c.detail}" for c in checks]
    ok = all(c.passed for c in checks)
    lines.append(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed")
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


COMMANDS = {
    "simulate": cmd_simulate,
    "analyze": cmd_analyze,
    "diagnose": cmd_diagnose,
    "sweep": cmd_sweep,
    "report": cmd_report,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except EstimatorUndefinedError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_UNDEFINED
    except (InputError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
