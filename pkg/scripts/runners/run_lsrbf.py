#!/usr/bin/env python3
"""
LS-RBF Runner
Command-line entry point for approximation runs, sweeps, collocation and predictors

Subcommands:
    approx   single approximation, prints one report
    sweep    convergence sweep, writes CSV
    pde      Poisson collocation run(s)
    predict  closed-form scaling predictors
    config   list, show or template the files in a config directory

Exit codes: 0 success, 1 numerical failure, 2 invalid configuration, 3 I/O failure.
"""

import argparse
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd
import yaml

sys.path.insert(0, str(Path(__file__).resolve().parents[2]))

from core.config_manager import PROFILE_ENV, ConfigManager, build_config, load_config_file
from core.exceptions import (
    ConfigError, InvalidArgumentError, LsRbfError, ReportIOError, ScanLimitExceededError,
)
from core.geometry import CenterRegion
from core.scaling import (
    ScalingKind, ScalingPolicy, edge_translate_value, epsilon_lower_bound, limiting_accuracy,
    min_N_for, optimal_c, rate_terms, sublinear_limit, tail_term,
)
from engines.collocation_engine import CollocationEngine, PoissonConfig
from engines.report_analyzer import FLOAT_FORMAT, ReportAnalyzer, emit_csv, reports_to_frame
from engines.sweep_engine import DOMAINS, SweepConfig, SweepEngine
from utils.logging_setup import setup_logging


EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_IO = 3

# argparse dest -> SweepConfig / PoissonConfig field
_SWEEP_FLAGS = {
    'function': 'function', 'kernel': 'kernel', 'dim': 'dim', 'domain': 'domain', 'radius': 'radius',
    'T': 'T', 'tau': 'tau', 'threshold_mode': 'threshold_mode',
    'factorization': 'factorization', 'scaling': 'scaling', 'c': 'c', 'alpha': 'alpha',
    'epsilon0': 'epsilon0', 'gamma': 'gamma', 'n_min': 'n_min', 'n_max': 'n_max',
    'n_step': 'n_step', 'validation_points': 'validation_points', 'out': 'output',
    'n_jobs': 'n_jobs', 'center_region': 'center_region',
}
_PDE_FLAGS = {
    'problem': 'problem', 'tau': 'tau', 'threshold_mode': 'threshold_mode',
    'factorization': 'factorization', 'gamma': 'gamma', 'c': 'c',
    'validation_points': 'validation_points', 'center_region': 'center_region',
}

CONFIG_CLASSES = {'sweep': SweepConfig, 'pde': PoissonConfig}


# ============================================================================
# ARGUMENTS
# ============================================================================

def _add_solver_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--tau", type=float, help="Truncation threshold (default: 1e-10)")
    parser.add_argument("--threshold-mode", dest="threshold_mode",
                        choices=["relative", "absolute"], help="Threshold comparison")
    parser.add_argument("--factorization", choices=["svd", "qr"], help="TSVD or pivoted QR")
    parser.add_argument("--config", help="YAML, JSON or flat key = value config file")
    parser.add_argument("--profile", help=f"Config profile layered over the base file (env: {PROFILE_ENV})")
    parser.add_argument("--config-dir", dest="config_dir",
                        help="Directory of base and profile config files (default: config)")


def _add_approx_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--function", help="Registered target function (default: runge)")
    parser.add_argument("--kernel", choices=["GA", "MQ", "IQ", "IMQ"], type=str.upper,
                        help="Radial profile (default: GA)")
    parser.add_argument("--dim", type=int, choices=[1, 2], help="Spatial dimension")
    parser.add_argument("--domain", choices=list(DOMAINS), help="2D domain")
    parser.add_argument("--radius", type=float, help="2D domain size (disk radius)")
    parser.add_argument("--center-region", dest="center_region", choices=[r.value for r in CenterRegion],
                        help="2D centers fill the bounding box or its inscribed disk/ellipse")
    parser.add_argument("--T", dest="T", type=float, help="Extension half-width (default: 1.5)")
    parser.add_argument("--scaling", choices=[k.value for k in ScalingKind],
                        help="Shape parameter growth law (default: linear-optimal)")
    parser.add_argument("--c", type=float, help="Scaling constant")
    parser.add_argument("--alpha", type=float, help="Power-law exponent, 0 < alpha < 1")
    parser.add_argument("--epsilon0", type=float, help="Constant shape parameter")
    parser.add_argument("--gamma", type=float, help="Oversampling ratio (default: 2)")
    parser.add_argument("--validation-points", dest="validation_points", type=int,
                        help="Validation grid size")
    _add_solver_flags(parser)


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="lsrbf",
        description="Least-squares RBF approximation and collocation toolkit",
    )
    parser.add_argument("--log-level", default="INFO",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help="Logging level (default: INFO)")
    parser.add_argument("--log-dir", default="logs",
                        help="Directory for daily log files; 'none' disables file logging")
    parser.add_argument("--quiet", action="store_true", help="Only warnings, no progress bar")
    sub = parser.add_subparsers(dest="command", required=True)

    approx = sub.add_parser("approx", help="Single LS-RBF approximation")
    _add_approx_flags(approx)
    approx.add_argument("--N", dest="N", type=int, required=True, help="Basis size")

    sweep = sub.add_parser("sweep", help="Convergence sweep to CSV")
    _add_approx_flags(sweep)
    sweep.add_argument("--n-min", dest="n_min", type=int)
    sweep.add_argument("--n-max", dest="n_max", type=int)
    sweep.add_argument("--n-step", dest="n_step", type=int)
    sweep.add_argument("--n-jobs", dest="n_jobs", type=int, help="Parallel sweep points (joblib)")
    sweep.add_argument("--out", help="CSV output path (default: stdout)")

    pde = sub.add_parser("pde", help="Poisson collocation")
    pde.add_argument("--problem", help="Registered problem (default: runge1d)")
    pde.add_argument("--c", type=float, help="2D scaling constant in eps = c sqrt(N) (default: optimal_c_2d)")
    pde.add_argument("--center-region", dest="center_region", choices=[r.value for r in CenterRegion],
                     help="2D centers fill the bounding box or its inscribed disk/ellipse")
    pde.add_argument("--gamma", type=float, help="Interior oversampling ratio")
    pde.add_argument("--validation-points", dest="validation_points", type=int,
                     help="Validation grid size")
    pde.add_argument("--N", dest="N", type=int, help="Single basis size")
    pde.add_argument("--n-min", dest="n_min", type=int, default=10)
    pde.add_argument("--n-max", dest="n_max", type=int, default=100)
    pde.add_argument("--n-step", dest="n_step", type=int, default=10)
    pde.add_argument("--out", help="CSV output path")
    _add_solver_flags(pde)

    predict = sub.add_parser("predict", help="Closed-form scaling predictors")
    predict.add_argument("--T", dest="T", type=float, default=1.5)
    predict.add_argument("--B", dest="B", type=float, default=1.0, help="Domain radius")
    predict.add_argument("--tau", type=float, default=1e-10)
    predict.add_argument("--scaling", choices=[k.value for k in ScalingKind], default="linear-optimal")
    predict.add_argument("--c", type=float)
    predict.add_argument("--alpha", type=float)
    predict.add_argument("--epsilon0", type=float)
    predict.add_argument("--N", dest="N", type=int, help="Evaluate N-dependent terms here")
    predict.add_argument("--k", type=float, help="Sobolev smoothness for the rate estimate")

    config = sub.add_parser("config", help="Inspect or create config files")
    config.add_argument("action", choices=["list", "show", "template"])
    config.add_argument("name", nargs="?", choices=list(CONFIG_CLASSES), help="Config name (show, template)")
    config.add_argument("--profile", help=f"Profile layered over the base file (env: {PROFILE_ENV})")
    config.add_argument("--config-dir", dest="config_dir", default="config")
    config.add_argument("--format", dest="fmt", choices=["yaml", "json", "cfg"], default="yaml",
                        help="Template file format")

    return parser.parse_args(argv)


def _overrides(args: argparse.Namespace, mapping: Dict[str, str]) -> Dict:
    values = {}
    for dest, name in mapping.items():
        value = getattr(args, dest, None)
        if value is not None:
            values[name] = value
    return values


def _load(args: argparse.Namespace, name: str, config_class, mapping: Dict[str, str],
          extra: Optional[Dict] = None):
    """
    --config reads one file; --profile, --config-dir or LSRBF_PROFILE go
    through ConfigManager (base, profile, {NAME}_{KEY} env); otherwise
    flags over defaults. Flags always win.
    """
    overrides = _overrides(args, mapping)
    overrides.update(extra or {})
    if getattr(args, 'config', None):
        return load_config_file(args.config, config_class, overrides)
    profile = getattr(args, 'profile', None)
    config_dir = getattr(args, 'config_dir', None)
    if profile or config_dir or os.getenv(PROFILE_ENV):
        return ConfigManager(config_dir or "config").load(name, config_class, profile, overrides)
    return build_config(overrides, config_class)


# ============================================================================
# COMMANDS
# ============================================================================

def run_approx(args: argparse.Namespace) -> int:
    config = _load(args, "sweep", SweepConfig, _SWEEP_FLAGS, {'n_min': args.N, 'n_max': args.N, 'n_step': 1})
    report = SweepEngine(config).run_single(args.N)
    print(reports_to_frame([report]).to_string(index=False, float_format=lambda v: f"{v:.6e}"))
    for message in report.warnings:
        print(f"warning: {message}")
    return EXIT_OK


def run_sweep(args: argparse.Namespace) -> int:
    config = _load(args, "sweep", SweepConfig, _SWEEP_FLAGS)
    engine = SweepEngine(config, show_progress=not args.quiet)
    reports = engine.run_sweep()
    if config.output:
        emit_csv(reports, config.output)
        ReportAnalyzer(reports).print_summary(config.tau)
    else:
        sys.stdout.write(reports_to_frame(reports).to_csv(
            index=False, float_format=FLOAT_FORMAT, na_rep='nan', lineterminator='\n'))
    return EXIT_OK


def run_pde(args: argparse.Namespace) -> int:
    config = _load(args, "pde", PoissonConfig, _PDE_FLAGS)
    engine = CollocationEngine(config)
    n_values = [args.N] if args.N else list(range(args.n_min, args.n_max + 1, args.n_step))
    if not n_values:
        raise InvalidArgumentError(f"Empty N range {args.n_min}..{args.n_max}")
    reports = engine.run_sweep(n_values)
    frame = pd.DataFrame([{k: v for k, v in r.to_dict().items() if k != 'warnings'} for r in reports])
    if args.out:
        try:
            Path(args.out).parent.mkdir(parents=True, exist_ok=True)
            frame.to_csv(args.out, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
        except OSError as error:
            raise ReportIOError(args.out, error) from error
    print(frame.to_string(index=False, float_format=lambda v: f"{v:.6e}"))
    return EXIT_OK


def run_predict(args: argparse.Namespace) -> int:
    T, B, tau = args.T, args.B, args.tau
    policy = ScalingPolicy.from_settings(args.scaling, c=args.c, alpha=args.alpha, T=T, tau=tau,
                                         epsilon0=args.epsilon0)
    lines = []
    if tau < 0.5:
        lines.append(f"c* (optimal linear constant): {optimal_c(T, tau):.16e}")
    try:
        n_min = min_N_for(policy, T, B, tau)
    except ScanLimitExceededError as error:
        n_min = None
        lines.append(f"min N: {error}")
    if n_min is not None:
        bound = epsilon_lower_bound(T, B, n_min, tau)
        lines.append(f"min N: {n_min}")
        lines.append(f"eps lower bound at min N: {bound:.16e}")
        if bound > 0:
            lines.append(f"tail term at the bound: {tail_term(bound, T, B, n_min):.16e}")
    if policy.is_linear:
        c = policy.linear_constant
        lines.append(f"limiting accuracy: {limiting_accuracy(c, T, tau):.16e}")
        lines.append(f"edge translate value: {edge_translate_value(c, T, tau):.16e}")
    if args.N:
        lines.append(f"eps at N={args.N}: {policy.epsilon(args.N):.16e}")
        if policy.kind is ScalingKind.POWER:
            lines.append(f"sublinear limit term: {sublinear_limit(policy.c, policy.alpha, T, tau, args.N):.16e}")
        if args.k and policy.kind is not ScalingKind.CONSTANT:
            terms = rate_terms(args.k, args.N, policy, T, tau)
            lines.append(f"rate estimate (k={args.k:g}): algebraic={terms.algebraic:.6e}, "
                         f"saturation={terms.saturation:.6e}, total={terms.total:.6e}")
    print("\n".join(lines))
    return EXIT_OK


def run_config(args: argparse.Namespace) -> int:
    manager = ConfigManager(args.config_dir)
    if args.action == "list":
        print("\n".join(manager.list_configs()))
        return EXIT_OK
    if args.name is None:
        raise InvalidArgumentError(f"config {args.action} needs a name ({', '.join(CONFIG_CLASSES)})")
    config_class = CONFIG_CLASSES[args.name]
    if args.action == "template":
        print(manager.create_template(args.name, config_class, format=args.fmt))
        return EXIT_OK
    config = manager.load(args.name, config_class, args.profile)
    sys.stdout.write(yaml.safe_dump(config.to_dict(), default_flow_style=False, sort_keys=False))
    return EXIT_OK


COMMANDS = {
    'approx': run_approx,
    'sweep': run_sweep,
    'pde': run_pde,
    'predict': run_predict,
    'config': run_config,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_arguments(argv)
    log_dir = None if str(args.log_dir).lower() == 'none' else args.log_dir
    try:
        logger = setup_logging(args.log_level, log_dir, quiet=args.quiet)
    except OSError as error:
        print(f"error: cannot open log directory {args.log_dir}: {error}", file=sys.stderr)
        return EXIT_IO

    try:
        return COMMANDS[args.command](args)
    except (ConfigError, InvalidArgumentError) as error:
        logger.error(f"Invalid configuration: {error}")
        return EXIT_CONFIG
    except (ReportIOError, OSError) as error:
        logger.error(f"I/O failure: {error}")
        return EXIT_IO
    except LsRbfError as error:
        logger.error(f"{type(error).__name__}: {error}")
        return EXIT_FAILURE
    except KeyboardInterrupt:
        logger.warning("Interrupted")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
