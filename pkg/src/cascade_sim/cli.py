"""Command-line front end: ``cascade-sim <figure|all|sweep|verify> [options]``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .exceptions import CascadeError, InvalidParameterError
from .figures import FIGURES, run_figure
from .params import PhysicalParams, config_params, load_config, params_from_mapping, validate_regime
from .sweep import OBSERVABLES, SweepAxis, SweepSpec, parse_number, run_sweep

log = logging.getLogger("cascade_sim")

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2

# CLI flag -> PhysicalParams field
PARAM_FLAGS = {
    "gamma_x": "gamma_X",
    "epsilon": "epsilon",
    "fss": "S",
    "phi": "phi",
    "phi_prime": "phi_prime",
    "cross_gamma": "Gamma",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _number(text: str) -> float:
    try:
        return parse_number(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="TOML or JSON file with model parameters")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: ./out)")
    p.add_argument("--format", choices=("csv", "json"), default=None, help="output format (default: csv)")
    p.add_argument("--no-metadata-timestamp", action="store_true", help="omit the timestamp from metadata")
    p.add_argument("--unconditioned", action="store_true",
                   help="multiply coincidences by the first-photon density at --t-xx")
    p.add_argument("--t-xx", type=_number, default=None, help="first-emission time for --unconditioned")
    p.add_argument("-v", "--verbose", action="store_true")
    g = p.add_argument_group("model parameters (override the config file)")
    g.add_argument("--gamma-x", type=_number, help="exciton decay rate gamma_X")
    g.add_argument("--epsilon", type=_number, help="decay asymmetry, |eps| < 1")
    g.add_argument("--fss", type=_number, help="fine-structure splitting S")
    g.add_argument("--phi", type=_number, help="chiral phase Phi (accepts pi/4 etc.)")
    g.add_argument("--phi-prime", type=_number, help="exciton-photon chiral phase (defaults to --phi)")
    g.add_argument("--cross-gamma", type=_number, help="cross-damping Gamma (exploratory)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cascade-sim", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name in FIGURES + ("all",):
        p = sub.add_parser(name, help="write all figure tables" if name == "all" else f"write the {name} data")
        _common(p)

    p = sub.add_parser("sweep", help="evaluate an observable on a parameter grid")
    _common(p)
    p.add_argument("--axis", action="append", default=None, metavar="NAME:MIN:MAX:COUNT",
                   help="sweep axis, repeatable (names: phi, S, sigma, epsilon, tau)")
    p.add_argument("--observable", choices=sorted(OBSERVABLES), default=None)
    p.add_argument("--sigma", type=_number, default=None, help="timing jitter for C_jittered / C_bar / N_bar")
    p.add_argument("--tau", type=_number, default=None, help="fixed delay when tau is not swept")
    p.add_argument("--jobs", type=int, default=1, help="worker threads")
    p.add_argument("--output", type=Path, default=None, help="output file (default: OUT/sweep.FORMAT)")

    p = sub.add_parser("verify", help="run the acceptance checks and print a JSON report")
    p.add_argument("--report", type=Path, default=None, help="also write the JSON report here")
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


def resolve_settings(args: argparse.Namespace) -> tuple[PhysicalParams, dict]:
    """Merge defaults, config file and CLI flags (in increasing precedence)."""
    config = load_config(args.config) if getattr(args, "config", None) else {}
    params_table = config_params(config)
    params = params_from_mapping(params_table)
    overrides = {field: getattr(args, flag) for flag, field in PARAM_FLAGS.items() if getattr(args, flag, None) is not None}
    params = params.replace(**overrides)
    extras = {
        "sigma": params_table.get("sigma", 0.0),
        "sweep": dict(config.get("sweep", {})),
        "output": dict(config.get("output", {})),
    }
    return params, extras


def _report_regime(params: PhysicalParams) -> None:
    for warning in validate_regime(params).warnings:
        log.warning(warning)


def _cmd_figure(args, params, extras) -> int:
    fmt = args.format or extras["output"].get("format", "csv")
    t_XX = args.t_xx if args.t_xx is not None else 0.0
    names = FIGURES if args.command == "all" else (args.command,)
    for name in names:
        t0 = time.perf_counter()
        paths = run_figure(name, args.out, params, fmt=fmt, timestamp=not args.no_metadata_timestamp,
                           unconditioned=args.unconditioned, t_XX=t_XX)
        log.info("%s: %d files in %.1fs", name, len(paths), time.perf_counter() - t0)
        for path in paths:
            print(path)
    return EXIT_OK


def _cmd_sweep(args, params, extras) -> int:
    table = extras["sweep"]
    axes_text = args.axis or table.get("axes")
    if not axes_text:
        raise UsageError("sweep needs at least one --axis NAME:MIN:MAX:COUNT")
    axes = [SweepAxis.parse(a) if isinstance(a, str) else SweepAxis(**a) for a in axes_text]
    fixed = {k: float(parse_number(str(v))) for k, v in table.get("fixed", {}).items()}
    sigma = args.sigma if args.sigma is not None else extras["sigma"]
    if sigma:
        fixed["sigma"] = float(sigma)
    if args.tau is not None:
        fixed["tau"] = args.tau
    if args.unconditioned:
        fixed["unconditioned"] = 1.0
        fixed["t_XX"] = args.t_xx if args.t_xx is not None else 0.0
    fmt = args.format or table.get("format") or extras["output"].get("format", "csv")
    spec = SweepSpec(axes, observable=args.observable or table.get("observable", "C"), fixed=fixed, format=fmt)
    result = run_sweep(spec, params, jobs=args.jobs, timestamp=not args.no_metadata_timestamp)
    out = args.output or args.out / f"sweep.{fmt}"
    for path in result.write(out, fmt):
        print(path)
    return EXIT_OK


def _cmd_verify(args) -> int:
    from .verification import CheckResult, run_verify

    report = run_verify()
    for entry in report["checks"]:
        print(CheckResult(**entry).line(), file=sys.stderr)
    text = json.dumps(report, indent=1)
    print(text)
    if args.report:
        args.report.write_text(text + "\n")
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"cascade-sim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")

    if args.command == "verify":
        return _cmd_verify(args)
    try:
        params, extras = resolve_settings(args)
        _report_regime(params)
        if args.command == "sweep":
            return _cmd_sweep(args, params, extras)
        return _cmd_figure(args, params, extras)
    except (UsageError, InvalidParameterError, FileNotFoundError) as exc:
        print(f"cascade-sim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CascadeError as exc:
        print(f"cascade-sim: error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
