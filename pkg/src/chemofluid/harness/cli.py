"""Command line entry point: ``chemofluid <subcommand> ...``."""

import argparse
import logging
import sys

from ..errors import ChemoFluidError, ConfigError
from ..model import validate_assumptions
from .config import RunConfig
from .run import EXIT_CONFIG, EXIT_INVARIANT, EXIT_OK, RunFailure, exit_code_for, run
from .studies import barenblatt_validate, eps_study, mms_validate

log = logging.getLogger("chemofluid")


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _ints(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _parser():
    p = argparse.ArgumentParser(prog="chemofluid", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="integrate one configuration")
    r.add_argument("--config", required=True)
    r.add_argument("--out", required=True)

    e = sub.add_parser("eps-study", help="repeat a run along a decreasing eps sequence")
    e.add_argument("--config", required=True)
    e.add_argument("--eps", type=_floats, default=[1e-1, 1e-2, 1e-3, 1e-4])
    e.add_argument("--bound-ratio", type=float, default=2.0)
    e.add_argument("--out", required=True)

    v = sub.add_parser("validate", help="print the structural assumption report")
    v.add_argument("--config", required=True)
    v.add_argument("--c-max", type=float, default=None)

    m = sub.add_parser("mms", help="heat sub-case convergence against the series solution")
    m.add_argument("--sizes", type=_ints, default=[32, 64, 128])
    m.add_argument("--out", required=True)

    b = sub.add_parser("barenblatt", help="porous-medium sub-case against the source solution")
    b.add_argument("--m", type=float, default=2.0)
    b.add_argument("--sizes", type=_ints, default=[64, 128, 256])
    b.add_argument("--out", required=True)
    return p


def _run(args):
    cfg = RunConfig.load(args.config)
    result = run(cfg, out_dir=args.out)
    last = result.records[-1]
    print(f"completed {result.steps} steps to t = {last.t:.6g}; "
          f"mass {last.mass:.15g}, c_max {last.c_max:.15g}, "
          f"max div {result.max_divergence:.2e}")
    print(f"diagnostics: {result.csv_path}")
    return EXIT_OK


def _eps(args):
    cfg = RunConfig.load(args.config)
    res = eps_study(cfg, args.eps, bound_ratio=args.bound_ratio, out_dir=args.out)
    print(res.format())
    return EXIT_OK if res.passed else EXIT_INVARIANT


def _validate(args):
    cfg = RunConfig.load(args.config)
    params = cfg.model_params()
    c_max = args.c_max if args.c_max is not None else max(cfg.init.c0, 1e-12)
    report = validate_assumptions(params, c_max_probe=c_max)
    print(report.format())
    return EXIT_OK if report.passed else EXIT_CONFIG


def _mms(args):
    table = mms_validate(args.sizes, out_dir=args.out)
    print(table.format())
    return EXIT_OK if table.passed else EXIT_INVARIANT


def _barenblatt(args):
    table = barenblatt_validate(args.sizes, m=args.m, out_dir=args.out)
    print(table.format())
    return EXIT_OK if table.passed else EXIT_INVARIANT


_COMMANDS = {"run": _run, "eps-study": _eps, "validate": _validate,
             "mms": _mms, "barenblatt": _barenblatt}


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except RunFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.csv_path:
            print(f"partial diagnostics: {exc.csv_path}", file=sys.stderr)
        return exit_code_for(exc)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ChemoFluidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
