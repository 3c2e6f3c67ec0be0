"""Command-line entry point: ``pscoherence {run,validate,list-experiments}``."""
import argparse
import sys

from .config import ConfigParseError, ConfigValidationError, build, load_config
from .errors import ValidationError

EXIT_OK = 0
EXIT_PARSE = 3
EXIT_VALIDATION = 4
EXIT_RUNTIME = 5


def _report(kind, lines):
    for line in lines:
        print(f"error[{kind}] {line}", file=sys.stderr)


def _load(path):
    from .runner import resolve_config

    return load_config(resolve_config(path))


def cmd_validate(args):
    from .runner import check

    cfg, _ = _load(args.config)
    parts = build(cfg)
    diag, warns = check(cfg, parts)
    print("ok")
    print(f"experiment: {cfg.experiment.type} ({cfg.experiment.mode})")
    print(diag.summary())
    for w in warns:
        print(f"warning: {w}")
    return EXIT_OK


def cmd_run(args):
    from .runner import run_experiment

    cfg, raw = _load(args.config)
    report = run_experiment(cfg, raw, args.out, args.threads, args.seed)
    for f in report["files"]:
        print(f"wrote {f}")
    for w in report["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    for flag, count in report["flags"].items():
        print(f"diagnostic[{flag}] {count} scan point(s)", file=sys.stderr)
    return EXIT_OK


def cmd_list(args):
    from .runner import bundled_configs, list_experiments

    for name, desc in list_experiments().items():
        print(f"{name:24s} {desc}")
    print("\nbundled configs (usable as --config NAME):")
    for name in bundled_configs():
        print(f"  {name}")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(
        prog="pscoherence",
        description="Phase-locked pulse-pair pump-probe simulations of electronic "
                    "coherence in multiphoton ionization.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the experiment declared in a config")
    run.add_argument("--config", required=True, metavar="PATH",
                     help="YAML config file or bundled config name")
    run.add_argument("--out", metavar="DIR", default=None,
                     help="output directory (default: output.directory of the config)")
    run.add_argument("--threads", type=int, default=1, metavar="N",
                     help="worker threads for independent scan points (default: 1)")
    run.add_argument("--seed", type=int, default=None, metavar="N",
                     help="override the config seed")
    run.set_defaults(func=cmd_run)

    val = sub.add_parser("validate", help="validate a config without running it")
    val.add_argument("--config", required=True, metavar="PATH")
    val.set_defaults(func=cmd_validate)

    ls = sub.add_parser("list-experiments", help="list experiment types and bundled configs")
    ls.set_defaults(func=cmd_list)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", 1) is not None and getattr(args, "threads", 1) < 1:
        _report("usage", ["--threads must be >= 1"])
        return 2
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        _report("parse", [f"cannot open {exc.filename}"])
        return EXIT_PARSE
    except ConfigParseError as exc:
        _report("parse", [str(exc)])
        return EXIT_PARSE
    except ConfigValidationError as exc:
        _report("validation", [f"{p}: {m}" for p, m in exc.errors])
        return EXIT_VALIDATION
    except ValidationError as exc:
        _report("runtime", [f"{exc.field}: {exc.message}"])
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
