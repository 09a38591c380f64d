"""Command line entry point: ``lab run | validate | list``."""

import argparse
import sys

from .config import ConfigError, load_config
from .experiments import REGISTRY, describe
from .runner import EXIT_OK, EXIT_USAGE, run, validate


def build_parser():
    parser = argparse.ArgumentParser(prog="lab", description="Random-state entanglement experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config")
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--samples", type=int)
    p_run.add_argument("--out")
    p_run.add_argument("--threads", type=int, help="worker threads (default: $LAB_THREADS or 1)")

    p_val = sub.add_parser("validate", help="check a config without running it")
    p_val.add_argument("config")

    sub.add_parser("list", help="list experiments and their parameters")
    return parser


def _load(path):
    try:
        return load_config(path), None
    except OSError as exc:
        return None, f"cannot read {path}: {exc.strerror}"
    except ConfigError as exc:
        return None, str(exc)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    if args.command == "list":
        for name in sorted(REGISTRY):
            print(describe(name))
        return EXIT_OK

    cfg, err = _load(args.config)
    if err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE

    if args.command == "validate":
        diags = validate(cfg)
        for d in diags:
            print(d)
        if not diags:
            print("ok")
        return EXIT_OK

    code, message, paths = run(cfg, seed=args.seed, samples=args.samples, out=args.out, threads=args.threads)
    for p in paths:
        print(p)
    if code != EXIT_OK:
        print(f"error ({code}): {message}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
