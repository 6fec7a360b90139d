"""Command line entry point.

    subquantum simulate --config FILE --out DIR [--outputs a,b] [--nx N] [--nt N]
    subquantum validate --config FILE
    subquantum gallery --out DIR [--only NAME ...]

Exit status is 0 on success. Failures print a single line
``ERROR <Kind>[ line=N[ column=C]]: <message>`` on stderr and exit with

    2  bad command line (argparse)
    3  invalid config document or scenario
    4  file system error
    5  numerical failure during the run
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import gallery
from .config import read_config
from .errors import (ConfigSyntaxError, IoError, ScenarioError, SubquantumError, UnknownKey)
from .model import validate_scenario
from .runner import run_scenario

EXIT_CONFIG = 3
EXIT_IO = 4
EXIT_NUMERIC = 5


def _exit_code(exc: SubquantumError) -> int:
    if isinstance(exc, IoError):
        return EXIT_IO
    if isinstance(exc, (ScenarioError, ConfigSyntaxError, UnknownKey)):
        return EXIT_CONFIG
    return EXIT_NUMERIC


def _products(text):
    return tuple(p.strip() for p in text.split(",") if p.strip())


def cmd_simulate(args) -> int:
    cfg = read_config(args.config)
    cfg = validate_scenario(cfg.with_overrides(
        outputs=_products(args.outputs) if args.outputs else None, nx=args.nx, nt=args.nt))
    manifest = run_scenario(cfg, args.out)
    for name, sha in manifest.files:
        print(f"{sha}  {Path(args.out) / name}")
    return 0


def cmd_validate(args) -> int:
    cfg = read_config(args.config)
    g = cfg.grid
    print(f"OK {cfg.name}: {len(cfg.slits)} slits, x in [{g.x_min:g}, {g.x_max:g}] nx={g.nx}, "
          f"t in [0, {g.t_max:g}] nt={g.nt}, outputs={','.join(cfg.outputs)}")
    return 0


def cmd_gallery(args) -> int:
    names = args.only or list(gallery.NAMES)
    for name in names:
        if name not in gallery.NAMES:
            raise ScenarioError(f"unknown gallery scenario {name!r}")
    out = Path(args.out)
    for name in names:
        manifest = run_scenario(gallery.load(name), out / name)
        print(f"{name}: {len(manifest.files)} files")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="subquantum", description="n-slit interference from ballistic diffusion")
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one scenario")
    sim.add_argument("--config", required=True, help="scenario config document (TOML)")
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--outputs", help="comma-separated products, replaces the config list")
    sim.add_argument("--nx", type=int, help="override grid.nx")
    sim.add_argument("--nt", type=int, help="override grid.nt")
    sim.set_defaults(func=cmd_simulate)

    val = sub.add_parser("validate", help="parse and validate a config document")
    val.add_argument("--config", required=True)
    val.set_defaults(func=cmd_validate)

    gal = sub.add_parser("gallery", help="run every shipped scenario")
    gal.add_argument("--out", required=True)
    gal.add_argument("--only", nargs="+", metavar="NAME", help="run just these scenarios")
    gal.set_defaults(func=cmd_gallery)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SubquantumError as exc:
        print(exc.machine_line(), file=sys.stderr)
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
