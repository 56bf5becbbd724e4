"""Command-line interface: gen-field, run, compare, export.

Exit codes (also shown in --help):
  0  success
  1  unexpected internal error
  2  usage error (unknown flags or arguments)
  3  malformed configuration file
  4  missing input file
  5  shape or data mismatch between inputs
  6  solver or time-stepping failure
"""

import argparse
import os
import sys

from .analysis import (CONTOUR, SURFACE, ShapeError, compare_refinement_study,
                       export_plot_data)
from .config import ConfigError, config_hash, load_config, with_overrides
from .driver import MassBalanceError, run as run_scenario
from .fieldgen import field_statistics, generate_field
from .pressure import ConfigurationError, SolverFailure
from .snapshots import RAW, TEXT, FormatError, SnapshotFile, read_snapshot, write_snapshot
from .transport_common import TimeStepError, TransportBlowUp

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_MISSING = 4
EXIT_SHAPE = 5
EXIT_SOLVER = 6

_EPILOG = __doc__.split("Exit codes", 1)[1]


def _add_mode_flags(parser):
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--raw", dest="mode", action="store_const", const=RAW,
                       help="binary float64 payload (bit-exact round-trip)")
    group.add_argument("--text", dest="mode", action="store_const", const=TEXT,
                       help="decimal text payload (default)")
    parser.set_defaults(mode=TEXT)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="centralflow",
        description="Two-phase flooding simulator with staggered (nt) and "
                    "semi-discrete (kt) central transport schemes.",
        epilog="exit codes:" + _EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-field", help="generate a permeability raster from a config",
                       epilog="exit codes:" + _EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--config", required=True, help="flat key-value configuration file")
    p.add_argument("--out", required=True, help="output raster path")
    p.add_argument("--seed", type=int, default=None, help="override field.seed")
    _add_mode_flags(p)

    p = sub.add_parser("run", help="run a scenario and write snapshot rasters",
                       epilog="exit codes:" + _EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--scheme", choices=("nt", "kt"), default=None,
                   help="override scheme.kind")
    p.add_argument("--seed", type=int, default=None, help="override field.seed")
    p.add_argument("--snapshot-days", default=None,
                   help="comma-separated days, overrides time.snapshot_days")
    _add_mode_flags(p)

    p = sub.add_parser("compare", help="refinement-ladder differences against a coarse run",
                       epilog="exit codes:" + _EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("coarse", help="coarse-grid snapshot raster")
    p.add_argument("ladder", nargs="+", help="refinement snapshots (any order)")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")

    p = sub.add_parser("export", help="export plot data from a snapshot raster",
                       epilog="exit codes:" + _EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("snapshot", help="snapshot raster path")
    p.add_argument("--kind", choices=(SURFACE, CONTOUR), required=True)
    p.add_argument("--levels", default=None, help="comma-separated contour levels")
    p.add_argument("--out", required=True)
    return parser


def _cmd_gen_field(args):
    cfg = load_config(args.config)
    cfg = with_overrides(cfg, seed=args.seed)
    if cfg.field_spec is None:
        raise ConfigError("config does not describe a generated field (field.kind)")
    field = generate_field(cfg.field_spec)
    snap = SnapshotFile(field=field, kind="permeability", mode=args.mode,
                        config_hash=config_hash(cfg))
    write_snapshot(args.out, snap)
    stats = field_statistics(field)
    print(f"wrote {args.out}: {field.grid.nx}x{field.grid.ny}, "
          f"mean {stats['mean']:.6g}, cv {stats['cv']:.4f}")
    return EXIT_OK


def _cmd_run(args):
    cfg = load_config(args.config)
    days = None
    if args.snapshot_days is not None:
        days = tuple(float(t) for t in args.snapshot_days.replace(",", " ").split())
    cfg = with_overrides(cfg, scheme=args.scheme, seed=args.seed, snapshot_days=days)
    os.makedirs(args.out, exist_ok=True)
    result = run_scenario(cfg)
    digest = config_hash(cfg)
    for snap in result.snapshots:
        name = f"snapshot_{cfg.scheme}_day{snap.requested_day:g}.dat"
        write_snapshot(os.path.join(args.out, name), SnapshotFile(
            field=snap.saturation, kind="saturation", time_days=snap.actual_day,
            scheme=cfg.scheme, config_hash=digest, mode=args.mode))
        print(f"wrote {name} (actual day {snap.actual_day:g})")
    rep = result.report
    print(f"{cfg.scheme} run: {rep.transport_steps} transport steps, "
          f"{rep.pressure_solves} pressure solves, "
          f"s in [{rep.s_min:.6f}, {rep.s_max:.6f}], "
          f"{rep.wall_seconds:.2f}s")
    return EXIT_OK


def _cmd_compare(args):
    coarse = read_snapshot(args.coarse)
    ladder = [read_snapshot(p) for p in args.ladder]
    report = compare_refinement_study(coarse, ladder)
    lines = [f"reference {report.reference_label}"]
    lines += [f"{label} {diff!r}" for label, diff in report.rows()]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_export(args):
    snap = read_snapshot(args.snapshot)
    levels = None
    if args.levels is not None:
        levels = tuple(float(t) for t in args.levels.replace(",", " ").split())
    if args.kind == CONTOUR and not levels:
        raise ConfigError("--kind contour-levels requires --levels")
    export_plot_data(snap, args.kind, args.out, levels=levels)
    print(f"wrote {args.out}")
    return EXIT_OK


_COMMANDS = {
    "gen-field": _cmd_gen_field,
    "run": _cmd_run,
    "compare": _cmd_compare,
    "export": _cmd_export,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ConfigurationError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"missing file: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except (ShapeError, FormatError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_SHAPE
    except (SolverFailure, TimeStepError, TransportBlowUp, MassBalanceError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_SHAPE
    except Exception as exc:  # pragma: no cover
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
