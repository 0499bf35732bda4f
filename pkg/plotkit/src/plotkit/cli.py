"""Command line front end: `plotkit <kind> --in <csv> [--probe X] --out <png>`."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import KINDS, FigureJob, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="plotkit",
        description="render publication-style figures from simulation CSVs",
    )
    ap.add_argument("kind", choices=KINDS, help="figure kind")
    ap.add_argument("--in", dest="inputs", action="append", required=True,
                    metavar="CSV",
                    help="input CSV; repeat to overlay an equilibria table "
                         "on a phase3d figure")
    ap.add_argument("--probe", type=float, default=None,
                    help="spatial coordinate to sample for phase3d on "
                         "field CSVs (nearest grid node)")
    ap.add_argument("--out", required=True, help="output PNG path")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = FigureJob(inputs=tuple(args.inputs), kind=args.kind,
                        out=Path(args.out), probe=args.probe)
        path, _ = render(job)
    except (SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
