"""Shared CSV loading with schema checks for all plot scripts."""

from __future__ import annotations

import argparse
import csv
import sys

import matplotlib

matplotlib.use("Agg")

EXPECTED_SCHEMA = "1"
FIGSIZE = (6.4, 4.8)
DPI = 150


class CsvError(SystemExit):
    def __init__(self, message: str):
        print(f"error: {message}", file=sys.stderr)
        super().__init__(2)


def read_rows(path: str, required: list[str]) -> list[dict[str, str]]:
    """Rows of a qmemopt CSV, after schema and column checks."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise CsvError(f"cannot read {path}: {exc}")
    if not rows:
        raise CsvError(f"{path} has no data rows")
    missing = [c for c in ["schema_version"] + required if c not in rows[0]]
    if missing:
        raise CsvError(f"{path} is missing columns: {', '.join(missing)}")
    versions = {row["schema_version"] for row in rows}
    if versions != {EXPECTED_SCHEMA}:
        raise CsvError(f"{path} schema_version {sorted(versions)} != {EXPECTED_SCHEMA}")
    return rows


def base_parser(description: str) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=description)
    parser.add_argument("--input", required=True, help="qmemopt CSV file")
    parser.add_argument("--output", required=True, help="image file to write (png/svg)")
    parser.add_argument("--title", default=None)
    parser.add_argument("--xlabel", default=None)
    parser.add_argument("--ylabel", default=None)
    return parser


def finish(fig, args) -> int:
    ax = fig.gca()
    if args.title:
        ax.set_title(args.title)
    if args.xlabel:
        ax.set_xlabel(args.xlabel)
    if args.ylabel:
        ax.set_ylabel(args.ylabel)
    fig.tight_layout()
    fig.savefig(args.output, dpi=DPI)
    print(f"wrote {args.output}", file=sys.stderr)
    return 0
