"""`simulate` command: run the persona suite and write a metrics report."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .catalog import load_catalog_with_sidecar
from .config import EngineConfig
from .evalsim import ABLATIONS, load_personas, run_suite
from .fixtures import default_catalog_csv, default_catalog_schema


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simulate",
        description="Run persona-scripted dialogues against the engine and "
        "report precision/nDCG/satisfaction/diversity metrics.",
    )
    parser.add_argument("--personas", required=True, help="directory of persona *.json records")
    parser.add_argument("--strategy", choices=["es", "cr"], default="es")
    parser.add_argument("--k", type=int, default=2, help="max follow-up questions")
    parser.add_argument(
        "--ablate", choices=list(ABLATIONS)[1:] + ["none"], default="none",
        help="disable MMR (lambda=1), entropy questioning (fixed order), or both",
    )
    parser.add_argument("--seeds", type=int, default=3, help="number of seeded runs (0..n-1)")
    parser.add_argument("--out", default="report.json", help="JSON report path")
    parser.add_argument("--markdown", default=None, help="also write a markdown table here")
    parser.add_argument("--catalog", default=None, help="catalog CSV (default: bundled cars)")
    parser.add_argument("--schema", default=None, help="sidecar schema JSON")
    parser.add_argument(
        "--matrix", action="store_true",
        help="run the full strategy x ablation matrix instead of one cell",
    )
    parser.add_argument("--sample-fraction", type=float, default=0.8)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    catalog = load_catalog_with_sidecar(
        args.catalog or default_catalog_csv(),
        args.schema or default_catalog_schema(),
    )
    personas = load_personas(args.personas)
    if not personas:
        print(f"no personas found in {args.personas}", file=sys.stderr)
        return 2

    config = EngineConfig(max_questions=args.k)
    strategies = ("es", "cr") if args.matrix else (args.strategy,)
    ablations = ABLATIONS if args.matrix else (args.ablate,)
    report = run_suite(
        personas,
        catalog,
        config,
        strategies=strategies,
        ablations=ablations,
        seeds=tuple(range(args.seeds)),
        sample_fraction=args.sample_fraction,
    )

    out = Path(args.out)
    out.write_text(json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    table = report.to_markdown()
    if args.markdown:
        Path(args.markdown).write_text(table, encoding="utf-8")
    print(table, end="")
    print(f"report written to {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
