"""Command-line entry point (``vgallometry``)."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import runner
from .allometry import compute_ac, write_ac_csv
from .ingest import load_series, write_series_csv
from .spanning import spanning_tree
from .synth import FbmSpec, SurrogateKind, gen_brownian, gen_fbm, make_surrogate
from .visibility import build_visibility_graph

TREE_FLAGS = {"max": "MaxST", "min": "MinST", "ran": "RanST"}


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _config(args: argparse.Namespace, **extra) -> dict:
    skip = {"func", "verbose", "out", "workers"}
    cfg = {k: v for k, v in vars(args).items() if k not in skip}
    cfg.update(extra)
    return cfg


def cmd_analyze(args: argparse.Namespace) -> int:
    s = load_series(args.csv, column=args.column, date_column=args.date_column)
    rep = runner.analyze_index(s, args.ranst, args.seed, weight_mode=args.weights)
    doc = {"config": _config(args), "results": [rep.row()], "regressions": []}
    _emit(runner.report_json(doc), args.out)
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    if args.process == "bm":
        s = gen_brownian(args.length, args.seed, form=args.form)
    else:
        if args.hurst is None:
            raise SystemExit("synth fbm requires --hurst")
        s = gen_fbm(FbmSpec(args.hurst, args.length, args.seed), form=args.form)
    write_series_csv(s, args.out)
    return 0


def cmd_surrogate(args: argparse.Namespace) -> int:
    s = load_series(args.csv, column=args.column, date_column=args.date_column)
    write_series_csv(make_surrogate(s, SurrogateKind.parse(args.kind), args.seed), args.out)
    return 0


def cmd_scan_length(args: argparse.Namespace) -> int:
    source = None
    if args.index:
        source = load_series(args.index, column=args.column, date_column=args.date_column)
    lengths = args.lengths
    if lengths is None:
        if source is None:
            raise SystemExit("scan-length --bm requires --lengths")
        lengths = runner.default_length_grid(len(source))
    rep = runner.length_scan(source, lengths, args.realizations, args.seed, workers=args.workers)
    doc = rep.to_dict()
    doc["config"] = {**_config(args, lengths=lengths), **doc["config"]}
    _emit(runner.report_json(doc), args.out)
    return 0


def cmd_scan_hurst(args: argparse.Namespace) -> int:
    rep = runner.hurst_scan(args.hursts, args.length, args.realizations, args.seed,
                            workers=args.workers)
    doc = rep.to_dict()
    doc["config"] = {**_config(args), **doc["config"]}
    _emit(runner.report_json(doc), args.out)
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    s = load_series(args.csv, column=args.column, date_column=args.date_column)
    rep = runner.surrogate_compare(s, args.realizations, args.seed, workers=args.workers)
    doc = rep.to_dict()
    doc["config"] = {**_config(args), **doc["config"]}
    _emit(runner.report_json(doc), args.out)
    return 0


def cmd_export_ac(args: argparse.Namespace) -> int:
    s = load_series(args.csv, column=args.column, date_column=args.date_column)
    g = build_visibility_graph(s, args.weights)
    tree = spanning_tree(g, TREE_FLAGS[args.tree], args.seed)
    write_ac_csv(compute_ac(tree), args.out)
    return 0


def _add_csv_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--column", default="Close", help="price column (default: Close)")
    p.add_argument("--date-column", default="Date", help="ISO date column (default: Date)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vgallometry",
        description="Allometric scaling of spanning trees of visibility graphs.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="MaxST/MinST/RanST exponents of one series")
    p.add_argument("csv")
    _add_csv_options(p)
    p.add_argument("--ranst", type=int, default=runner.DEFAULT_RANST_COUNT)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weights", choices=("signed", "absolute", "linear"), default="signed")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("synth", help="write a Brownian or fractional Brownian series")
    p.add_argument("process", choices=("bm", "fbm"))
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--hurst", type=float)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--form", choices=("level", "log"), default="level")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("surrogate", help="write one surrogate of a series")
    p.add_argument("csv")
    _add_csv_options(p)
    p.add_argument("--kind", required=True, type=str.lower, choices=("surr1", "surr2", "surr3"))
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_surrogate)

    p = sub.add_parser("scan-length", help="exponents against series length")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--index", help="CSV of a long index to draw windows from")
    src.add_argument("--bm", action="store_true", help="fresh Brownian paths")
    _add_csv_options(p)
    p.add_argument("--lengths", type=_int_list)
    p.add_argument("--realizations", type=int, default=runner.DEFAULT_REALIZATIONS)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_scan_length)

    p = sub.add_parser("scan-hurst", help="exponents of fBm against the Hurst index")
    p.add_argument("--hursts", type=_float_list, default=list(runner.DEFAULT_HURSTS))
    p.add_argument("--length", type=int, default=runner.DEFAULT_HURST_LENGTH)
    p.add_argument("--realizations", type=int, default=runner.DEFAULT_REALIZATIONS)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_scan_hurst)

    p = sub.add_parser("compare-surrogates", help="original vs Surr1/2/3 vs Brownian paths")
    p.add_argument("csv")
    _add_csv_options(p)
    p.add_argument("--realizations", type=int, default=runner.DEFAULT_REALIZATIONS)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("export-ac", help="write the (A, C) point cloud of one tree")
    p.add_argument("csv")
    _add_csv_options(p)
    p.add_argument("--tree", choices=tuple(TREE_FLAGS), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weights", choices=("signed", "absolute", "linear"), default="signed")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_ac)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
