"""Command-line surface: select, generate, transpose, bench.

Exit codes: 0 on success, 1 for user or data errors, 2 for violated
internal invariants.  ``--workers`` is the single-machine stand-in for
cluster nodes: it sets the size of the executor's worker pool.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from . import bench as bench_mod
from .data import (
    DEFAULT_CLASS_NAME,
    LAYOUT_ALTERNATIVE,
    LAYOUT_CONVENTIONAL,
    generate_synthetic,
    read_dataset,
    transpose,
)
from .errors import MrfsError
from .scoring import available_scores
from .selector import SelectionResult, select_alternative, select_conventional


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mrfs",
        description="Greedy minimum-redundancy / maximum-relevance feature selection "
        "over MapReduce-style jobs, for both data layouts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_select = sub.add_parser("select", help="run a feature selection")
    p_select.add_argument("--input", required=True, help="dataset file (CSV)")
    p_select.add_argument("--layout", choices=(LAYOUT_CONVENTIONAL, LAYOUT_ALTERNATIVE),
                          default=LAYOUT_CONVENTIONAL)
    p_select.add_argument("--class", dest="class_locator", default=DEFAULT_CLASS_NAME,
                          help="class column name/index (conventional) or row id/index (alternative)")
    p_select.add_argument("--num-features", type=int, required=True, metavar="L",
                          help="number of features to select")
    p_select.add_argument("--score", choices=available_scores(), default="mi")
    p_select.add_argument("--workers", type=int, default=1)
    p_select.add_argument("--partitions", type=int, default=None)
    p_select.add_argument("--output", default=None, help="also write the result to this file")
    p_select.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p_select.set_defaults(func=cmd_select)

    p_gen = sub.add_parser("generate", help="generate a synthetic benchmark dataset")
    p_gen.add_argument("--rows", type=int, required=True, help="number of observations")
    p_gen.add_argument("--cols", type=int, required=True, help="number of features (>= 8)")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--layout", choices=(LAYOUT_CONVENTIONAL, LAYOUT_ALTERNATIVE),
                       default=LAYOUT_CONVENTIONAL)
    p_gen.add_argument("--output", required=True)
    p_gen.add_argument("--class-name", default=DEFAULT_CLASS_NAME)
    p_gen.set_defaults(func=cmd_generate)

    p_tr = sub.add_parser("transpose", help="rewrite a dataset in the other layout")
    p_tr.add_argument("--input", required=True)
    p_tr.add_argument("--output", required=True)
    p_tr.add_argument("--layout", choices=(LAYOUT_CONVENTIONAL, LAYOUT_ALTERNATIVE),
                      default=LAYOUT_CONVENTIONAL, help="layout of the INPUT file")
    p_tr.add_argument("--class", dest="class_locator", default=DEFAULT_CLASS_NAME)
    p_tr.set_defaults(func=cmd_transpose)

    p_bench = sub.add_parser("bench", help="run a scalability sweep, emit CSV records")
    p_bench.add_argument("--sweep", choices=bench_mod.SWEEP_AXES, required=True)
    p_bench.add_argument("--values", required=True,
                         help="comma-separated axis values; k/m suffixes allowed (e.g. 100k,1m)")
    p_bench.add_argument("--rows", type=int, default=10_000)
    p_bench.add_argument("--cols", type=int, default=20)
    p_bench.add_argument("--num-features", type=int, default=5, metavar="L")
    p_bench.add_argument("--workers", type=int, default=1)
    p_bench.add_argument("--partitions", type=int, default=None)
    p_bench.add_argument("--layout", choices=(LAYOUT_CONVENTIONAL, LAYOUT_ALTERNATIVE),
                         default=LAYOUT_CONVENTIONAL)
    p_bench.add_argument("--score", choices=available_scores(), default="mi")
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--repetitions", type=int, default=3)
    p_bench.add_argument("--output", default=None, help="CSV file (default: stdout)")
    p_bench.set_defaults(func=cmd_bench)

    return parser


def _render_result(result: SelectionResult, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(result.as_dict(), indent=2) + "\n"
    if fmt == "csv":
        lines = ["rank,feature,score"]
        lines += [f"{f.iteration},{f.name},{f.score!r}" for f in result.features]
        return "\n".join(lines) + "\n"
    width = max([7] + [len(f.name) for f in result.features])
    lines = [f"{'rank':>4}  {'feature':<{width}}  score"]
    lines += [f"{f.iteration:>4}  {f.name:<{width}}  {f.score:.12g}" for f in result.features]
    return "\n".join(lines) + "\n"


def cmd_select(args) -> int:
    dataset = read_dataset(args.input, args.layout, args.class_locator)
    if args.layout == LAYOUT_CONVENTIONAL:
        result = select_conventional(
            dataset, args.num_features, score=args.score,
            workers=args.workers, partitions=args.partitions,
        )
    else:
        result = select_alternative(
            dataset, args.num_features, score=args.score,
            workers=args.workers, partitions=args.partitions,
        )
    rendered = _render_result(result, args.format)
    sys.stdout.write(rendered)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(rendered)
    return 0


def cmd_generate(args) -> int:
    generate_synthetic(
        args.rows, args.cols, args.seed, args.layout, args.output,
        class_name=args.class_name,
    )
    return 0


def cmd_transpose(args) -> int:
    transpose(args.input, args.output, args.layout, args.class_locator)
    return 0


def cmd_bench(args) -> int:
    values = bench_mod.parse_axis_values(args.values)
    cfg = bench_mod.BenchConfig(
        rows=args.rows,
        cols=args.cols,
        num_features=args.num_features,
        workers=args.workers,
        layout=args.layout,
        score=args.score,
        seed=args.seed,
        repetitions=args.repetitions,
        partitions=args.partitions,
    )
    out = open(args.output, "w", encoding="utf-8", newline="") if args.output else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(bench_mod.CSV_HEADER)
        # stream records so an aborted sweep leaves partial output behind
        bench_mod.run_sweep(
            args.sweep, values, cfg,
            on_record=lambda r: (writer.writerow(r.row()), out.flush())[0],
        )
    finally:
        if args.output:
            out.close()
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MrfsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # unexpected: treat as an internal failure
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
