"""
Command-line interface.

Usage:
    tpq index doc.xml -o data/document.idx
    tpq query data/document.idx -q '//$a//$b' --engine bj --stats
    tpq bench data/document.idx --queries queries.txt --out bench.csv
    tpq gendoc --shape demo --n 1000 -o demo.xml
    tpq analyze data/document.idx -q '//$a/$b'

Result rows go to stdout as tab-separated `[left:right,level]` labels;
status lines go to stderr.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import pandas as pd

from app.config import BENCH_DIR, INDEX_PATH, ensure_data_dir
from app.cost_model import resolve_engine
from app.engine_config import STATISTICS_PROVIDERS, EngineConfig, get_config, load_config
from app.errors import TPQError, format_exception_for_user, invalid_generator_size
from app.executor import compute_output_ratio, compute_selectivity, stats_record
from app.generators import SHAPES, gen_doc
from app.ingest import load_index, parse_file, save_index
from app.model import decompose
from app.optimality import predict_optimality
from app.planner import Engine, build_plan, explain
from app.query_parser import parse_tpq, render_tpq
from app.streams import Row
from app.workload import (
    ENGINE_NAMES,
    build_cases,
    evaluate,
    load_queries,
    parse_engine,
    run_bench,
    write_bench_csv,
)

logger = logging.getLogger("tpq")


def _status(message: str) -> None:
    print(message, file=sys.stderr)


def format_row(row: Row) -> str:
    return "\t".join(str(label) for label in row)


# ============================================================================
# Commands
# ============================================================================

def cmd_index(args: argparse.Namespace, config: EngineConfig) -> int:
    _status(f"📥 Parsing {args.xml}...")
    idx = parse_file(args.xml)
    out = Path(args.out)
    if out == INDEX_PATH:
        ensure_data_dir()
    save_index(idx, out)
    _status(f"✅ Indexed {args.xml} -> {out}")
    print(idx.stats().summary())
    return 0


def cmd_query(args: argparse.Namespace, config: EngineConfig) -> int:
    query = parse_tpq(args.q)
    engine = parse_engine(args.engine)
    idx = load_index(args.index)

    if args.explain:
        if engine is Engine.ORACLE:
            _status("💡 The oracle engine has no plan")
            return 0
        if engine is Engine.CBJ:
            engine = resolve_engine(query, idx, config)
            _status(f"💡 cbj resolved to {engine.value}")
        print(explain(build_plan(query, engine)))
        return 0

    result, used = evaluate(query, idx, engine, config)
    if used is not engine:
        _status(f"💡 cbj resolved to {used.value}")
    for row in result.rows:
        print(format_row(row))

    if args.stats:
        sigma = compute_selectivity(query, result.rows, idx)
        record = stats_record("Q1", used.value, result.stats, sigma, compute_output_ratio(query))
        print(pd.DataFrame([record]).to_csv(index=False), end="")
    return 0


def cmd_bench(args: argparse.Namespace, config: EngineConfig) -> int:
    idx = load_index(args.index)
    engines = tuple(e.strip() for e in args.engines.split(",")) if args.engines else config.bench_engines
    repetitions = args.repeat or config.bench_repetitions
    seed = config.seed if args.seed is None else args.seed

    entries = load_queries(args.queries)
    cases = build_cases(entries, engines, repetitions, args.randomize_outputs, seed)
    _status(f"📥 {len(cases)} cases x {len(engines)} engines")

    frame = run_bench(cases, idx, config, workers=args.workers, show_progress=not args.quiet)
    out = write_bench_csv(frame, args.out or BENCH_DIR / f"{Path(args.queries).stem}.csv")
    _status(f"✅ Wrote {len(frame)} rows to {out}")
    return 0


def cmd_gendoc(args: argparse.Namespace, config: EngineConfig) -> int:
    if args.n < 1:
        raise invalid_generator_size(args.n)
    seed = config.seed if args.seed is None else args.seed
    text = gen_doc(args.shape, args.n, seed)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        _status(f"✅ Wrote {args.shape} document (n={args.n}) to {args.out}")
    else:
        print(text)
    return 0


def cmd_analyze(args: argparse.Namespace, config: EngineConfig) -> int:
    query = parse_tpq(args.q)
    idx = load_index(args.index)
    dec = decompose(query)

    print("core: " + ", ".join(query.tag(q) for q in sorted(dec.core_ids)))
    print("core query: " + render_tpq(dec.core))
    for q in sorted(dec.cons):
        print(f"constraining({query.tag(q)}): {render_tpq(dec.subquery(q))}")
    print(predict_optimality(query, idx.stats()).format())
    return 0


COMMANDS = {
    "index": cmd_index,
    "query": cmd_query,
    "bench": cmd_bench,
    "gendoc": cmd_gendoc,
    "analyze": cmd_analyze,
}


# ============================================================================
# Argument parsing
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tpq", description="Twig pattern query engine")
    parser.add_argument("--config", type=Path, help="Path to a tpq_config.yaml")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log at INFO level")
    parser.add_argument("--debug-asserts", action="store_true", help="Check operator sort order")
    parser.add_argument(
        "--provider", choices=STATISTICS_PROVIDERS, help="Statistics provider for cbj"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="Label an XML document and save its index")
    p.add_argument("xml", type=Path)
    p.add_argument("-o", "--out", type=Path, default=INDEX_PATH)

    p = sub.add_parser("query", help="Evaluate a twig pattern")
    p.add_argument("index", type=Path)
    p.add_argument("-q", required=True, help="Pattern, e.g. //$a[./b]//$c")
    p.add_argument("--engine", default="bj", help=f"One of: {', '.join(ENGINE_NAMES)}")
    p.add_argument("--stats", action="store_true", help="Append the stats CSV row")
    p.add_argument("--explain", action="store_true", help="Print the plan without executing")

    p = sub.add_parser("bench", help="Run a queries file under several engines")
    p.add_argument("index", type=Path)
    p.add_argument("--queries", type=Path, required=True)
    p.add_argument("--out", type=Path, help="CSV path (default: data/bench/<queries name>.csv)")
    p.add_argument("--engines", help="Comma-separated engines (default from config)")
    p.add_argument("--repeat", type=int, help="Repetitions per case")
    p.add_argument("--workers", type=int, help="Worker threads")
    p.add_argument("--randomize-outputs", type=int, default=0, metavar="K")
    p.add_argument("--seed", type=int)
    p.add_argument("--quiet", action="store_true", help="No progress bar")

    p = sub.add_parser("gendoc", help="Write a synthetic XML document")
    p.add_argument("--shape", choices=SHAPES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--out", type=Path)

    p = sub.add_parser("analyze", help="Show decomposition and optimality prediction")
    p.add_argument("index", type=Path)
    p.add_argument("-q", required=True)
    return parser


def _load(args: argparse.Namespace) -> EngineConfig:
    base = load_config(args.config) if args.config else get_config()
    return base.with_overrides(
        statistics_provider=args.provider,
        debug_asserts=True if args.debug_asserts else None,
        bench_workers=getattr(args, "workers", None),
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _load(args)
        level = logging.INFO if args.verbose else getattr(logging, config.log_level, logging.WARNING)
        logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args, config)
    except TPQError as e:
        _status(e.format_for_ui())
        return 1
    except OSError as e:
        _status(format_exception_for_user(e))
        return 1


if __name__ == "__main__":
    sys.exit(main())
