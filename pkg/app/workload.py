"""
Query evaluation front door and the benchmark harness.

`evaluate` runs one query under any engine, resolving `cbj` through the
cost model and `oracle` through the brute-force evaluator. The bench
runner expands a queries file into cases (optionally with randomized
output nodes), runs them on a thread pool and writes one stats row per
case and engine.
"""
from __future__ import annotations

import logging
import random
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path

import pandas as pd
from tqdm import tqdm

from app.cost_model import resolve_engine
from app.engine_config import EngineConfig, get_config
from app.errors import ConfigurationError, TPQError, log_error_with_context, unknown_engine
from app.executor import ExecResult, compute_output_ratio, compute_selectivity, execute, stats_record
from app.ingest import InvertedIndex
from app.model import TwigQuery, lca_closure
from app.oracle import brute_force
from app.planner import Engine, build_plan
from app.query_parser import parse_tpq
from app.stats import STATS_COLUMNS, ExecStats

logger = logging.getLogger("tpq.bench")

ENGINE_NAMES = [e.value for e in Engine]


def parse_engine(name: str) -> Engine:
    try:
        return Engine(name.strip().lower())
    except ValueError:
        raise unknown_engine(name, ENGINE_NAMES) from None


# ============================================================================
# Single query evaluation
# ============================================================================

def evaluate(
    query: TwigQuery,
    idx: InvertedIndex,
    engine: Engine | str,
    config: EngineConfig | None = None,
) -> tuple[ExecResult, Engine]:
    """Run `query` under `engine`; returns the result and the engine actually used."""
    config = config or get_config()
    engine = parse_engine(engine) if isinstance(engine, str) else engine

    if engine is Engine.ORACLE:
        stats = ExecStats()
        start = time.perf_counter_ns()
        rows = brute_force(query, idx)
        stats.wall_ns = time.perf_counter_ns() - start
        stats.result_rows = len(rows)
        columns = tuple(query.column_ids[i] for i in query.output_ids)
        return ExecResult(rows, stats, columns), engine

    if engine is Engine.CBJ:
        engine = resolve_engine(query, idx, config)
    plan = build_plan(query, engine)
    return execute(plan, idx, config.debug_asserts), engine


# ============================================================================
# Queries file and output randomization
# ============================================================================

@dataclass(frozen=True)
class BenchCase:
    query_id: str
    pattern: str
    query: TwigQuery
    engines: tuple[str, ...]
    repetitions: int = 1

    def __post_init__(self):
        if self.repetitions < 1:
            raise ConfigurationError(
                message=f"repetitions must be >= 1, got {self.repetitions}",
                suggestion="Pass --repeat 1 or more",
            )


def load_queries(path: str | Path) -> list[tuple[str, str]]:
    """(query id, pattern) pairs; blank lines and `#` comments are skipped."""
    entries: list[tuple[str, str]] = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            text = line.split("#", 1)[0].strip()
            if text:
                entries.append((f"Q{len(entries) + 1}", text))
    return entries


def _grow_connected(query: TwigQuery, size: int, rng: random.Random) -> frozenset[int]:
    chosen = {rng.randrange(query.n)}
    while len(chosen) < size:
        neighbours = {c for i in chosen for c in query.children(i)}
        neighbours |= {p for i in chosen if (p := query.parent(i)) is not None}
        frontier = sorted(neighbours - chosen)
        chosen.add(rng.choice(frontier))
    return frozenset(chosen)


def random_output_set(query: TwigQuery, size: int, rng: random.Random, attempts: int = 64) -> frozenset[int]:
    """A random LCA-closed set of exactly `size` query positions."""
    for _ in range(attempts):
        closed = lca_closure(query, rng.sample(range(query.n), size))
        if len(closed) == size:
            return closed
    # connected sets are closed under LCA
    return _grow_connected(query, size, rng)


def randomize_outputs(query: TwigQuery, k: int, rng: random.Random) -> list[TwigQuery]:
    """`k` variants of `query`, each with a different number of output nodes."""
    k = min(k, query.n)
    counts = sorted(rng.sample(range(1, query.n + 1), k))
    return [query.with_outputs(random_output_set(query, m, rng)) for m in counts]


def build_cases(
    entries: list[tuple[str, str]],
    engines: tuple[str, ...],
    repetitions: int = 1,
    randomize: int = 0,
    seed: int = 7,
) -> list[BenchCase]:
    """Expand queries-file entries into bench cases."""
    for name in engines:
        parse_engine(name)
    cases: list[BenchCase] = []
    for query_id, pattern in entries:
        if randomize > 0:
            base = parse_tpq(pattern, require_output=False)
            rng = random.Random(f"{seed}:{query_id}")
            for variant in randomize_outputs(base, randomize, rng):
                cases.append(
                    BenchCase(f"{query_id}-o{variant.n_o}", pattern, variant, engines, repetitions)
                )
        else:
            cases.append(BenchCase(query_id, pattern, parse_tpq(pattern), engines, repetitions))
    return cases


# ============================================================================
# Runner
# ============================================================================

def run_case(case: BenchCase, idx: InvertedIndex, config: EngineConfig) -> list[dict[str, object]]:
    """One stats record per engine; wall time is the best over repetitions."""
    records = []
    rho = compute_output_ratio(case.query)
    for name in case.engines:
        best: ExecResult | None = None
        for _ in range(case.repetitions):
            result, _used = evaluate(case.query, idx, name, config)
            if best is None or result.stats.wall_ns < best.stats.wall_ns:
                best = result
        sigma = compute_selectivity(case.query, best.rows, idx)
        records.append(stats_record(case.query_id, name, best.stats, sigma, rho))
    return records


def run_bench(
    cases: list[BenchCase],
    idx: InvertedIndex,
    config: EngineConfig | None = None,
    workers: int | None = None,
    show_progress: bool = True,
) -> pd.DataFrame:
    """Run all cases; rows come back ordered by case then engine."""
    config = config or get_config()
    workers = workers or config.bench_workers
    by_case: dict[int, list[dict[str, object]]] = {}
    failures = 0

    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {
            executor.submit(run_case, case, idx, config): position
            for position, case in enumerate(cases)
        }
        done = as_completed(futures)
        if show_progress and len(cases) > 1:
            done = tqdm(done, total=len(cases), desc="Benchmarking", unit="case", ncols=80)
        for future in done:
            position = futures[future]
            try:
                by_case[position] = future.result()
            except TPQError as e:
                failures += 1
                log_error_with_context(e, f"Bench case {cases[position].query_id}", logger)

    if failures:
        logger.warning("%d of %d bench cases failed", failures, len(cases))
    records = [record for position in sorted(by_case) for record in by_case[position]]
    return pd.DataFrame(records, columns=list(STATS_COLUMNS))


def write_bench_csv(frame: pd.DataFrame, out: str | Path) -> Path:
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(out, index=False)
    logger.info("Wrote %d bench rows to %s", len(frame), out)
    return out
