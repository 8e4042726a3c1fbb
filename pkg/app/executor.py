"""
Plan execution with instrumentation.

Each PlanNode is opened as a generator; binary operators read their
inputs through Cursors that count advances. The root is drained to a
list and timed.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Iterator

from app import binjoin
from app.engine_config import get_config
from app.holjoin import HolisticTwigJoin
from app.ingest import InvertedIndex
from app.model import TwigQuery
from app.planner import OpKind, PlanNode
from app.stats import ExecStats
from app.streams import Cursor, Row, check_sorted, single_column

logger = logging.getLogger("tpq.exec")

_SEMI = {
    OpKind.SEMI_JOIN_ANC_AD: binjoin.semi_join_anc_ad,
    OpKind.SEMI_JOIN_DESC_AD: binjoin.semi_join_desc_ad,
    OpKind.SEMI_JOIN_ANC_PC: binjoin.semi_join_anc_pc,
    OpKind.SEMI_JOIN_DESC_PC: binjoin.semi_join_desc_pc,
}
_PARTIAL = {
    OpKind.STACK_TREE_ANC: binjoin.stack_tree_anc,
    OpKind.STACK_TREE_DESC: binjoin.stack_tree_desc,
    OpKind.STACK_TREE_ANC_SRT: binjoin.stack_tree_anc_srt,
}


@dataclass
class ExecResult:
    rows: list[Row]
    stats: ExecStats
    columns: tuple[int, ...]


def _holistic(plan: PlanNode, inputs: list[Cursor], stats: ExecStats) -> Iterator[Row]:
    yield from HolisticTwigJoin(plan.twig, inputs, stats).run()


def _project(rows: Iterator[Row], positions: list[int]) -> Iterator[Row]:
    for row in rows:
        yield tuple(row[p] for p in positions)


def _distinct(rows: Iterator[Row]) -> Iterator[Row]:
    previous = None
    for row in rows:
        if row != previous:
            yield row
        previous = row


def open_plan(plan: PlanNode, idx: InvertedIndex, stats: ExecStats, debug: bool = False) -> Iterator[Row]:
    """Generator over the output rows of `plan`."""
    kind = plan.kind
    if kind is OpKind.INDEX_SCAN:
        rows = single_column(idx.labels(plan.tag))
    else:
        opened = [open_plan(child, idx, stats, debug) for child in plan.children]
        if kind in _SEMI:
            rows = _SEMI[kind](Cursor(opened[0], stats), Cursor(opened[1], stats), stats)
        elif kind in _PARTIAL:
            rows = _PARTIAL[kind](Cursor(opened[0], stats), Cursor(opened[1], stats), plan.spec, stats)
        elif kind is OpKind.HOLISTIC_JOIN:
            rows = _holistic(plan, [Cursor(rows, stats) for rows in opened], stats)
        elif kind is OpKind.PROJECT:
            child = plan.children[0]
            positions = [child.columns.index(c) for c in plan.columns]
            rows = opened[0] if positions == list(range(child.arity)) else _project(opened[0], positions)
        elif kind is OpKind.DISTINCT:
            rows = _distinct(opened[0])
        else:
            raise ValueError(f"Unsupported operator {kind}")

    if debug:
        key = [plan.columns.index(c) for c in plan.sort_key]
        rows = check_sorted(rows, key, kind.value)
    return rows


def execute(plan: PlanNode, idx: InvertedIndex, debug_asserts: bool | None = None) -> ExecResult:
    """Drain `plan` over `idx`; returns rows and counters."""
    if debug_asserts is None:
        debug_asserts = get_config().debug_asserts
    stats = ExecStats()
    start = time.perf_counter_ns()
    rows = list(open_plan(plan, idx, stats, debug_asserts))
    stats.wall_ns = time.perf_counter_ns() - start
    stats.result_rows = len(rows)
    logger.debug(
        "Executed %s: %d rows, %d advances, %d stack ops",
        plan.kind.value, len(rows), stats.advances, stats.stack_ops,
    )
    return ExecResult(rows, stats, plan.columns)


def compute_selectivity(query: TwigQuery, rows: list[Row], idx: InvertedIndex) -> float:
    """Distinct result labels over the list sizes of the distinct output tags."""
    n_in = sum(idx.size(tag) for tag in {query.tag(i) for i in query.output_ids})
    if n_in == 0:
        return 0.0
    n_out = len({label for row in rows for label in row})
    return n_out / n_in


def compute_output_ratio(query: TwigQuery) -> float:
    return query.n_o / query.n


def stats_record(
    query_id: str,
    engine: str,
    stats: ExecStats,
    sigma: float,
    rho: float,
) -> dict[str, object]:
    """One stats CSV record."""
    return {
        "query_id": query_id,
        "engine": engine,
        "wall_ns": stats.wall_ns,
        "advances": stats.advances,
        "getnext_calls": stats.getnext_calls,
        "stack_ops": stats.stack_ops,
        "list_peak": stats.list_peak,
        "mu": stats.mu,
        "result_rows": stats.result_rows,
        "sigma": round(sigma, 6),
        "rho": round(rho, 6),
    }
