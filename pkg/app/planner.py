"""
Fully-pipelined plan construction.

build_plan_cons turns a constraining subquery into a chain of semi-joins
producing the candidates of one core node; build_plan_core stitches the
core together with partial-joins so that the root emits output tuples
already sorted in output-column order. build_plan dispatches between the
binary-join (BJ), holistic (HJ) and combined (CJ) engines.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum

from app.binjoin import JoinSpec
from app.ingest import DOCUMENT_ROOT
from app.model import Axis, QueryDecomposition, TwigQuery, decompose

logger = logging.getLogger("tpq.planner")

ROOT_COLUMN = -1


class Engine(str, Enum):
    BJ = "bj"
    HJ = "hj"
    CJ = "cj"
    CBJ = "cbj"
    ORACLE = "oracle"


class OpKind(str, Enum):
    INDEX_SCAN = "IndexScan"
    SEMI_JOIN_ANC_AD = "SemiJoinAncAD"
    SEMI_JOIN_DESC_AD = "SemiJoinDescAD"
    SEMI_JOIN_ANC_PC = "SemiJoinAncPC"
    SEMI_JOIN_DESC_PC = "SemiJoinDescPC"
    STACK_TREE_ANC = "StackTreeAnc"
    STACK_TREE_DESC = "StackTreeDesc"
    STACK_TREE_ANC_SRT = "StackTreeAncSrt"
    HOLISTIC_JOIN = "HolisticJoin"
    PROJECT = "Project"
    DISTINCT = "Distinct"


SEMI_JOINS = {
    OpKind.SEMI_JOIN_ANC_AD,
    OpKind.SEMI_JOIN_DESC_AD,
    OpKind.SEMI_JOIN_ANC_PC,
    OpKind.SEMI_JOIN_DESC_PC,
}
PARTIAL_JOINS = {OpKind.STACK_TREE_ANC, OpKind.STACK_TREE_DESC, OpKind.STACK_TREE_ANC_SRT}
STATEFUL = PARTIAL_JOINS | {OpKind.SEMI_JOIN_ANC_PC, OpKind.SEMI_JOIN_DESC_PC, OpKind.HOLISTIC_JOIN}


@dataclass(frozen=True)
class PlanNode:
    """
    One operator of a plan.

    `columns` are query-node ids in emitted order (ROOT_COLUMN for the
    virtual document root); `sort_key` is the column sequence the output
    is guaranteed to be sorted by.
    """

    kind: OpKind
    columns: tuple[int, ...]
    sort_key: tuple[int, ...]
    names: tuple[str, ...]
    children: tuple["PlanNode", ...] = ()
    spec: JoinSpec | None = None
    tag: str | None = None
    twig: TwigQuery | None = None

    @property
    def arity(self) -> int:
        return len(self.columns)

    def name_of(self, column: int) -> str:
        return self.names[self.columns.index(column)]

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()


def column_names(query: TwigQuery) -> dict[int, str]:
    """Display name per column id: the tag, suffixed with the id when tags repeat."""
    counts = Counter(query.tag(i) for i in range(query.n))
    names = {ROOT_COLUMN: DOCUMENT_ROOT}
    for i in range(query.n):
        tag = query.tag(i)
        column = query.column_ids[i]
        names[column] = tag if counts[tag] == 1 else f"{tag}#{column}"
    return names


# ============================================================================
# Plan node constructors
# ============================================================================

def _scan(query: TwigQuery, q: int) -> PlanNode:
    column = query.column_ids[q]
    return PlanNode(
        OpKind.INDEX_SCAN,
        (column,),
        (column,),
        (column_names(query)[column],),
        tag=query.tag(q),
    )


def _root_scan() -> PlanNode:
    return PlanNode(
        OpKind.INDEX_SCAN, (ROOT_COLUMN,), (ROOT_COLUMN,), (DOCUMENT_ROOT,), tag=DOCUMENT_ROOT
    )


def _semi(kind: OpKind, ta: PlanNode, td: PlanNode) -> PlanNode:
    kept = ta if kind in (OpKind.SEMI_JOIN_ANC_AD, OpKind.SEMI_JOIN_ANC_PC) else td
    return PlanNode(kind, kept.columns, kept.sort_key, kept.names, (ta, td))


def _covers(plan: PlanNode) -> bool:
    return set(plan.sort_key) == set(plan.columns)


def _partial(kind: OpKind, ta: PlanNode, td: PlanNode, spec: JoinSpec) -> PlanNode:
    columns = tuple(ta.columns[x] for x in spec.kept_a) + tuple(td.columns[x] for x in spec.kept_d)
    names = tuple(ta.names[x] for x in spec.kept_a) + tuple(td.names[x] for x in spec.kept_d)
    first, second = (td, ta) if kind is OpKind.STACK_TREE_DESC else (ta, td)
    combined = first.sort_key + (second.sort_key if _covers(first) else ())
    key: list[int] = []
    for column in combined:
        if column not in columns:
            break
        key.append(column)
    return PlanNode(kind, columns, tuple(key), names, (ta, td), spec=spec)


def _ones(n: int) -> tuple[bool, ...]:
    return (True,) * n


# ============================================================================
# Constraining subqueries
# ============================================================================

def build_plan_cons(dec: QueryDecomposition, q: int) -> PlanNode:
    """Semi-join plan emitting the candidates of core node `q` in document order."""
    return _build_cons(dec.query, q, None, dec.cons[q])


def _build_cons(query: TwigQuery, q: int, came_from: int | None, members: frozenset[int]) -> PlanNode:
    plan = _scan(query, q)
    for c in query.children(q):
        if c == came_from or c not in members:
            continue
        sub = _build_cons(query, c, q, members)
        kind = OpKind.SEMI_JOIN_ANC_PC if query.axis(c) is Axis.PC else OpKind.SEMI_JOIN_ANC_AD
        plan = _semi(kind, plan, sub)

    p = query.parent(q)
    if p is not None and p != came_from and p in members:
        sub = _build_cons(query, p, q, members)
        kind = OpKind.SEMI_JOIN_DESC_PC if query.axis(q) is Axis.PC else OpKind.SEMI_JOIN_DESC_AD
        plan = _semi(kind, sub, plan)
    elif p is None and query.root_axis is Axis.PC:
        plan = _semi(OpKind.SEMI_JOIN_DESC_PC, _root_scan(), plan)
    return plan


# ============================================================================
# Query core
# ============================================================================

def build_plan_core(dec: QueryDecomposition, q: int) -> PlanNode:
    """Partial-join plan for the core subtree rooted at output node `q`."""
    query = dec.query
    plan = build_plan_cons(dec, q)
    for c in dec.core_children(q):
        if query.is_output(c):
            sub = build_plan_core(dec, c)
            spec = JoinSpec(_ones(plan.arity), _ones(sub.arity), 0, 0, query.axis(c))
            plan = _partial(OpKind.STACK_TREE_ANC, plan, sub, spec)
            continue

        chain = build_plan_cons(dec, c)
        i = 0
        d = c
        while not query.is_output(d):
            d = dec.core_child(d)
            step = build_plan_cons(dec, d) if not query.is_output(d) else build_plan_core(dec, d)
            mask_a = (True,) + (False,) * (chain.arity - 1)
            spec = JoinSpec(mask_a, _ones(step.arity), i, 0, query.axis(d))
            chain = _partial(OpKind.STACK_TREE_DESC, chain, step, spec)
            i = 1
        spec = JoinSpec(_ones(plan.arity), (False,) + _ones(chain.arity - 1), 0, 1, query.axis(c), k=0)
        plan = _partial(OpKind.STACK_TREE_ANC_SRT, plan, chain, spec)
    return plan


# ============================================================================
# Engines
# ============================================================================

def _finish(plan: PlanNode, query: TwigQuery) -> PlanNode:
    outputs = tuple(query.column_ids[i] for i in query.output_ids)
    names = tuple(plan.name_of(c) for c in outputs)
    project = PlanNode(OpKind.PROJECT, outputs, outputs, names, (plan,))
    return PlanNode(OpKind.DISTINCT, outputs, outputs, names, (project,))


def _holistic(twig: TwigQuery, inputs: list[PlanNode]) -> PlanNode:
    outputs = tuple(twig.column_ids[i] for i in twig.output_ids)
    names = column_names(twig)
    return PlanNode(
        OpKind.HOLISTIC_JOIN,
        outputs,
        outputs,
        tuple(names[c] for c in outputs),
        tuple(inputs),
        twig=twig,
    )


def build_plan(query: TwigQuery, engine: Engine | str = Engine.BJ) -> PlanNode:
    """Plan for `query` under one of the bj, hj or cj engines."""
    engine = Engine(engine)
    if engine is Engine.HJ:
        inputs = [_scan(query, i) for i in range(query.n)]
        if query.root_axis is Axis.PC:
            inputs[0] = _semi(OpKind.SEMI_JOIN_DESC_PC, _root_scan(), inputs[0])
        plan = _holistic(query, inputs)
    else:
        dec = decompose(query)
        if engine is Engine.BJ or len(dec.core_ids) == 1:
            plan = build_plan_core(dec, dec.core_root)
        elif engine is Engine.CJ:
            inputs = [build_plan_cons(dec, q) for q in sorted(dec.core_ids)]
            plan = _holistic(dec.core, inputs)
        else:
            raise ValueError(f"Engine {engine.value} has no static plan")
    logger.debug("Built %s plan for %d-node query", engine.value, query.n)
    return _finish(plan, query)


def stateful_operator_count(plan: PlanNode) -> int:
    return sum(1 for node in plan.walk() if node.kind in STATEFUL)


# ============================================================================
# Fully-pipelined property
# ============================================================================

def verify_pipelined(plan: PlanNode) -> list[str]:
    """Sort-order mismatches between each operator and its inputs ([] when FP)."""
    problems: list[str] = []
    for node in plan.walk():
        for child, column in _required_leads(node):
            if not child.sort_key or child.sort_key[0] != column:
                problems.append(
                    f"{node.kind.value} needs input sorted by {column}, got {child.sort_key}"
                )
        if node.kind is OpKind.DISTINCT and not _covers(node.children[0]):
            problems.append("Distinct input is not sorted on all of its columns")
        if node.kind is OpKind.PROJECT and node.children[0].sort_key[: node.arity] != node.columns:
            problems.append(f"Project keeps {node.columns} but input is sorted by {node.children[0].sort_key}")
    if plan.sort_key != plan.columns:
        problems.append(f"root sorted by {plan.sort_key}, expected {plan.columns}")
    return problems


def _required_leads(node: PlanNode) -> list[tuple[PlanNode, int]]:
    if node.kind in SEMI_JOINS or node.kind is OpKind.HOLISTIC_JOIN:
        return [(child, child.columns[0]) for child in node.children]
    if node.kind in PARTIAL_JOINS:
        ta, td = node.children
        return [(ta, ta.columns[node.spec.i]), (td, td.columns[node.spec.j])]
    return []


# ============================================================================
# Explain
# ============================================================================

def _mask(bits: tuple[bool, ...]) -> str:
    return "".join("1" if b else "0" for b in bits)


def _describe(node: PlanNode) -> str:
    if node.kind is OpKind.INDEX_SCAN:
        return f"IS({node.tag})"
    head = node.kind.value
    if node.spec is not None:
        s = node.spec
        params = [_mask(s.mask_a), _mask(s.mask_d), str(s.i + 1), str(s.j + 1), s.axis.value]
        if s.k is not None:
            params.append(str(s.k + 1))
        head += "[" + ",".join(params) + "]"
    names = dict(zip(node.columns, node.names))
    head += " <" + ",".join(node.names) + ">"
    head += " sort(" + ",".join(names[c] for c in node.sort_key) + ")"
    return head


def explain(plan: PlanNode) -> str:
    """Indented operator tree, one operator per line."""
    lines: list[str] = []

    def render(node: PlanNode, depth: int) -> None:
        lines.append("  " * depth + _describe(node))
        for child in node.children:
            render(child, depth + 1)

    render(plan, 0)
    return "\n".join(lines)
