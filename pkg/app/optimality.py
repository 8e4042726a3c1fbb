"""
Static prediction of whether the binary-join plan of a query runs in
linear time and in space linear in the document depth.

A plan can only exceed those bounds through buffers that grow with
recursive data: PC filters whose ancestor side is recursive and lies off
the path to the constrained node, partial-joins whose ancestor input
nests, or a core that branches.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from app.ingest import DocumentStats
from app.model import Axis, TwigQuery, decompose


class Verdict(str, Enum):
    OPTIMAL = "optimal"
    NOT_GUARANTEED = "not-guaranteed"


class Condition(str, Enum):
    PC_UNDER_RECURSIVE_TAG = "pc-filter-under-recursive-tag"
    CONSTRAINT_PC_UNDER_RECURSIVE_TAG = "constraining-subquery-pc-under-recursive-tag"
    CORE_NOT_PATH = "core-not-a-path"
    CORE_TAG_RECURSIVE = "core-tag-recursive"


@dataclass(frozen=True)
class Violation:
    condition: Condition
    detail: str

    def __str__(self) -> str:
        return f"{self.condition.value}: {self.detail}"


@dataclass(frozen=True)
class OptimalityReport:
    verdict: Verdict
    violated_conditions: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def optimal(self) -> bool:
        return self.verdict is Verdict.OPTIMAL

    def format(self) -> str:
        lines = [f"verdict: {self.verdict.value}"]
        lines.extend(f"  violated {v}" for v in self.violated_conditions)
        return "\n".join(lines)


def _off_path_pc(
    query: TwigQuery,
    members: set[int],
    path: set[int],
    stats: DocumentStats,
    condition: Condition,
) -> list[Violation]:
    found = []
    for c in sorted(members):
        p = query.parent(c)
        if p is None or p not in members or c in path:
            continue
        if query.axis(c) is Axis.PC and stats.is_recursive(query.tag(p)):
            found.append(
                Violation(condition, f"{query.tag(p)}/{query.tag(c)} with recursive {query.tag(p)}")
            )
    return found


def predict_optimality(query: TwigQuery, stats: DocumentStats) -> OptimalityReport:
    violations: list[Violation] = []
    if query.n_o == 1:
        target = query.output_ids[0]
        violations += _off_path_pc(
            query,
            set(range(query.n)),
            set(query.path_to_root(target)),
            stats,
            Condition.PC_UNDER_RECURSIVE_TAG,
        )
    else:
        dec = decompose(query)
        for q, members in sorted(dec.cons.items()):
            path = set(query.path_to_root(q)) if q == dec.core_root else {q}
            violations += _off_path_pc(
                query, set(members), path, stats, Condition.CONSTRAINT_PC_UNDER_RECURSIVE_TAG
            )
        branching = [q for q in sorted(dec.core_ids) if len(dec.core_children(q)) > 1]
        for q in branching:
            violations.append(
                Violation(Condition.CORE_NOT_PATH, f"core node {query.tag(q)} has several core children")
            )
        for q in sorted(dec.core_ids):
            if stats.is_recursive(query.tag(q)):
                violations.append(
                    Violation(Condition.CORE_TAG_RECURSIVE, f"core tag {query.tag(q)} is recursive")
                )

    verdict = Verdict.NOT_GUARANTEED if violations else Verdict.OPTIMAL
    return OptimalityReport(verdict, tuple(violations))
