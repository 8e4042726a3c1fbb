"""
Core domain types for twig pattern queries.

Containment labels and their structural predicates, the query tree with
output marks, the split of a query into its core and constraining
subqueries, and the lexicographic order of label tuples.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence


class NodeLabel(NamedTuple):
    """Containment label [left:right, level] of one data node."""

    left: int
    right: int
    level: int

    def __str__(self) -> str:
        return f"[{self.left}:{self.right},{self.level}]"


def rel_ad(a: NodeLabel, d: NodeLabel) -> bool:
    """True iff `a` is a proper ancestor of `d`."""
    return a.left < d.left and d.right < a.right


def rel_pc(p: NodeLabel, c: NodeLabel) -> bool:
    """True iff `p` is the parent of `c`."""
    return p.left < c.left and c.right < p.right and p.level + 1 == c.level


def lex_compare(t1: Sequence[NodeLabel], t2: Sequence[NodeLabel]) -> int:
    """Compare two label tuples column by column on left values (-1, 0, 1)."""
    if len(t1) != len(t2):
        raise ValueError(f"Cannot compare tuples of arity {len(t1)} and {len(t2)}")
    for x, y in zip(t1, t2):
        if x.left != y.left:
            return -1 if x.left < y.left else 1
    return 0


class Axis(str, Enum):
    """Structural relationship on a query edge."""
    AD = "AD"
    PC = "PC"

    @property
    def token(self) -> str:
        return "//" if self is Axis.AD else "/"

    def holds(self, upper: NodeLabel, lower: NodeLabel) -> bool:
        return rel_ad(upper, lower) if self is Axis.AD else rel_pc(upper, lower)


@dataclass(frozen=True)
class QueryNode:
    """One node of a twig pattern; `axis` is the edge to its parent (None at the root)."""

    tag: str
    is_output: bool = False
    axis: Axis | None = None
    children: tuple["QueryNode", ...] = ()


@dataclass(frozen=True)
class TwigQuery:
    """
    A rooted ordered twig pattern.

    Nodes are addressed by their pre-order position. `origin` maps each
    position to the position of the same node in the query this one was
    projected from; column ids of output tuples use it.
    """

    root: QueryNode
    root_axis: Axis = Axis.AD
    origin: tuple[int, ...] | None = field(default=None, compare=True)

    # ------------------------------------------------------------------
    # Flattened structure
    # ------------------------------------------------------------------

    @cached_property
    def nodes(self) -> tuple[QueryNode, ...]:
        out: list[QueryNode] = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            out.append(node)
            stack.extend(reversed(node.children))
        return tuple(out)

    @cached_property
    def _links(self) -> tuple[tuple[int | None, ...], tuple[tuple[int, ...], ...]]:
        parent: list[int | None] = [None] * len(self.nodes)
        children: list[list[int]] = [[] for _ in self.nodes]
        position = 0

        def walk(node: QueryNode, up: int | None) -> None:
            nonlocal position
            me = position
            position += 1
            parent[me] = up
            if up is not None:
                children[up].append(me)
            for child in node.children:
                walk(child, me)

        walk(self.root, None)
        return tuple(parent), tuple(tuple(c) for c in children)

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def n_o(self) -> int:
        return len(self.output_ids)

    @cached_property
    def output_ids(self) -> tuple[int, ...]:
        return tuple(i for i, node in enumerate(self.nodes) if node.is_output)

    @cached_property
    def column_ids(self) -> tuple[int, ...]:
        return self.origin if self.origin is not None else tuple(range(self.n))

    def tag(self, i: int) -> str:
        return self.nodes[i].tag

    def is_output(self, i: int) -> bool:
        return self.nodes[i].is_output

    def parent(self, i: int) -> int | None:
        return self._links[0][i]

    def children(self, i: int) -> tuple[int, ...]:
        return self._links[1][i]

    def is_leaf(self, i: int) -> bool:
        return not self._links[1][i]

    def axis(self, i: int) -> Axis:
        """Edge axis from `i` to its parent; the root reports the virtual-root axis."""
        return self.root_axis if i == 0 else self.nodes[i].axis  # type: ignore[return-value]

    def path_to_root(self, i: int) -> list[int]:
        path = [i]
        while (p := self.parent(i)) is not None:
            path.append(p)
            i = p
        return path

    def lca(self, i: int, j: int) -> int:
        above = set(self.path_to_root(i))
        for k in self.path_to_root(j):
            if k in above:
                return k
        return 0

    def subtree(self, i: int) -> list[int]:
        out, stack = [], [i]
        while stack:
            k = stack.pop()
            out.append(k)
            stack.extend(self.children(k))
        return sorted(out)

    @cached_property
    def leaves(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.is_leaf(i))

    def edges(self) -> list[tuple[int, int, Axis]]:
        return [(self.parent(i), i, self.axis(i)) for i in range(1, self.n)]  # type: ignore[misc]

    # ------------------------------------------------------------------
    # Derived queries
    # ------------------------------------------------------------------

    def project(self, ids: Iterable[int], root_axis: Axis | None = None) -> "TwigQuery":
        """Induced subquery over a connected set of positions."""
        keep = set(ids)
        tops = [i for i in keep if self.parent(i) not in keep]
        if len(tops) != 1:
            raise ValueError(f"Positions {sorted(keep)} do not form a connected subtree")
        top = tops[0]

        def build(i: int, is_top: bool) -> QueryNode:
            node = self.nodes[i]
            return QueryNode(
                tag=node.tag,
                is_output=node.is_output,
                axis=None if is_top else node.axis,
                children=tuple(build(c, False) for c in self.children(i) if c in keep),
            )

        if root_axis is None:
            root_axis = self.axis(top) if top == 0 else Axis.AD
        columns = tuple(self.column_ids[i] for i in sorted(keep))
        return TwigQuery(build(top, True), root_axis, columns)

    def with_outputs(self, outputs: Iterable[int]) -> "TwigQuery":
        """Same tree with the output marks replaced."""
        marked = set(outputs)

        def build(i: int) -> QueryNode:
            node = self.nodes[i]
            return QueryNode(node.tag, i in marked, node.axis, tuple(build(c) for c in self.children(i)))

        return TwigQuery(build(0), self.root_axis, self.origin)

    def unsafe_output_lca(self) -> int | None:
        """Position of a non-output LCA of two output nodes, if any."""
        outputs = self.output_ids
        for x, i in enumerate(outputs):
            for j in outputs[x + 1:]:
                k = self.lca(i, j)
                if not self.is_output(k):
                    return k
        return None


def lca_closure(query: TwigQuery, ids: Iterable[int]) -> frozenset[int]:
    """Smallest superset of `ids` closed under pairwise lowest common ancestors."""
    closed = set(ids)
    changed = True
    while changed:
        changed = False
        current = sorted(closed)
        for x, i in enumerate(current):
            for j in current[x + 1:]:
                k = query.lca(i, j)
                if k not in closed:
                    closed.add(k)
                    changed = True
    return frozenset(closed)


# ============================================================================
# Query core and constraining subqueries
# ============================================================================

@dataclass(frozen=True)
class QueryDecomposition:
    """Core of a query plus the constraining subquery attached to each core node."""

    query: TwigQuery
    core_ids: frozenset[int]
    cons: dict[int, frozenset[int]]

    @cached_property
    def core_root(self) -> int:
        return min(self.core_ids)

    def core_children(self, q: int) -> tuple[int, ...]:
        return tuple(c for c in self.query.children(q) if c in self.core_ids)

    def core_child(self, q: int) -> int:
        kids = self.core_children(q)
        if len(kids) != 1:
            raise ValueError(f"Core node {q} has {len(kids)} core children")
        return kids[0]

    @cached_property
    def core(self) -> TwigQuery:
        return self.query.project(self.core_ids)

    def subquery(self, q: int) -> TwigQuery:
        """Constraining subquery of core node `q` as a standalone query."""
        return self.query.project(self.cons[q])

    def is_path(self) -> bool:
        return all(len(self.core_children(q)) <= 1 for q in self.core_ids)

    def reassemble(self) -> TwigQuery:
        """Glue the core and every constraining subquery back into one query."""
        parts = [self.core] + [self.subquery(q) for q in sorted(self.cons)]
        nodes: dict[int, QueryNode] = {}
        edges: dict[int, tuple[int, Axis]] = {}
        root_axis = Axis.AD
        for part in parts:
            ids = part.column_ids
            for pos, node in enumerate(part.nodes):
                nodes[ids[pos]] = node
                up = part.parent(pos)
                if up is not None:
                    edges[ids[pos]] = (ids[up], part.axis(pos))
                elif ids[pos] == 0:
                    root_axis = part.root_axis

        def build(i: int) -> QueryNode:
            kids = sorted(c for c, (p, _) in edges.items() if p == i)
            axis = edges[i][1] if i in edges else None
            node = nodes[i]
            return QueryNode(node.tag, node.is_output, axis, tuple(build(c) for c in kids))

        return TwigQuery(build(0), root_axis)


def decompose(query: TwigQuery) -> QueryDecomposition:
    """Split `query` into its core and per-core-node constraining subqueries."""
    outputs = query.output_ids
    if not outputs:
        raise ValueError("Query has no output node")

    top = outputs[0]
    for o in outputs[1:]:
        top = query.lca(top, o)

    core: set[int] = {top}
    for o in outputs:
        for k in query.path_to_root(o):
            core.add(k)
            if k == top:
                break

    cons: dict[int, frozenset[int]] = {}
    for q in sorted(core):
        members = {q}
        frontier = [q]
        while frontier:
            k = frontier.pop()
            neighbours = list(query.children(k))
            if (p := query.parent(k)) is not None:
                neighbours.append(p)
            for m in neighbours:
                if m not in core and m not in members:
                    members.add(m)
                    frontier.append(m)
        cons[q] = frozenset(members)

    return QueryDecomposition(query, frozenset(core), cons)
