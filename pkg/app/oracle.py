"""
Brute-force evaluator used as ground truth in tests.

Backtracks over query nodes in pre-order, restricting each node's
candidates to the label range of its bound parent.
"""
from __future__ import annotations

from bisect import bisect_left, bisect_right

from app.ingest import InvertedIndex
from app.model import NodeLabel, TwigQuery
from app.streams import Row


def complete_matches(query: TwigQuery, idx: InvertedIndex) -> list[tuple[NodeLabel, ...]]:
    """Every assignment of one label per query node satisfying all edges."""
    lists = [idx.labels(query.tag(i)) for i in range(query.n)]
    lefts = [[label.left for label in labels] for labels in lists]
    root = idx.document_root
    binding: list[NodeLabel | None] = [None] * query.n
    matches: list[tuple[NodeLabel, ...]] = []

    def candidates(i: int) -> list[NodeLabel]:
        p = query.parent(i)
        upper = root if p is None else binding[p]
        lo = bisect_right(lefts[i], upper.left)
        hi = bisect_left(lefts[i], upper.right)
        axis = query.axis(i)
        return [x for x in lists[i][lo:hi] if axis.holds(upper, x)]

    def assign(i: int) -> None:
        if i == query.n:
            matches.append(tuple(binding))  # type: ignore[arg-type]
            return
        for label in candidates(i):
            binding[i] = label
            assign(i + 1)
        binding[i] = None

    assign(0)
    return matches


def brute_force(query: TwigQuery, idx: InvertedIndex) -> list[Row]:
    """Sorted, distinct output tuples of `query` over `idx`."""
    outputs = query.output_ids
    rows = {tuple(match[i] for i in outputs) for match in complete_matches(query, idx)}
    return sorted(rows, key=lambda row: tuple(label.left for label in row))


def participating_labels(query: TwigQuery, idx: InvertedIndex) -> set[tuple[int, NodeLabel]]:
    """(query position, label) pairs that occur in at least one complete match."""
    return {(i, label) for match in complete_matches(query, idx) for i, label in enumerate(match)}


def count_complete_matches(query: TwigQuery, idx: InvertedIndex) -> int:
    """Number of complete matches, counted bottom-up without enumerating them."""
    lists = [idx.labels(query.tag(i)) for i in range(query.n)]
    counts: list[list[int]] = [[] for _ in range(query.n)]
    for i in reversed(range(query.n)):
        for x in lists[i]:
            total = 1
            for c in query.children(i):
                axis = query.axis(c)
                total *= sum(k for y, k in zip(lists[c], counts[c]) if axis.holds(x, y))
                if not total:
                    break
            counts[i].append(total)
    root = idx.document_root
    return sum(k for x, k in zip(lists[0], counts[0]) if query.root_axis.holds(root, x))
