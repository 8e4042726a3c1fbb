"""
Holistic twig join in the TwigStack style.

One stream per query node, one stack per query node whose entries link
to the parent stack's top at push time. Root-to-leaf path solutions are
enumerated when a leaf label is pushed (PC edges are checked there) and
merged into complete matches with pandas once all streams are consumed.
"""
from __future__ import annotations

import logging
import math

import numpy as np
import pandas as pd

from app.model import Axis, NodeLabel, TwigQuery
from app.stats import ExecStats
from app.streams import Cursor, Row

logger = logging.getLogger("tpq.exec")


class HolisticTwigJoin:
    def __init__(
        self,
        twig: TwigQuery,
        inputs: list[Cursor],
        stats: ExecStats,
        trace: bool = False,
    ) -> None:
        if len(inputs) != twig.n:
            raise ValueError(f"Expected {twig.n} input streams, got {len(inputs)}")
        self.twig = twig
        self.cursors = inputs
        self.stats = stats
        self.stacks: list[list[tuple[NodeLabel, int]]] = [[] for _ in range(twig.n)]
        self.leaves_under = [
            tuple(x for x in twig.subtree(q) if twig.is_leaf(x)) for q in range(twig.n)
        ]
        self.path_columns = {
            leaf: list(reversed(twig.path_to_root(leaf))) for leaf in twig.leaves
        }
        self.solutions: dict[int, list[tuple[int, ...]]] = {leaf: [] for leaf in twig.leaves}
        self.labels: dict[int, NodeLabel] = {}
        self.pushed: list[tuple[int, NodeLabel]] | None = [] if trace else None

    # ------------------------------------------------------------------
    # Stream heads
    # ------------------------------------------------------------------

    def _left(self, q: int) -> float:
        cursor = self.cursors[q]
        return math.inf if cursor.finished else cursor.current[0].left

    def _right(self, q: int) -> float:
        cursor = self.cursors[q]
        return math.inf if cursor.finished else cursor.current[0].right

    def _end(self, q: int) -> bool:
        return all(self.cursors[leaf].finished for leaf in self.leaves_under[q])

    def get_next(self, q: int) -> int:
        """Query node in q's subtree whose head is next to process."""
        self.stats.getnext_calls += 1
        kids = self.twig.children(q)
        if not kids:
            return q

        live = [c for c in kids if not self._end(c)]
        if len(live) < len(kids):
            # a branch is exhausted, so no later head of q can root a match
            self.cursors[q].exhaust()
        for c in live:
            found = self.get_next(c)
            if found != c:
                return found

        n_min = min(live, key=self._left)
        n_max = max(live, key=self._left)
        cursor = self.cursors[q]
        while not cursor.finished and self._right(q) < self._left(n_max):
            cursor.advance()
        if self._left(q) < self._left(n_min):
            return q
        return n_min

    # ------------------------------------------------------------------
    # Stacks
    # ------------------------------------------------------------------

    def _clean(self, q: int, left: int) -> None:
        stack = self.stacks[q]
        while stack and stack[-1][0].right < left:
            stack.pop()
            self.stats.pop(1)

    def _push(self, q: int, label: NodeLabel) -> None:
        p = self.twig.parent(q)
        pointer = len(self.stacks[p]) - 1 if p is not None else -1
        self.stacks[q].append((label, pointer))
        self.stats.push(1, len(self.stacks[q]))
        self.labels[label.left] = label
        if self.pushed is not None:
            self.pushed.append((q, label))

    def _emit_paths(self, leaf: int) -> None:
        label, pointer = self.stacks[leaf][-1]
        found: list[tuple[int, ...]] = []
        parent = self.twig.parent(leaf)
        if parent is None:
            found.append((label.left,))
        else:
            self._extend(parent, pointer, label, self.twig.axis(leaf), (label.left,), found)
        width = len(self.path_columns[leaf])
        for _ in found:
            self.stats.hold(width)
        self.solutions[leaf].extend(found)

    def _extend(
        self,
        q: int,
        upto: int,
        below: NodeLabel,
        axis: Axis,
        suffix: tuple[int, ...],
        found: list[tuple[int, ...]],
    ) -> None:
        parent = self.twig.parent(q)
        for label, pointer in self.stacks[q][: upto + 1]:
            if not axis.holds(label, below):
                continue
            path = (label.left,) + suffix
            if parent is None:
                found.append(path)
            else:
                self._extend(parent, pointer, label, self.twig.axis(q), path, found)

    # ------------------------------------------------------------------
    # Main loop
    # ------------------------------------------------------------------

    def run(self) -> list[Row]:
        """Consume all streams; return sorted distinct output tuples."""
        twig = self.twig
        while not self._end(0):
            q = self.get_next(0)
            cursor = self.cursors[q]
            if cursor.finished:
                break
            label = cursor.current[0]
            p = twig.parent(q)
            if p is not None:
                self._clean(p, label.left)
            if p is None or self.stacks[p]:
                self._clean(q, label.left)
                self._push(q, label)
                cursor.advance()
                if twig.is_leaf(q):
                    self._emit_paths(q)
                    self.stacks[q].pop()
                    self.stats.pop(1)
            else:
                cursor.advance()

        for q in range(twig.n):
            self._clean(q, math.inf)
        rows = self._merge()
        for leaf, found in self.solutions.items():
            self.stats.drop(len(found) * len(self.path_columns[leaf]))
        logger.debug("Holistic join produced %d rows", len(rows))
        return rows

    def _merge(self) -> list[Row]:
        frames = []
        for leaf in self.twig.leaves:
            found = self.solutions[leaf]
            if not found:
                return []
            columns = self.path_columns[leaf]
            values = np.array(found, dtype=np.int64).reshape(-1, len(columns))
            frames.append(pd.DataFrame(values, columns=columns).drop_duplicates())

        merged = frames[0]
        for frame in frames[1:]:
            shared = [c for c in merged.columns if c in frame.columns]
            merged = merged.merge(frame, on=shared, how="inner")

        outputs = list(self.twig.output_ids)
        result = merged[outputs].drop_duplicates().sort_values(outputs)
        return [
            tuple(self.labels[v] for v in record)
            for record in result.itertuples(index=False, name=None)
        ]


def holistic_join(twig: TwigQuery, inputs: list[Cursor], stats: ExecStats) -> list[Row]:
    """Evaluate `twig` over per-node streams (positions in pre-order)."""
    return HolisticTwigJoin(twig, inputs, stats).run()
