"""
Execution counters.

Operators report every change to their dynamic structures (stacks,
self/inherited lists, pending buffers, path-solution buffers) so that the
peak population `mu` is exact. Populations count data nodes: a buffered
k-column tuple adds k.
"""
from __future__ import annotations

from dataclasses import dataclass

STATS_COLUMNS = (
    "query_id",
    "engine",
    "wall_ns",
    "advances",
    "getnext_calls",
    "stack_ops",
    "list_peak",
    "mu",
    "result_rows",
    "sigma",
    "rho",
)


@dataclass
class ExecStats:
    advances: int = 0
    getnext_calls: int = 0
    stack_ops: int = 0
    list_peak: int = 0
    mu: int = 0
    result_rows: int = 0
    wall_ns: int = 0
    live_nodes: int = 0
    live_list_entries: int = 0
    max_stack_depth: int = 0

    def push(self, width: int, depth: int) -> None:
        self.stack_ops += 1
        self.max_stack_depth = max(self.max_stack_depth, depth)
        self._grow(width)

    def pop(self, width: int) -> None:
        self.stack_ops += 1
        self.live_nodes -= width

    def buffer(self, width: int, entries: int = 1) -> None:
        """Tuples entering a self/inherited/pending list."""
        self.live_list_entries += entries
        self.list_peak = max(self.list_peak, self.live_list_entries)
        self._grow(width)

    def release(self, width: int, entries: int = 1) -> None:
        """Tuples leaving a list (emitted or dropped)."""
        self.live_list_entries -= entries
        self.live_nodes -= width

    def hold(self, width: int) -> None:
        """Nodes held by a non-list structure such as a path-solution buffer."""
        self._grow(width)

    def drop(self, width: int) -> None:
        self.live_nodes -= width

    def _grow(self, width: int) -> None:
        self.live_nodes += width
        if self.live_nodes > self.mu:
            self.mu = self.live_nodes
