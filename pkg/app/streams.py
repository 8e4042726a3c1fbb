"""
Pull cursors over sorted label tuples.

Every operator consumes its inputs through a Cursor, which exposes the
current tuple, a `finished` flag and `advance()`; each advance is counted
in the shared ExecStats.
"""
from __future__ import annotations

from typing import Iterable, Iterator, Sequence

from app.errors import unsorted_stream
from app.model import NodeLabel
from app.stats import ExecStats

Row = tuple[NodeLabel, ...]


class Cursor:
    __slots__ = ("_it", "_stats", "current", "finished")

    def __init__(self, source: Iterable[Row], stats: ExecStats) -> None:
        self._it = iter(source)
        self._stats = stats
        self.current: Row | None = None
        self.finished = False
        self._fetch()

    def _fetch(self) -> None:
        try:
            self.current = next(self._it)
        except StopIteration:
            self.current = None
            self.finished = True

    def advance(self) -> None:
        self._stats.advances += 1
        self._fetch()

    def exhaust(self) -> None:
        while not self.finished:
            self.advance()


def single_column(labels: Iterable[NodeLabel]) -> Iterator[Row]:
    for label in labels:
        yield (label,)


def check_sorted(rows: Iterable[Row], key: Sequence[int], operator: str) -> Iterator[Row]:
    """Pass rows through, raising ContractViolation if they go backwards on `key`."""
    previous: tuple[int, ...] | None = None
    for row in rows:
        current = tuple(row[k].left for k in key)
        if previous is not None and current < previous:
            raise unsorted_stream(operator, previous, current)
        previous = current
        yield row
