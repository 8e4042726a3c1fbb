"""
Binary structural joins as pull-based generator operators.

Partial-joins (StackTreeDesc, StackTreeAnc, StackTreeAncSrt) join two
tuple streams on one column each and project the result; semi-joins
(SemiJoin{Anc,Desc}{AD,PC}) filter one single-column stream by the other.
All inputs arrive through Cursors and every stack or list change is
reported to ExecStats.

Column indexes are 0-based here; plan explanations print them 1-based.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from app.errors import invalid_join_spec
from app.model import Axis, NodeLabel, rel_ad
from app.stats import ExecStats
from app.streams import Cursor, Row


@dataclass(frozen=True)
class JoinSpec:
    """Projection masks, join columns and relationship of a partial-join."""

    mask_a: tuple[bool, ...]
    mask_d: tuple[bool, ...]
    i: int
    j: int
    axis: Axis
    k: int | None = None

    def __post_init__(self):
        if not self.mask_a or not self.mask_d:
            raise invalid_join_spec("masks must cover at least one column")
        if not 0 <= self.i < len(self.mask_a):
            raise invalid_join_spec(f"i={self.i} outside T_a arity {len(self.mask_a)}")
        if not 0 <= self.j < len(self.mask_d):
            raise invalid_join_spec(f"j={self.j} outside T_d arity {len(self.mask_d)}")
        if self.k is not None and not 0 <= self.k < len(self.mask_d):
            raise invalid_join_spec(f"k={self.k} outside T_d arity {len(self.mask_d)}")
        if self.arity == 0:
            raise invalid_join_spec("projection keeps no column")

    @classmethod
    def parse(cls, mask_a: str, mask_d: str, i: int, j: int, axis: Axis, k: int | None = None) -> "JoinSpec":
        """Build from bit strings and 1-based column numbers, e.g. ("1", "01", 1, 2, AD, 1)."""
        return cls(
            tuple(c == "1" for c in mask_a),
            tuple(c == "1" for c in mask_d),
            i - 1,
            j - 1,
            axis,
            None if k is None else k - 1,
        )

    @property
    def kept_a(self) -> tuple[int, ...]:
        return tuple(x for x, keep in enumerate(self.mask_a) if keep)

    @property
    def kept_d(self) -> tuple[int, ...]:
        return tuple(x for x, keep in enumerate(self.mask_d) if keep)

    @property
    def arity(self) -> int:
        return len(self.kept_a) + len(self.kept_d)


def _projector(spec: JoinSpec):
    keep_a, keep_d = spec.kept_a, spec.kept_d

    def project(a_row: Row, d_row: Row) -> Row:
        return tuple(a_row[x] for x in keep_a) + tuple(d_row[x] for x in keep_d)

    return project


# ============================================================================
# Partial-joins
# ============================================================================

def stack_tree_desc(ta: Cursor, td: Cursor, spec: JoinSpec, stats: ExecStats) -> Iterator[Row]:
    """Join emitted in T_d order, then T_a order among equal descendants."""
    i, j = spec.i, spec.j
    pc = spec.axis is Axis.PC
    width = len(spec.mask_a)
    project = _projector(spec)
    stack: list[Row] = []

    while not td.finished:
        d_row = td.current
        d = d_row[j]
        if not ta.finished and ta.current[i].left < d.left:
            a_row = ta.current
            while stack and stack[-1][i].right < a_row[i].left:
                stack.pop()
                stats.pop(width)
            stack.append(a_row)
            stats.push(width, len(stack))
            ta.advance()
            continue

        while stack and stack[-1][i].right < d.left:
            stack.pop()
            stats.pop(width)
        if not stack and ta.finished:
            break
        for a_row in stack:
            if pc and a_row[i].level + 1 != d.level:
                continue
            yield project(a_row, d_row)
        td.advance()

    while stack:
        stack.pop()
        stats.pop(width)


class _AncEntry:
    __slots__ = ("row", "self_list", "inherited", "last")

    def __init__(self, row: Row) -> None:
        self.row = row
        self.last: Row | None = None
        self.self_list: list[Row] = []
        self.inherited: list[Row] = []


def _pop_anc(stack: list[_AncEntry], width: int, stats: ExecStats) -> list[Row]:
    """Pop the top entry; returns the rows that become ready for output."""
    entry = stack.pop()
    stats.pop(width)
    if stack:
        stack[-1].inherited.extend(entry.self_list)
        stack[-1].inherited.extend(entry.inherited)
        return []
    ready = entry.self_list + entry.inherited
    for row in ready:
        stats.release(len(row))
    return ready


def _stack_tree_anc(
    ta: Cursor,
    td: Cursor,
    spec: JoinSpec,
    stats: ExecStats,
    secondary: bool,
) -> Iterator[Row]:
    i, j = spec.i, spec.j
    k = spec.k
    width = len(spec.mask_a)
    project = _projector(spec)
    pc = spec.axis is Axis.PC
    holds = spec.axis.holds
    stack: list[_AncEntry] = []

    while True:
        if td.finished:
            while stack:
                yield from _pop_anc(stack, width, stats)
            return

        d_row = td.current
        d = d_row[j]
        if not ta.finished and ta.current[i].left < d.left:
            a_row = ta.current
            while stack and stack[-1].row[i].right < a_row[i].left:
                yield from _pop_anc(stack, width, stats)
            stack.append(_AncEntry(a_row))
            stats.push(width, len(stack))
            ta.advance()
            continue

        while stack and stack[-1].row[i].right < d.left:
            yield from _pop_anc(stack, width, stats)
        if not stack and ta.finished:
            return

        for depth, entry in enumerate(stack):
            a = entry.row[i]
            if secondary:
                if not holds(a, d_row[k]):
                    continue
            elif pc and a.level + 1 != d.level:
                continue
            row = project(entry.row, d_row)
            if secondary:
                # T_d rows differing only in the dropped column k arrive together
                if row == entry.last:
                    continue
                entry.last = row
            if depth == 0:
                yield row
            else:
                entry.self_list.append(row)
                stats.buffer(len(row))
        td.advance()


def stack_tree_anc(ta: Cursor, td: Cursor, spec: JoinSpec, stats: ExecStats) -> Iterator[Row]:
    """Join emitted in T_a order, then T_d order among equal ancestors."""
    return _stack_tree_anc(ta, td, spec, stats, secondary=False)


def stack_tree_anc_srt(ta: Cursor, td: Cursor, spec: JoinSpec, stats: ExecStats) -> Iterator[Row]:
    """
    Ancestor-ordered join on AD between columns i and j that keeps a tuple
    only when `spec.axis` holds between column i and T_d column k.

    T_d rows that agree on every kept column give one output tuple per
    ancestor, so dropping column k never produces duplicates.
    """
    if spec.k is None:
        raise invalid_join_spec("StackTreeAncSrt needs a secondary column k")
    return _stack_tree_anc(ta, td, spec, stats, secondary=True)


# ============================================================================
# Semi-joins (single-column inputs and output)
# ============================================================================

def semi_join_anc_ad(ta: Cursor, td: Cursor, stats: ExecStats) -> Iterator[Row]:
    """T_a labels with a descendant in T_d; no auxiliary storage."""
    while not ta.finished and not td.finished:
        a = ta.current[0]
        d = td.current[0]
        if a.left >= d.left:
            td.advance()
        elif a.right > d.right:
            yield ta.current
            ta.advance()
        else:
            ta.advance()


def semi_join_desc_ad(ta: Cursor, td: Cursor, stats: ExecStats) -> Iterator[Row]:
    """T_d labels with an ancestor in T_a; no auxiliary storage."""
    while not ta.finished and not td.finished:
        a = ta.current[0]
        d = td.current[0]
        if rel_ad(a, d):
            yield td.current
            td.advance()
        elif a.left >= d.left:
            td.advance()
        else:
            ta.advance()


def semi_join_desc_pc(ta: Cursor, td: Cursor, stats: ExecStats) -> Iterator[Row]:
    """T_d labels whose parent is in T_a."""
    stack: list[NodeLabel] = []
    while not td.finished:
        d = td.current[0]
        if not ta.finished and ta.current[0].left < d.left:
            a = ta.current[0]
            while stack and stack[-1].right < a.left:
                stack.pop()
                stats.pop(1)
            stack.append(a)
            stats.push(1, len(stack))
            ta.advance()
            continue

        while stack and stack[-1].right < d.left:
            stack.pop()
            stats.pop(1)
        if not stack and ta.finished:
            break
        # the deepest enclosing entry is the only possible parent
        if stack and stack[-1].level + 1 == d.level:
            yield td.current
        td.advance()

    while stack:
        stack.pop()
        stats.pop(1)


class _PendingEntry:
    __slots__ = ("label", "matched", "emitted", "inherited")

    def __init__(self, label: NodeLabel) -> None:
        self.label = label
        self.matched = False
        self.emitted = False
        self.inherited: list[NodeLabel] = []


def _pop_pending(stack: list[_PendingEntry], stats: ExecStats) -> list[NodeLabel]:
    entry = stack.pop()
    stats.pop(1)
    own = [entry.label] if entry.matched and not entry.emitted else []
    if stack:
        if own:
            stats.buffer(1)
        stack[-1].inherited.extend(own)
        stack[-1].inherited.extend(entry.inherited)
        return []
    for _ in entry.inherited:
        stats.release(1)
    return own + entry.inherited


def semi_join_anc_pc(ta: Cursor, td: Cursor, stats: ExecStats) -> Iterator[Row]:
    """
    T_a labels with a child in T_d, in document order.

    An inner entry can match before its enclosing entries are resolved, so
    matched entries wait in the inherited list of the entry below them and
    are released when the bottom of the stack pops.
    """
    stack: list[_PendingEntry] = []
    while True:
        if td.finished:
            while stack:
                for label in _pop_pending(stack, stats):
                    yield (label,)
            return

        d = td.current[0]
        if not ta.finished and ta.current[0].left < d.left:
            a = ta.current[0]
            while stack and stack[-1].label.right < a.left:
                for label in _pop_pending(stack, stats):
                    yield (label,)
            stack.append(_PendingEntry(a))
            stats.push(1, len(stack))
            ta.advance()
            continue

        while stack and stack[-1].label.right < d.left:
            for label in _pop_pending(stack, stats):
                yield (label,)
        if not stack and ta.finished:
            return
        if stack and stack[-1].label.level + 1 == d.level:
            top = stack[-1]
            top.matched = True
            if len(stack) == 1 and not top.emitted:
                top.emitted = True
                yield (top.label,)
        td.advance()
