"""
Tests for the binary structural join operators.
"""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.binjoin import (
    JoinSpec,
    semi_join_anc_ad,
    semi_join_anc_pc,
    semi_join_desc_ad,
    semi_join_desc_pc,
    stack_tree_anc,
    stack_tree_anc_srt,
    stack_tree_desc,
)
from app.errors import PlanError
from app.generators import RANDOM_TAGS, gen_doc
from app.ingest import parse_and_label
from app.model import Axis, NodeLabel
from app.stats import ExecStats
from app.streams import Cursor
from tests.strategies import documents


def cursor(rows, stats):
    return Cursor(rows, stats)


def column(labels):
    return [(x,) for x in labels]


def partial(op, ta_rows, td_rows, spec):
    stats = ExecStats()
    rows = list(op(cursor(ta_rows, stats), cursor(td_rows, stats), spec, stats))
    return rows, stats


def semi(op, ta_labels, td_labels):
    stats = ExecStats()
    rows = list(op(cursor(column(ta_labels), stats), cursor(column(td_labels), stats), stats))
    return [row[0] for row in rows], stats


def lefts(rows):
    return [tuple(x.left for x in row) for row in rows]


class TestJoinSpec:
    """Tests for JoinSpec validation."""

    def test_parse_one_based(self):
        """Bit strings and 1-based columns become masks and 0-based indexes."""
        spec = JoinSpec.parse("1", "01", 1, 2, Axis.AD, 1)
        assert spec.mask_d == (False, True)
        assert (spec.i, spec.j, spec.k) == (0, 1, 0)
        assert spec.arity == 2

    def test_column_out_of_range(self):
        """Join columns must exist."""
        with pytest.raises(PlanError):
            JoinSpec.parse("1", "1", 1, 2, Axis.AD)

    def test_empty_projection(self):
        """A join must keep at least one column."""
        with pytest.raises(PlanError):
            JoinSpec.parse("0", "0", 1, 1, Axis.AD)

    def test_srt_needs_k(self, sample_index):
        """StackTreeAncSrt without a secondary column is rejected."""
        spec = JoinSpec.parse("1", "1", 1, 1, Axis.AD)
        with pytest.raises(PlanError):
            partial(stack_tree_anc_srt, column(sample_index.labels("a")), [], spec)


class TestPartialJoins:
    """Worked examples on the sample document."""

    def test_stack_tree_anc_d_e(self, sample_index, labels):
        """d/e ordered by d: (d1,e2), (d2,e1), (d3,e3)."""
        d, e = labels["d"], labels["e"]
        rows, _ = partial(
            stack_tree_anc,
            column(sample_index.labels("d")),
            column(sample_index.labels("e")),
            JoinSpec.parse("1", "1", 1, 1, Axis.PC),
        )
        assert rows == [(d[0], e[1]), (d[1], e[0]), (d[2], e[2])]

    def test_stack_tree_anc_chain(self, sample_index, labels):
        """a joined on the d column of d/e: (a1,d1,e2), (a1,d2,e1), (a2,d3,e3)."""
        a, d, e = labels["a"], labels["d"], labels["e"]
        inner, _ = partial(
            stack_tree_anc,
            column(sample_index.labels("d")),
            column(sample_index.labels("e")),
            JoinSpec.parse("1", "1", 1, 1, Axis.PC),
        )
        rows, _ = partial(
            stack_tree_anc,
            column(sample_index.labels("a")),
            inner,
            JoinSpec.parse("1", "11", 1, 1, Axis.AD),
        )
        assert rows == [(a[0], d[0], e[1]), (a[0], d[1], e[0]), (a[1], d[2], e[2])]

    def test_stack_tree_desc_d_e(self, sample_index, labels):
        """d/e ordered by e: (d2,e1), (d1,e2), (d3,e3)."""
        d, e = labels["d"], labels["e"]
        rows, _ = partial(
            stack_tree_desc,
            column(sample_index.labels("d")),
            column(sample_index.labels("e")),
            JoinSpec.parse("1", "1", 1, 1, Axis.PC),
        )
        assert rows == [(d[1], e[0]), (d[0], e[1]), (d[2], e[2])]

    def test_stack_tree_desc_a_f(self, sample_index, labels):
        """Only a1 has an f descendant."""
        rows, _ = partial(
            stack_tree_desc,
            column(sample_index.labels("a")),
            column(sample_index.labels("f")),
            JoinSpec.parse("1", "1", 1, 1, Axis.AD),
        )
        assert rows == [(labels["a"][0], labels["f"][0])]

    def test_stack_tree_anc_srt(self, sample_index, labels):
        """a over e-sorted d/e with a secondary AD test on d keeps (a,e)."""
        a, e = labels["a"], labels["e"]
        by_e, _ = partial(
            stack_tree_desc,
            column(sample_index.labels("d")),
            column(sample_index.labels("e")),
            JoinSpec.parse("1", "1", 1, 1, Axis.PC),
        )
        rows, _ = partial(
            stack_tree_anc_srt,
            column(sample_index.labels("a")),
            by_e,
            JoinSpec.parse("1", "01", 1, 2, Axis.AD, 1),
        )
        assert rows == [(a[0], e[0]), (a[0], e[1]), (a[1], e[2])]

    def test_srt_secondary_pc_rejects(self, sample_index, labels):
        """a2 is not the parent of b3, so (a2, b3, c3) is dropped."""
        a, b, c = labels["a"], labels["b"], labels["c"]
        by_c, _ = partial(
            stack_tree_desc,
            column(sample_index.labels("b")),
            column(sample_index.labels("c")),
            JoinSpec.parse("1", "1", 1, 1, Axis.AD),
        )
        rows, _ = partial(
            stack_tree_anc_srt,
            column(sample_index.labels("a")),
            by_c,
            JoinSpec.parse("1", "11", 1, 2, Axis.PC, 1),
        )
        assert (a[1], b[2], c[2]) not in rows
        assert (a[1], b[1], c[2]) in rows

    def test_srt_drops_rows_repeated_by_the_hidden_column(self):
        """Two nested b over one c give a single (a, c) once b is projected away."""
        idx = parse_and_label("<a><b><b><c/></b></b></a>")
        by_c, _ = partial(
            stack_tree_desc,
            column(idx.labels("b")),
            column(idx.labels("c")),
            JoinSpec.parse("1", "1", 1, 1, Axis.AD),
        )
        assert len(by_c) == 2
        rows, stats = partial(
            stack_tree_anc_srt,
            column(idx.labels("a")),
            by_c,
            JoinSpec.parse("1", "01", 1, 2, Axis.AD, 1),
        )
        assert rows == [(NodeLabel(1, 8, 1), NodeLabel(4, 5, 4))]
        assert stats.list_peak == 0

    def test_srt_dedup_under_nested_ancestors(self):
        """Buffered rows of an inner ancestor are not repeated either."""
        idx = parse_and_label("<a><a><b><b><c/></b></b></a></a>")
        by_c, _ = partial(
            stack_tree_desc,
            column(idx.labels("b")),
            column(idx.labels("c")),
            JoinSpec.parse("1", "1", 1, 1, Axis.AD),
        )
        rows, _ = partial(
            stack_tree_anc_srt,
            column(idx.labels("a")),
            by_c,
            JoinSpec.parse("1", "01", 1, 2, Axis.AD, 1),
        )
        assert lefts(rows) == [(1, 5), (2, 5)]

    @pytest.mark.parametrize("op", [stack_tree_anc, stack_tree_desc])
    def test_empty_inputs(self, op, sample_index):
        """Either input empty gives nothing."""
        spec = JoinSpec.parse("1", "1", 1, 1, Axis.AD)
        a = column(sample_index.labels("a"))
        assert partial(op, a, [], spec)[0] == []
        assert partial(op, [], a, spec)[0] == []

    def test_same_tag_join(self, sample_index, labels):
        """d//d pairs the outer d1 with the inner d2 only."""
        d = labels["d"]
        for op in (stack_tree_anc, stack_tree_desc):
            rows, _ = partial(
                op,
                column(sample_index.labels("d")),
                column(sample_index.labels("d")),
                JoinSpec.parse("1", "1", 1, 1, Axis.AD),
            )
            assert rows == [(d[0], d[1])]

    def test_simple_ancestor_stream_uses_no_lists(self):
        """Non-nested ancestors keep the stack at one entry and never buffer."""
        idx = parse_and_label(gen_doc("demo", 20))
        _, stats = partial(
            stack_tree_anc,
            column(idx.labels("a")),
            column(idx.labels("c")),
            JoinSpec.parse("1", "1", 1, 1, Axis.AD),
        )
        assert stats.max_stack_depth == 1
        assert stats.list_peak == 0

    def test_suboptimal_self_list_grows(self):
        """Recursive a buffers every (a2, b) pair until a1 pops."""
        n = 100
        idx = parse_and_label(gen_doc("suboptimal", n))
        rows, stats = partial(
            stack_tree_anc,
            column(idx.labels("a")),
            column(idx.labels("b")),
            JoinSpec.parse("1", "1", 1, 1, Axis.PC),
        )
        assert len(rows) == n + 1
        assert stats.list_peak >= n
        assert stats.mu >= n


class TestSemiJoins:
    """Worked examples for the four semi-joins."""

    def test_anc_ad(self, sample_index, labels):
        """Of the d's only d1 has an f below."""
        rows, stats = semi(semi_join_anc_ad, sample_index.labels("d"), sample_index.labels("f"))
        assert rows == [labels["d"][0]]
        assert stats.mu == 0 and stats.stack_ops == 0

    def test_anc_ad_a_f(self, sample_index, labels):
        rows, _ = semi(semi_join_anc_ad, sample_index.labels("a"), sample_index.labels("f"))
        assert rows == [labels["a"][0]]

    def test_desc_ad(self, sample_index, labels):
        """Every c lies under some b."""
        rows, stats = semi(semi_join_desc_ad, sample_index.labels("b"), sample_index.labels("c"))
        assert rows == labels["c"]
        assert stats.mu == 0

    def test_desc_ad_outer_ancestor(self):
        """An outer ancestor suffices after the inner one closes."""
        rows, _ = semi(semi_join_desc_ad, [NodeLabel(1, 100, 1), NodeLabel(2, 3, 2)], [NodeLabel(50, 51, 2)])
        assert rows == [NodeLabel(50, 51, 2)]

    def test_anc_pc(self, sample_index, labels):
        """Every d has an e child."""
        rows, _ = semi(semi_join_anc_pc, sample_index.labels("d"), sample_index.labels("e"))
        assert rows == labels["d"]

    def test_desc_pc(self, sample_index, labels):
        """Both a's are children of r."""
        rows, _ = semi(semi_join_desc_pc, sample_index.labels("r"), sample_index.labels("a"))
        assert rows == labels["a"]

    def test_desc_pc_skips_grandchildren(self, sample_index, labels):
        """Only c1 and c3 have a b parent; c2's parent is c1."""
        rows, _ = semi(semi_join_desc_pc, sample_index.labels("b"), sample_index.labels("c"))
        assert rows == [labels["c"][0], labels["c"][2]]

    @pytest.mark.parametrize(
        "op", [semi_join_anc_ad, semi_join_desc_ad, semi_join_anc_pc, semi_join_desc_pc]
    )
    def test_empty(self, op, sample_index):
        """Either input empty gives nothing."""
        a = sample_index.labels("a")
        assert semi(op, a, [])[0] == []
        assert semi(op, [], a)[0] == []


class TestAgainstNestedLoops:
    """Operators agree with nested-loop joins on random documents."""

    @settings(max_examples=150, deadline=None)
    @given(documents(), st.sampled_from(RANDOM_TAGS), st.sampled_from(RANDOM_TAGS), st.sampled_from(list(Axis)))
    def test_partial_joins(self, idx, tag_a, tag_d, axis):
        """Both partial-joins emit the nested-loop pairs in their declared order."""
        xs, ys = idx.labels(tag_a), idx.labels(tag_d)
        expected = [(x, y) for x in xs for y in ys if axis.holds(x, y)]
        spec = JoinSpec.parse("1", "1", 1, 1, axis)

        anc, _ = partial(stack_tree_anc, column(xs), column(ys), spec)
        assert anc == sorted(expected, key=lambda r: (r[0].left, r[1].left))

        desc, _ = partial(stack_tree_desc, column(xs), column(ys), spec)
        assert desc == sorted(expected, key=lambda r: (r[1].left, r[0].left))

    @settings(max_examples=150, deadline=None)
    @given(documents(), st.sampled_from(RANDOM_TAGS), st.sampled_from(RANDOM_TAGS), st.sampled_from(list(Axis)))
    def test_semi_joins(self, idx, tag_a, tag_d, axis):
        """Semi-joins keep exactly the labels with a partner, once, in order."""
        xs, ys = idx.labels(tag_a), idx.labels(tag_d)
        anc_op = semi_join_anc_ad if axis is Axis.AD else semi_join_anc_pc
        desc_op = semi_join_desc_ad if axis is Axis.AD else semi_join_desc_pc

        assert semi(anc_op, xs, ys)[0] == [x for x in xs if any(axis.holds(x, y) for y in ys)]
        assert semi(desc_op, xs, ys)[0] == [y for y in ys if any(axis.holds(x, y) for x in xs)]

    @settings(max_examples=100, deadline=None)
    @given(documents(), st.sampled_from(RANDOM_TAGS), st.sampled_from(RANDOM_TAGS))
    def test_desc_pc_stack_bounded_by_depth(self, idx, tag_a, tag_d):
        """The parent filter never stacks more than the document depth."""
        _, stats = semi(semi_join_desc_pc, idx.labels(tag_a), idx.labels(tag_d))
        assert stats.max_stack_depth <= idx.depth
