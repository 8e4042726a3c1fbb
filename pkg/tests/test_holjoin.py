"""
Tests for the holistic twig join.
"""
import pytest
from hypothesis import given, settings

from app.generators import gen_doc
from app.holjoin import HolisticTwigJoin, holistic_join
from app.ingest import parse_and_label
from app.oracle import brute_force, participating_labels
from app.query_parser import parse_tpq
from app.stats import ExecStats
from app.streams import Cursor, single_column
from tests.conftest import SAMPLE_QUERY
from tests.strategies import instances


def streams(query, idx, stats):
    return [Cursor(single_column(idx.labels(query.tag(i))), stats) for i in range(query.n)]


def run(pattern, idx, trace=False):
    query = parse_tpq(pattern)
    stats = ExecStats()
    join = HolisticTwigJoin(query, streams(query, idx, stats), stats, trace=trace)
    return join.run(), stats, join


class TestHolisticJoin:
    """Tests on the sample and generated documents."""

    def test_sample_query(self, sample_index, labels):
        """Only a1 has both a b//c branch and a d with e child and f below."""
        rows, _, _ = run(SAMPLE_QUERY, sample_index)
        a, c, d = labels["a"], labels["c"], labels["d"]
        assert rows == [(a[0], c[0], d[0]), (a[0], c[1], d[0])]

    def test_single_node(self, sample_index, labels):
        """A one-node twig returns its stream."""
        rows, _, _ = run("//$e", sample_index)
        assert rows == [(e,) for e in labels["e"]]

    def test_pc_edge_checked_on_paths(self, sample_index, labels):
        """b/c drops c2, whose parent is c1."""
        rows, _, _ = run("//$b/$c", sample_index)
        b, c = labels["b"], labels["c"]
        assert rows == [(b[0], c[0]), (b[2], c[2])]

    def test_projection_deduplicates(self, sample_index, labels):
        """Several matches collapsing onto one output tuple appear once."""
        rows, _, _ = run("//$a//c", sample_index)
        assert rows == [(a,) for a in labels["a"]]

    def test_missing_tag(self, sample_index):
        """A tag absent from the document empties the result."""
        rows, _, _ = run("//$a[.//zzz]//$d", sample_index)
        assert rows == []

    def test_wrong_stream_count(self, sample_index):
        query = parse_tpq("//$a//$b")
        with pytest.raises(ValueError):
            HolisticTwigJoin(query, [], ExecStats())

    def test_function_form(self, sample_index):
        """holistic_join is run() on a fresh join."""
        query = parse_tpq(SAMPLE_QUERY)
        stats = ExecStats()
        assert holistic_join(query, streams(query, sample_index, stats), stats) == run(
            SAMPLE_QUERY, sample_index
        )[0]

    def test_structures_released(self, sample_index):
        """Stacks and path buffers are empty after the run."""
        _, stats, join = run(SAMPLE_QUERY, sample_index)
        assert all(not stack for stack in join.stacks)
        assert stats.live_nodes == 0
        assert stats.mu > 0


class TestDemoDocument:
    """Path and twig patterns on the demo document."""

    @pytest.mark.parametrize("n", [1, 10, 100])
    def test_path_all_outputs(self, n):
        """Every a(b(c)) is a match."""
        idx = parse_and_label(gen_doc("demo", n))
        rows, _, _ = run("//$a//$b//$c", idx)
        assert len(rows) == n
        assert rows == sorted(rows)

    @pytest.mark.parametrize("n", [1, 10, 100])
    def test_twig_single_match(self, n):
        """Only the last b has a d, so one 4-tuple survives."""
        idx = parse_and_label(gen_doc("demo", n))
        rows, _, _ = run("//$a//$b[.//$c]/$d", idx)
        assert len(rows) == 1
        assert [x.left for x in rows[0]] == sorted(x.left for x in rows[0])

    def test_getnext_grows_linearly(self):
        """Ten times the document means about ten times the getnext calls."""
        small = run("//$a//$b//$c", parse_and_label(gen_doc("demo", 100)))[1]
        large = run("//$a//$b//$c", parse_and_label(gen_doc("demo", 1000)))[1]
        assert 8 <= large.getnext_calls / small.getnext_calls <= 11

    def test_stack_depth_bounded(self):
        """No stack grows past the document depth."""
        idx = parse_and_label(gen_doc("demo", 50))
        _, stats, _ = run("//$a//$b[.//$c]/$d", idx)
        assert stats.max_stack_depth <= idx.depth


class TestAgainstBruteForce:
    """Random AD-rooted instances."""

    @settings(max_examples=200, deadline=None)
    @given(instances(ad_only=True))
    def test_matches_brute_force(self, instance):
        """The holistic join returns the brute-force answer."""
        query, idx = instance
        stats = ExecStats()
        rows = HolisticTwigJoin(query, streams(query, idx, stats), stats).run()
        assert rows == brute_force(query, idx)
        assert stats.max_stack_depth <= idx.depth

    @settings(max_examples=200, deadline=None)
    @given(instances(ad_only=True))
    def test_pushes_only_useful_labels(self, instance):
        """On AD-only twigs every pushed label takes part in some match."""
        query, idx = instance
        stats = ExecStats()
        join = HolisticTwigJoin(query, streams(query, idx, stats), stats, trace=True)
        join.run()
        assert set(join.pushed) <= participating_labels(query, idx)
