"""
Tests for labelling, inverted lists and index files.
"""
import numpy as np
import pytest
from hypothesis import given, settings

from app.errors import DocumentError, IndexFormatError
from app.ingest import (
    INDEX_MAGIC,
    InvertedIndex,
    index_scan,
    load_index,
    parse_and_label,
    parse_file,
    save_index,
)
from app.model import NodeLabel, rel_ad
from tests.strategies import documents


class TestParseAndLabel:
    """Tests for containment labelling."""

    def test_sample_labels(self, sample_index, labels):
        """All sixteen labels of the sample document come out verbatim."""
        for tag, expected in labels.items():
            assert sample_index.labels(tag) == expected
        assert sample_index.node_count == 16
        assert sample_index.depth == 5

    def test_single_element(self):
        """`<a/>` opens at 1 and closes at 2."""
        idx = parse_and_label("<a/>")
        assert idx.labels("a") == [NodeLabel(1, 2, 1)]

    def test_attribute(self):
        """Attributes take two counter ticks one level down."""
        idx = parse_and_label('<a id="1"/>')
        assert idx.labels("a") == [NodeLabel(1, 4, 1)]
        assert idx.labels("@id") == [NodeLabel(2, 3, 2)]

    def test_attributes_precede_children(self):
        """Attribute labels sit between the element open and its first child."""
        idx = parse_and_label('<a x="1"><b/></a>')
        assert idx.labels("@x") == [NodeLabel(2, 3, 2)]
        assert idx.labels("b") == [NodeLabel(4, 5, 2)]

    def test_text_and_comments_ignored(self):
        """Only elements and attributes are labelled."""
        idx = parse_and_label("<a>text<!-- note --><?pi x?><b>more</b></a>")
        assert idx.node_count == 2
        assert idx.labels("b") == [NodeLabel(2, 3, 2)]

    def test_recursive_tags(self, sample_index):
        """b, c and d nest inside themselves in the sample."""
        assert sample_index.recursive_tags == frozenset({"b", "c", "d"})

    def test_malformed(self):
        """Unbalanced tags are rejected."""
        with pytest.raises(DocumentError):
            parse_and_label("<a><b></a>")

    def test_empty(self):
        """Whitespace is not a document."""
        with pytest.raises(DocumentError):
            parse_and_label("  \n")

    def test_undeclared_entity(self):
        """Entities beyond the predefined five are rejected."""
        with pytest.raises(DocumentError):
            parse_and_label("<a>&custom;</a>")

    def test_predefined_entities(self):
        """The five predefined entities are fine in text."""
        idx = parse_and_label("<a>&lt;&gt;&amp;&quot;&apos;</a>")
        assert idx.node_count == 1

    def test_deterministic(self, sample_xml):
        """Re-parsing gives an equal index."""
        assert parse_and_label(sample_xml) == parse_and_label(sample_xml)

    @settings(max_examples=100, deadline=None)
    @given(documents())
    def test_balanced_labels(self, idx):
        """All labels together use every position 1..2N exactly once."""
        every = [label for tag in idx.tags for label in idx.labels(tag)]
        assert len(every) == idx.node_count
        positions = sorted([x.left for x in every] + [x.right for x in every])
        assert positions == list(range(1, 2 * idx.node_count + 1))

    @settings(max_examples=100, deadline=None)
    @given(documents())
    def test_recursive_tags_match_pairwise_check(self, idx):
        """Recursion detection agrees with a quadratic nesting check."""
        expected = {
            tag
            for tag in idx.tags
            if any(rel_ad(x, y) for x in idx.labels(tag) for y in idx.labels(tag))
        }
        assert idx.recursive_tags == frozenset(expected)


class TestInvertedIndex:
    """Tests for index access."""

    def test_index_scan(self, sample_index):
        """Scans return the tag list in document order."""
        assert list(index_scan(sample_index, "d")) == [
            NodeLabel(9, 18, 3),
            NodeLabel(10, 13, 4),
            NodeLabel(27, 30, 3),
        ]
        assert list(index_scan(sample_index, "a")) == [NodeLabel(2, 19, 2), NodeLabel(20, 31, 2)]

    def test_unknown_tag(self, sample_index):
        """Unknown tags scan as empty."""
        assert list(index_scan(sample_index, "zzz")) == []
        assert sample_index.size("zzz") == 0

    def test_document_root(self, sample_index):
        """The virtual root encloses every label."""
        assert sample_index.labels("/") == [NodeLabel(0, 33, 0)]

    def test_stats(self, sample_index):
        """Stats carry counts, depth and recursion."""
        stats = sample_index.stats()
        assert stats.node_count == 16
        assert stats.depth == 5
        assert stats.tag_counts["e"] == 3
        assert stats.is_recursive("d") and not stats.is_recursive("a")
        assert "recursive=b, c, d" in stats.summary()

    def test_unsorted_list_rejected(self):
        """Lists must be strictly increasing in left."""
        with pytest.raises(ValueError):
            InvertedIndex(lists={"a": np.array([[5, 6, 2], [1, 8, 1]])}, node_count=2, depth=2)


class TestIndexFile:
    """Tests for save_index / load_index."""

    def test_roundtrip(self, sample_index, temp_dir):
        """A saved index loads back equal."""
        path = temp_dir / "sample.idx"
        save_index(sample_index, path)
        assert load_index(path) == sample_index

    def test_empty_index_is_header_only(self, temp_dir):
        """An empty index writes magic plus the three header words."""
        path = temp_dir / "empty.idx"
        save_index(InvertedIndex(), path)
        data = path.read_bytes()
        assert data.startswith(INDEX_MAGIC)
        assert len(data) == len(INDEX_MAGIC) + 12
        assert load_index(path).tags == []

    def test_bad_magic(self, sample_index, temp_dir):
        """Corrupted magic bytes are a format error."""
        path = temp_dir / "bad.idx"
        save_index(sample_index, path)
        data = bytearray(path.read_bytes())
        data[0] ^= 0xFF
        path.write_bytes(bytes(data))
        with pytest.raises(IndexFormatError):
            load_index(path)

    def test_truncated(self, sample_index, temp_dir):
        """A cut-off file is a format error."""
        path = temp_dir / "cut.idx"
        save_index(sample_index, path)
        path.write_bytes(path.read_bytes()[:-5])
        with pytest.raises(IndexFormatError) as exc:
            load_index(path)
        assert "truncated" in exc.value.message

    def test_trailing_bytes(self, sample_index, temp_dir):
        """Bytes after the last list are rejected."""
        path = temp_dir / "long.idx"
        save_index(sample_index, path)
        path.write_bytes(path.read_bytes() + b"\0\0\0\0")
        with pytest.raises(IndexFormatError) as exc:
            load_index(path)
        assert "4 trailing bytes" in exc.value.message

    def test_node_count_mismatch(self, sample_index, temp_dir):
        """The header node count must equal the labels stored."""
        path = temp_dir / "count.idx"
        save_index(sample_index, path)
        data = bytearray(path.read_bytes())
        data[len(INDEX_MAGIC)] += 1
        path.write_bytes(bytes(data))
        with pytest.raises(IndexFormatError) as exc:
            load_index(path)
        assert "header says 17" in exc.value.message

    def test_missing(self, temp_dir):
        """A missing file is reported as such."""
        with pytest.raises(IndexFormatError):
            load_index(temp_dir / "nope.idx")

    def test_parse_file(self, sample_xml_file, sample_index):
        """parse_file reads from disk."""
        assert parse_file(sample_xml_file) == sample_index
