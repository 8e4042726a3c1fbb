"""
Document ingestion: containment labelling, inverted lists and index files.

A single counter starting at 1 ticks on every element open, attribute,
attribute end and element close. Attributes become child nodes tagged
`@name`, placed before element children in source order.
"""
from __future__ import annotations

import logging
import struct
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterator

import numpy as np
from lxml import etree

from app.errors import (
    bad_index_magic,
    empty_document,
    entity_rejected,
    inconsistent_index,
    index_not_found,
    malformed_document,
    truncated_index,
)
from app.model import NodeLabel

logger = logging.getLogger("tpq.ingest")

INDEX_MAGIC = b"TPQIDX1\0"
DOCUMENT_ROOT = "/"
_HEADER = struct.Struct("<III")
_TAG_LEN = struct.Struct("<H")
_LIST_LEN = struct.Struct("<I")
_LABEL_DTYPE = np.dtype("<u4")


@dataclass(frozen=True)
class DocumentStats:
    """Shape statistics of one labelled document."""

    node_count: int
    depth: int
    tag_counts: dict[str, int]
    recursive_tags: frozenset[str]

    def is_recursive(self, tag: str) -> bool:
        return tag in self.recursive_tags

    def summary(self) -> str:
        recursive = ", ".join(sorted(self.recursive_tags)) or "none"
        return (
            f"nodes={self.node_count} depth={self.depth} "
            f"tags={len(self.tag_counts)} recursive={recursive}"
        )


def _nested(rows: np.ndarray) -> bool:
    """True if some label of a left-sorted list lies inside an earlier one."""
    if len(rows) < 2:
        return False
    reach = np.maximum.accumulate(rows[:-1, 1])
    return bool(np.any(rows[1:, 0] < reach))


@dataclass
class InvertedIndex:
    """Per-tag label lists, each an (k, 3) uint32 array sorted by left."""

    lists: dict[str, np.ndarray] = field(default_factory=dict)
    node_count: int = 0
    depth: int = 0

    def __post_init__(self):
        for tag, rows in self.lists.items():
            rows = np.asarray(rows, dtype=_LABEL_DTYPE).reshape(-1, 3)
            if len(rows) > 1 and not np.all(np.diff(rows[:, 0].astype(np.int64)) > 0):
                raise ValueError(f"List for {tag!r} is not strictly increasing in left")
            self.lists[tag] = rows
        self._labels: dict[str, list[NodeLabel]] = {}

    @cached_property
    def recursive_tags(self) -> frozenset[str]:
        return frozenset(tag for tag, rows in self.lists.items() if _nested(rows))

    @property
    def tags(self) -> list[str]:
        return sorted(self.lists)

    @property
    def document_root(self) -> NodeLabel:
        """Label of the virtual root enclosing the whole document."""
        return NodeLabel(0, 2 * self.node_count + 1, 0)

    def size(self, tag: str) -> int:
        if tag == DOCUMENT_ROOT:
            return 1
        rows = self.lists.get(tag)
        return 0 if rows is None else len(rows)

    def labels(self, tag: str) -> list[NodeLabel]:
        """Label list of `tag` in document order; unknown tags give []."""
        if tag == DOCUMENT_ROOT:
            return [self.document_root]
        cached = self._labels.get(tag)
        if cached is None:
            rows = self.lists.get(tag)
            cached = [] if rows is None else [NodeLabel(*r) for r in rows.tolist()]
            self._labels[tag] = cached
        return cached

    def stats(self) -> DocumentStats:
        return DocumentStats(
            node_count=self.node_count,
            depth=self.depth,
            tag_counts={tag: len(rows) for tag, rows in sorted(self.lists.items())},
            recursive_tags=self.recursive_tags,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, InvertedIndex):
            return NotImplemented
        return (
            self.node_count == other.node_count
            and self.depth == other.depth
            and self.lists.keys() == other.lists.keys()
            and all(np.array_equal(self.lists[t], other.lists[t]) for t in self.lists)
        )


def index_scan(idx: InvertedIndex, tag: str) -> Iterator[NodeLabel]:
    """Stream the labels of `tag` in document order."""
    return iter(idx.labels(tag))


# ============================================================================
# Labelling
# ============================================================================

def _local(name: str) -> str:
    return etree.QName(name).localname if name.startswith("{") else name


def parse_and_label(xml: bytes | str, source: str = "<memory>") -> InvertedIndex:
    """Parse an XML document and build its inverted index."""
    data = xml.encode("utf-8") if isinstance(xml, str) else xml
    if not data.strip():
        raise empty_document(source)

    parser = etree.XMLParser(
        resolve_entities=False,
        remove_comments=True,
        remove_pis=True,
        no_network=True,
        load_dtd=False,
        huge_tree=True,
    )
    try:
        root = etree.fromstring(data, parser)
    except etree.XMLSyntaxError as exc:
        raise malformed_document(source, str(exc)) from exc

    lists: dict[str, list[list[int]]] = {}
    open_slots: list[list[int]] = []
    counter = 1
    depth = 0
    count = 0

    for event, element in etree.iterwalk(root, events=("start", "end")):
        if isinstance(element, etree._Entity):
            raise entity_rejected(source, element.name)
        if not isinstance(element.tag, str):
            continue
        if event == "start":
            level = len(open_slots) + 1
            slot = [counter, 0, level]
            counter += 1
            lists.setdefault(_local(element.tag), []).append(slot)
            open_slots.append(slot)
            count += 1
            depth = max(depth, level)
            for name in element.attrib:
                lists.setdefault("@" + _local(name), []).append([counter, counter + 1, level + 1])
                counter += 2
                count += 1
                depth = max(depth, level + 1)
        else:
            slot = open_slots.pop()
            slot[1] = counter
            counter += 1

    # attribute labels are appended after their element, so lists stay sorted
    index = InvertedIndex(
        lists={tag: np.array(rows, dtype=_LABEL_DTYPE) for tag, rows in lists.items()},
        node_count=count,
        depth=depth,
    )
    logger.info("Labelled %s: %d nodes, depth %d, %d tags", source, count, depth, len(lists))
    return index


def parse_file(path: str | Path) -> InvertedIndex:
    path = Path(path)
    return parse_and_label(path.read_bytes(), source=str(path))


# ============================================================================
# Index files
# ============================================================================

def save_index(idx: InvertedIndex, path: str | Path) -> None:
    """Write `idx` in the little-endian index format."""
    path = Path(path)
    with open(path, "wb") as handle:
        handle.write(INDEX_MAGIC)
        handle.write(_HEADER.pack(idx.node_count, idx.depth, len(idx.lists)))
        for tag in idx.tags:
            name = tag.encode("utf-8")
            rows = idx.lists[tag]
            handle.write(_TAG_LEN.pack(len(name)))
            handle.write(name)
            handle.write(_LIST_LEN.pack(len(rows)))
            handle.write(np.ascontiguousarray(rows, dtype=_LABEL_DTYPE).tobytes())
    logger.info("Saved index with %d tags to %s", len(idx.lists), path)


def load_index(path: str | Path) -> InvertedIndex:
    """Read an index file written by save_index."""
    path = Path(path)
    if not path.exists():
        raise index_not_found(str(path))
    data = path.read_bytes()
    if data[: len(INDEX_MAGIC)] != INDEX_MAGIC:
        raise bad_index_magic(str(path))

    offset = len(INDEX_MAGIC)

    def take(size: int, section: str) -> bytes:
        nonlocal offset
        if offset + size > len(data):
            raise truncated_index(str(path), section)
        chunk = data[offset: offset + size]
        offset += size
        return chunk

    node_count, depth, tag_count = _HEADER.unpack(take(_HEADER.size, "header"))
    lists: dict[str, np.ndarray] = {}
    for _ in range(tag_count):
        (name_len,) = _TAG_LEN.unpack(take(_TAG_LEN.size, "tag length"))
        tag = take(name_len, "tag name").decode("utf-8")
        (length,) = _LIST_LEN.unpack(take(_LIST_LEN.size, f"list length of {tag}"))
        raw = take(length * 3 * _LABEL_DTYPE.itemsize, f"labels of {tag}")
        lists[tag] = np.frombuffer(raw, dtype=_LABEL_DTYPE).reshape(-1, 3).copy()

    if offset != len(data):
        raise inconsistent_index(str(path), f"{len(data) - offset} trailing bytes")
    total = sum(len(rows) for rows in lists.values())
    if total != node_count:
        raise inconsistent_index(str(path), f"lists hold {total} labels, header says {node_count}")
    return InvertedIndex(lists=lists, node_count=node_count, depth=depth)
