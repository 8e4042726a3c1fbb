"""
Synthetic XML documents for benchmarks and tests.

- demo: r with n children a(b(c)); the last b also holds a d after its c.
- suboptimal: a(a(b x n), b); the outer a is recursive over the inner one.
- random: seeded random tree over a small tag alphabet.
"""
from __future__ import annotations

import random

from lxml import etree

from app.errors import invalid_generator_size, unknown_shape

SHAPES = ("demo", "suboptimal", "random")
RANDOM_TAGS = ("a", "b", "c", "d")


def _demo(n: int) -> etree._Element:
    root = etree.Element("r")
    for i in range(n):
        a = etree.SubElement(root, "a")
        b = etree.SubElement(a, "b")
        etree.SubElement(b, "c")
        if i == n - 1:
            etree.SubElement(b, "d")
    return root


def _suboptimal(n: int) -> etree._Element:
    outer = etree.Element("a")
    inner = etree.SubElement(outer, "a")
    for _ in range(n):
        etree.SubElement(inner, "b")
    etree.SubElement(outer, "b")
    return outer


def random_tree(
    rng: random.Random,
    n: int,
    max_depth: int = 8,
    tags: tuple[str, ...] = RANDOM_TAGS,
) -> etree._Element:
    """Random tree with exactly `n` elements and depth at most `max_depth`."""
    root = etree.Element(rng.choice(tags))
    open_nodes: list[tuple[etree._Element, int]] = [(root, 1)]
    for _ in range(n - 1):
        candidates = [(el, lv) for el, lv in open_nodes if lv < max_depth]
        parent, level = rng.choice(candidates)
        child = etree.SubElement(parent, rng.choice(tags))
        open_nodes.append((child, level + 1))
    return root


def gen_doc(shape: str, n: int, seed: int = 0) -> str:
    """XML text of a generated document."""
    if shape not in SHAPES:
        raise unknown_shape(shape, list(SHAPES))
    if n < 1:
        raise invalid_generator_size(n)

    if shape == "demo":
        root = _demo(n)
    elif shape == "suboptimal":
        root = _suboptimal(n)
    else:
        root = random_tree(random.Random(seed), n)
    return etree.tostring(root, encoding="unicode")
