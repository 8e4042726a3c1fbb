"""
Text form of twig patterns.

    query := axis node step*
    step  := axis node
    axis  := '//' | '/'
    node  := '$'? tag pred?
    tag   := '@'? [A-Za-z_][A-Za-z0-9_.-]*
    pred  := '[' path (' and ' path)* ']'
    path  := '.'? axis node step*

`$` marks an output node. The leading axis is the edge from the virtual
document root, so `/r` only matches the root element.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from app.errors import no_output_node, output_lca_not_output, query_syntax_error
from app.model import Axis, QueryNode, TwigQuery

_TAG = re.compile(r"@?[A-Za-z_][A-Za-z0-9_.\-]*")
_AND = re.compile(r"\s+and\s+")


@dataclass
class _Draft:
    tag: str
    is_output: bool
    axis: Axis
    children: list["_Draft"] = field(default_factory=list)

    def freeze(self, is_root: bool = False) -> QueryNode:
        return QueryNode(
            tag=self.tag,
            is_output=self.is_output,
            axis=None if is_root else self.axis,
            children=tuple(c.freeze() for c in self.children),
        )


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    def fail(self, expected: str):
        raise query_syntax_error(self.text, self.pos, expected)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_axis(self) -> bool:
        return self.text.startswith("/", self.pos)

    def axis(self) -> Axis:
        if self.text.startswith("//", self.pos):
            self.pos += 2
            return Axis.AD
        if self.text.startswith("/", self.pos):
            self.pos += 1
            return Axis.PC
        self.fail("'/' or '//'")

    def chain(self) -> _Draft:
        head = self.node(self.axis())
        current = head
        while self.at_axis():
            step = self.node(self.axis())
            current.children.append(step)
            current = step
        return head

    def node(self, axis: Axis) -> _Draft:
        is_output = self.text.startswith("$", self.pos)
        if is_output:
            self.pos += 1
        match = _TAG.match(self.text, self.pos)
        if match is None:
            self.fail("a tag name")
        self.pos = match.end()
        draft = _Draft(match.group(0), is_output, axis)
        if self.text.startswith("[", self.pos):
            self.pos += 1
            draft.children.extend(self.predicate())
        return draft

    def predicate(self) -> list[_Draft]:
        paths = []
        while True:
            self.skip_ws()
            if self.text.startswith("./", self.pos):
                self.pos += 1
            paths.append(self.chain())
            sep = _AND.match(self.text, self.pos)
            if sep is not None:
                self.pos = sep.end()
                continue
            self.skip_ws()
            if self.text.startswith("]", self.pos):
                self.pos += 1
                return paths
            self.fail("']' or ' and '")


def parse_tpq(text: str, require_output: bool = True) -> TwigQuery:
    """
    Parse a twig pattern.

    Raises QuerySyntaxError on grammar errors, when no node carries `$`
    (unless `require_output` is False), and when two output nodes meet
    at a non-output ancestor.
    """
    parser = _Parser(text.strip())
    root = parser.chain()
    parser.skip_ws()
    if parser.pos != len(parser.text):
        parser.fail("end of pattern")

    query = TwigQuery(root.freeze(is_root=True), root.axis)
    if query.n_o == 0:
        if require_output:
            raise no_output_node(text)
        return query
    bad = query.unsafe_output_lca()
    if bad is not None:
        raise output_lca_not_output(text, query.tag(bad))
    return query


def _render(node: QueryNode, axis: Axis) -> str:
    text = axis.token + ("$" if node.is_output else "") + node.tag
    kids = node.children
    if len(kids) > 1:
        text += "[" + " and ".join("." + _render(k, k.axis) for k in kids[:-1]) + "]"
    if kids:
        text += _render(kids[-1], kids[-1].axis)
    return text


def render_tpq(query: TwigQuery) -> str:
    """Canonical text of a query; parse_tpq(render_tpq(q)) == q."""
    return _render(query.root, query.root_axis)
