"""Multidimensional data trees.

A warehouse is a rooted, ordered tree: the root ``w`` holds ``fact`` nodes,
each fact holds ``dim`` and ``msr`` nodes, and every dimension holds nested
``lvl`` nodes, each child one level coarser than its parent (roll-up runs
downward in the document).  A level node with several children at the same
level is non-strict; a roll-up path that never visits a schema level is
incomplete.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Context, Decimal, InvalidOperation
from typing import Iterator, Union

Number = Union[int, Decimal]

#: Non-integer arithmetic: 12 significant digits, round-half-even.
DECIMAL_CONTEXT = Context(prec=12, rounding=ROUND_HALF_EVEN)


class Kind(str, enum.Enum):
    WAREHOUSE = "w"
    FACT = "fact"
    DIMENSION = "dim"
    LEVEL = "lvl"
    MEASURE = "msr"
    AGGREGATE = "agg"


@dataclass(frozen=True, slots=True)
class Node:
    """One tree node.

    ``label`` is the dimension, level or measure name (``w``/``fact`` for the
    structural nodes).  ``attrs`` holds sorted extra attributes: member
    attributes on levels, ``fn`` and carried state on aggregates.
    """

    kind: Kind
    label: str
    value: object = None
    attrs: tuple = ()
    children: tuple = ()

    def attr(self, key, default=None):
        for k, v in self.attrs:
            if k == key:
                return v
        return default


@dataclass(frozen=True)
class MDDataTree:
    root: Node

    @classmethod
    def empty(cls) -> "MDDataTree":
        return cls(Node(Kind.WAREHOUSE, "w"))

    @classmethod
    def from_facts(cls, facts) -> "MDDataTree":
        return cls(Node(Kind.WAREHOUSE, "w", children=tuple(facts)))

    @property
    def facts(self) -> tuple:
        return self.root.children

    def iter_nodes(self) -> Iterator[Node]:
        """Preorder traversal; the position in this order is the node id."""
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    @property
    def nodes(self) -> list[Node]:
        return list(self.iter_nodes())

    def node_count(self) -> int:
        return sum(1 for _ in self.iter_nodes())


def parse_number(text: str) -> Number:
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    try:
        d = Decimal(text)
    except InvalidOperation:
        raise ValueError(f"not a number: {text!r}") from None
    if not d.is_finite():
        raise ValueError(f"not a finite number: {text!r}")
    return d


def format_number(x: Number) -> str:
    if isinstance(x, Decimal):
        return format(x, "f")
    return str(x)


def dimension_nodes(fact: Node) -> dict[str, Node]:
    return {c.label: c for c in fact.children if c.kind is Kind.DIMENSION}


def iter_paths(dim: Node) -> Iterator[tuple[Node, ...]]:
    """Every roll-up path (root-to-leaf sequence of level nodes) of a dimension.

    A dimension without level nodes yields a single empty path.
    """
    if not dim.children:
        yield ()
        return
    stack = [(c, (c,)) for c in reversed(dim.children)]
    while stack:
        node, path = stack.pop()
        if not node.children:
            yield path
            continue
        for c in reversed(node.children):
            stack.append((c, path + (c,)))


def segment(node: Node, fact_index: int | None = None) -> str:
    if node.kind is Kind.FACT:
        return f"fact[{fact_index}]"
    if node.kind is Kind.DIMENSION:
        return f"dim[{node.label}]"
    if node.kind is Kind.LEVEL:
        return f"lvl[{node.label}={node.value}]"
    return node.kind.value
