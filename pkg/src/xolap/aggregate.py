"""Distributive aggregate state shared by QBS and the plain group-by."""

from __future__ import annotations

from decimal import Decimal
from typing import Optional

from .errors import NonReaggregable
from .model import DECIMAL_CONTEXT, Kind, Node, Number, format_number, parse_number
from .pattern import AggFn, Aggregation


def add(a: Number, b: Number) -> Number:
    """Exact for integers; 12-digit round-half-even otherwise."""
    if type(a) is int and type(b) is int:
        return a + b
    return DECIMAL_CONTEXT.add(Decimal(a), Decimal(b))


class Accumulator:
    """Running value of one aggregation within one group.

    ``avg`` keeps a (sum, count) pair so it can be re-aggregated by a later
    roll-up stage; the average itself is only computed by ``value``.
    """

    __slots__ = ("fn", "total", "count")

    def __init__(self, fn: AggFn):
        self.fn = fn
        self.total: Optional[Number] = None
        self.count = 0

    def fold(self, x: Number) -> None:
        fn = self.fn
        if fn is AggFn.COUNT:
            self.count += 1
        elif fn is AggFn.SUM or fn is AggFn.AVG:
            self.total = x if self.total is None else add(self.total, x)
            self.count += 1
        elif fn is AggFn.MIN:
            if self.total is None or x < self.total:
                self.total = x
        elif self.total is None or x > self.total:
            self.total = x

    def fold_partial(self, node: Node) -> None:
        """Merge an aggregate node produced by an earlier stage."""
        fn = self.fn
        if fn is AggFn.COUNT:
            self.count += int(node.value)
        elif fn is AggFn.AVG:
            s, n = node.attr("sum"), node.attr("n")
            if s is None or n is None:
                raise NonReaggregable(f"avg({node.label}) was finalized and cannot be re-aggregated")
            s = parse_number(s)
            self.total = s if self.total is None else add(self.total, s)
            self.count += int(n)
        elif fn is AggFn.SUM:
            self.total = node.value if self.total is None else add(self.total, node.value)
        else:
            self.fold(node.value)

    @property
    def empty(self) -> bool:
        return self.total is None and self.count == 0

    def value(self) -> Optional[Number]:
        fn = self.fn
        if fn is AggFn.COUNT:
            return self.count
        if fn is AggFn.AVG:
            if not self.count:
                return None
            return DECIMAL_CONTEXT.divide(Decimal(self.total), Decimal(self.count))
        return self.total

    def to_node(self, agg: Aggregation, finalize: bool = True) -> Optional[Node]:
        value = self.value()
        if value is None:
            return None
        attrs = [("fn", self.fn.value)]
        if self.fn is AggFn.AVG and not finalize:
            attrs += [("n", str(self.count)), ("sum", format_number(self.total))]
        return Node(Kind.AGGREGATE, agg.measure, value, tuple(sorted(attrs)))


def measure_sources(fact: Node, aggregations) -> list:
    """Resolve, per aggregation, what the fact contributes.

    Each entry is ``("raw", number)``, ``("partial", agg_node)``, ``("fact", None)``
    for count(*), or None when the fact lacks the measure.
    """
    raw = {}
    partial = {}
    for c in fact.children:
        if c.kind is Kind.MEASURE:
            raw.setdefault(c.label, c.value)
        elif c.kind is Kind.AGGREGATE:
            partial.setdefault(c.label, {}).setdefault(c.attr("fn"), c)
    out = []
    for agg in aggregations:
        if agg.measure == "*":
            node = partial.get("*", {}).get("count")
            out.append(("fact", None) if node is None else ("partial", node))
        elif agg.measure in raw:
            out.append(("raw", raw[agg.measure]))
        elif agg.measure in partial:
            node = partial[agg.measure].get(agg.fn.value)
            if node is None:
                have = ", ".join(sorted(partial[agg.measure]))
                raise NonReaggregable(f"{agg} cannot be computed from earlier {have}({agg.measure}) results")
            out.append(("partial", node))
        else:
            out.append(None)
    return out


def fold_sources(accumulators, sources) -> None:
    for acc, src in zip(accumulators, sources):
        if src is None:
            continue
        tag, payload = src
        if tag == "raw":
            acc.fold(payload)
        elif tag == "partial":
            acc.fold_partial(payload)
        else:
            acc.count += 1
