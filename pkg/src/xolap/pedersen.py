"""A-priori normalization (MakeCovering, MakeOnto, MakeStrict) and a plain group-by.

Placeholders are always the level-qualified ``Other`` member, so a
normalized warehouse grouped the traditional way yields the same groups as
QBS on the raw warehouse.  That equivalence is what the tests and the
benchmark gate check.
"""

from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass
from time import perf_counter
from typing import Optional

from .aggregate import Accumulator, fold_sources, measure_sources
from .errors import NotNormalized, SchemaError
from .model import Kind, MDDataTree, Node, segment
from .pattern import TreePatternQuery
from .schema import FUSED_SUFFIX, OTHER, HierarchySchema, WarehouseSchema, base_level, fuse

#: One normalization action.  ``anchor`` is the path of the original node the
#: placeholder was inserted above (``cover``/``onto``) or below (``tail``), or
#: of the node whose children were fused (``fuse``).
Action = namedtuple("Action", "action fact dimension level anchor detail")


@dataclass(frozen=True)
class NormalizationPlan:
    placeholder: str = OTHER
    fused_suffix: str = FUSED_SUFFIX

    def check(self, schema: WarehouseSchema) -> None:
        if self.placeholder != OTHER or self.fused_suffix != FUSED_SUFFIX:
            raise SchemaError("only the level-qualified 'Other' / '_fused' convention is supported")
        for dim in schema.dimensions:
            for level in dim.levels:
                if self.placeholder in level.value_domain:
                    raise SchemaError(f"placeholder {self.placeholder!r} collides with a value of {dim.dimension_name}.{level.name}")

    def fused_level(self, level: str) -> str:
        return base_level(level) + self.fused_suffix


def _line(a: Action) -> str:
    return f"{a.action.upper()} fact={a.fact} dim={a.dimension} level={a.level} at={a.anchor} {a.detail}".rstrip()


def format_log(actions) -> str:
    return "".join(_line(a) + "\n" for a in actions)


def merge_siblings(nodes) -> tuple:
    """Collapse siblings denoting the same member, merging their children."""
    slots: dict = {}
    for n in nodes:
        key = (n.label, n.value)
        if key in slots:
            slots[key][1].extend(n.children)
        else:
            slots[key] = [n, list(n.children)]
    out = []
    for first, children in slots.values():
        if len(children) != len(first.children) or any(a is not b for a, b in zip(children, first.children)):
            first = Node(first.kind, first.label, first.value, first.attrs, merge_siblings(children))
        out.append(first)
    return tuple(out)


def _placeholder(hierarchy: HierarchySchema, rank: int, child: Optional[Node], plan) -> Node:
    children = (child,) if child is not None else ()
    return Node(Kind.LEVEL, hierarchy.levels[rank - 1].name, plan.placeholder, (), children)


class _Coverer:
    def __init__(self, hierarchy, plan, log, fact_index, onto_only):
        self.h = hierarchy
        self.plan = plan
        self.log = log
        self.fact = fact_index
        self.onto_only = onto_only

    def record(self, kind, rank, anchor):
        if self.log is not None:
            level = self.h.levels[rank - 1].name
            self.log.append(Action(kind, self.fact, self.h.dimension_name, level, anchor, ""))

    def tail(self, rank: int, anchor: str) -> tuple:
        """Placeholder chain for every level coarser than ``rank``."""
        node = None
        for k in range(self.h.depth, rank, -1):
            self.record("tail", k, anchor)
            node = _placeholder(self.h, k, node, self.plan)
        return (node,) if node is not None else ()

    def children(self, nodes, parent_rank: int, parent_path: str) -> tuple:
        out = []
        for c in nodes:
            rank = self.h.rank(c.label)
            path = f"{parent_path}/{segment(c)}"
            if c.children:
                sub = self.children(c.children, rank, path)
            elif self.onto_only:
                sub = ()
            else:
                sub = self.tail(rank, path)
            node = c if sub == c.children else Node(c.kind, c.label, c.value, c.attrs, sub)
            if not self.onto_only or parent_rank == 0:
                for k in range(rank - 1, parent_rank, -1):
                    self.record("onto" if parent_rank == 0 and self.onto_only else "cover", k, path)
                    node = _placeholder(self.h, k, node, self.plan)
            out.append(node)
        return merge_siblings(out)


def _transform_dims(tree, schema, plan, log, onto_only):
    plan = plan or NormalizationPlan()
    plan.check(schema)
    facts = []
    for index, fact in enumerate(tree.facts, start=1):
        if fact.kind is not Kind.FACT:
            facts.append(fact)
            continue
        present = set()
        children = []
        last_dim = -1
        for c in fact.children:
            if c.kind is Kind.DIMENSION and schema.has_dimension(c.label):
                present.add(c.label)
                cov = _Coverer(schema.dimension(c.label), plan, log, index, onto_only)
                dim_path = f"/w/fact[{index}]/{segment(c)}"
                if c.children:
                    sub = cov.children(c.children, 0, dim_path)
                else:
                    sub = () if onto_only else cov.tail(0, dim_path)
                c = c if sub == c.children else Node(c.kind, c.label, c.value, c.attrs, sub)
                last_dim = len(children)
            children.append(c)
        if not onto_only:
            missing = []
            for h in schema.dimensions:
                if h.dimension_name not in present:
                    cov = _Coverer(h, plan, log, index, False)
                    missing.append(Node(Kind.DIMENSION, h.dimension_name, None, (), cov.tail(0, f"/w/fact[{index}]")))
            children[last_dim + 1:last_dim + 1] = missing
        children = tuple(children)
        facts.append(fact if children == fact.children else Node(fact.kind, fact.label, fact.value, fact.attrs, children))
    return MDDataTree.from_facts(facts)


def make_covering(tree: MDDataTree, schema: WarehouseSchema, plan: Optional[NormalizationPlan] = None, log: Optional[list] = None) -> MDDataTree:
    """Fill every skipped level of every roll-up path with an ``Other`` placeholder.

    Gaps between a node and a coarser parent, at the start of a path (the
    fact links to a coarse level) and at its end (the path stops early) are
    all filled, so every path visits every schema level.
    """
    return _transform_dims(tree, schema, plan, log, onto_only=False)


def make_onto(tree: MDDataTree, schema: WarehouseSchema, plan: Optional[NormalizationPlan] = None, log: Optional[list] = None) -> MDDataTree:
    """Pad paths whose finer levels are missing (the fact links to a coarse level)."""
    return _transform_dims(tree, schema, plan, log, onto_only=True)


class _Strictifier:
    def __init__(self, hierarchy, plan, log, fact_index):
        self.h = hierarchy
        self.plan = plan
        self.log = log
        self.fact = fact_index

    def children(self, nodes, path: str) -> tuple:
        groups: dict = {}
        for n in nodes:
            groups.setdefault(base_level(n.label), []).append(n)
        out = []
        for level, members in groups.items():
            values = list(dict.fromkeys(n.value for n in members))
            merged = [c for n in members for c in n.children]
            if len(values) == 1:
                first = members[0]
                sub = self.children(merged, f"{path}/{segment(first)}")
                if len(members) == 1 and sub == first.children:
                    out.append(first)
                else:
                    out.append(Node(first.kind, first.label, first.value, first.attrs, sub))
                continue
            label = self.plan.fused_level(level)
            value = fuse(values)
            if self.log is not None:
                self.log.append(Action("fuse", self.fact, self.h.dimension_name, label, path, value))
            fused = Node(Kind.LEVEL, label, value)
            sub = self.children(merged, f"{path}/{segment(fused)}")
            out.append(Node(Kind.LEVEL, label, value, (), sub))
        return tuple(out)


def make_strict(tree: MDDataTree, schema: WarehouseSchema, plan: Optional[NormalizationPlan] = None, log: Optional[list] = None) -> MDDataTree:
    """Relink every child with several parents at a level to one fused parent.

    The fused node (level ``<L>_fused``, value such as ``1-2``) replaces the
    parents and links upward to all of their own parents, which are fused in
    turn when they differ.
    """
    plan = plan or NormalizationPlan()
    plan.check(schema)
    facts = []
    for index, fact in enumerate(tree.facts, start=1):
        children = []
        for c in fact.children:
            if c.kind is Kind.DIMENSION and schema.has_dimension(c.label):
                st = _Strictifier(schema.dimension(c.label), plan, log, index)
                sub = st.children(c.children, f"/w/fact[{index}]/{segment(c)}")
                if sub != c.children:
                    c = Node(c.kind, c.label, c.value, c.attrs, sub)
            children.append(c)
        children = tuple(children)
        facts.append(fact if children == fact.children else Node(fact.kind, fact.label, fact.value, fact.attrs, children))
    return MDDataTree.from_facts(facts)


def normalize(tree: MDDataTree, schema: WarehouseSchema, plan: Optional[NormalizationPlan] = None, log: Optional[list] = None) -> MDDataTree:
    return make_strict(make_covering(tree, schema, plan, log), schema, plan, log)


def plain_group_by(tree: MDDataTree, query: TreePatternQuery, schema: WarehouseSchema, *, timings: Optional[dict] = None) -> MDDataTree:
    """Traditional single-valued group-by over a normalized warehouse.

    A grouping element on level L matches the fact's L or L_fused node; the
    key is that node's value.  Raises NotNormalized on a non-strict or
    incomplete instance at a queried level.
    """
    start = perf_counter()
    ges = []
    for dim, level in query.grouping_elements:
        schema.dimension(dim).rank(level)
        ges.append((dim, base_level(level), level))
    predicate = query.predicate
    if predicate is not None:
        predicate.bind(schema)
    groups: dict = {}
    for index, fact in enumerate(tree.facts, start=1):
        if fact.kind is not Kind.FACT or (predicate is not None and not predicate.evaluate(fact)):
            continue
        dims = {c.label: c for c in fact.children if c.kind is Kind.DIMENSION}
        key = []
        for dim, level, _ in ges:
            node = dims.get(dim)
            if node is None:
                raise NotNormalized(f"fact {index} lacks dimension {dim!r}")
            value = None
            while node.children:
                if len(node.children) > 1:
                    raise NotNormalized(f"fact {index}: non-strict {dim} instance below {node.label!r}")
                node = node.children[0]
                if base_level(node.label) == level:
                    value = node.value
                    break
            if value is None:
                raise NotNormalized(f"fact {index}: {dim} instance never reaches level {level!r}")
            key.append(value)
        key = tuple(key)
        accs = groups.get(key)
        if accs is None:
            accs = groups[key] = [Accumulator(a.fn) for a in query.aggregations]
        fold_sources(accs, measure_sources(fact, query.aggregations))
    out = []
    for key, accs in groups.items():
        dims: dict = {}
        for (dim, _, out_level), value in zip(ges, key):
            dims.setdefault(dim, []).append(Node(Kind.LEVEL, out_level, value))
        children = [Node(Kind.DIMENSION, d, None, (), tuple(levels)) for d, levels in dims.items()]
        for agg, acc in zip(query.aggregations, accs):
            node = acc.to_node(agg)
            if node is not None:
                children.append(node)
        out.append(Node(Kind.FACT, "fact", None, (), tuple(children)))
    result = MDDataTree.from_facts(out)
    if timings is not None:
        timings["matching"] = timings["total"] = perf_counter() - start
    return result
