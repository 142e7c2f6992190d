"""Query-based summarizability (QBS) grouping and the chained roll-up operator.

For every fact, each grouping element gets a *fused* key: the set of all
values the fact reaches at the grouping level through its roll-up paths,
plus a level-qualified ``Other`` when some path misses the level.  Facts
with equal key lists share one witness tree, whose aggregates are updated in
place.  Chaining QBS calls over coarser levels gives a roll-up.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from time import perf_counter
from typing import Iterable, Optional, Sequence, Union

from .aggregate import Accumulator, fold_sources, measure_sources
from .errors import InvalidRollup
from .model import Kind, MDDataTree, Node
from .pattern import TreePatternQuery
from .schema import OTHER, HierarchySchema, WarehouseSchema, base_level, fuse


@dataclass(frozen=True)
class GroupKey:
    dimension: str
    level: str
    members: tuple[str, ...]
    other: bool = False

    def __post_init__(self):
        members = tuple(self.members)
        if OTHER in members:
            raise ValueError("use other=True instead of an 'Other' member")
        ordered = tuple(sorted(set(members), key=lambda s: s.encode("utf-8")))
        if ordered != members:
            raise ValueError("members must be sorted by UTF-8 bytes and distinct")
        if not members and not self.other:
            raise ValueError("a group key needs members or Other")

    @classmethod
    def of(cls, dimension: str, level: str, values: Iterable[str], other: bool = False) -> "GroupKey":
        members = sorted({v for v in values if v != OTHER}, key=lambda s: s.encode("utf-8"))
        return cls(dimension, level, tuple(members), other or OTHER in values)

    @property
    def is_other(self) -> bool:
        return self.other and not self.members

    def encode(self) -> str:
        return fuse(self.members, self.other)

    def __str__(self):
        return f"{self.level}[{self.encode()}]"


GroupList = tuple


@dataclass(frozen=True)
class _GE:
    dimension: str
    level: str  # base level name
    out_level: str  # name written to the witness tree
    hierarchy: HierarchySchema
    rank: int


def _bind_ges(query: TreePatternQuery, schema: WarehouseSchema) -> list[_GE]:
    out = []
    for dim, level in query.grouping_elements:
        hierarchy = schema.dimension(dim)
        rank = hierarchy.rank(level)
        out.append(_GE(dim, base_level(level), level, hierarchy, rank))
    return out


def _simple_hit(dim: Optional[Node], level: str, depth: int) -> Optional[Node]:
    """The level node of a strict, complete dimension instance.

    Returns None unless the instance is a single roll-up chain visiting every
    schema level; anything else needs summarizability processing.
    """
    if dim is None:
        return None
    node = dim
    hit = None
    n = 0
    while True:
        children = node.children
        if not children:
            break
        if len(children) != 1:
            return None
        node = children[0]
        n += 1
        if node.label == level:
            hit = node
    if n != depth or hit is None or hit.value == OTHER:
        return None
    return hit


def _resolve(dim: Optional[Node], ge: _GE) -> tuple[set, bool, list]:
    """Fused values, Other flag and retained coarser context for one instance.

    Each roll-up path either visits the grouping level (its value joins the
    group, its coarser nodes become context) or misses it: the path reaches a
    coarser node first (that node becomes the parent of Other) or ends below
    the level.  Either miss adds Other.
    """
    values: set = set()
    other = False
    context: list = []
    if dim is None or not dim.children:
        return values, True, context
    level, rank, hierarchy = ge.level, ge.rank, ge.hierarchy
    stack = list(reversed(dim.children))
    while stack:
        node = stack.pop()
        label = node.label
        if label == level or base_level(label) == level:
            if node.value == OTHER:
                other = True
            else:
                values.add(node.value)
            context.extend(node.children)
        elif hierarchy.rank(label) > rank:
            other = True
            context.append(node)
        elif node.children:
            stack.extend(reversed(node.children))
        else:
            other = True
    return values, other, context


def build_group_key(fact: Node, ge: tuple[str, str], schema: WarehouseSchema) -> GroupKey:
    """Fused key of one fact for one (dimension, level) grouping element.

    Raises UnknownDimension/UnknownLevel for names outside the schema.
    """
    dim, level = ge
    hierarchy = schema.dimension(dim)
    bound = _GE(dim, base_level(level), level, hierarchy, hierarchy.rank(level))
    dim_node = next((c for c in fact.children if c.kind is Kind.DIMENSION and c.label == dim), None)
    values, other, _ = _resolve(dim_node, bound)
    return GroupKey.of(dim, level, values, other)


def _merge(acc: dict, nodes) -> None:
    for n in nodes:
        key = (n.label, n.value)
        slot = acc.get(key)
        if slot is None:
            slot = acc[key] = (n.attrs, {})
        if n.children:
            _merge(slot[1], n.children)


def _unmerge(acc: dict) -> tuple:
    return tuple(
        Node(Kind.LEVEL, label, value, attrs, _unmerge(sub)) for (label, value), (attrs, sub) in acc.items()
    )


class WitnessTree:
    """One output group, updated in place as facts are matched to it."""

    __slots__ = ("group_list", "ges", "query", "accumulators", "contexts", "carried")

    def __init__(self, group_list: tuple, ges: Sequence[_GE], query: TreePatternQuery, first_fact: Node):
        self.group_list = group_list
        self.ges = ges
        self.query = query
        self.accumulators = [Accumulator(a.fn) for a in query.aggregations]
        # per grouping element: None, a node tuple from one strict instance, or a merge dict
        self.contexts: list = [None] * len(ges)
        self.carried = ()
        if query.pass_through:
            grouped = {ge.dimension for ge in ges}
            self.carried = tuple(
                c for c in first_fact.children if c.kind is Kind.DIMENSION and c.label not in grouped
            )

    def update(self, fact: Node, contexts) -> None:
        fold_sources(self.accumulators, measure_sources(fact, self.query.aggregations))
        slots = self.contexts
        for j, ctx in enumerate(contexts):
            if not ctx:
                continue
            cur = slots[j]
            if cur is None:
                if type(ctx) is tuple:
                    slots[j] = ctx
                    continue
                cur = slots[j] = {}
            elif type(cur) is tuple:
                if cur == ctx:
                    continue
                acc: dict = {}
                _merge(acc, cur)
                cur = slots[j] = acc
            _merge(cur, ctx)

    def group_keys(self) -> list[GroupKey]:
        out = []
        for ge, enc in zip(self.ges, self.group_list):
            parts = enc.split("-") if enc not in (OTHER,) else []
            other = enc == OTHER or enc.endswith("-" + OTHER)
            members = [p for p in parts if p != OTHER]
            out.append(GroupKey.of(ge.dimension, ge.out_level, members, other))
        return out

    def to_node(self, finalize: bool = True) -> Node:
        dims: dict[str, list] = {}
        for ge, enc, ctx in zip(self.ges, self.group_list, self.contexts):
            if ctx is None:
                ctx = ()
            elif type(ctx) is dict:
                ctx = _unmerge(ctx)
            dims.setdefault(ge.dimension, []).append(Node(Kind.LEVEL, ge.out_level, enc, (), ctx))
        children = [Node(Kind.DIMENSION, d, None, (), tuple(levels)) for d, levels in dims.items()]
        children.extend(self.carried)
        for agg, acc in zip(self.query.aggregations, self.accumulators):
            node = acc.to_node(agg, finalize)
            if node is not None:
                children.append(node)
        return Node(Kind.FACT, "fact", None, (), tuple(children))


class WitnessTreeList:
    """Witness trees in creation order plus a hash index on their group lists.

    ``linear_scan`` reproduces the literal list search of the original
    algorithm (quadratic overall) for benchmarking.
    """

    def __init__(self, linear_scan: bool = False):
        self.linear_scan = linear_scan
        self._trees: list[WitnessTree] = []
        self._index: dict = {}

    def exists(self, group_list) -> Optional[WitnessTree]:
        if self.linear_scan:
            for wt in self._trees:
                if wt.group_list == group_list:
                    return wt
            return None
        return self._index.get(group_list)

    def add(self, wt: WitnessTree) -> None:
        if wt.group_list in self._index:
            raise ValueError(f"duplicate group list {wt.group_list!r}")
        self._trees.append(wt)
        self._index[wt.group_list] = wt

    def __iter__(self):
        return iter(self._trees)

    def __len__(self):
        return len(self._trees)


def product(wts: Iterable[Union[WitnessTree, Node]], finalize: bool = True) -> MDDataTree:
    """Regroup witness trees, in order, under a single warehouse root."""
    facts = [wt.to_node(finalize) if isinstance(wt, WitnessTree) else wt for wt in wts]
    return MDDataTree.from_facts(facts)


def qbs(
    tree: MDDataTree,
    query: TreePatternQuery,
    schema: WarehouseSchema,
    *,
    linear_scan: bool = False,
    finalize: bool = True,
    timings: Optional[dict] = None,
) -> MDDataTree:
    """Group ``tree`` by the query's grouping elements, summarizability-aware.

    ``timings``, when given, receives seconds for ``summarizability``
    (resolving the dimension instances that are not a single complete
    chain), ``matching`` (group lookup, creation, aggregate update and
    output assembly) and ``total``.  The two phases do not add up to total:
    key extraction for plain instances belongs to neither.
    """
    start = perf_counter()
    ges = _bind_ges(query, schema)
    for agg in query.aggregations:
        if agg.measure != "*":
            schema.check_measure(agg.measure)
    predicate = query.predicate
    if predicate is not None:
        predicate.bind(schema)
    facts = [f for f in tree.facts if f.kind is Kind.FACT and (predicate is None or predicate.evaluate(f))]

    # Step 1: group keys; strict complete instances take the direct path.
    keys: list[list] = []
    contexts: list[list] = []
    pending = []
    for i, fact in enumerate(facts):
        dims = {c.label: c for c in fact.children if c.kind is Kind.DIMENSION}
        krow = [None] * len(ges)
        crow = [None] * len(ges)
        for j, ge in enumerate(ges):
            dim = dims.get(ge.dimension)
            hit = _simple_hit(dim, ge.level, ge.hierarchy.depth)
            if hit is None:
                pending.append((i, j, dim))
            else:
                krow[j] = hit.value
                crow[j] = hit.children
        keys.append(krow)
        contexts.append(crow)
    t_summ = perf_counter()
    for i, j, dim in pending:
        values, other, ctx = _resolve(dim, ges[j])
        keys[i][j] = fuse(values, other)
        contexts[i][j] = ctx
    t_match = perf_counter()

    # Step 2: group matching.
    wts = WitnessTreeList(linear_scan)
    for i, fact in enumerate(facts):
        group_list = tuple(keys[i])
        wt = wts.exists(group_list)
        if wt is None:
            wt = WitnessTree(group_list, ges, query, fact)
            wts.add(wt)
        wt.update(fact, contexts[i])
    result = product(wts, finalize)
    t_done = perf_counter()

    if timings is not None:
        timings["summarizability"] = t_match - t_summ
        timings["matching"] = t_done - t_match
        timings["total"] = perf_counter() - start
    return result


def rollup(
    tree: MDDataTree,
    stages: Sequence[TreePatternQuery],
    schema: WarehouseSchema,
    *,
    linear_scan: bool = False,
) -> MDDataTree:
    """Chain QBS calls; each stage's output tree feeds the next stage.

    Intermediate stages keep avg as re-aggregable (sum, count) state.
    """
    if not stages:
        raise InvalidRollup("a roll-up needs at least one stage")
    for prev, cur in zip(stages, stages[1:]):
        for dim, level in cur.grouping_elements:
            hierarchy = schema.dimension(dim)
            rank = hierarchy.rank(level)
            earlier = [hierarchy.rank(lv) for d, lv in prev.grouping_elements if d == dim]
            if not earlier:
                raise InvalidRollup(f"dimension {dim!r} was not grouped by the previous stage")
            if min(earlier) > rank:
                raise InvalidRollup(f"level {dim}.{level} is finer than the previous stage's grouping")
    last = len(stages) - 1
    for k, stage in enumerate(stages):
        tree = qbs(tree, stage, schema, linear_scan=linear_scan, finalize=(k == last))
    return tree


def result_rows(tree: MDDataTree) -> Counter:
    """Multiset of (group list, aggregates) rows of a grouped tree.

    Group members are compared by base level, so ``Team_fused[1-2]`` and a
    QBS ``Team[1-2]`` key are the same group.
    """
    rows: Counter = Counter()
    for fact in tree.facts:
        keys = []
        aggs = []
        for c in fact.children:
            if c.kind is Kind.DIMENSION:
                keys.extend((c.label, base_level(n.label), n.value) for n in c.children)
            elif c.kind is Kind.AGGREGATE:
                aggs.append((c.attr("fn"), c.label, c.value))
        rows[(tuple(keys), tuple(aggs))] += 1
    return rows
