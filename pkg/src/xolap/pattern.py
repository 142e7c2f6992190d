"""Tree-pattern queries: grouping elements, aggregations and selection formulas.

Query files are line oriented::

    # total cost of projects per team and per customer
    group project.Team
    group customer.Customer
    agg sum(cost)
    where cost > 100 and not (project.Team = 2)

``where`` lines are conjoined.  ``passthrough`` on its own line keeps the
non-grouped dimensions of the first fact of every group.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass
from decimal import Decimal
from typing import Optional, Union

from .errors import QuerySyntaxError, UnknownMeasure, UnknownPath
from .model import Kind, MDDataTree, Node, Number, dimension_nodes, parse_number
from .schema import WarehouseSchema, base_level


class AggFn(str, enum.Enum):
    SUM = "sum"
    COUNT = "count"
    MIN = "min"
    MAX = "max"
    AVG = "avg"


@dataclass(frozen=True)
class Aggregation:
    fn: AggFn
    measure: str  # "*" counts facts

    def __post_init__(self):
        object.__setattr__(self, "fn", AggFn(self.fn))
        if self.measure == "*" and self.fn is not AggFn.COUNT:
            raise QuerySyntaxError(f"{self.fn.value}(*) is not defined; only count(*) is")

    def __str__(self):
        return f"{self.fn.value}({self.measure})"


# --- formulas -----------------------------------------------------------

_OPS = {"=": "=", "!=": "!=", "≠": "!=", "<": "<", "<=": "<=", "≤": "<=", ">": ">", ">=": ">=", "≥": ">="}


@dataclass(frozen=True)
class FieldPath:
    """``dimension.level`` addresses level values; a bare name, a measure."""

    name: str
    dimension: Optional[str] = None

    @property
    def is_measure(self) -> bool:
        return self.dimension is None

    def __str__(self):
        return self.name if self.dimension is None else f"{self.dimension}.{self.name}"


def _cmp(op: str, a, b) -> bool:
    if op == "=":
        return a == b
    if op == "!=":
        return a != b
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    return a >= b


@dataclass(frozen=True)
class Compare:
    path: FieldPath
    op: str
    literal: Union[str, int, Decimal]

    def __post_init__(self):
        if self.op not in _OPS:
            raise QuerySyntaxError(f"unknown comparison {self.op!r}")
        object.__setattr__(self, "op", _OPS[self.op])
        if self.path.is_measure and isinstance(self.literal, str):
            raise QuerySyntaxError(f"measure {self.path} compares against a number, not {self.literal!r}")

    def evaluate(self, fact: Node) -> bool:
        if self.path.is_measure:
            value = _measure_value(fact, self.path.name)
            return value is not None and _cmp(self.op, value, self.literal)
        dim = dimension_nodes(fact).get(self.path.dimension)
        if dim is None:
            return False
        level = self.path.name
        stack = list(dim.children)
        while stack:
            node = stack.pop()
            if base_level(node.label) == level and self._test_level(node.value):
                return True
            stack.extend(node.children)
        return False

    def _test_level(self, value: str) -> bool:
        lit = self.literal
        if not isinstance(lit, str):
            try:
                return _cmp(self.op, parse_number(value), lit)
            except ValueError:
                lit = str(lit)
        return _cmp(self.op, value, lit)

    def bind(self, schema: WarehouseSchema) -> None:
        if self.path.is_measure:
            try:
                schema.check_measure(self.path.name)
            except UnknownMeasure as exc:
                raise UnknownPath(f"predicate path {self.path}: {exc}") from None
            return
        try:
            schema.dimension(self.path.dimension).rank(self.path.name)
        except UnknownPath as exc:
            raise UnknownPath(f"predicate path {self.path}: {exc}") from None


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def evaluate(self, fact):
        return self.left.evaluate(fact) and self.right.evaluate(fact)

    def bind(self, schema):
        self.left.bind(schema)
        self.right.bind(schema)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def evaluate(self, fact):
        return self.left.evaluate(fact) or self.right.evaluate(fact)

    def bind(self, schema):
        self.left.bind(schema)
        self.right.bind(schema)


@dataclass(frozen=True)
class Not:
    operand: "Formula"

    def evaluate(self, fact):
        return not self.operand.evaluate(fact)

    def bind(self, schema):
        self.operand.bind(schema)


Formula = Union[Compare, And, Or, Not]


def _measure_value(fact: Node, name: str) -> Optional[Number]:
    found = None
    for c in fact.children:
        if c.label != name:
            continue
        if c.kind is Kind.MEASURE:
            return c.value
        if c.kind is Kind.AGGREGATE and found is None:
            found = c.value
    return found


# --- query --------------------------------------------------------------


@dataclass(frozen=True)
class TreePatternQuery:
    grouping_elements: tuple[tuple[str, str], ...]
    aggregations: tuple[Aggregation, ...]
    predicate: Optional[Formula] = None
    pass_through: bool = False

    def __post_init__(self):
        ges = tuple((str(d), str(lv)) for d, lv in self.grouping_elements)
        object.__setattr__(self, "grouping_elements", ges)
        object.__setattr__(self, "aggregations", tuple(self.aggregations))
        if not ges:
            raise QuerySyntaxError("a query needs at least one grouping element")
        if len(set(ges)) != len(ges):
            raise QuerySyntaxError("grouping elements must be distinct")
        if not self.aggregations:
            raise QuerySyntaxError("a query needs at least one aggregation")

    def bind(self, schema: WarehouseSchema) -> "TreePatternQuery":
        """Check every name against the schema; returns self for chaining."""
        for dim, level in self.grouping_elements:
            schema.dimension(dim).rank(level)
        for agg in self.aggregations:
            if agg.measure != "*":
                schema.check_measure(agg.measure)
        if self.predicate is not None:
            self.predicate.bind(schema)
        return self


_TOKEN = re.compile(
    r'\s*(?:(?P<lp>\()|(?P<rp>\))|(?P<op><=|>=|!=|≠|≤|≥|=|<|>)|(?P<str>"(?:[^"\\]|\\.)*")|(?P<word>[^\s()<>=!"≠≤≥]+))'
)
_KEYWORDS = {"and", "or", "not"}


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise QuerySyntaxError(f"cannot tokenize {text[pos:]!r}")
        pos = m.end()
        tokens.append((m.lastgroup, m.group(m.lastgroup)))
    return tokens


class _FormulaParser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        if tok[0] is None:
            raise QuerySyntaxError("unexpected end of formula")
        self.i += 1
        return tok

    def parse(self) -> Formula:
        f = self.disjunction()
        if self.i != len(self.tokens):
            raise QuerySyntaxError(f"unexpected token {self.tokens[self.i][1]!r}")
        return f

    def disjunction(self):
        f = self.conjunction()
        while self.peek() == ("word", "or"):
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.negation()
        while self.peek() == ("word", "and"):
            self.take()
            f = And(f, self.negation())
        return f

    def negation(self):
        if self.peek() == ("word", "not"):
            self.take()
            return Not(self.negation())
        if self.peek()[0] == "lp":
            self.take()
            f = self.disjunction()
            if self.take()[0] != "rp":
                raise QuerySyntaxError("missing ')'")
            return f
        return self.atom()

    def atom(self):
        kind, text = self.take()
        if kind != "word" or text in _KEYWORDS:
            raise QuerySyntaxError(f"expected a path, got {text!r}")
        dim, dot, name = text.partition(".")
        path = FieldPath(name, dim) if dot else FieldPath(text)
        if not path.name or (dot and not dim):
            raise QuerySyntaxError(f"malformed path {text!r}")
        kind, op = self.take()
        if kind != "op":
            raise QuerySyntaxError(f"expected a comparison after {text}, got {op!r}")
        kind, lit = self.take()
        if kind == "str":
            literal = json.loads(lit)
        elif kind == "word" and lit not in _KEYWORDS:
            try:
                literal = parse_number(lit)
            except ValueError:
                literal = lit
        else:
            raise QuerySyntaxError(f"expected a literal, got {lit!r}")
        return Compare(path, op, literal)


def parse_formula(text: str) -> Formula:
    return _FormulaParser(text).parse()


def format_formula(f: Formula) -> str:
    def wrap(g):
        return format_formula(g) if isinstance(g, Compare) else f"({format_formula(g)})"

    if isinstance(f, Compare):
        lit = f.literal
        if isinstance(lit, str):
            bare = bool(re.fullmatch(r'[^\s()<>=!"≠≤≥]+', lit)) and lit not in _KEYWORDS
            if bare:
                try:
                    parse_number(lit)
                    bare = False
                except ValueError:
                    pass
            text = lit if bare else json.dumps(lit, ensure_ascii=False)
        else:
            text = format(lit, "f") if isinstance(lit, Decimal) else str(lit)
        return f"{f.path} {f.op} {text}"
    if isinstance(f, Not):
        return f"not {wrap(f.operand)}"
    joiner = " and " if isinstance(f, And) else " or "
    return wrap(f.left) + joiner + wrap(f.right)


_AGG_LINE = re.compile(r"^(\w+)\s*\(\s*([^()\s]+)\s*\)$")


def parse_query(text: Union[str, bytes], schema: Optional[WarehouseSchema] = None) -> TreePatternQuery:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    groups, aggs, preds = [], [], []
    pass_through = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        if word == "group":
            dim, dot, level = rest.partition(".")
            if not dot or not dim or not level or " " in rest:
                raise QuerySyntaxError(f"line {lineno}: expected 'group <dimension>.<level>'")
            groups.append((dim, level))
        elif word == "agg":
            m = _AGG_LINE.match(rest)
            if not m:
                raise QuerySyntaxError(f"line {lineno}: expected 'agg <fn>(<measure>)'")
            try:
                aggs.append(Aggregation(AggFn(m.group(1)), m.group(2)))
            except ValueError:
                raise QuerySyntaxError(f"line {lineno}: unknown aggregation function {m.group(1)!r}") from None
        elif word == "where":
            try:
                preds.append(parse_formula(rest))
            except QuerySyntaxError as exc:
                raise QuerySyntaxError(f"line {lineno}: {exc}") from None
        elif word == "passthrough" and not rest:
            pass_through = True
        else:
            raise QuerySyntaxError(f"line {lineno}: unknown directive {word!r}")
    predicate = None
    for p in preds:
        predicate = p if predicate is None else And(predicate, p)
    query = TreePatternQuery(tuple(groups), tuple(aggs), predicate, pass_through)
    if schema is not None:
        query.bind(schema)
    return query


def format_query(query: TreePatternQuery) -> str:
    lines = [f"group {d}.{lv}" for d, lv in query.grouping_elements]
    lines += [f"agg {a}" for a in query.aggregations]
    if query.predicate is not None:
        lines.append(f"where {format_formula(query.predicate)}")
    if query.pass_through:
        lines.append("passthrough")
    return "\n".join(lines) + "\n"


def load_query(path, schema: Optional[WarehouseSchema] = None) -> TreePatternQuery:
    with open(path, "rb") as fh:
        return parse_query(fh.read(), schema)


def match_pattern(
    tree: MDDataTree,
    pattern: Union[TreePatternQuery, Formula],
    schema: Optional[WarehouseSchema] = None,
) -> MDDataTree:
    """Selection: the facts satisfying the pattern's formula, subtrees intact."""
    formula = pattern.predicate if isinstance(pattern, TreePatternQuery) else pattern
    if formula is None:
        return MDDataTree(tree.root)
    if schema is not None:
        formula.bind(schema)
    kept = tuple(f for f in tree.facts if formula.evaluate(f))
    return MDDataTree.from_facts(kept)
