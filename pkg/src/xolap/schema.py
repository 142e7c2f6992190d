"""Hierarchy metadata: level ordering, parent levels and value domains.

Schema files are INI documents::

    [warehouse]
    measures = cost

    [dimension project]
    levels = Project, Team, Branch
    Project = A, B, C, D
    Team = 1..4
    Branch = I, II
    Project.attributes = manager

Levels are listed finest first.  ``a..b`` expands to the integer range.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from typing import Iterable

from .errors import SchemaError, UnknownDimension, UnknownLevel, UnknownMeasure

OTHER = "Other"
FUSED_SUFFIX = "_fused"

_RANGE = re.compile(r"^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$")


def base_level(label: str) -> str:
    """Strip the fused-level suffix added by the normalizer."""
    if label.endswith(FUSED_SUFFIX):
        return label[: -len(FUSED_SUFFIX)]
    return label


def fuse(values: Iterable[str], other: bool = False) -> str:
    """Canonical encoding of a fused member set, e.g. ``1-2`` or ``4-Other``.

    Members sort by UTF-8 bytes; the ``Other`` token always goes last.
    """
    members = sorted({v for v in values if v != OTHER}, key=lambda s: s.encode("utf-8"))
    if other or OTHER in values:
        members.append(OTHER)
    return "-".join(members)


@dataclass(frozen=True)
class LevelSchema:
    name: str
    value_domain: tuple[str, ...]
    member_attributes: tuple[str, ...] = ()
    _members: frozenset = field(default=frozenset(), init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.name:
            raise SchemaError("level name must be non-empty")
        if not self.value_domain:
            raise SchemaError(f"level {self.name!r} has an empty value domain")
        if len(set(self.member_attributes)) != len(self.member_attributes):
            raise SchemaError(f"level {self.name!r} repeats a member attribute")
        reserved = {"name", "v"} & set(self.member_attributes)
        if reserved:
            raise SchemaError(f"level {self.name!r} uses reserved attribute names {sorted(reserved)}")
        object.__setattr__(self, "_members", frozenset(self.value_domain))

    def accepts(self, value: str) -> bool:
        """Domain membership, also admitting ``Other`` and fused encodings."""
        if value in self._members or value == OTHER:
            return True
        parts = value.split("-")
        return len(parts) > 1 and all(p in self._members or p == OTHER for p in parts)


@dataclass(frozen=True)
class HierarchySchema:
    """One dimension: levels ordered finest (rank 1) to coarsest."""

    dimension_name: str
    levels: tuple[LevelSchema, ...]
    _rank: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.levels:
            raise SchemaError(f"dimension {self.dimension_name!r} has no levels")
        names = [lv.name for lv in self.levels]
        if len(set(names)) != len(names):
            raise SchemaError(f"dimension {self.dimension_name!r} repeats a level name")
        for name in names:
            if name.endswith(FUSED_SUFFIX):
                raise SchemaError(f"level name {name!r} collides with the fused-level suffix")
        rank = {}
        for i, name in enumerate(names, start=1):
            rank[name] = i
            rank[name + FUSED_SUFFIX] = i
        self._rank.update(rank)

    @property
    def parent_of(self) -> dict[str, str]:
        return {a.name: b.name for a, b in zip(self.levels, self.levels[1:])}

    @property
    def depth(self) -> int:
        return len(self.levels)

    def level_names(self) -> list[str]:
        return [lv.name for lv in self.levels]

    def rank(self, level: str) -> int:
        """1-based rank of a level (fused variants share the base rank)."""
        try:
            return self._rank[level]
        except KeyError:
            raise UnknownLevel(f"dimension {self.dimension_name!r} has no level {level!r}") from None

    def has_level(self, level: str) -> bool:
        return level in self._rank

    def level(self, name: str) -> LevelSchema:
        return self.levels[self.rank(name) - 1]


@dataclass(frozen=True)
class WarehouseSchema:
    """The set of dimension hierarchies plus the fact measures."""

    dimensions: tuple[HierarchySchema, ...]
    measures: tuple[str, ...] = ()

    def __post_init__(self):
        names = [d.dimension_name for d in self.dimensions]
        if len(set(names)) != len(names):
            raise SchemaError("dimension names must be unique")

    def dimension(self, name: str) -> HierarchySchema:
        for d in self.dimensions:
            if d.dimension_name == name:
                return d
        raise UnknownDimension(f"unknown dimension {name!r}")

    def has_dimension(self, name: str) -> bool:
        return any(d.dimension_name == name for d in self.dimensions)

    def check_measure(self, name: str) -> None:
        if self.measures and name not in self.measures:
            raise UnknownMeasure(f"unknown measure {name!r}")


def _split(text: str) -> list[str]:
    return [p.strip() for p in text.split(",") if p.strip()]


def _domain(text: str) -> tuple[str, ...]:
    m = _RANGE.match(text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        return tuple(str(i) for i in range(lo, hi + 1))
    return tuple(_split(text))


def parse_schema(text: str) -> WarehouseSchema:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise SchemaError(str(exc)) from exc
    measures: tuple[str, ...] = ()
    dims = []
    for section in cp.sections():
        body = cp[section]
        if section == "warehouse":
            measures = tuple(_split(body.get("measures", "")))
            continue
        if not section.startswith("dimension "):
            raise SchemaError(f"unexpected section [{section}]")
        dim_name = section[len("dimension "):].strip()
        if "levels" not in body:
            raise SchemaError(f"[{section}] lacks a 'levels' key")
        levels = []
        for name in _split(body["levels"]):
            if name not in body:
                raise SchemaError(f"[{section}] lacks a domain for level {name!r}")
            attrs = tuple(_split(body.get(f"{name}.attributes", "")))
            levels.append(LevelSchema(name, _domain(body[name]), attrs))
        dims.append(HierarchySchema(dim_name, tuple(levels)))
    return WarehouseSchema(tuple(dims), measures)


def load_schema(path) -> WarehouseSchema:
    with open(path, encoding="utf-8") as fh:
        return parse_schema(fh.read())


def format_schema(schema: WarehouseSchema) -> str:
    lines = ["[warehouse]", f"measures = {', '.join(schema.measures)}"]
    for dim in schema.dimensions:
        lines += ["", f"[dimension {dim.dimension_name}]", f"levels = {', '.join(dim.level_names())}"]
        for lv in dim.levels:
            lines.append(f"{lv.name} = {', '.join(lv.value_domain)}")
            if lv.member_attributes:
                lines.append(f"{lv.name}.attributes = {', '.join(lv.member_attributes)}")
    return "\n".join(lines) + "\n"
