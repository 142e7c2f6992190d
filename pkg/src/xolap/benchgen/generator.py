"""Synthetic star-schema warehouses with controlled hierarchy complexity.

The default profile mirrors the XWeB sales model: four dimensions (part,
customer, supplier, date) and two measures.  Every parent level value is a
function of its child, so the uninjected warehouse is strict and complete.
Complexity is then injected into a percentage of the dimensional nodes
(one dimension instance of one fact), picked one per consecutive stratum.

All sampling draws from ``numpy.random.default_rng(seed)`` (PCG64) in a
fixed order: schema (random profile only), base facts dimension by
dimension, measures, then injections stratum by stratum.
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Optional

import numpy as np

from ..errors import InvalidConfig
from ..model import Kind, MDDataTree, Node
from ..schema import HierarchySchema, LevelSchema, WarehouseSchema

KINDS = ("none", "incomplete", "nonstrict", "complex")
PROFILES = ("xweb", "random")
MEASURES = ("f_quantity", "f_totalamount")

_TYPE_SYLLABLES = (
    ("STANDARD", "SMALL", "MEDIUM", "LARGE", "ECONOMY", "PROMO"),
    ("ANODIZED", "BURNISHED", "PLATED", "POLISHED", "BRUSHED"),
    ("TIN", "NICKEL", "BRASS", "STEEL", "COPPER"),
)
_NATIONS = {
    "ALGERIA": "AFRICA", "ARGENTINA": "AMERICA", "BRAZIL": "AMERICA", "CANADA": "AMERICA",
    "EGYPT": "MIDDLE_EAST", "ETHIOPIA": "AFRICA", "FRANCE": "EUROPE", "GERMANY": "EUROPE",
    "INDIA": "ASIA", "INDONESIA": "ASIA", "IRAN": "MIDDLE_EAST", "IRAQ": "MIDDLE_EAST",
    "JAPAN": "ASIA", "JORDAN": "MIDDLE_EAST", "KENYA": "AFRICA", "MOROCCO": "AFRICA",
    "MOZAMBIQUE": "AFRICA", "PERU": "AMERICA", "CHINA": "ASIA", "ROMANIA": "EUROPE",
    "SAUDI_ARABIA": "MIDDLE_EAST", "VIETNAM": "ASIA", "RUSSIA": "EUROPE",
    "UNITED_KINGDOM": "EUROPE", "UNITED_STATES": "AMERICA",
}


@dataclass
class DimensionProfile:
    """Level names and domains (finest first) plus each level's parent function."""

    name: str
    levels: tuple
    domains: tuple
    parents: tuple  # parents[k]: value at levels[k] -> value at levels[k + 1]

    def chain(self, value: str, start: int = 0) -> list[tuple[str, str]]:
        """The (level, value) roll-up path from ``value`` at level ``start`` upward."""
        out = [(self.levels[start], value)]
        for k in range(start, len(self.levels) - 1):
            value = self.parents[k][value]
            out.append((self.levels[k + 1], value))
        return out

    def hierarchy(self) -> HierarchySchema:
        return HierarchySchema(self.name, tuple(LevelSchema(n, d) for n, d in zip(self.levels, self.domains)))


def _date_profile() -> DimensionProfile:
    days, months = [], []
    day_parent, month_parent = {}, {}
    d = datetime.date(1992, 1, 1)
    one = datetime.timedelta(days=1)
    while d.year <= 1998:
        day, month = d.strftime("%Y%m%d"), d.strftime("%Y%m")
        days.append(day)
        day_parent[day] = month
        if month not in month_parent:
            months.append(month)
            month_parent[month] = str(d.year)
        d += one
    years = tuple(str(y) for y in range(1992, 1999))
    return DimensionProfile("date", ("day", "month", "year"), (tuple(days), tuple(months), years), (day_parent, month_parent))


def _part_profile() -> DimensionProfile:
    s1, s2, s3 = _TYPE_SYLLABLES
    type2 = [f"{a}_{b}" for a in s1 for b in s2]
    type3 = [f"{t}_{c}" for t in type2 for c in s3]
    return DimensionProfile(
        "part",
        ("type3", "type2", "type1"),
        (tuple(type3), tuple(type2), s1),
        ({t: t.rsplit("_", 1)[0] for t in type3}, {t: t.split("_", 1)[0] for t in type2}),
    )


def _nation_profile(name: str) -> DimensionProfile:
    regions = tuple(dict.fromkeys(_NATIONS.values()))
    return DimensionProfile(name, ("nation", "region"), (tuple(_NATIONS), regions), (dict(_NATIONS),))


def xweb_profiles() -> list[DimensionProfile]:
    return [_part_profile(), _nation_profile("customer"), _nation_profile("supplier"), _date_profile()]


def random_profiles(rng: np.random.Generator) -> list[DimensionProfile]:
    """2 to 4 dimensions of 2 or 3 levels with small domains (at least 2 values each)."""
    out = []
    for d in range(int(rng.integers(2, 5))):
        depth = int(rng.integers(2, 4))
        sizes = [int(rng.integers(2, 4))]  # coarsest first
        for _ in range(depth - 1):
            sizes.append(sizes[-1] * int(rng.integers(1, 4)))
        sizes.reverse()
        name = f"d{d + 1}"
        levels = tuple(f"l{k + 1}" for k in range(depth))
        domains = tuple(tuple(f"{lv}_{i}" for i in range(n)) for lv, n in zip(levels, sizes))
        parents = tuple(
            {v: domains[k + 1][i % sizes[k + 1]] for i, v in enumerate(domains[k])} for k in range(depth - 1)
        )
        out.append(DimensionProfile(name, levels, domains, parents))
    return out


@dataclass(frozen=True)
class GeneratorConfig:
    fact_count: int
    complexity_kind: str = "none"
    complexity_pct: int = 0
    seed: int = 0
    profile: str = "xweb"

    def __post_init__(self):
        if not isinstance(self.fact_count, int) or self.fact_count < 1:
            raise InvalidConfig(f"fact_count must be a positive integer, got {self.fact_count!r}")
        if self.complexity_kind not in KINDS:
            raise InvalidConfig(f"complexity_kind must be one of {', '.join(KINDS)}")
        if not isinstance(self.complexity_pct, int) or not 0 <= self.complexity_pct <= 100:
            raise InvalidConfig(f"complexity_pct must be an integer in [0, 100], got {self.complexity_pct!r}")
        if self.complexity_kind == "none" and self.complexity_pct:
            raise InvalidConfig("complexity_pct must be 0 when complexity_kind is 'none'")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise InvalidConfig("seed must be an unsigned 64-bit integer")
        if self.profile not in PROFILES:
            raise InvalidConfig(f"profile must be one of {', '.join(PROFILES)}")

    @property
    def config_id(self) -> str:
        return f"{self.profile}-{self.complexity_kind}-{self.complexity_pct}-{self.fact_count}-s{self.seed}"


@dataclass(frozen=True)
class Injection:
    fact_index: int  # 1-based, as in node paths
    dimension: str
    level: str
    kind: str
    detail: str

    def line(self) -> str:
        return f"{self.fact_index}\t{self.dimension}\t{self.level}\t{self.kind}\t{self.detail}"


@dataclass
class InjectionLedger:
    records: list[Injection] = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def of_kind(self, kind: str) -> list[Injection]:
        return [r for r in self.records if r.kind == kind]

    def to_text(self) -> str:
        return "".join(r.line() + "\n" for r in self.records)


def selected_sites(total: int, pct: int, rng: np.random.Generator) -> list[int]:
    """One index drawn uniformly inside each of ``total * pct // 100`` consecutive strata."""
    count = total * pct // 100
    return [int(rng.integers(k * total // count, (k + 1) * total // count)) for k in range(count)]


def _build(pairs: list[tuple[str, str]]) -> Node:
    node = None
    for level, value in reversed(pairs):
        node = Node(Kind.LEVEL, level, value, (), (node,) if node is not None else ())
    return node


class _Instance:
    """Mutable roll-up structure of one dimension instance during injection."""

    def __init__(self, profile: DimensionProfile, chain: list[tuple[str, str]]):
        self.profile = profile
        self.paths = [list(chain)]  # first path is the original chain

    def delete(self, rng) -> tuple[str, str]:
        path = self.paths[0]
        candidates = [i for i, (lv, _) in enumerate(path) if lv != self.profile.levels[-1]]
        i = candidates[int(rng.integers(len(candidates)))]
        return path.pop(i)

    def add_parent(self, rng) -> tuple[str, str, str]:
        path = self.paths[0]
        i = int(rng.integers(len(path)))
        level, value = path[i]
        k = self.profile.levels.index(level)
        domain = [v for v in self.profile.domains[k] if v != value]
        other = domain[int(rng.integers(len(domain)))]
        self.paths.append((i, self.profile.chain(other, k)))
        return level, value, other

    def node(self) -> Node:
        path = self.paths[0]
        nodes = [[lv, v, []] for lv, v in path]
        top: list = []
        for i, chain in self.paths[1:]:
            (top if i == 0 else nodes[i - 1][2]).append(_build(chain))
        child = None
        for k in range(len(nodes) - 1, -1, -1):
            lv, v, extra = nodes[k]
            kids = ((child,) if child is not None else ()) + tuple(extra)
            child = Node(Kind.LEVEL, lv, v, (), kids)
        return Node(Kind.DIMENSION, self.profile.name, None, (), (child,) + tuple(top))


def generate(config: GeneratorConfig) -> tuple[MDDataTree, InjectionLedger]:
    """Deterministic warehouse and injection ledger for ``config``."""
    rng = np.random.default_rng(config.seed)
    profiles = xweb_profiles() if config.profile == "xweb" else random_profiles(rng)
    n = config.fact_count
    picks = [rng.integers(0, len(p.domains[0]), size=n) for p in profiles]
    quantity = rng.integers(1, 51, size=n)
    cents = rng.integers(100, 1_000_001, size=n)

    ledger = InjectionLedger()
    edited: dict[int, _Instance] = {}
    ndim = len(profiles)
    if config.complexity_kind != "none" and config.complexity_pct:
        for site in selected_sites(n * ndim, config.complexity_pct, rng):
            f, d = divmod(site, ndim)
            p = profiles[d]
            inst = _Instance(p, p.chain(p.domains[0][picks[d][f]]))
            kind = config.complexity_kind
            if kind == "incomplete":
                level, value = inst.delete(rng)
                detail = f"removed {level}={value}"
            elif kind == "nonstrict":
                level, value, other = inst.add_parent(rng)
                detail = f"added {level}={other} beside {value}"
            else:
                removed, rvalue = inst.delete(rng)
                level, value, other = inst.add_parent(rng)
                detail = f"removed {removed}={rvalue}; added {level}={other} beside {value}"
                level = removed
            edited[site] = inst
            ledger.records.append(Injection(f + 1, p.name, level, kind, detail))

    facts = []
    for f in range(n):
        children = []
        for d, p in enumerate(profiles):
            inst = edited.get(f * ndim + d)
            if inst is None:
                children.append(Node(Kind.DIMENSION, p.name, None, (), (_build(p.chain(p.domains[0][picks[d][f]])),)))
            else:
                children.append(inst.node())
        children.append(Node(Kind.MEASURE, "f_quantity", int(quantity[f])))
        children.append(Node(Kind.MEASURE, "f_totalamount", Decimal(int(cents[f])).scaleb(-2)))
        facts.append(Node(Kind.FACT, "fact", None, (), tuple(children)))
    return MDDataTree.from_facts(facts), ledger


def generator_schema(config: GeneratorConfig) -> WarehouseSchema:
    """Schema of the warehouses ``config`` generates."""
    if config.profile == "xweb":
        profiles = xweb_profiles()
    else:
        profiles = random_profiles(np.random.default_rng(config.seed))
    return WarehouseSchema(tuple(p.hierarchy() for p in profiles), MEASURES)
