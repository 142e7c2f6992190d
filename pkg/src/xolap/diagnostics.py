"""Detection of non-strict and incomplete hierarchy instances."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .model import Kind, MDDataTree, Node, dimension_nodes, iter_paths, segment
from .schema import WarehouseSchema, base_level

NONSTRICT = "NONSTRICT"
INCOMPLETE = "INCOMPLETE"


@dataclass(frozen=True)
class Finding:
    kind: str
    dimension: str
    level: str
    path: str
    fact_index: int

    def line(self) -> str:
        return f"{self.kind} {self.dimension} {self.level} {self.path}"


@dataclass
class DiagnosticsReport:
    findings: list[Finding] = field(default_factory=list)

    def __bool__(self):
        return bool(self.findings)

    def __len__(self):
        return len(self.findings)

    def of_kind(self, kind: str) -> list[Finding]:
        return [f for f in self.findings if f.kind == kind]

    def counts(self) -> Counter:
        """Number of findings per (kind, dimension, level)."""
        return Counter((f.kind, f.dimension, f.level) for f in self.findings)

    def to_text(self) -> str:
        return "".join(f.line() + "\n" for f in self.findings)


def _nonstrict_sites(node: Node, path: str, dim: str, fact_index: int, out: list) -> None:
    seen: dict[str, set] = {}
    for child in node.children:
        seen.setdefault(base_level(child.label), set()).add(child.value)
    for level, values in seen.items():
        if len(values) > 1:
            out.append(Finding(NONSTRICT, dim, level, path, fact_index))
    for child in node.children:
        _nonstrict_sites(child, f"{path}/{segment(child)}", dim, fact_index, out)


def validate_summarizability(tree: MDDataTree, schema: WarehouseSchema) -> DiagnosticsReport:
    """List every non-strict and incomplete site of the warehouse.

    A node with more than one distinct child value at some level is a
    NONSTRICT site for that level.  A (fact, dimension, level) triple is
    INCOMPLETE when at least one roll-up path of the fact's dimension never
    visits that level; the reported path is the last node before the gap.
    """
    findings: list[Finding] = []
    for index, fact in enumerate(tree.facts, start=1):
        if fact.kind is not Kind.FACT:
            continue
        fact_path = f"/w/fact[{index}]"
        dims = dimension_nodes(fact)
        for hierarchy in schema.dimensions:
            name = hierarchy.dimension_name
            dim = dims.get(name)
            if dim is None:
                for level in hierarchy.level_names():
                    findings.append(Finding(INCOMPLETE, name, level, fact_path, index))
                continue
            dim_path = f"{fact_path}/{segment(dim)}"
            _nonstrict_sites(dim, dim_path, name, index, findings)
            gaps: dict[str, str] = {}
            for path in iter_paths(dim):
                present = {base_level(n.label) for n in path}
                for level in hierarchy.level_names():
                    if level in present or level in gaps:
                        continue
                    rank = hierarchy.rank(level)
                    where = dim_path
                    prefix = dim_path
                    for n in path:
                        prefix = f"{prefix}/{segment(n)}"
                        if hierarchy.rank(n.label) < rank:
                            where = prefix
                    gaps[level] = where
            for level in hierarchy.level_names():
                if level in gaps:
                    findings.append(Finding(INCOMPLETE, name, level, gaps[level], index))
    return DiagnosticsReport(findings)
