"""The n-dimension group-by workload."""

from __future__ import annotations

from dataclasses import dataclass

from ..pattern import AggFn, Aggregation, TreePatternQuery
from ..schema import WarehouseSchema

#: Grouping elements in the order they join the 1D..4D queries.
XWEB_GROUPING = (("part", "type3"), ("customer", "nation"), ("supplier", "nation"))
XWEB_DAY = ("date", "day")

TOTAL_AMOUNT = Aggregation(AggFn.SUM, "f_totalamount")


@dataclass(frozen=True)
class WorkloadQuery:
    name: str
    query: TreePatternQuery

    @property
    def dimensions(self) -> int:
        return len(self.query.grouping_elements)


def xweb_workload(aggregations=(TOTAL_AMOUNT,)) -> list[WorkloadQuery]:
    """1D: day; 2D: type3, day; 3D: type3, nation, day; 4D: type3, nation, nation, day."""
    out = []
    for n in range(1, 5):
        ges = XWEB_GROUPING[: n - 1] + (XWEB_DAY,)
        out.append(WorkloadQuery(f"{n}D", TreePatternQuery(ges, tuple(aggregations))))
    return out


def finest_level_workload(schema: WarehouseSchema, aggregations=(TOTAL_AMOUNT,)) -> list[WorkloadQuery]:
    """The same n-dimension shapes over an arbitrary schema: group the finest
    level of the first n dimensions."""
    out = []
    dims = schema.dimensions
    for n in range(1, len(dims) + 1):
        ges = tuple((d.dimension_name, d.levels[0].name) for d in dims[:n])
        out.append(WorkloadQuery(f"{n}D", TreePatternQuery(ges, tuple(aggregations))))
    return out


def workload_by_name(names, aggregations=(TOTAL_AMOUNT,)) -> list[WorkloadQuery]:
    table = {q.name: q for q in xweb_workload(aggregations)}
    out = []
    for name in names:
        key = name.strip().upper()
        if key not in table:
            raise KeyError(name)
        out.append(table[key])
    return out
