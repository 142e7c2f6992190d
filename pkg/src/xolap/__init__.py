"""Summarizability-aware OLAP over XML multidimensional data trees."""

from .diagnostics import DiagnosticsReport, Finding, validate_summarizability
from .errors import XolapError
from .model import Kind, MDDataTree, Node
from .pattern import Aggregation, AggFn, TreePatternQuery, match_pattern, parse_formula, parse_query
from .pedersen import NormalizationPlan, make_covering, make_onto, make_strict, normalize, plain_group_by
from .qbs import GroupKey, build_group_key, product, qbs, result_rows, rollup
from .schema import HierarchySchema, LevelSchema, WarehouseSchema, load_schema, parse_schema
from .xmlio import dump_warehouse, load_warehouse, parse_warehouse, serialize_warehouse

__version__ = "0.1.0"

__all__ = [
    "AggFn",
    "Aggregation",
    "DiagnosticsReport",
    "Finding",
    "GroupKey",
    "HierarchySchema",
    "Kind",
    "LevelSchema",
    "MDDataTree",
    "Node",
    "NormalizationPlan",
    "TreePatternQuery",
    "WarehouseSchema",
    "XolapError",
    "build_group_key",
    "dump_warehouse",
    "load_schema",
    "load_warehouse",
    "make_covering",
    "make_onto",
    "make_strict",
    "match_pattern",
    "normalize",
    "parse_formula",
    "parse_query",
    "parse_schema",
    "parse_warehouse",
    "plain_group_by",
    "product",
    "qbs",
    "result_rows",
    "rollup",
    "serialize_warehouse",
    "validate_summarizability",
]
