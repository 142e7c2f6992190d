from decimal import Decimal

import pytest
from hypothesis import given
from hypothesis import strategies as st

from xolap.errors import QuerySyntaxError, UnknownDimension, UnknownLevel, UnknownMeasure, UnknownPath
from xolap.pattern import (
    AggFn,
    Aggregation,
    And,
    Compare,
    FieldPath,
    Not,
    Or,
    TreePatternQuery,
    format_formula,
    format_query,
    match_pattern,
    parse_formula,
    parse_query,
)
from xolap.samples import Q1

from oracles import SMALL_SCHEMA, formulas, oracle_eval, warehouses


def test_parse_q1(pm_schema):
    q = parse_query(Q1, pm_schema)
    assert q.grouping_elements == (("project", "Team"), ("customer", "Customer"))
    assert q.aggregations == (Aggregation(AggFn.SUM, "cost"),)
    assert q.predicate is None and not q.pass_through


def test_query_text_round_trip():
    text = (
        "# comment\n"
        "group project.Team\n"
        "agg sum(cost)\n"
        "agg count(*)\n"
        "where cost >= 500\n"
        "where not (customer.Customer = \"γ\" or project.Branch = II)\n"
        "passthrough\n"
    )
    q = parse_query(text)
    assert isinstance(q.predicate, And)
    assert q.pass_through
    assert parse_query(format_query(q)) == q


@pytest.mark.parametrize(
    "text",
    [
        "agg sum(cost)\n",
        "group project.Team\n",
        "group project.Team\ngroup project.Team\nagg sum(cost)\n",
        "group Team\nagg sum(cost)\n",
        "group project.Team\nagg median(cost)\n",
        "group project.Team\nagg sum(*)\n",
        "group project.Team\nagg sum cost\n",
        "group project.Team\nagg sum(cost)\nwhere cost >\n",
        "group project.Team\nagg sum(cost)\nwhere (cost > 1\n",
        "group project.Team\nagg sum(cost)\nwhere cost > big\n",
        "group project.Team\nagg sum(cost)\norder by cost\n",
    ],
)
def test_query_syntax_errors(text):
    with pytest.raises(QuerySyntaxError):
        parse_query(text)


@pytest.mark.parametrize(
    "text, error",
    [
        ("group supplier.Nation\nagg sum(cost)\n", UnknownDimension),
        ("group project.Division\nagg sum(cost)\n", UnknownLevel),
        ("group project.Team\nagg sum(revenue)\n", UnknownMeasure),
        ("group project.Team\nagg sum(cost)\nwhere project.Squad = 1\n", UnknownPath),
        ("group project.Team\nagg sum(cost)\nwhere margin > 1\n", UnknownPath),
    ],
)
def test_query_name_errors(pm_schema, text, error):
    with pytest.raises(error):
        parse_query(text, pm_schema)


def test_unicode_operators():
    f = parse_formula("cost ≥ 10 and project.Team ≠ 2")
    assert f == And(Compare(FieldPath("cost"), ">=", 10), Compare(FieldPath("Team", "project"), "!=", 2))


def test_decimal_literal():
    assert parse_formula("cost < 2.5").literal == Decimal("2.5")


def test_match_by_level_is_existential(pm_tree, pm_schema):
    team2 = match_pattern(pm_tree, parse_formula("project.Team = 2"), pm_schema)
    assert [f.children[-1].value for f in team2.facts] == [1000, 1500]
    branch1 = match_pattern(pm_tree, parse_formula("project.Branch = I"), pm_schema)
    assert [f.children[-1].value for f in branch1.facts] == [1000, 1500, 100]


def test_match_by_measure_and_negation(pm_tree):
    out = match_pattern(pm_tree, parse_formula("not (cost > 600) or customer.Customer = α"))
    assert len(out.facts) == 4
    out = match_pattern(pm_tree, parse_formula("cost > 600 and customer.Customer = β"))
    assert len(out.facts) == 0


def test_match_without_predicate_keeps_everything(pm_tree, pm_queries):
    assert match_pattern(pm_tree, pm_queries[0]) == pm_tree


@given(warehouses(), formulas())
def test_match_agrees_with_flattened_evaluation(tree, formula):
    kept = match_pattern(tree, formula, SMALL_SCHEMA)
    assert list(kept.facts) == [f for f in tree.facts if oracle_eval(f, formula)]


@given(formulas())
def test_formula_text_round_trip(formula):
    assert parse_formula(format_formula(formula)) == formula


def test_string_literal_needing_quotes():
    f = Compare(FieldPath("Customer", "customer"), "=", "and")
    assert parse_formula(format_formula(f)) == f
    g = Compare(FieldPath("Team", "project"), "=", "2")
    assert parse_formula(format_formula(g)) == g


def test_query_requires_grouping_and_aggregation():
    with pytest.raises(QuerySyntaxError):
        TreePatternQuery((), (Aggregation("sum", "cost"),))
    with pytest.raises(QuerySyntaxError):
        TreePatternQuery((("project", "Team"),), ())


@given(st.sampled_from(list(AggFn)))
def test_aggregation_str(fn):
    assert str(Aggregation(fn, "cost")) == f"{fn.value}(cost)"
