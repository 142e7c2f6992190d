"""Acceptance suite: one PASS/FAIL line per criterion, printed to the terminal.

Pinned tolerances:
  1  exact groups and sums; parse + query under 1 s
  2  exact roll-up groups and sums
  3  exact counts
  4  zero-tolerance multiset equality over >= 200 warehouses; under 120 s
  5  exact conservation of sums and counts over the same runs
  6  log-log slope of median total time: hash <= 1.2, linear scan >= 1.5; under 600 s
  7  median matching > median summarizability at every size; non-strict
     summarizability >= 2x incomplete at equal pct
  8  ledger records == floor(N * 4 * 0.05) within 1 per dimension;
     incomplete < baseline < non-strict serialized size
  9  byte-identical regeneration, parse(serialize(t)) == t on 100 trees,
     byte-identical repeated queries
"""

import gc
import statistics
import time
from decimal import Decimal

import numpy as np
import pytest

from xolap.benchgen import GeneratorConfig, generate, generator_schema, xweb_workload
from xolap.benchgen.workload import finest_level_workload
from xolap.model import Kind
from xolap.pattern import AggFn, Aggregation, TreePatternQuery, parse_formula, parse_query
from xolap.pedersen import make_covering, make_strict, plain_group_by
from xolap.qbs import qbs, result_rows, rollup
from xolap.samples import PROJECT_SCHEMA, PROJECT_XML, Q1, Q2
from xolap.schema import parse_schema
from xolap.xmlio import parse_warehouse, serialize_warehouse

SIZES = (1000, 2000, 4000, 8000)
HASH_SLOPE_MAX = 1.2
LINEAR_SLOPE_MIN = 1.5
PHASE_RATIO_MIN = 2.0


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number} {'PASS' if ok else 'FAIL'}: {detail}")
        return ok

    return emit


def _groups(tree):
    out = {}
    for fact in tree.facts:
        keys, value = [], None
        for c in fact.children:
            if c.kind is Kind.DIMENSION:
                keys.extend(f"{n.label}[{n.value}]" for n in c.children)
            elif c.kind is Kind.AGGREGATE:
                value = c.value
        out[" x ".join(keys)] = value
    return out


def test_criterion_1_team_customer_groups(report):
    start = time.perf_counter()
    schema = parse_schema(PROJECT_SCHEMA)
    result = qbs(parse_warehouse(PROJECT_XML, schema), parse_query(Q1, schema), schema)
    elapsed = time.perf_counter() - start
    expected = {
        "Team[1-2] x Customer[α]": 1000,
        "Team[2-3] x Customer[α]": 1500,
        "Team[4] x Customer[β]": 500,
        "Team[Other] x Customer[γ]": 100,
    }
    got = _groups(result)
    ok = got == expected and elapsed < 1.0
    assert report(1, ok, f"{len(got)} groups {got}; {elapsed * 1000:.1f} ms"), got


def test_criterion_2_rollup_to_branch(report):
    schema = parse_schema(PROJECT_SCHEMA)
    tree = parse_warehouse(PROJECT_XML, schema)
    q1, q2 = parse_query(Q1, schema), parse_query(Q2, schema)
    stage1 = _groups(qbs(tree, q1, schema, finalize=False))
    got = _groups(rollup(tree, [q1, q2], schema))
    expected = {"Branch[I-II] x Customer[α]": 2500, "Branch[II] x Customer[β]": 500, "Branch[I] x Customer[γ]": 100}
    # the I-II group is the merge of the two fused team groups (1000 + 1500)
    update_path = stage1["Team[1-2] x Customer[α]"] + stage1["Team[2-3] x Customer[α]"] == got.get("Branch[I-II] x Customer[α]")
    ok = got == expected and update_path
    assert report(2, ok, f"{got}"), got


def test_criterion_3_counts_per_team(report):
    schema = parse_schema(PROJECT_SCHEMA)
    tree = parse_warehouse(PROJECT_XML, schema)
    totals = []
    for projects in ("AB", "CD"):
        where = " or ".join(f"project.Project = {p}" for p in projects)
        q = TreePatternQuery((("project", "Team"),), (Aggregation(AggFn.COUNT, "*"),), parse_formula(where))
        totals.append(sum(_groups(qbs(tree, q, schema)).values()))
    ok = totals == [2, 2]
    assert report(3, ok, f"count over A,B = {totals[0]} (naive 4); over C,D = {totals[1]} (naive 1)"), totals


AGGS = (Aggregation(AggFn.SUM, "f_totalamount"), Aggregation(AggFn.COUNT, "*"))


def _random_configs():
    configs = []
    seed = 0
    for pct in (0, 5, 20, 50):
        for kind in ("incomplete", "nonstrict", "complex"):
            for _ in range(17):
                facts = 20 + (seed * 37) % 181
                configs.append(GeneratorConfig(facts, kind, pct, seed, "random"))
                seed += 1
    return configs


@pytest.fixture(scope="module")
def oracle_runs():
    """Every (warehouse, query) run of the equivalence sweep."""
    start = time.perf_counter()
    runs = []
    for config in _random_configs():
        tree, _ = generate(config)
        schema = generator_schema(config)
        normalized = make_strict(make_covering(tree, schema), schema)
        queries = [w.query for w in finest_level_workload(schema, AGGS)]
        first = queries[0].grouping_elements
        queries.append(TreePatternQuery(first, AGGS, parse_formula("f_quantity <= 25")))
        coarse = tuple((d.dimension_name, d.levels[-1].name) for d in schema.dimensions[:2])
        queries.append(TreePatternQuery(coarse, AGGS))
        for q in queries:
            runs.append((config, tree, q, qbs(tree, q, schema), plain_group_by(normalized, q, schema)))
    return runs, time.perf_counter() - start


def test_criterion_4_oracle_equivalence(report, oracle_runs):
    runs, elapsed = oracle_runs
    warehouses = len({r[0] for r in runs})
    mismatches = [(c.config_id, q.grouping_elements) for c, _, q, a, b in runs if result_rows(a) != result_rows(b)]
    ok = warehouses >= 200 and not mismatches and elapsed < 120
    detail = f"{warehouses} warehouses, {len(runs)} queries, {len(mismatches)} mismatches, {elapsed:.1f} s"
    assert report(4, ok, detail), mismatches[:5]


def test_criterion_5_conservation(report, oracle_runs):
    runs, _ = oracle_runs
    bad = []
    for config, tree, q, result, _ in runs:
        facts = [f for f in tree.facts if q.predicate is None or q.predicate.evaluate(f)]
        want_sum = sum((c.value for f in facts for c in f.children if c.kind is Kind.MEASURE and c.label == "f_totalamount"), Decimal(0))
        got_sum, got_count = Decimal(0), 0
        for g in result.facts:
            for c in g.children:
                if c.kind is Kind.AGGREGATE and c.attr("fn") == "sum":
                    got_sum += c.value
                elif c.kind is Kind.AGGREGATE and c.attr("fn") == "count":
                    got_count += c.value
        if got_sum != want_sum or got_count != len(facts):
            bad.append(config.config_id)
    ok = not bad
    assert report(5, ok, f"{len(runs)} runs, {len(bad)} violations"), bad[:5]


def _median_timings(tree, schema, query, linear_scan, reps):
    samples = []
    for _ in range(reps):
        t = {}
        gc.disable()
        try:
            qbs(tree, query, schema, linear_scan=linear_scan, timings=t)
        finally:
            gc.enable()
        samples.append(t)
    return {k: statistics.median(s[k] for s in samples) for k in samples[0]}


@pytest.fixture(scope="module")
def scaling():
    start = time.perf_counter()
    query = xweb_workload()[1].query
    hashed, linear = {}, {}
    for n in SIZES:
        config = GeneratorConfig(n, "complex", 20, 2024)
        tree, _ = generate(config)
        schema = generator_schema(config)
        hashed[n] = _median_timings(tree, schema, query, False, 5)
        linear[n] = _median_timings(tree, schema, query, True, 3)
    return hashed, linear, time.perf_counter() - start


def _slope(timings):
    xs = np.log(np.array(SIZES, dtype=float))
    ys = np.log(np.array([timings[n]["total"] for n in SIZES]))
    return float(np.polyfit(xs, ys, 1)[0])


def test_criterion_6_scaling(report, scaling):
    hashed, linear, elapsed = scaling
    hash_slope, linear_slope = _slope(hashed), _slope(linear)
    ok = hash_slope <= HASH_SLOPE_MAX and linear_slope >= LINEAR_SLOPE_MIN and elapsed < 600
    detail = f"hash slope {hash_slope:.2f} (<= {HASH_SLOPE_MAX}), linear-scan slope {linear_slope:.2f} (>= {LINEAR_SLOPE_MIN}), {elapsed:.1f} s"
    assert report(6, ok, detail)


def test_criterion_7_phase_decomposition(report, scaling):
    hashed, _, _ = scaling
    matching_wins = all(hashed[n]["matching"] > hashed[n]["summarizability"] for n in SIZES)
    query = xweb_workload()[1].query
    summ = {}
    for kind in ("incomplete", "nonstrict"):
        config = GeneratorConfig(SIZES[-1], kind, 20, 2024)
        tree, _ = generate(config)
        summ[kind] = _median_timings(tree, generator_schema(config), query, False, 7)["summarizability"]
    ratio = summ["nonstrict"] / summ["incomplete"]
    ok = matching_wins and ratio >= PHASE_RATIO_MIN
    phases = ", ".join(f"{n}: {hashed[n]['matching'] * 1000:.1f}/{hashed[n]['summarizability'] * 1000:.1f} ms" for n in SIZES)
    detail = f"matching/summarizability {phases}; non-strict/incomplete summarizability ratio {ratio:.2f} (>= {PHASE_RATIO_MIN})"
    assert report(7, ok, detail)


def test_criterion_8_generator_contract(report):
    n = 2000
    _, ledger = generate(GeneratorConfig(n, "complex", 5, 8))
    expected = n * 4 * 5 // 100
    count_ok = abs(len(ledger) - expected) <= 4
    sizes = {}
    for pct in (5, 50):
        base = len(serialize_warehouse(generate(GeneratorConfig(n, seed=8))[0]))
        inc = len(serialize_warehouse(generate(GeneratorConfig(n, "incomplete", pct, 8))[0]))
        non = len(serialize_warehouse(generate(GeneratorConfig(n, "nonstrict", pct, 8))[0]))
        sizes[pct] = (inc, base, non)
    order_ok = all(inc < base < non for inc, base, non in sizes.values())
    ok = count_ok and order_ok
    detail = f"{len(ledger)} ledger records (expected {expected}); bytes incomplete/baseline/non-strict {sizes}"
    assert report(8, ok, detail)


def test_criterion_9_determinism_and_round_trip(report):
    same = True
    for kind, pct in (("none", 0), ("incomplete", 20), ("nonstrict", 20), ("complex", 50)):
        a, la = generate(GeneratorConfig(500, kind, pct, 77))
        b, lb = generate(GeneratorConfig(500, kind, pct, 77))
        same &= serialize_warehouse(a) == serialize_warehouse(b) and la.to_text() == lb.to_text()
    round_trips = 0
    kinds = ("none", "incomplete", "nonstrict", "complex")
    for seed in range(100):
        kind = kinds[seed % 4]
        config = GeneratorConfig(10 + seed, kind, 0 if kind == "none" else (5, 20, 50)[seed % 3], seed, ("xweb", "random")[seed % 2])
        tree, _ = generate(config)
        round_trips += parse_warehouse(serialize_warehouse(tree), generator_schema(config)) == tree
    config = GeneratorConfig(1000, "complex", 20, 5)
    tree, _ = generate(config)
    schema = generator_schema(config)
    stable = all(
        len({serialize_warehouse(qbs(tree, w.query, schema)) for _ in range(3)}) == 1 for w in xweb_workload()
    )
    ok = same and round_trips == 100 and stable
    assert report(9, ok, f"same-seed bytes identical: {same}; round trips {round_trips}/100; repeated queries identical: {stable}")
