"""QBS versus normalize-then-group-by timing harness.

Every (config, query) cell first runs each mode once and compares the
result multisets; a disagreement raises ResultMismatch before any timing of
that cell is recorded.  Timed runs disable the garbage collector.
"""

from __future__ import annotations

import configparser
import csv
import gc
import io
import itertools
import logging
import statistics
from dataclasses import dataclass, field
from time import perf_counter
from typing import Optional

from ..errors import InvalidConfig, ResultMismatch
from ..pedersen import normalize, plain_group_by
from ..qbs import qbs, result_rows
from .generator import KINDS, GeneratorConfig, generate, generator_schema
from .workload import WorkloadQuery, workload_by_name

log = logging.getLogger(__name__)

MODES = ("qbs", "pedersen_with_overhead", "pedersen_without_overhead")
COLUMNS = ("config_id", "facts", "kind", "pct", "query", "mode", "rep", "phase", "millis")


@dataclass
class BenchReport:
    rows: list[dict] = field(default_factory=list)

    def add(self, config: GeneratorConfig, query: str, mode: str, rep: int, phase: str, seconds: float) -> None:
        self.rows.append({
            "config_id": config.config_id,
            "facts": config.fact_count,
            "kind": config.complexity_kind,
            "pct": config.complexity_pct,
            "query": query,
            "mode": mode,
            "rep": rep,
            "phase": phase,
            "millis": round(seconds * 1000.0, 3),
        })

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows)
        return buf.getvalue()

    def medians(self) -> dict:
        """Median millis per (config_id, query, mode, phase)."""
        cells: dict = {}
        for r in self.rows:
            cells.setdefault((r["config_id"], r["query"], r["mode"], r["phase"]), []).append(r["millis"])
        return {k: statistics.median(v) for k, v in cells.items()}

    def median(self, config_id: str, query: str, mode: str, phase: str = "total") -> float:
        return self.medians()[(config_id, query, mode, phase)]


def _timed(fn, *args, **kwargs):
    enabled = gc.isenabled()
    gc.disable()
    try:
        start = perf_counter()
        out = fn(*args, **kwargs)
        return out, perf_counter() - start
    finally:
        if enabled:
            gc.enable()


def run_benchmark(
    configs,
    workload,
    modes=MODES,
    repetitions: int = 3,
    *,
    linear_scan: bool = False,
    report: Optional[BenchReport] = None,
) -> BenchReport:
    """Time every mode on every (config, query) cell, ``repetitions`` times.

    ``qbs`` rows carry summarizability, matching and total phases.
    ``pedersen_with_overhead`` normalizes inside every repetition (phase
    ``normalize``, included in its total); ``pedersen_without_overhead``
    reuses one normalized tree and times the group-by alone.
    """
    if repetitions < 3:
        raise InvalidConfig("repetitions must be at least 3")
    unknown = set(modes) - set(MODES)
    if unknown or not modes:
        raise InvalidConfig(f"unknown modes {sorted(unknown)}; choose from {', '.join(MODES)}")
    report = report if report is not None else BenchReport()
    for config in configs:
        tree, _ = generate(config)
        schema = generator_schema(config)
        normalized = None
        if any(m.startswith("pedersen") for m in modes):
            normalized = normalize(tree, schema)
        for wq in workload:
            _gate(config, wq, tree, normalized, schema, modes, linear_scan)
            for rep in range(1, repetitions + 1):
                for mode in modes:
                    _time_mode(report, config, wq, mode, rep, tree, normalized, schema, linear_scan)
            log.info("%s %s done", config.config_id, wq.name)
    return report


def _gate(config, wq: WorkloadQuery, tree, normalized, schema, modes, linear_scan) -> None:
    expected = None
    for mode in modes:
        if mode == "qbs":
            got = result_rows(qbs(tree, wq.query, schema, linear_scan=linear_scan))
        else:
            got = result_rows(plain_group_by(normalized, wq.query, schema))
        if expected is None:
            expected, first = got, mode
        elif got != expected:
            raise ResultMismatch(f"{config.config_id} {wq.name}: {mode} disagrees with {first}")


def _time_mode(report, config, wq, mode, rep, tree, normalized, schema, linear_scan) -> None:
    timings: dict = {}
    if mode == "qbs":
        _, total = _timed(qbs, tree, wq.query, schema, linear_scan=linear_scan, timings=timings)
        report.add(config, wq.name, mode, rep, "summarizability", timings["summarizability"])
        report.add(config, wq.name, mode, rep, "matching", timings["matching"])
    elif mode == "pedersen_with_overhead":
        norm, t_norm = _timed(normalize, tree, schema)
        _, t_group = _timed(plain_group_by, norm, wq.query, schema)
        report.add(config, wq.name, mode, rep, "normalize", t_norm)
        report.add(config, wq.name, mode, rep, "matching", t_group)
        total = t_norm + t_group
    else:
        _, total = _timed(plain_group_by, normalized, wq.query, schema)
        report.add(config, wq.name, mode, rep, "matching", total)
    report.add(config, wq.name, mode, rep, "total", total)


@dataclass(frozen=True)
class BenchPlan:
    configs: tuple
    workload: tuple
    modes: tuple = MODES
    repetitions: int = 3
    linear_scan: bool = False


def _list(value: str) -> list[str]:
    return [p.strip() for p in value.split(",") if p.strip()]


def parse_bench_config(text: str) -> BenchPlan:
    """Read ``key = value`` lines; comma lists expand to a config grid.

    Keys: facts, kind, pct, seed, profile (GeneratorConfig fields), plus
    queries, modes, repetitions and linear_scan.
    """
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        cp.read_string("[bench]\n" + text)
    except configparser.Error as exc:
        raise InvalidConfig(f"unreadable bench config: {exc}") from exc
    body = dict(cp["bench"])
    known = {"facts", "kind", "pct", "seed", "profile", "queries", "modes", "repetitions", "linear_scan"}
    extra = set(body) - known
    if extra:
        raise InvalidConfig(f"unknown bench config keys: {', '.join(sorted(extra))}")
    try:
        facts = [int(v) for v in _list(body.get("facts", "1000"))]
        kinds = _list(body.get("kind", "none"))
        pcts = [int(v) for v in _list(body.get("pct", "0"))]
        seeds = [int(v) for v in _list(body.get("seed", "0"))]
        repetitions = int(body.get("repetitions", "3"))
    except ValueError as exc:
        raise InvalidConfig(f"bad number in bench config: {exc}") from exc
    for kind in kinds:
        if kind not in KINDS:
            raise InvalidConfig(f"unknown kind {kind!r}")
    profile = body.get("profile", "xweb").strip()
    if profile != "xweb":
        raise InvalidConfig("the benchmark workload runs on the xweb profile only")
    configs = []
    for f, kind, pct, seed in itertools.product(facts, kinds, pcts, seeds):
        configs.append(GeneratorConfig(f, kind, 0 if kind == "none" else pct, seed))
    configs = list(dict.fromkeys(configs))
    try:
        workload = workload_by_name(_list(body.get("queries", "1D, 2D, 3D, 4D")))
    except KeyError as exc:
        raise InvalidConfig(f"unknown query {exc.args[0]!r}; use 1D..4D") from None
    modes = tuple(_list(body.get("modes", ",".join(MODES))))
    flag = body.get("linear_scan", "false").strip().lower()
    if flag not in ("true", "false", "yes", "no", "1", "0"):
        raise InvalidConfig(f"linear_scan must be a boolean, got {flag!r}")
    return BenchPlan(tuple(configs), tuple(workload), modes, repetitions, flag in ("true", "yes", "1"))


def load_bench_config(path) -> BenchPlan:
    with open(path, encoding="utf-8") as fh:
        return parse_bench_config(fh.read())
