"""Command-line entry point: ``xolap <subcommand> [flags]``.

Results go to stdout unless ``--out`` names a file; logs and errors go to
stderr.  Exit status: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import Optional, Sequence

from .benchgen import BenchPlan, GeneratorConfig, generate, generator_schema, load_bench_config, run_benchmark, xweb_workload
from .benchgen.generator import KINDS, PROFILES
from .diagnostics import validate_summarizability
from .errors import XolapError
from .pattern import load_query
from .pedersen import format_log, normalize
from .qbs import qbs, rollup
from .schema import format_schema, load_schema
from .xmlio import load_warehouse, serialize_warehouse

log = logging.getLogger("xolap")


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="xolap", description="Summarizability-aware OLAP over XML warehouses.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic warehouse")
    g.add_argument("--facts", type=int, default=1000)
    g.add_argument("--kind", choices=KINDS, default="none")
    g.add_argument("--pct", type=int, default=0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--profile", choices=PROFILES, default="xweb")
    g.add_argument("--out", help="warehouse XML path (default stdout)")
    g.add_argument("--schema", help="also write the warehouse schema here")
    g.add_argument("--emit-ledger", metavar="PATH", help="write the injection ledger here")

    v = sub.add_parser("validate", help="list non-strict and incomplete sites")
    _io(v)

    q = sub.add_parser("query", help="run one grouping query")
    _io(q)
    q.add_argument("--q", required=True, metavar="QUERY", help="query file")
    q.add_argument("--linear-scan", action="store_true", help="list-search group matching")

    r = sub.add_parser("rollup", help="run chained grouping stages, finest first")
    _io(r)
    r.add_argument("--q", required=True, action="append", metavar="QUERY", help="query file, once per stage")
    r.add_argument("--linear-scan", action="store_true")

    n = sub.add_parser("normalize", help="cover and strictify a warehouse")
    _io(n)
    n.add_argument("--emit-ledger", metavar="PATH", help="write the insertion/fusion log here")

    b = sub.add_parser("bench", help="time qbs against normalize-then-group-by")
    b.add_argument("--config", help="key = value benchmark description")
    b.add_argument("--facts", type=int, default=1000)
    b.add_argument("--kind", choices=KINDS, default="none")
    b.add_argument("--pct", type=int, default=0)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--linear-scan", action="store_true")
    b.add_argument("--out", help="CSV path (default stdout)")
    return p


def _io(p: argparse.ArgumentParser) -> None:
    p.add_argument("--in", dest="input", required=True, metavar="XML")
    p.add_argument("--schema", required=True)
    p.add_argument("--out")


def _readable(*paths: Optional[str]) -> None:
    for path in paths:
        if path is not None and not os.access(path, os.R_OK):
            raise UsageError(f"cannot read {path}")


def _emit(data: bytes, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    try:
        with open(out, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc.strerror}") from None


def _generate(args) -> None:
    config = GeneratorConfig(args.facts, args.kind, args.pct, args.seed, args.profile)
    tree, ledger = generate(config)
    log.info("generated %s: %d facts, %d injections", config.config_id, args.facts, len(ledger))
    _emit(serialize_warehouse(tree), args.out)
    if args.schema:
        _emit(format_schema(generator_schema(config)).encode("utf-8"), args.schema)
    if args.emit_ledger:
        _emit(ledger.to_text().encode("utf-8"), args.emit_ledger)


def _load(args):
    _readable(args.input, args.schema)
    schema = load_schema(args.schema)
    return load_warehouse(args.input, schema), schema


def _validate(args) -> None:
    tree, schema = _load(args)
    report = validate_summarizability(tree, schema)
    _emit(report.to_text().encode("utf-8"), args.out)


def _query(args) -> None:
    _readable(args.q)
    tree, schema = _load(args)
    query = load_query(args.q, schema)
    _emit(serialize_warehouse(qbs(tree, query, schema, linear_scan=args.linear_scan)), args.out)


def _rollup(args) -> None:
    _readable(*args.q)
    tree, schema = _load(args)
    stages = [load_query(path, schema) for path in args.q]
    _emit(serialize_warehouse(rollup(tree, stages, schema, linear_scan=args.linear_scan)), args.out)


def _normalize(args) -> None:
    tree, schema = _load(args)
    actions: list = []
    result = normalize(tree, schema, log=actions)
    _emit(serialize_warehouse(result), args.out)
    if args.emit_ledger:
        _emit(format_log(actions).encode("utf-8"), args.emit_ledger)


def _bench(args) -> None:
    if args.config:
        _readable(args.config)
        plan = load_bench_config(args.config)
    else:
        plan = BenchPlan((GeneratorConfig(args.facts, args.kind, args.pct, args.seed),), tuple(xweb_workload()))
    report = run_benchmark(
        plan.configs, plan.workload, plan.modes, plan.repetitions, linear_scan=plan.linear_scan or args.linear_scan
    )
    _emit(report.to_csv().encode("utf-8"), args.out)


_COMMANDS = {
    "generate": _generate,
    "validate": _validate,
    "query": _query,
    "rollup": _rollup,
    "normalize": _normalize,
    "bench": _bench,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(message)s",
    )
    try:
        _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"xolap: {exc}", file=sys.stderr)
        return 2
    except XolapError as exc:
        print(f"xolap: error: {exc}", file=sys.stderr)
        return 1
    return 0
