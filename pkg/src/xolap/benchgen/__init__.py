"""Synthetic warehouses, the n-dimension workload and the timing harness."""

from .generator import (
    GeneratorConfig,
    Injection,
    InjectionLedger,
    generate,
    generator_schema,
    selected_sites,
)
from .harness import BenchPlan, BenchReport, load_bench_config, parse_bench_config, run_benchmark
from .workload import WorkloadQuery, finest_level_workload, xweb_workload

__all__ = [
    "BenchPlan",
    "BenchReport",
    "GeneratorConfig",
    "Injection",
    "InjectionLedger",
    "WorkloadQuery",
    "finest_level_workload",
    "generate",
    "generator_schema",
    "load_bench_config",
    "parse_bench_config",
    "run_benchmark",
    "selected_sites",
    "xweb_workload",
]
