"""
Synthetic sales warehouses with injected complexity
===================================================
"""

import numpy as np

from xolap.benchgen import GeneratorConfig, generate, generator_schema
from xolap.diagnostics import validate_summarizability
from xolap.xmlio import serialize_warehouse

facts = 2000

# 5% of the 8000 dimensional nodes, one per stratum of 20
tree, ledger = generate(GeneratorConfig(facts, "complex", 5, seed=1))
print(len(ledger), "injections")
print(ledger.to_text()[:400])

sizes = {}
for kind, pct in [("none", 0), ("incomplete", 50), ("nonstrict", 50), ("complex", 50)]:
    t, _ = generate(GeneratorConfig(facts, kind, pct, seed=1))
    sizes[kind] = len(serialize_warehouse(t))
print(sizes)

# deleted levels show up one-for-one as INCOMPLETE findings
config = GeneratorConfig(facts, "incomplete", 20, seed=1)
tree, ledger = generate(config)
report = validate_summarizability(tree, generator_schema(config))
print(len(ledger), len(report))

counts = report.counts()
levels = sorted(counts)
print(np.array([counts[k] for k in levels]), [k[1:] for k in levels])
