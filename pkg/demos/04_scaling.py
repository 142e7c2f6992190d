"""
Hash-indexed versus list-scanned group matching
===============================================

Complex 20% warehouses, grouped by part type and day.  With a hash index
the total time grows about linearly in the number of facts; scanning the
witness-tree list for every fact grows about quadratically.
"""

import numpy as np

from xolap.benchgen import GeneratorConfig, run_benchmark, xweb_workload

sizes = [1000, 2000, 4000]
two_d = xweb_workload()[1:2]
configs = [GeneratorConfig(n, "complex", 20, seed=3) for n in sizes]

slopes = {}
for linear in (False, True):
    report = run_benchmark(configs, two_d, modes=("qbs",), repetitions=3, linear_scan=linear)
    med = report.medians()
    totals = np.array([med[(c.config_id, "2D", "qbs", "total")] for c in configs])
    slopes[linear] = np.polyfit(np.log(sizes), np.log(totals), 1)[0]
    print("linear scan" if linear else "hash index ", totals.round(1), "ms")
print(slopes)

# where does the QBS time go, and what does normalizing up front cost?
report = run_benchmark(configs[-1:], two_d, repetitions=3)
for key, ms in sorted(report.medians().items()):
    print(key[2:], ms)
