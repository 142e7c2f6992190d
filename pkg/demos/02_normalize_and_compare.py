"""
Normalizing first, then grouping the traditional way
=====================================================

Covering fills skipped levels with Other placeholders; strictifying
replaces several parents by one fused parent.  A plain group-by on the
result must agree with QBS on the raw warehouse.
"""

from xolap.pedersen import format_log, normalize, plain_group_by
from xolap.qbs import qbs, result_rows
from xolap.samples import project_queries, project_schema, project_warehouse
from xolap.xmlio import serialize_warehouse

schema = project_schema()
tree = project_warehouse()
q1, q2 = project_queries()

actions = []
normalized = normalize(tree, schema, log=actions)
print(format_log(actions))
print(serialize_warehouse(normalized).decode())

for q in (q1, q2):
    direct = result_rows(qbs(tree, q, schema))
    baseline = result_rows(plain_group_by(normalized, q, schema))
    print(q.grouping_elements, "agree:", direct == baseline)

# running it again changes nothing
print("idempotent:", normalize(normalized, schema) == normalized)
