"""
Grouping projects by team when teams overlap
============================================

Four projects, each with a cost.  A and B are run by two teams each, and D
hangs directly off branch I without a team.
"""

from xolap.diagnostics import validate_summarizability
from xolap.qbs import qbs, rollup
from xolap.samples import project_queries, project_schema, project_warehouse
from xolap.xmlio import serialize_warehouse

schema = project_schema()
tree = project_warehouse()
by_team, by_branch = project_queries()

# what is wrong with this hierarchy?
print(validate_summarizability(tree, schema).to_text())

# group by team and customer: A and B get fused team groups, D goes to Other
result = qbs(tree, by_team, schema)
print(serialize_warehouse(result).decode())

# roll the team groups up to branches; the two α groups merge (1000 + 1500)
print(serialize_warehouse(rollup(tree, [by_team, by_branch], schema)).decode())

# every project's cost lands in exactly one group
for fact in result.facts:
    team = fact.children[0].children[0]
    cost = fact.children[-1].value
    print(f"Team[{team.value}]", cost)
print(sum(f.children[-1].value for f in result.facts), sum(f.children[-1].value for f in tree.facts))
