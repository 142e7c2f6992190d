"""The project-management warehouse used throughout the docs and tests.

Four projects (facts) roll up Project -> Team -> Branch and carry one
customer and a cost.  Projects A and B are each run by two teams (Team 2 is
shared), Project D is attached to branch I with no team in between.
"""

from .pattern import parse_query
from .schema import parse_schema
from .xmlio import parse_warehouse

PROJECT_SCHEMA = """\
[warehouse]
measures = cost

[dimension project]
levels = Project, Team, Branch
Project = A, B, C, D
Team = 1..4
Branch = I, II

[dimension customer]
levels = Customer
Customer = α, β, γ
"""

PROJECT_XML = """\
<w>
  <fact>
    <dim name="project">
      <lvl name="Project" v="A">
        <lvl name="Team" v="1">
          <lvl name="Branch" v="I"/>
        </lvl>
        <lvl name="Team" v="2">
          <lvl name="Branch" v="II"/>
        </lvl>
      </lvl>
    </dim>
    <dim name="customer">
      <lvl name="Customer" v="α"/>
    </dim>
    <msr name="cost" v="1000"/>
  </fact>
  <fact>
    <dim name="project">
      <lvl name="Project" v="B">
        <lvl name="Team" v="2">
          <lvl name="Branch" v="II"/>
        </lvl>
        <lvl name="Team" v="3">
          <lvl name="Branch" v="I"/>
        </lvl>
      </lvl>
    </dim>
    <dim name="customer">
      <lvl name="Customer" v="α"/>
    </dim>
    <msr name="cost" v="1500"/>
  </fact>
  <fact>
    <dim name="project">
      <lvl name="Project" v="C">
        <lvl name="Team" v="4">
          <lvl name="Branch" v="II"/>
        </lvl>
      </lvl>
    </dim>
    <dim name="customer">
      <lvl name="Customer" v="β"/>
    </dim>
    <msr name="cost" v="500"/>
  </fact>
  <fact>
    <dim name="project">
      <lvl name="Project" v="D">
        <lvl name="Branch" v="I"/>
      </lvl>
    </dim>
    <dim name="customer">
      <lvl name="Customer" v="γ"/>
    </dim>
    <msr name="cost" v="100"/>
  </fact>
</w>
"""

#: Total cost of projects per team and per customer.
Q1 = """\
group project.Team
group customer.Customer
agg sum(cost)
"""

#: Total cost of projects per branch and per customer.
Q2 = """\
group project.Branch
group customer.Customer
agg sum(cost)
"""


def project_schema():
    return parse_schema(PROJECT_SCHEMA)


def project_warehouse():
    return parse_warehouse(PROJECT_XML.encode("utf-8"), project_schema())


def project_queries():
    schema = project_schema()
    return parse_query(Q1, schema), parse_query(Q2, schema)
