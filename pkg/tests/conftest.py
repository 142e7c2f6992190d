import pytest
from hypothesis import HealthCheck, settings

from xolap.samples import project_queries, project_schema, project_warehouse

settings.register_profile(
    "default", max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def pm_schema():
    return project_schema()


@pytest.fixture
def pm_tree():
    return project_warehouse()


@pytest.fixture
def pm_queries():
    return project_queries()
