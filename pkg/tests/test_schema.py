import pytest

from xolap.errors import SchemaError, UnknownDimension, UnknownLevel, UnknownMeasure
from xolap.schema import (
    HierarchySchema,
    LevelSchema,
    WarehouseSchema,
    base_level,
    format_schema,
    fuse,
    parse_schema,
)
from xolap.samples import PROJECT_SCHEMA


def test_project_schema_shape(pm_schema):
    project = pm_schema.dimension("project")
    assert project.level_names() == ["Project", "Team", "Branch"]
    assert project.parent_of == {"Project": "Team", "Team": "Branch"}
    assert project.level("Team").value_domain == ("1", "2", "3", "4")
    assert pm_schema.measures == ("cost",)


def test_rank_covers_fused_levels(pm_schema):
    project = pm_schema.dimension("project")
    assert project.rank("Team") == project.rank("Team_fused") == 2
    with pytest.raises(UnknownLevel):
        project.rank("Division")


def test_format_parse_round_trip(pm_schema):
    assert parse_schema(format_schema(pm_schema)) == pm_schema
    assert parse_schema(PROJECT_SCHEMA) == pm_schema


@pytest.mark.parametrize(
    "values, other, expected",
    [
        (["2", "1"], False, "1-2"),
        (["4"], True, "4-Other"),
        (["Other", "3"], False, "3-Other"),
        ([], True, "Other"),
        (["β", "α", "B"], False, "B-α-β"),
    ],
)
def test_fuse_encoding(values, other, expected):
    assert fuse(values, other) == expected


def test_domain_accepts_placeholders_and_fused_values(pm_schema):
    team = pm_schema.dimension("project").level("Team")
    assert team.accepts("3") and team.accepts("Other")
    assert team.accepts("1-2") and team.accepts("4-Other")
    assert not team.accepts("5") and not team.accepts("1-5")


def test_base_level():
    assert base_level("Team_fused") == "Team"
    assert base_level("Team") == "Team"


@pytest.mark.parametrize(
    "text",
    [
        "[dimension d]\nlevels = a\n",  # no domain for a
        "[dimension d]\na = 1\n",  # no levels key
        "[cube]\n",
        "[dimension d]\nlevels = a, a\na = 1\n",
        "[dimension d]\nlevels = a_fused\na_fused = 1\n",
        "[dimension d]\nlevels = a\na = 1\na.attributes = v\n",
        "not ini at all",
    ],
)
def test_bad_schema_text(text):
    with pytest.raises(SchemaError):
        parse_schema(text)


def test_empty_domain_rejected():
    with pytest.raises(SchemaError):
        LevelSchema("a", ())


def test_lookup_errors(pm_schema):
    with pytest.raises(UnknownDimension):
        pm_schema.dimension("supplier")
    with pytest.raises(UnknownMeasure):
        pm_schema.check_measure("revenue")


def test_duplicate_dimension_names():
    h = HierarchySchema("d", (LevelSchema("a", ("1",)),))
    with pytest.raises(SchemaError):
        WarehouseSchema((h, h))
