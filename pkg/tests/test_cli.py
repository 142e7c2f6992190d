import subprocess
import sys

import pytest

from xolap.cli import main
from xolap.samples import PROJECT_SCHEMA, PROJECT_XML, Q1, Q2


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in [("pm.xml", PROJECT_XML), ("pm.schema", PROJECT_SCHEMA), ("q1.query", Q1), ("q2.query", Q2)]:
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        paths[name] = str(p)
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_query_prints_grouped_warehouse(capsys, files):
    code, out, err = run(capsys, "query", "--in", files["pm.xml"], "--schema", files["pm.schema"], "--q", files["q1.query"])
    assert code == 0 and err == ""
    assert out.count("<fact>") == 4
    assert '<lvl name="Team" v="1-2">' in out
    assert '<lvl name="Team" v="Other">' in out
    assert '<agg fn="sum" measure="cost" v="1500"/>' in out


def test_rollup_takes_stages_in_order(capsys, files):
    code, out, _ = run(
        capsys, "rollup", "--in", files["pm.xml"], "--schema", files["pm.schema"],
        "--q", files["q1.query"], "--q", files["q2.query"],
    )
    assert code == 0
    assert '<lvl name="Branch" v="I-II"/>' in out
    assert '<agg fn="sum" measure="cost" v="2500"/>' in out


def test_validate_reports_and_strict_input_is_silent(capsys, files, tmp_path):
    code, out, _ = run(capsys, "validate", "--in", files["pm.xml"], "--schema", files["pm.schema"])
    assert code == 0 and len(out.splitlines()) == 3
    norm = tmp_path / "norm.xml"
    led = tmp_path / "norm.log"
    code, out, _ = run(
        capsys, "normalize", "--in", files["pm.xml"], "--schema", files["pm.schema"],
        "--out", str(norm), "--emit-ledger", str(led),
    )
    assert code == 0 and out == ""
    assert len(led.read_text().splitlines()) == 5
    code, out, _ = run(capsys, "validate", "--in", str(norm), "--schema", files["pm.schema"])
    assert code == 0 and out == ""


def test_generate_then_query(capsys, tmp_path):
    xml, schema, ledger = tmp_path / "g.xml", tmp_path / "g.schema", tmp_path / "g.ledger"
    code, _, _ = run(
        capsys, "generate", "--facts", "40", "--kind", "complex", "--pct", "20", "--seed", "5",
        "--out", str(xml), "--schema", str(schema), "--emit-ledger", str(ledger),
    )
    assert code == 0
    assert len(ledger.read_text().splitlines()) == 40 * 4 * 20 // 100
    q = tmp_path / "day.query"
    q.write_text("group date.day\nagg count(*)\n")
    code, out, _ = run(capsys, "query", "--in", str(xml), "--schema", str(schema), "--q", str(q), "--linear-scan")
    assert code == 0 and "<agg fn=\"count\"" in out


def test_identical_invocations_identical_output(capsys):
    first = run(capsys, "generate", "--facts", "25", "--kind", "nonstrict", "--pct", "50", "--seed", "9")
    second = run(capsys, "generate", "--facts", "25", "--kind", "nonstrict", "--pct", "50", "--seed", "9")
    assert first == second and first[0] == 0
    assert first[1].count("<fact>") == 25


def test_bench_from_config(capsys, tmp_path):
    cfg = tmp_path / "small.cfg"
    cfg.write_text("facts = 120\nkind = complex\npct = 20\nqueries = 1D, 2D\nrepetitions = 3\n")
    out = tmp_path / "bench.csv"
    code, _, _ = run(capsys, "bench", "--config", str(cfg), "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "config_id,facts,kind,pct,query,mode,rep,phase,millis"
    assert len(lines) == 1 + 2 * 3 * 8


def test_domain_error_exit_code(capsys, files, tmp_path):
    bad = tmp_path / "bad.xml"
    bad.write_text("<w><fact><dim name='project'><lvl name='Team' v='7'/></dim></fact></w>")
    code, out, err = run(capsys, "validate", "--in", str(bad), "--schema", files["pm.schema"])
    assert code == 1 and out == ""
    assert "Team" in err and "/w/fact[1]" in err


def test_generator_config_error_exit_code(capsys):
    code, _, err = run(capsys, "generate", "--facts", "0")
    assert code == 1 and "fact_count" in err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["explode"],
        ["query", "--in", "x.xml"],
        ["generate", "--kind", "weird"],
        ["generate", "--facts", "ten"],
    ],
)
def test_usage_errors(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 2 and out == ""


def test_missing_input_is_usage_error(capsys, files, tmp_path):
    code, _, err = run(capsys, "query", "--in", str(tmp_path / "none.xml"), "--schema", files["pm.schema"], "--q", files["q1.query"])
    assert code == 2 and "cannot read" in err


def test_unwritable_output_is_usage_error(capsys, files, tmp_path):
    code, _, err = run(capsys, "validate", "--in", files["pm.xml"], "--schema", files["pm.schema"], "--out", str(tmp_path / "no" / "dir.txt"))
    assert code == 2 and "cannot write" in err


def test_module_entry_point(files):
    proc = subprocess.run(
        [sys.executable, "-m", "xolap", "validate", "--in", files["pm.xml"], "--schema", files["pm.schema"]],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("NONSTRICT project Team")
