import os

import pytest

from conftest import FIXTURES
from ainfty_engine.backend.store import EngineStore
from ainfty_engine.cli import resolve_bound, run


def fixture(name):
    return os.path.join(FIXTURES, name)


def invoke(*argv):
    lines = []
    code = run(list(argv), out=lines.append)
    return code, lines


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv("AINFTY_MAX_ARITY", raising=False)
    monkeypatch.delenv("AINFTY_TRUNCATION", raising=False)


def test_check_clean_algebra():
    code, lines = invoke("check", fixture("s1.ainf"))
    assert code == 0
    assert lines[-1] == "OK kind=relations name=S1 max_arity=4"


def test_check_reports_residuals():
    code, lines = invoke("check", fixture("nonassoc.ainf"))
    assert code == 1
    assert 'RESIDUAL arity=3 inputs=a a a value="-1*e"' in lines

    # Arity two alone is clean
    code, lines = invoke("check", fixture("nonassoc.ainf"), "--max-arity", "2")
    assert code == 0


def test_check_module():
    code, lines = invoke("check", fixture("s1.ainf"), "--module", fixture("s1-mod.ainf"))
    assert code == 0
    assert lines[-1].startswith("OK kind=relations name=D")


def test_solve_bc():
    code, lines = invoke("solve-bc", fixture("s1.ainf"), "--module", fixture("s1-mod.ainf"))
    assert code == 0
    assert lines == ["b = 1*x"]


def test_deform_writes_flat_algebra(tmp_path):
    output = tmp_path / "flat.ainf"
    code, lines = invoke("deform", fixture("s1.ainf"), "--b", "1*x", "--output", str(output))
    assert code == 0
    assert lines[0].startswith("CURVATURE name=") and lines[0].endswith('value="0"')
    assert output.exists()

    # Deformed algebra passes check
    code, lines = invoke("check", str(output))
    assert code == 0


def test_trees_count_and_listing():
    code, lines = invoke("trees", "--moduli", "M", "--leaves", "4", "--codim", "2", "--count-only")
    assert code == 0
    assert lines == ["5"]

    code, lines = invoke("trees", "--moduli", "M", "--leaves", "3", "--codim", "1")
    assert "STRATUM moduli=M k=3 codim=1 tree=((1,2),3)" in lines

    code, lines = invoke("trees", "--moduli", "N", "--leaves", "3", "--codim", "1", "--count-only")
    assert lines == ["6"]


def test_cohomology_and_limit():
    code, lines = invoke("cohomology", fixture("a2.ainf"))
    assert code == 0
    assert "DEGREE 0 b=3 tors=[]" in lines

    code, lines = invoke("limit", fixture("filtered.ainf"))
    assert code == 0
    assert lines[0] == "LIMIT stages=3 stable_from=2 dims=[0:1,1:3,2:1]"
    assert "DEGREE 1 b=1 tors=[]" in lines


def test_yoneda_and_representable():
    code, lines = invoke("yoneda", fixture("a2.ainf"), "--object", "1", "--length", "2")
    assert code == 0
    assert lines == ["OK kind=yoneda object=1 length=2 chain_map=true quasi_iso=true"]

    code, lines = invoke("representable", fixture("a2.ainf"), "--bimodule", fixture("a2-diag.ainf"),
                         "--length", "2")
    assert code == 0
    assert all(line.startswith("REPRESENTABLE") and "value=true" in line for line in lines)


def test_tensor(tmp_path):
    code, lines = invoke("tensor", fixture("lambda2.ainf"), fixture("zz3.ainf"))
    assert code == 0
    assert lines[-1].endswith("rank=12 swap_iso=true")


@pytest.mark.parametrize("argv, kind", [
    (("check", "missing.ainf"), "FileNotFoundError"),
    (("cohomology", fixture("s1.ainf")), "EngineError"),
    (("trees", "--leaves", "4"), "EngineError"),
    (("trees", "--boundary", "(1,(2"), "MalformedTree"),
    (("trees", "--boundary", "P(N(1),N(2))"), "MalformedTree"),
    (("trees", "--moduli", "N", "--boundary", "((1,2),3)"), "MalformedTree"),
])
def test_errors_exit_two(argv, kind):
    code, lines = invoke(*argv)
    assert code == 2
    assert lines[0].startswith(f"ERROR kind={kind} ")


def test_bound_precedence(tmp_path, monkeypatch):
    store = EngineStore(str(tmp_path / "engine.db"))
    assert resolve_bound(None, "AINFTY_MAX_ARITY", store, "max_arity", 4) == 4

    # Store setting beats the default
    store.save_setting("max_arity", "3")
    assert resolve_bound(None, "AINFTY_MAX_ARITY", store, "max_arity", 4) == 3

    # Environment beats the store
    monkeypatch.setenv("AINFTY_MAX_ARITY", "5")
    assert resolve_bound(None, "AINFTY_MAX_ARITY", store, "max_arity", 4) == 5

    # Flag beats everything
    assert resolve_bound(2, "AINFTY_MAX_ARITY", store, "max_arity", 4) == 2


def test_runs_are_recorded(tmp_path):
    db_file = str(tmp_path / "engine.db")
    invoke("--store", db_file, "check", fixture("s1.ainf"))
    invoke("--store", db_file, "check", fixture("s1.ainf"))

    # Identical inputs give identical digests and reports
    runs = EngineStore(db_file).get_runs("check")
    assert len(runs) == 2
    assert runs[0]["digest"] == runs[1]["digest"]
    assert runs[0]["report"] == runs[1]["report"]
    assert runs[0]["exit_code"] == 0
