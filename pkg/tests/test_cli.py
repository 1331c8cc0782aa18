import json
import subprocess
import sys

import pytest

from mackeyprod.cli import run


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _json(capsys, *argv):
    code, out, err = _run(capsys, *argv)
    return code, json.loads(out) if out else None, err


def test_mackey_ga_gm(capsys):
    code, rep, _ = _json(capsys, "mackey", "--field", "3^1", "--functors", "GA,GM", "--dmax", "2")
    assert code == 0 and rep["order"] == 1 and rep["stabilized"]
    assert set(rep) >= {"functors", "base_field", "degree_bound", "generator_count", "relation_count",
                        "invariant_factors", "free_rank", "stabilized"}
    assert rep["config"]["seed"] == 0


def test_mackey_gm_gm_reports_truncated_value(capsys):
    code, rep, _ = _json(capsys, "mackey", "--field", "3^1", "--functors", "GM,GM", "--dmax", "3")
    assert code == 0 and rep["invariant_factors"] == [8]


def test_mackey_not_stabilized_exit_2(capsys):
    code, rep, _ = _json(capsys, "mackey", "--field", "2^1", "--functors", "GA,GA", "--dmax", "3")
    assert code == 2 and rep["exit_code"] == 2 and rep["free_rank"] == 0
    assert [s["invariant_factors"] for s in rep["scan"]] == [[2], [2, 2], [2, 2, 2, 2]]


def test_mackey_genjac_and_elliptic(capsys):
    code, rep, _ = _json(capsys, "mackey", "--field", "5^1", "--functors", "GA,ELL:1,1", "--dmax", "2")
    assert code == 0 and rep["order"] == 1
    code, rep, _ = _json(capsys, "mackey", "--field", "3^1", "--functors", "GENJAC:t^2,GA", "--dmax", "2")
    assert rep["functors"][0].startswith("GENJAC")


def test_parse_error_has_position(capsys):
    code, out, err = _run(capsys, "mackey", "--field", "3^1", "--functors", "GA,FOO", "--dmax", "2")
    assert code == 1 and out == ""
    assert "position 3" in err


def test_dmax_cap(capsys):
    code, _, err = _run(capsys, "mackey", "--field", "3^1", "--functors", "GA", "--dmax", "0")
    assert code == 1 and "dmax" in err


def test_prove_zero(capsys):
    code, rep, _ = _json(capsys, "prove-zero", "--field", "3^1", "--functors", "GA,GM",
                         "--entries", "[[1], [2]]")
    assert code == 0 and rep["final"] == "zero" and rep["validated"]
    code, rep, _ = _json(capsys, "prove-zero", "--field", "3^1", "--functors", "GA,GM", "--point", "3^2",
                         "--entries", "[[0, 1], [0, 1]]")
    assert code == 0 and len(rep["steps"]) <= 4


def test_prove_zero_errors(capsys):
    code, _, err = _run(capsys, "prove-zero", "--field", "3^1", "--functors", "GM,GM", "--entries", "[[2],[2]]")
    assert code == 1 and "semi-abelian" in err
    code, _, err = _run(capsys, "prove-zero", "--field", "3^1", "--functors", "GA,GM", "--entries", "[[1]")
    assert code == 1 and "JSON" in err


def test_prove_zero_ga_chain_is_not_zero(capsys):
    code, rep, _ = _json(capsys, "prove-zero", "--field", "2^1", "--functors", "GA,GA", "--point", "2^2",
                         "--entries", "[[0, 1], [0, 1]]", "--strategy", "GA_CHAIN")
    assert code == 2 and rep["validated"] and rep["final"] != "zero"


def test_chow(capsys):
    code, rep, _ = _json(capsys, "chow", "--field", "3^1", "--modulus", "2*(inf)")
    assert code == 0 and rep["order"] == 3 and rep["oracle_agrees"]


def test_product_bound(capsys):
    code, rep, _ = _json(capsys, "product-bound", "--field", "5^1", "--m1", "(0)+(inf)", "--m2", "(0)+(inf)",
                         "--dmax", "1")
    assert code == 0 and rep["factors"]["J1"] == 4 and rep["bound"] == 64


def test_reciprocity(capsys):
    code, rep, _ = _json(capsys, "reciprocity", "--field", "5^1", "--section", "GM:t", "--curve", "P1-{0,inf}")
    assert code == 0 and rep["conductor"] == "(0)+(inf)" and rep["all_pass"]


def test_text_format(capsys):
    code, out, _ = _run(capsys, "chow", "--field", "5^1", "--modulus", "(0)+(inf)", "--format", "text")
    assert code == 0 and "order: 4" in out


def test_out_file(tmp_path, capsys):
    target = tmp_path / "r.json"
    code, out, _ = _run(capsys, "mackey", "--field", "3^1", "--functors", "GA,GM", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["order"] == 1


@pytest.mark.parametrize("argv", [
    ["mackey", "--field", "3^1", "--functors", "GA,GA", "--dmax", "2"],
    ["reciprocity", "--field", "3^1", "--section", "GA:t", "--curve", "P1-{inf}", "--limit", "30"],
])
def test_byte_identical_reports(argv):
    cmd = [sys.executable, "-m", "mackeyprod", *argv]
    a = subprocess.run(cmd, capture_output=True, check=False).stdout
    b = subprocess.run(cmd, capture_output=True, check=False).stdout
    assert a and a == b


def test_timing_flag(capsys):
    code, rep, _ = _json(capsys, "mackey", "--field", "3^1", "--functors", "GA,GM", "--timing")
    assert "wall_time_ms" in rep
    code, rep, _ = _json(capsys, "mackey", "--field", "3^1", "--functors", "GA,GM")
    assert "wall_time_ms" not in rep
