import json
import subprocess
import sys

import pytest

from stringhom.cli import main, render_json


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def groups_json(capsys, *argv):
    code, out, _ = run(capsys, "groups", "--format", "json", *argv)
    assert code == 0
    return json.loads(out)


def test_groups_sphere3(capsys):
    doc = groups_json(capsys, "--sphere", "3", "--max-degree", "6")
    assert doc["schema"] == 1 and doc["sphere"] == 3 and doc["winding_cutoff"] is None
    got = [(r["rank"], r["invariant_factors"]) for r in doc["groups"]]
    assert got == [(1, []), (0, []), (2, []), (0, []), (2, []), (0, [2]), (2, [])]


def test_groups_circle(capsys):
    doc = groups_json(capsys, "--sphere", "1", "--max-degree", "4", "--winding", "2")
    assert doc["groups"][0]["rank"] == 5
    assert doc["winding_cutoff"] == 2


def test_groups_single_row(capsys):
    doc = groups_json(capsys, "--sphere", "2", "--max-degree", "0")
    assert len(doc["groups"]) == 1 and doc["groups"][0]["rank"] == 1


def test_unresolved_row(capsys):
    doc = groups_json(capsys, "--sphere", "3", "--max-degree", "9")
    row = doc["groups"][9]
    assert row["invariant_factors"] is None and not row["resolved"]
    assert row["torsion_order"] == 24
    code, out, _ = run(capsys, "groups", "--sphere", "3", "--max-degree", "9", "--format", "text")
    assert "T(order=8)" in out


def test_bracket_tables(capsys):
    code, out, _ = run(capsys, "bracket", "--sphere", "3", "--max-degree", "12", "--format", "json")
    rows = json.loads(out)["brackets"]
    assert any(r["left"] == r["right"] == "e(a⊗u^2)" and r["target_order"] == 3 for r in rows)
    assert all(not r["vanishes"] for r in rows)
    code, out, _ = run(capsys, "bracket", "--sphere", "2", "--max-degree", "8", "--format", "json")
    rows = json.loads(out)["brackets"]
    assert any(r["left"] == r["right"] == "e(bv)" and r["coefficient"] == -9 and r["target_order"] == 5
               for r in rows)
    code, out, _ = run(capsys, "bracket", "--sphere", "5", "--max-degree", "3", "--format", "json")
    assert json.loads(out)["brackets"] == []


def test_bracket_all_includes_vanishing(capsys):
    _, out, _ = run(capsys, "bracket", "--sphere", "3", "--max-degree", "12", "--format", "json", "--all")
    rows = json.loads(out)["brackets"]
    assert any(r["vanishes"] for r in rows)


@pytest.mark.parametrize("argv", [["--sphere", "3", "--max-degree", "60"],
                                  ["--sphere", "2", "--max-degree", "40"],
                                  ["--sphere", "1", "--max-degree", "10", "--winding", "8"]])
def test_verify_passes(capsys, argv):
    code, out, _ = run(capsys, "verify", *argv)
    assert code == 0
    assert "verification passed" in out


def test_verify_even_warns(capsys):
    _, out, _ = run(capsys, "verify", "--sphere", "2", "--max-degree", "40")
    assert "prod_{i=1}^{k-1}(2i+1)" in out


@pytest.mark.parametrize("argv", [
    ["groups", "--sphere", "1", "--max-degree", "4"],
    ["groups", "--sphere", "3", "--max-degree", "4", "--winding", "2"],
    ["groups", "--sphere", "0", "--max-degree", "4"],
    ["groups", "--sphere", "3", "--max-degree", "-1"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_argparse_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["groups", "--sphere", "3"])
    assert exc.value.code == 2


def test_verify_mismatch_exit_code(capsys, monkeypatch):
    import stringhom.cli as cli
    from stringhom.closed_form import GroupDescriptor
    monkeypatch.setattr(cli, "theorem_group", lambda ctx, i: GroupDescriptor(7))
    code, _, err = run(capsys, "verify", "--sphere", "3", "--max-degree", "4")
    assert code == 1 and "degree 0" in err


def test_json_round_trip(capsys, tmp_path):
    path = tmp_path / "out.json"
    code, _, _ = run(capsys, "bracket", "--sphere", "2", "--max-degree", "10", "--format", "json",
                     "--out", str(path), "--all")
    text = path.read_text(encoding="utf-8")
    assert render_json(json.loads(text)) == text


def test_deterministic(capsys):
    a = run(capsys, "groups", "--sphere", "4", "--max-degree", "30", "--format", "json")[1]
    b = run(capsys, "groups", "--sphere", "4", "--max-degree", "30", "--format", "json")[1]
    assert a == b


def test_ascii_output(capsys):
    _, out, _ = run(capsys, "groups", "--sphere", "3", "--max-degree", "6", "--ascii")
    assert out.isascii()
    assert "gamma" in out and "e(a(x)u)" in out


def test_env_default_format(monkeypatch, capsys):
    monkeypatch.setenv("STRINGHOM_FORMAT", "json")
    _, out, _ = run(capsys, "groups", "--sphere", "3", "--max-degree", "2")
    assert json.loads(out)["max_degree"] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "stringhom", "groups", "--sphere", "2",
                           "--max-degree", "3", "--format", "json"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["groups"][3]["generators"] == ["e(bv)"]
