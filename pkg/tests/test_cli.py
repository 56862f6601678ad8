import subprocess
import sys

import pytest

from fracpme import pdemodel as pm
from fracpme.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_rl_deriv_power_record(capsys):
    code, out, _ = run(capsys, "rl-deriv", "--alpha", "0.5", "--power", "1", "--coeff", "1",
                       "--method", "power")
    assert code == 0
    assert out == "coeff=1.1283791671 exponent=0.5\n"


def test_rl_deriv_routes_agree(capsys):
    _, quad, _ = run(capsys, "rl-deriv", "--alpha", "0.5", "--power", "1", "--method", "quad",
                     "--t", "1")
    assert "value=1.1283791671 " in quad
    _, gl, _ = run(capsys, "rl-deriv", "--alpha", "0.5", "--power", "1", "--method", "gl",
                   "--t", "1", "--step", "0.001")
    value = float(gl.split("value=")[1].split()[0])
    assert value == pytest.approx(1.1283791671, abs=2e-4)


def test_rl_deriv_from_samples(capsys, tmp_path):
    f = tmp_path / "s.txt"
    f.write_text("0\n0\n0\n")
    code, out, _ = run(capsys, "rl-deriv", "--alpha", "0.5", "--samples", str(f), "--step", "0.1",
                       "--method", "gl")
    assert code == 0
    assert out.splitlines() == ["t=0 value=0", "t=0.1 value=0", "t=0.2 value=0"]


def test_adjoint_table_entry(capsys):
    code, out, _ = run(capsys, "adjoint-table", "--algebra", "h1", "--alpha", "0.5", "--r", "2",
                       "--epsilon", "1", "--format", "records")
    assert code == 0
    assert "row=V13 col=V12 entry=V12 - 1·V13" in out.splitlines()


def test_canonicalize(capsys):
    code, out, _ = run(capsys, "canonicalize", "--algebra", "h1", "--alpha", "0.5", "--r", "2",
                       "--coeffs", "2,6,7")
    assert (code, out) == (0, "representative=r16 gamma=3\n")


def test_refuted_solution_exits_two(capsys):
    code, out, _ = run(capsys, "verify", "solution", "--model", "fdpme", "--entry", "fdpme-case3",
                       "--c", "3", "--alpha", "0.5")
    assert code == 2
    assert "verdict=refuted" in out
    assert "term=x·t^-0.5/Γ(0.5)" in out.splitlines()


def test_numeric_solution_check(capsys):
    code, out, _ = run(capsys, "verify", "solution", "--entry", "T33ii", "--numeric",
                       "--grid", "1:2:3,0.25:1:3")
    assert code == 0
    assert "mode=numeric verdict=verified" in out


def test_determining_defaults(capsys):
    assert run(capsys, "verify", "determining", "--model", "fpme")[0] == 0
    code, out, _ = run(capsys, "verify", "determining", "--model", "fdpme", "--set", "D1=0,D4=1",
                       "--c", "1")
    assert code == 2
    assert "term=E3: -1" in out


def test_transport_commands(capsys):
    assert run(capsys, "verify", "transport", "--model", "fpme", "--entry", "T33ii", "--field",
               "V12", "--epsilons", "-1,0.5,2")[0] == 0
    code, out, _ = run(capsys, "verify", "transport", "--model", "fdpme", "--entry", "fdpme-case2",
                       "--field", "V23", "--epsilons", "1")
    assert code == 2
    assert "term=eps=1: t^-0.5/Γ(0.5)" in out


def test_surface_command(capsys):
    code, out, _ = run(capsys, "verify", "surface", "--field", "r16", "--param", "0.5",
                       "--entry", "FPME-case6-reduced")
    assert code == 0
    assert out.count("verdict=verified") == 3


def test_solve_writes_csv(capsys, tmp_path):
    path = tmp_path / "u.csv"
    code, _, _ = run(capsys, "solve", "--grid", "1:2:5", "--nt", "300", "--tend", "1",
                     "--history-until", "0.5", "--out", str(path))
    assert code == 0
    rows = path.read_text().splitlines()
    assert rows[0] == "t\\x,1.0,1.25,1.5,1.75,2.0"
    assert len(rows) == 302


def test_converge_reports_non_monotone_as_refuted(capsys):
    code, out, _ = run(capsys, "converge", "--entry", "T33ii", "--nx", "5", "--nt", "20")
    assert code == 2
    assert "monotone=no" in out


def test_usage_errors(capsys):
    code, _, err = run(capsys, "bogus")
    assert code == 1 and err.startswith("usage error:")
    assert run(capsys, "rl-deriv", "--alpha", "0.5")[0] == 1
    assert run(capsys, "catalog", "show", "--entry", "nope")[0] == 1


def test_domain_error_exits_one(capsys):
    code, _, err = run(capsys, "catalog", "show", "--entry", "T33i", "--alpha", "0.4", "--r", "1.5")
    assert code == 1
    assert err.startswith("error:")


def test_catalog_list_round_trip(capsys):
    code, out, _ = run(capsys, "catalog", "list")
    assert code == 0
    ids = [line.split()[0].removeprefix("id=") for line in out.splitlines()]
    assert ids == list(pm.entry_ids())
    for entry in ids:
        assert run(capsys, "catalog", "show", "--entry", entry)[0] == 0


def test_table_layout_is_aligned(capsys):
    _, out, _ = run(capsys, "--format", "table", "adjoint-table", "--algebra", "h2",
                    "--alpha", "0.5", "--epsilon", "1")
    lines = out.splitlines()
    assert lines[0].split() == ["Ad", "V21", "V22", "V23"]
    assert len({len(line.rstrip()) > 0 for line in lines}) == 1


def test_module_entry_point_is_deterministic():
    argv = [sys.executable, "-m", "fracpme", "verify", "solution", "--entry", "T33iii-paper-proof-variant"]
    first = subprocess.run(argv, capture_output=True)
    second = subprocess.run(argv, capture_output=True)
    assert first.returncode == second.returncode == 2
    assert first.stdout == second.stdout and first.stdout
