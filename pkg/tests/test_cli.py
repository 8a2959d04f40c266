import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from qredundancy.cli import main, parse_target

DATA = Path(__file__).resolve().parents[1] / "demos" / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_spectrum_cosine(capsys):
    code, out, _ = run(capsys, "spectrum", str(DATA / "cosine.json"))
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 3
    assert [float(r["re"]) for r in rows] == pytest.approx([0.5, 0, 0.5], abs=1e-12)


def test_spectrum_identity_observable(capsys):
    code, out, _ = run(capsys, "spectrum", str(DATA / "identity.json"), "--nonzero")
    assert out.splitlines() == ["w1,re,im", "0,1,0"]


def test_spectrum_json(capsys):
    code, out, _ = run(capsys, "spectrum", str(DATA / "cosine.json"), "--format", "json")
    data = json.loads(out)
    assert data["n"] == 1 and len(data["coefficients"]) == 3


def test_spectrum_malformed(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"qubits": 1, "ops": [')
    code, out, err = run(capsys, "spectrum", str(bad))
    assert code == 1 and out == ""
    assert "invalid JSON at line 1" in err


def test_spectrum_schema_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"qubits": 1, "ops": [{"input": {"slot": 1, "pauli": "XX"}}],
                               "observable": {"pauli": "Z"}}))
    code, _, err = run(capsys, "spectrum", str(bad))
    assert code == 1 and "ops[0].input" in err


@pytest.mark.parametrize("a, spread", [("1,1,1", 3), ("0", 0), ("1,2", 3), ("1/3,2/3", 3)])
def test_spread(capsys, a, spread):
    code, out, _ = run(capsys, "spread", a)
    assert code == 0 and json.loads(out)["spread"] == spread


def test_spread_from_file(tmp_path, capsys):
    f = tmp_path / "a.txt"
    f.write_text("1\n2\n")
    assert json.loads(run(capsys, "spread", str(f))[1])["spread"] == 3


def test_spread_axis_sets_and_csv(capsys):
    code, out, _ = run(capsys, "spread", "1,10", "--axis-sets=-2,-1,0,1,2;-1,0,1", "--format", "csv")
    assert out.splitlines()[0] == "k,multiplicity" and len(out.splitlines()) == 16


def test_bound(capsys):
    assert run(capsys, "bound", "--kind", "linear", "--rank", "13")[1] == "3\n"
    assert run(capsys, "bound", "--kind", "linear_sharp", "--rank", "2")[1] == "2\n"
    assert run(capsys, "bound", "--kind", "degree", "--degree", "3")[1] == "3\n"
    data = json.loads(run(capsys, "bound", "--kind", "arcsin", "--rank", "5", "--format", "json")[1])
    assert data["lower_bound_int"] == 2


def test_bound_missing_rank(capsys):
    code, _, err = run(capsys, "bound", "--kind", "linear")
    assert code == 1 and "--rank" in err


def test_rank_exit_codes(capsys):
    code, out, _ = run(capsys, "rank", "--target", "poly:0,1")
    assert code == 2 and json.loads(out)["exceeded"] is True
    code, out, _ = run(capsys, "rank", "--target", "cos")
    assert code == 0 and json.loads(out)["fourier_rank"] == 1


def test_rank_from_sample_file(tmp_path, capsys):
    x = np.linspace(-0.5, 0.5, 49)
    f = tmp_path / "s.csv"
    f.write_text("x,y\n" + "".join(f"{a:.17g},{np.cos(2 * np.pi * 3 * a):.17g}\n" for a in x))
    code, out, _ = run(capsys, "rank", "--target", str(f))
    assert code == 0 and json.loads(out)["fourier_rank"] == 1


def test_unknown_target(capsys):
    code, _, err = run(capsys, "rank", "--target", "tan")
    assert code == 1 and "unknown target" in err


def test_malformed_sample_file(tmp_path, capsys):
    f = tmp_path / "s.csv"
    f.write_text("x,y\n0,1\n0.1,oops\n")
    code, _, err = run(capsys, "fit", "--target", str(f), "--n", "1")
    assert code == 1 and ":3:" in err


def test_scdim(capsys):
    code, out, _ = run(capsys, "scdim", "--a", "1,1", "--b", "0,0", "--eps", "0.5")
    assert json.loads(out)["dimension"] == 5
    code, out, _ = run(capsys, "scdim", "--a", "1,1", "--b", "0,0", "--format", "csv")
    assert out.splitlines()[0] == "S,C,lo,hi"


def test_fit_and_out_file(tmp_path, capsys):
    path = tmp_path / "fit.json"
    code, out, _ = run(capsys, "fit", "--target", "cos", "--n", "1", "--out", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["residual"] < 1e-10


def test_sweep_cos2(capsys):
    # cos^2 has frequencies {0, +-2}; a = 2 is inside the default cap F = 5
    code, out, _ = run(capsys, "sweep", "--target", "cos2", "--n", "1..3", "--no-timing")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["n"] for r in rows] == ["1", "2", "3"]
    assert float(rows[0]["best_residual"]) < 1e-8
    # with F < 2 one slot cannot reach frequency 2 and the first success is n = 2
    code, out, _ = run(capsys, "sweep", "--target", "cos2", "--n", "1..3", "--freq-cap", "1.5")
    res = [float(r["best_residual"]) for r in csv.DictReader(io.StringIO(out))]
    assert res[0] > 1e-3 and res[1] < 1e-8


def test_parse_target():
    assert parse_target("poly:1,0,2")(2.0) == pytest.approx(9.0)
    assert parse_target("abs_sin")(-0.5) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        parse_target("poly:")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qredundancy", "bound", "--kind", "linear", "--rank", "8"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "2\n"


def test_deterministic_reports(capsys):
    argv = ["fit", "--target", "cos2", "--encoding", "arcsine", "--n", "2", "--restarts", "3", "--seed", "7"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]
