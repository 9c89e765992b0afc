import csv
import io
import json
import math

import pytest

import geodiscord.dynamics as dyn_mod
import geodiscord.verify as verify_mod
from geodiscord.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def comments(text):
    return [line for line in text.splitlines() if line.startswith("#")]


def test_compute_closed_with_allow_unphysical(capsys):
    code, out, _ = run(capsys, "compute", "--n", "3", "--c", "0.8,0.4,0.5", "--allow-unphysical")
    assert code == 0
    report = json.loads(out)
    assert report["closed_form"] == pytest.approx(0.05125, abs=1e-15)
    assert report["physical"] is False


def test_compute_unphysical_names_eigenvalue(capsys):
    code, out, err = run(capsys, "compute", "--n", "3", "--c", "0.8,0.4,0.5")
    assert code == 1
    assert out == ""
    assert "smallest eigenvalue -0.00308" in err


def test_compute_both_zero_state(capsys):
    code, out, _ = run(capsys, "compute", "--n", "2", "--c", "0,0,0", "--mode", "both", "--restarts", "3")
    assert code == 0
    report = json.loads(out)
    assert report["closed_form"] == 0
    assert report["numeric"] == pytest.approx(0, abs=1e-12)
    assert report["gap"] == pytest.approx(0, abs=1e-12)


def test_compute_both_four_qubits(capsys):
    code, out, _ = run(capsys, "compute", "--n", "4", "--c", "0.8,0.4,0.5", "--mode", "both", "--restarts", "4")
    assert code == 0
    report = json.loads(out)
    assert report["closed_form"] == pytest.approx(0.025625, abs=1e-15)
    assert report["gap"] <= 1e-6
    assert len(report["tree"]) == 7 and all(len(r) == 4 for r in report["tree"])


def test_compute_is_byte_stable(capsys):
    argv = ["compute", "--n", "3", "--c", "0.3,-0.2,0.6", "--mode", "numeric", "--restarts", "3", "--seed", "5"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


@pytest.mark.parametrize("bad", ["1,2", "a,b,c", "0.1,0.2,0.3,0.4", "nan,0,0"])
def test_malformed_triple_is_usage_error(capsys, bad):
    with pytest.raises(SystemExit) as exc:
        main(["compute", "--c", bad])
    assert exc.value.code == 2


def test_coefficient_out_of_range_is_unphysical(capsys):
    code, _, err = run(capsys, "compute", "--c", "1.5,0,0")
    assert code == 1 and "smallest eigenvalue" in err


def test_missing_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_dynamics_csv(capsys):
    code, out, _ = run(capsys, "dynamics", "--n", "2", "--c", "0.8,0.4,0.5", "--allow-unphysical")
    assert code == 0
    assert out.splitlines()[0] == "t,gamma,c1_eff,c2_eff,c3_eff,discord"
    table = rows(out)
    assert len(table) == 201
    assert float(table[0]["t"]) == 0 and float(table[0]["discord"]) == pytest.approx(0.1025, abs=1e-15)
    (tail,) = comments(out)
    assert tail == out.splitlines()[-1]
    t0 = float(tail.split("=")[1])
    assert t0 == pytest.approx(0.940007, abs=1e-6)
    assert any(float(r["t"]) == t0 for r in table)


def test_dynamics_no_kink(capsys):
    code, out, _ = run(capsys, "dynamics", "--n", "3", "--c", "0.428571,0.214286,0.8")
    assert code == 0
    assert comments(out) == ["# sudden_change_t0=none"]


def test_dynamics_halving(capsys):
    _, two, _ = run(capsys, "dynamics", "--n", "2", "--c", "0.8,0.4,0.5", "--allow-unphysical")
    _, three, _ = run(capsys, "dynamics", "--n", "3", "--c", "0.8,0.4,0.5", "--allow-unphysical")
    for a, b in zip(rows(two), rows(three), strict=True):
        assert a["t"] == b["t"]
        assert float(a["discord"]) == 2 * float(b["discord"])


def test_dynamics_precision(capsys):
    _, out, _ = run(capsys, "dynamics", "--n", "2", "--c", "0.8,0.4,0.5", "--allow-unphysical", "--steps", "7")
    for r in rows(out):
        g = float(r["gamma"])
        assert g == pytest.approx(math.exp(-float(r["t"]) / 2), rel=1e-15)
        assert "," not in r["t"] and "e+" not in r["t"]


def test_dynamics_bad_params(capsys):
    code, _, _ = run(capsys, "dynamics", "--c", "0.1,0.1,0.1", "--tau", "0")
    assert code == 2


def test_surface_formal_cloud(capsys):
    code, out, _ = run(capsys, "surface", "--n", "3", "--target", "0.1")
    assert code == 0
    table = rows(out)
    assert out.splitlines()[0] == "c1,c2,c3,discord"
    assert len(table) > 0
    for r in table:
        sq = [float(r[k]) ** 2 for k in ("c1", "c2", "c3")]
        assert abs(sum(sq) - max(sq) - 0.8) <= 0.04 + 1e-12


def test_surface_four_qubits_smaller(capsys):
    _, three, _ = run(capsys, "surface", "--n", "3", "--target", "0.1")
    _, four, _ = run(capsys, "surface", "--n", "4", "--target", "0.1")
    assert 0 < len(rows(four)) < len(rows(three))


def test_surface_zero_target_axes_only(capsys):
    _, out, _ = run(capsys, "surface", "--n", "3", "--target", "0", "--band", "1e-6", "--resolution", "41")
    table = rows(out)
    assert len(table) == 121
    for r in table:
        assert sum(float(r[k]) != 0 for k in ("c1", "c2", "c3")) <= 1


def test_surface_physical_only(capsys):
    _, out, _ = run(capsys, "surface", "--n", "3", "--target", "0.1", "--physical-only")
    assert rows(out) == []
    _, out, _ = run(capsys, "surface", "--n", "3", "--target", "0.05", "--physical-only", "--resolution", "21")
    table = rows(out)
    assert table
    assert all(sum(float(r[k]) ** 2 for k in ("c1", "c2", "c3")) <= 1 + 1e-12 for r in table)


def test_out_to_file(tmp_path, capsys):
    path = tmp_path / "traj.csv"
    code, out, _ = run(capsys, "dynamics", "--c", "0.8,0.4,0", "--n", "3", "--out", str(path))
    assert code == 0 and out == ""
    assert path.read_text().splitlines()[-1] == "# sudden_change_t0=none"


@pytest.mark.slow
def test_verify_passes_and_is_deterministic(capsys):
    code, first, _ = run(capsys, "verify", "--seed", "42", "--samples", "100")
    assert code == 0
    assert first.splitlines()[-1] == "# result=PASS"
    _, second, _ = run(capsys, "verify", "--seed", "42", "--samples", "100")
    assert first == second


@pytest.mark.slow
def test_verify_catches_printed_sign(monkeypatch, capsys):
    original = dyn_mod.sudden_change_time

    def negative(s, tau):
        t0 = original(s, tau)
        return None if t0 is None else -t0

    monkeypatch.setattr(verify_mod, "sudden_change_time", negative)
    monkeypatch.setattr(dyn_mod, "sudden_change_time", negative)
    code, out, _ = run(capsys, "verify", "--seed", "42", "--samples", "100")
    assert code == 1
    assert "dynamics," in out and out.splitlines()[-1] == "# result=FAIL"


def test_verify_rejects_zero_samples(capsys):
    assert run(capsys, "verify", "--samples", "0")[0] == 2
