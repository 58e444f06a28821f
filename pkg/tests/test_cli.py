import json
import math
from importlib.resources import files

import numpy as np
import pytest

from qcorr.cli import main
from qcorr.io import StateFile, load_table, write_state, write_table
from qcorr.sampling import random_density
from qcorr.ssc import CorrelationTable, correlation_table

DATA = files("qcorr") / "data"
BELL = np.array([1, 0, 0, 1]) / math.sqrt(2)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def state_file(tmp_path, name, kind, data, dims=(2, 2)):
    path = tmp_path / name
    write_state(path, StateFile(dims, kind, np.asarray(data, dtype=complex)))
    return path


class TestDemos:
    @pytest.mark.parametrize("argv", [
        ["demo", "singlet"],
        ["demo", "hardy"],
        ["demo", "hardy", "--theta", "0.4", "--theta-prime", "1.1", "--format", "csv"],
        ["demo", "measurement", "--phase", "0.3", "--steps", "20"],
        ["demo", "measurement", "--format", "json", "--steps", "5"],
    ])
    def test_deterministic(self, capsys, argv):
        first = run(capsys, *argv)
        second = run(capsys, *argv)
        assert first[0] == 0
        assert first == second

    def test_singlet_report(self, capsys):
        code, out, _ = run(capsys, "demo", "singlet", "--seed", "7")
        obj = json.loads(out)
        assert obj["verdict"] == "singlet-certified"
        assert obj["singlet_mean"] == pytest.approx(1.0, abs=1e-12)
        assert obj["reconstruction"]["frobenius_error"] <= 1e-10
        assert obj["round_trip"]["max_frobenius_error"] <= 1e-10
        assert obj["metadata"]["seed"] == 7

    def test_hardy_report(self, capsys, tmp_path):
        out_path = tmp_path / "hardy.json"
        code, _, _ = run(capsys, "demo", "hardy", "-o", out_path)
        obj = json.loads(out_path.read_text())
        assert code == 0
        assert obj["report"]["verdict"] is True
        assert obj["report"]["witness"]["p(2G,2'G)"] == pytest.approx(1 / 12, abs=1e-10)
        csv_lines = (tmp_path / "hardy.tables.csv").read_text().splitlines()
        assert csv_lines[0] == "table,unprimed,primed,probability"
        assert len(csv_lines) == 17

    def test_hardy_maximize(self, capsys):
        _, out, _ = run(capsys, "demo", "hardy", "--maximize", "--grid", "64")
        assert json.loads(out)["maximize"]["p_max"] >= 1 / 12

    def test_measurement_csv(self, capsys):
        _, out, _ = run(capsys, "demo", "measurement", "--steps", "10")
        lines = out.splitlines()
        assert lines[0] == "t,purity,cross_phase_correlation"
        assert len(lines) == 12
        t, p, c = map(float, lines[-1].split(","))
        assert (t, p) == (1.0, pytest.approx(0.5))
        assert c == pytest.approx(1.0)

    def test_measurement_alphas(self, capsys):
        code, out, _ = run(capsys, "demo", "measurement", "--alpha", "0.6", "--alpha", "0.8j",
                           "--apparatus-dim", "3", "--ready", "1", "--steps", "4")
        assert code == 0
        assert float(out.splitlines()[-1].split(",")[2]) == pytest.approx(0.0, abs=1e-12)

    def test_unknown_demo(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["demo", "bogus"])
        assert info.value.code == 2

    def test_bad_tolerance(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["demo", "singlet", "--tol", "0.5"])
        assert info.value.code == 2


class TestReconstruct:
    def test_shipped_table(self, capsys):
        code, out, err = run(capsys, "reconstruct", DATA / "singlet_table.json")
        assert code == 0
        obj = json.loads(out)
        assert obj["kind"] == "density"
        w = np.array(obj["data"])[..., 0] + 1j * np.array(obj["data"])[..., 1]
        s = np.array([0, 1, -1, 0]) / math.sqrt(2)
        assert np.linalg.norm(w - np.outer(s, s)) <= 1e-10
        assert json.loads(err)["ok"] is True

    def test_round_trip_through_files(self, capsys, tmp_path, rng):
        w = random_density(rng, 6)
        table_path = tmp_path / "t.json"
        write_table(table_path, correlation_table(w, [3, 2]))
        out_path = tmp_path / "w.json"
        code, _, _ = run(capsys, "reconstruct", table_path, "-o", out_path)
        assert code == 0
        data = np.array(json.loads(out_path.read_text())["data"])
        assert np.linalg.norm(data[..., 0] + 1j * data[..., 1] - w) <= 1e-10

    def test_inconsistent(self, capsys, tmp_path):
        t = load_table(DATA / "singlet_table.json")
        path = tmp_path / "bad.json"
        write_table(path, CorrelationTable(t.dims, 2 * t.means))
        code, out, err = run(capsys, "reconstruct", path)
        assert code == 3
        assert "warning" in err
        assert json.loads(out)["kind"] == "density"

    def test_non_positive(self, capsys, tmp_path):
        path = tmp_path / "neg.json"
        write_table(path, correlation_table(np.diag([1.2, -0.2, 0, 0]), [2, 2]))
        code, _, err = run(capsys, "reconstruct", path)
        assert code == 3
        assert "eigenvalue" in err

    def test_incomplete(self, capsys, tmp_path):
        data = json.loads((DATA / "singlet_table.json").read_text())
        data["entries"].pop()
        path = tmp_path / "short.json"
        path.write_text(json.dumps(data))
        code, _, err = run(capsys, "reconstruct", path)
        assert code == 2
        assert "error" in err

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "reconstruct", tmp_path / "nope.json")[0] == 2


class TestTable:
    def test_matches_shipped(self, capsys):
        code, out, _ = run(capsys, "table", DATA / "singlet_ket.json")
        assert code == 0
        assert out == (DATA / "singlet_table.json").read_text()


class TestSchmidt:
    def test_bell(self, capsys, tmp_path):
        path = state_file(tmp_path, "bell.json", "ket", BELL)
        code, out, _ = run(capsys, "schmidt", path)
        obj = json.loads(out)
        assert code == 0
        assert obj["coefficients"] == pytest.approx([1 / math.sqrt(2)] * 2)
        assert obj["reduced_purity"] == pytest.approx([0.5, 0.5])

    def test_product(self, capsys, tmp_path):
        path = state_file(tmp_path, "prod.json", "ket", np.kron([1, 0], [0.6, 0.8]))
        _, out, _ = run(capsys, "schmidt", path, "--format", "csv")
        assert out.splitlines() == ["index,coefficient", "0,1"]

    def test_regrouped_dims(self, capsys, tmp_path):
        path = state_file(tmp_path, "ghz.json", "ket",
                          np.array([1, 0, 0, 0, 0, 0, 0, 1]) / math.sqrt(2), dims=(2, 2, 2))
        _, out, _ = run(capsys, "schmidt", path, "--dims", "2,4")
        assert json.loads(out)["coefficients"] == pytest.approx([1 / math.sqrt(2)] * 2)

    def test_dims_mismatch(self, capsys, tmp_path):
        path = state_file(tmp_path, "bell.json", "ket", BELL)
        assert run(capsys, "schmidt", path, "--dims", "2,3")[0] == 2

    def test_three_factors(self, capsys, tmp_path):
        path = state_file(tmp_path, "ghz.json", "ket", np.eye(8)[0], dims=(2, 2, 2))
        assert run(capsys, "schmidt", path)[0] == 2

    def test_density_rejected(self, capsys, tmp_path):
        path = state_file(tmp_path, "mixed.json", "density", np.eye(4) / 4)
        code, _, err = run(capsys, "schmidt", path)
        assert code == 2
        assert "ket" in err


class TestWitness:
    def test_maximally_mixed(self, capsys, tmp_path):
        path = state_file(tmp_path, "mixed.json", "density", np.eye(2) / 2, dims=(2,))
        code, out, _ = run(capsys, "witness", path)
        obj = json.loads(out)
        assert code == 0
        assert obj["verdict"] == "mixed"
        assert obj["predicted_mean"] == pytest.approx(1.0)
        assert obj["extension_state"]["dims"] == [2, 2]

    def test_pure(self, capsys, tmp_path):
        path = state_file(tmp_path, "pure.json", "ket", [0.6, 0.8], dims=(2,))
        code, out, _ = run(capsys, "witness", path)
        assert code == 0
        assert json.loads(out) == {"verdict": "pure", "message": "pure state: no witness exists"}

    def test_not_positive(self, capsys, tmp_path):
        path = state_file(tmp_path, "neg.json", "density", np.diag([1.2, -0.2]), dims=(2,))
        code, _, err = run(capsys, "witness", path)
        assert code == 2
        assert "-0.2" in err
