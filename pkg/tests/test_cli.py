import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from renyi_thermo.cli import main
from renyi_thermo.errors import NotPositiveError, ValidationError
from renyi_thermo.io import MatrixFile, decode_matrix, load_matrix

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)
H_EX = np.diag([3, 2, 4, 1, 5, 9, 2, 6, 5, 3, 5, 9]).astype(float)


@pytest.fixture
def files(tmp_path):
    def write(name, data, kind="hermitian"):
        path = tmp_path / f"{name}.json"
        data = np.asarray(data, dtype=complex)
        MatrixFile(data.shape[0], kind, data).save(path)
        return str(path)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip().startswith("{") else out), err


class TestMatrixFiles:
    @settings(max_examples=60, deadline=None)
    @given(arrays(np.complex128, st.tuples(st.integers(1, 4), st.integers(1, 4)).map(lambda t: (t[0], t[0])),
                  elements=st.complex_numbers(allow_nan=False, allow_infinity=False, max_magnitude=1e300)))
    def test_round_trip_bit_exact(self, a):
        # arbitrary complex data: only the encoding is exercised, not the kind check
        obj = json.loads(MatrixFile(a.shape[0], "hermitian", a, label="x").dumps())
        assert obj["label"] == "x"
        back = decode_matrix(obj["data"], a.shape[0])
        assert np.array_equal(back.view(np.uint64), a.view(np.uint64))

    def test_file_round_trip(self, rng, tmp_path):
        G = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = G @ G.conj().T
        rho /= np.trace(rho).real
        MatrixFile(4, "hermitian", rho).save(tmp_path / "r.json")
        assert np.array_equal(load_matrix(tmp_path / "r.json").data, rho)

    def test_negative_zero_kept(self):
        back = decode_matrix(json.loads(MatrixFile(1, "hermitian", np.array([[complex(-0.0, 0.0)]])).dumps())["data"])
        assert math.copysign(1.0, back[0, 0].real) == -1.0

    def test_load_validates(self, tmp_path, files):
        p = files("rho", np.diag([0.5, 0.5]), "density")
        assert load_matrix(p).operator().n == 2
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"n": 2, "kind": "density", "data": [[[0.6, 0], [0, 0]], [[0, 0], [0.6, 0]]]}))
        with pytest.raises(ValidationError, match="trace"):
            load_matrix(bad)
        bad.write_text(json.dumps({"n": 3, "kind": "hermitian", "data": [[[1, 0]]]}))
        with pytest.raises(ValidationError, match="n:"):
            load_matrix(bad)
        bad.write_text(json.dumps({"n": 1, "kind": "unitary", "data": [[[1, 0]]]}))
        with pytest.raises(ValidationError, match="kind"):
            load_matrix(bad)
        bad.write_text("{not json")
        with pytest.raises(ValidationError, match="invalid JSON"):
            load_matrix(bad)
        with pytest.raises(ValidationError, match="cannot read"):
            load_matrix(tmp_path / "missing.json")

    def test_positive_kind(self, files):
        with pytest.raises(NotPositiveError):
            load_matrix(files("s", np.diag([1.0, 0.0]), "positive"))

    def test_non_hermitian(self, files):
        with pytest.raises(ValidationError):
            load_matrix(files("a", [[0, 1], [0, 0]]))


class TestCommands:
    def test_thermo_example(self, capsys, files):
        code, doc, _ = run(capsys, "thermo", "-H", files("H", H_EX), "--alpha", "2", "--beta", "1")
        assert code == 0
        assert doc["command"] == "thermo"
        r = doc["results"]
        assert r["F_alpha_beta"] == pytest.approx(0.249258, abs=1e-5)
        assert r["E_alpha_beta"] == pytest.approx(1.48008, abs=1e-4)
        assert r["is_equilibrium"] is True
        assert len(doc["inputs"]["files"]["hamiltonian"]["sha256"]) == 64
        assert doc["inputs"]["params"] == {"alpha": 2.0, "beta": 1.0, "state": "gibbs"}

    def test_thermo_inf_and_state(self, capsys, files):
        code, doc, _ = run(capsys, "thermo", "-H", files("H", SZ), "--state", files("r", np.eye(2) / 2, "density"),
                           "--alpha", "inf", "--beta", "2")
        assert code == 0
        assert doc["inputs"]["params"]["alpha"] == "inf"
        assert doc["results"]["is_equilibrium"] is False

    def test_zero_hamiltonian(self, capsys, files):
        code, doc, _ = run(capsys, "thermo", "-H", files("H", np.zeros((3, 3))), "--alpha", "0.5", "--beta", "1")
        assert code == 0
        assert doc["results"]["F_alpha_beta"] == pytest.approx(-math.log(3), abs=1e-14)

    def test_uncertainty(self, capsys, files):
        rho = files("rho", np.diag([0.75, 0.25]), "density")
        code, doc, _ = run(capsys, "uncertainty", "--state", rho, files("x", SX), files("y", SY))
        assert code == 0
        assert doc["results"]["det_gap"] == pytest.approx(0.75, abs=1e-12)
        code, doc, _ = run(capsys, "uncertainty", "--state", rho, files("x", SX), files("y", SY), files("z", SZ),
                           "--alpha", "2")
        assert code == 0
        assert "det_gap" not in doc["results"] and "note" in doc["results"]
        assert len(doc["results"]["alpha_variances"]) == 3

    def test_entropy_and_rel_entropy(self, capsys, files):
        rho = files("rho", np.diag([0.5, 0.5]), "density")
        code, doc, _ = run(capsys, "entropy", "--state", rho, "--alpha", "2", "--alpha", "inf")
        assert code == 0
        assert [e["S_alpha"] for e in doc["results"]["entropies"]] == pytest.approx([math.log(2)] * 2)
        sigma = files("sigma", np.diag([0.25, 0.75]), "positive")
        code, doc, _ = run(capsys, "rel-entropy", "--state", rho, "--sigma", sigma, "--alpha", "2", "--sandwiched")
        assert code == 0
        assert doc["results"]["D_alpha"] == pytest.approx(math.log(4 / 3), abs=1e-14)
        assert doc["results"]["sandwiched"] == pytest.approx(math.log(4 / 3), abs=1e-14)

    def test_paper_example(self, capsys):
        code, doc, err = run(capsys, "paper-example")
        assert code == 0
        assert doc["results"]["pass"] is True
        rows = doc["results"]["rows"]
        assert {r["provenance"] for r in rows} == {"matches-paper", "derived-oracle"}
        assert all(r["pass"] for r in rows)
        assert "1.39549" in err

    def test_verify_small(self, capsys, tmp_path):
        out = tmp_path / "v.json"
        code, _, err = run(capsys, "verify", "--trials", "3", "--only", "schrodinger", "--output", str(out))
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["results"]["summary"]["pass"] is True
        assert [r["name"] for r in doc["results"]["reports"]] == ["schrodinger"]
        assert "PASS schrodinger" in err

    def test_verify_list(self, capsys):
        code, out, _ = run(capsys, "verify", "--list")
        assert code == 0
        assert len(out.split()) == 23

    def test_global_flags_after_subcommand(self, capsys, tmp_path):
        out = tmp_path / "e.json"
        code, _, err = run(capsys, "paper-example", "--quiet", "--output", str(out))
        assert code == 0 and err == ""
        assert json.loads(out.read_text())["command"] == "paper-example"


class TestExitCodes:
    def test_verification_failure(self, capsys, monkeypatch):
        from renyi_thermo.harness import REGISTRY, runner

        check = REGISTRY["entropy_bounds"]
        monkeypatch.setitem(REGISTRY, "entropy_bounds", runner.Check(check.name, lambda ctx: -1.0, check.claim, True))
        code, _, _ = run(capsys, "verify", "--trials", "2", "--only", "entropy_bounds", "--output", "-")
        assert code == 1

    @pytest.mark.parametrize("argv", [
        ["verify", "--trials", "0"],
        ["verify", "--only", "no_such", "--trials", "1"],
        ["verify", "--workers", "0"],
        ["thermo", "-H", "/nonexistent.json", "--alpha", "2", "--beta", "1"],
    ])
    def test_input_errors(self, capsys, argv):
        assert main(argv) == 2
        capsys.readouterr()

    def test_argparse_errors(self, capsys):
        for argv in (["thermo"], ["nope"], ["entropy", "--state", "x", "--alpha", "abc"]):
            with pytest.raises(SystemExit) as exc:
                main(argv)
            assert exc.value.code == 2
        capsys.readouterr()

    def test_bad_state_file(self, capsys, files):
        bad = files("rho", np.diag([0.6, 0.6]))
        with open(bad) as fh:
            obj = json.load(fh)
        obj["kind"] = "density"
        with open(bad, "w") as fh:
            json.dump(obj, fh)
        code, _, err = run(capsys, "entropy", "--state", bad, "--alpha", "2")
        assert code == 2 and "trace" in err

    def test_domain_errors(self, capsys, files):
        H = files("H", H_EX)
        code, _, err = run(capsys, "thermo", "-H", H, "--alpha", "2", "--beta", "0")
        assert code == 3 and "beta must be nonzero" in err
        code, _, err = run(capsys, "thermo", "-H", H, "--alpha", "2", "--beta", "100")
        assert code == 3 and "beta out of range" in err
        rho = files("rho", np.eye(3) / 3, "density")
        code, _, _ = run(capsys, "uncertainty", "--state", rho, files("x", SX))
        assert code == 3
        singular = files("s", np.diag([1.0, 0.0]))
        code, _, _ = run(capsys, "rel-entropy", "--state", files("r2", np.eye(2) / 2, "density"),
                         "--sigma", singular, "--alpha", "0.5")
        assert code == 3

    def test_console_script(self):
        res = subprocess.run([sys.executable, "-m", "renyi_thermo.cli", "verify", "--list"],
                             capture_output=True, text=True, check=False)
        assert res.returncode == 0
        assert "pb_inequality" in res.stdout.split()
