"""End-to-end command-line tests against temporary spec files."""

import json

import numpy as np
import pytest

from qlinbae import cli, qsys


def _write(tmp_path, doc, name="sys.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def _michelson_doc():
    return cli.emit_spec(qsys.michelson_system())


def _broken_doc():
    doc = _michelson_doc()
    doc["S"] = [[[2.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [2.0, 0.0]]]
    return doc


# ------------------------------------------------------------- round trips

def test_matrix_encoding_roundtrip():
    mat = np.array([[1.0 + 2.0j, -3.0], [0.0, 4.0j]])
    encoded = cli.emit_complex_matrix(mat)
    decoded = cli.parse_complex_matrix(encoded, "test")
    assert np.allclose(decoded, mat)


def test_spec_roundtrip(tmp_path):
    path = _write(tmp_path, _michelson_doc())
    sys_obj, _ = cli.load_spec(path)
    ref = qsys.michelson_system()
    assert np.allclose(sys_obj.c_minus, ref.c_minus)
    assert np.allclose(sys_obj.omega_minus, ref.omega_minus)


def test_load_spec_rejects_missing_key(tmp_path):
    doc = _michelson_doc()
    del doc["C_plus"]
    path = _write(tmp_path, doc)
    with pytest.raises(ValueError):
        cli.load_spec(path)


# ----------------------------------------------------------------- commands

def test_validate_ok(tmp_path, capsys):
    path = _write(tmp_path, _michelson_doc())
    assert cli.main(["validate", path]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["valid"] is True


def test_validate_broken_exits_nonzero(tmp_path, capsys):
    path = _write(tmp_path, _broken_doc())
    assert cli.main(["validate", path]) == 1
    out = json.loads(capsys.readouterr().out)
    assert out["valid"] is False
    assert out["violations"]


def test_realize_quadrature(tmp_path, capsys):
    path = _write(tmp_path, _michelson_doc())
    assert cli.main(["realize", path, "--form", "quad"]) == 0
    out = json.loads(capsys.readouterr().out)
    a = cli.parse_complex_matrix(out["A"], "A")
    assert a.shape == (4, 4)
    assert np.allclose(np.imag(a), 0.0)


def test_tf_single_frequency(tmp_path, capsys):
    path = _write(tmp_path, _michelson_doc())
    assert cli.main(["tf", path, "--omega", "2.0"]) == 0
    out = json.loads(capsys.readouterr().out)
    g = cli.parse_complex_matrix(out["G"], "G")
    assert g.shape == (4, 4)


def test_tf_sweep_csv(tmp_path):
    path = _write(tmp_path, _michelson_doc())
    out_file = tmp_path / "sweep.csv"
    assert cli.main(["tf", path, "--sweep", "0.5", "2.0", "4",
                     "--out", str(out_file)]) == 0
    lines = out_file.read_text().strip().splitlines()
    assert len(lines) == 5  # header + 4 frequencies


def test_bae_reports_certified_pair(tmp_path, capsys):
    path = _write(tmp_path, _michelson_doc())
    assert cli.main(["bae", path]) == 0
    out = json.loads(capsys.readouterr().out)
    assert ["q_out", "p_in"] in out["certified_pairs"]
    assert any("q_coupling_imag_C" == m["id"]
               for m in out["matched_conditions"])


def test_qnd_command(tmp_path, capsys):
    path = _write(tmp_path, _michelson_doc())
    assert cli.main(["qnd", path]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["qnd_interaction"] is False  # the interferometer's L and H do not commute
    assert "qnd_variables" in out and "siso" not in out


def test_feedback_reduce(tmp_path, capsys):
    doc = {
        "modes": 2, "channels": 2,
        "S": cli.emit_complex_matrix(np.eye(2)),
        "C_minus": cli.emit_complex_matrix(
            np.array([[1.0, 1.0 + 1.0j], [1.0 + 1.0j, 1.0 + 1.0j]])),
        "C_plus": cli.emit_complex_matrix(
            np.array([[1.0, 2.0 - 1.0j], [1.0 + 1.0j, 2.0 + 2.0j]])),
        "Omega_minus": cli.emit_complex_matrix(
            np.array([[2.0, 3.0 + 2.0j], [3.0 - 2.0j, 4.0]])),
        "Omega_plus": cli.emit_complex_matrix(
            np.array([[2.0, 3.0 - 1.0j], [3.0 - 1.0j, 5.0]])),
        "feedback": {
            "split": [1, 1],
            "k11": cli.emit_complex_matrix(np.array([[1.0, 1.0 + 1.0j]])),
            "k12": cli.emit_complex_matrix(np.array([[1.0, 2.0 - 1.0j]])),
            "k21": cli.emit_complex_matrix(np.array([[1.0 + 1.0j, 1.0 + 1.0j]])),
            "k22": cli.emit_complex_matrix(np.array([[1.0 + 1.0j, 2.0 + 2.0j]])),
            "beamsplitter": cli.emit_complex_matrix(-1j * np.eye(1)),
        },
    }
    path = _write(tmp_path, doc)
    assert cli.main(["feedback", "reduce", path]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["oracle_passed"] is True
    assert out["reduced"]["channels"] == 1


def test_kalman_command(tmp_path, capsys):
    doc = _michelson_doc()
    kappa = 2.0
    doc["kalman"] = {
        "A_co": cli.emit_complex_matrix(-0.5 * kappa * np.eye(2)),
        "B_co": cli.emit_complex_matrix(-np.sqrt(kappa) * np.eye(2)),
        "C_co": cli.emit_complex_matrix(np.sqrt(kappa) * np.eye(2)),
    }
    path = _write(tmp_path, doc)
    assert cli.main(["kalman", path]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["theorem"]["q_wrt_p"] and out["theorem"]["p_wrt_q"]
    assert out["markov_identity"]["premise_holds"]


def test_simulate_command(tmp_path, capsys):
    doc = _michelson_doc()
    doc["sim"] = {"fock_dim": 3, "dt": 1e-3, "T": 0.01, "n_traj": 3,
                  "seed": 0}
    path = _write(tmp_path, doc)
    out_file = tmp_path / "traj.csv"
    assert cli.main(["simulate", path, "--out", str(out_file)]) == 0
    lines = out_file.read_text().strip().splitlines()
    assert lines[0].startswith("time,")
    assert len(lines) > 2
    summary = json.loads(capsys.readouterr().err)
    assert "martingale" in summary


def test_unknown_spec_file_errors(capsys):
    assert cli.main(["validate", "/nonexistent/spec.json"]) == 1
