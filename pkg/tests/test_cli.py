import json

import numpy as np
import pytest

from infogeom.cli import RunConfig, main
from infogeom.dynamics import amplitude_damping, amplitude_damping_generator
from infogeom.linalg import matrix_to_json


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def classical_pair(tmp_path):
    return write(tmp_path / "pair.json", {"rho": matrix_to_json(np.diag([0.6, 0.4])),
                                         "sigma": matrix_to_json(np.diag([0.4, 0.6]))})


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_metric_classical_pair(classical_pair, capsys):
    code, out, _ = run(["metric", classical_pair, "--f", "bures", "--f", "kmb"], capsys)
    assert code == 0
    doc = json.loads(out)
    # classical Fisher of (-0.2, 0.2) at (0.6, 0.4)
    expect = 0.04 / 0.6 + 0.04 / 0.4
    assert all(abs(r["fisher"] - expect) < 1e-12 for r in doc["fisher"])
    assert abs(doc["divergences"]["relative_entropy"] - 0.2 * np.log(1.5)) < 1e-12
    assert doc["config"]["seed"] == 0


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["metric", str(bad)], capsys)[0] == 2
    pure = write(tmp_path / "pure.json", {"rho": matrix_to_json(np.diag([1.0, 0.0])),
                                         "sigma": matrix_to_json(np.eye(2) / 2)})
    assert run(["metric", pure], capsys)[0] == 3
    assert run(["evolve", "--preset", "amplitude-damping", "--f", "variance", "--T", "0.05"],
               capsys)[0] == 4
    assert run(["dbalance", "--preset", "fisher-only", "--assert"], capsys)[0] == 5
    assert run(["metric", str(tmp_path / "missing.json")], capsys)[0] == 2


def test_evolve_fd_only_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["evolve", "--preset", "amplitude-damping", "--T", "0.2", "--dt", "0.05", "--seed", "3"]
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b), "--assert"]) == 0
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert text.startswith("# infogeom") and "config-hash" in text
    assert main(["evolve", "--preset", "amplitude-damping", "--f", "variance", "--fd-only",
                 "--T", "0.1", "--dt", "0.05", "--out", str(a)]) == 0
    assert "note variance" in a.read_text()


def test_evolve_generator_file(tmp_path, capsys):
    gen = write(tmp_path / "gen.json", {"generator": amplitude_damping_generator(0.5).to_json()})
    code, out, _ = run(["evolve", gen, "--T", "0.1", "--dt", "0.05", "--format", "json",
                        "--f", "kmb", "--assert"], capsys)
    assert code == 0
    assert json.loads(out)["max_relative_error"] < 1e-4


def test_markov_commands(capsys):
    code, out, _ = run(["markov", "--preset", "negative-rate", "--assert"], capsys)
    assert code == 0 and json.loads(out)["embedding_witness"]
    code, out, _ = run(["markov", "--preset", "amplitude-damping", "--T", "1", "--grid", "5"], capsys)
    assert json.loads(out)["verdict"] == "MARKOVIAN"
    code, out, _ = run(["markov", "--preset", "depolarizing:nonmarkov", "--T", "1.5",
                        "--grid", "16", "--trials", "5", "--assert"], capsys)
    assert code == 5 and json.loads(out)["verdict"] == "NON-MARKOVIAN"


def test_recover_channel(tmp_path, capsys):
    ch = amplitude_damping(0.3)
    inp = write(tmp_path / "rec.json", {"pi": matrix_to_json(np.diag([0.3, 0.7])),
                                       "channel": {"superop": matrix_to_json(ch.superop)}})
    code, out, _ = run(["recover", inp, "--f", "bures", "--fprime", "harmonic", "--assert"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["prior_residual"] < 1e-10 and doc["ordered"]


def test_recover_preset_csv(capsys):
    code, out, _ = run(["recover", "--preset", "amplitude-damping", "--T", "0.1", "--dt", "0.05",
                        "--format", "csv"], capsys)
    assert code == 0 and "retrieval_divergence" in out


def test_dbalance(tmp_path, capsys):
    code, _, err = run(["dbalance", "--preset", "fisher-only"], capsys)
    assert code == 0 and "fisher: PASS, alicki: FAIL" in err
    R = [[-1.0, 2.0], [1.0, -2.0]]
    inp = write(tmp_path / "cl.json", {"pi": matrix_to_json(np.diag([2 / 3, 1 / 3])),
                                      "rate_matrix": R})
    code, out, err = run(["dbalance", inp, "--assert"], capsys)
    assert code == 0 and json.loads(out)["verdicts"] == {"alicki": True, "fisher": True}


def test_geodesic(tmp_path, classical_pair, capsys):
    code, out, _ = run(["geodesic", classical_pair, "--segments", "200", "--assert"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["relative_gap"] < 1e-3
    same = write(tmp_path / "same.json", {"rho": matrix_to_json(np.eye(2) / 2),
                                         "sigma": matrix_to_json(np.eye(2) / 2)})
    code, out, _ = run(["geodesic", same], capsys)
    assert json.loads(out)["wy_distance"] == 0.0
    code, out, _ = run(["geodesic", classical_pair, "--format", "csv", "--samples", "3"], capsys)
    assert len([l for l in out.splitlines() if not l.startswith("#")]) == 4


def test_estimate(tmp_path, capsys):
    inp = write(tmp_path / "est.json", {
        "rho": matrix_to_json(np.diag([0.8, 0.2])), "H": matrix_to_json(np.array([[0, 0.5], [0.5, 0]])),
        "rho0": matrix_to_json(np.diag([0.6, 0.4])), "rho1": matrix_to_json(np.diag([0.4, 0.6]))})
    code, out, _ = run(["estimate", inp], capsys)
    doc = json.loads(out)
    assert code == 0
    assert abs(doc["bounds"][0]["fisher"] - 0.36) < 1e-6
    assert abs(doc["chernoff"]["s_star"] - 0.5) < 1e-6


def test_garden(capsys):
    code, out, _ = run(["garden", "--assert"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["max_normalization_error"] < 1e-9
    assert all(r["bounded"] for r in doc["catalog"])


def test_tolerance_override_and_hash(capsys):
    with pytest.raises(SystemExit):
        main(["garden", "--tolerance", "bogus=1"])
    a = RunConfig("garden", tolerances={"db": 1e-8})
    b = RunConfig("garden", tolerances={"db": 1e-7})
    assert a.digest() != b.digest()
    assert a.digest() == RunConfig("garden", tolerances={"db": 1e-8}, out="x").digest()
