import json
import subprocess
import sys

import numpy as np
import pytest

from reluriesz.cli import EXIT_AUDIT, EXIT_INVALID, EXIT_OK, main
from reluriesz.coeffs import RieszCoeffs, dumps_coeffs
from reluriesz.network import deserialize, eval_net


@pytest.fixture
def coeffs_file(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(dumps_coeffs(RieszCoeffs(2, 0.5, {(1, 0): (1.0, -2.0), (1, 1): (0.3, 0.0)})))
    return p


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_mobius(capsys):
    assert run(capsys, "mobius", 12)[:2] == (0, "0\n")
    assert run(capsys, "mobius", 30)[1] == "-1\n"


def test_lattice(capsys):
    assert run(capsys, "lattice", "count", "--t", 1, "--d", 4)[1] == "9\n"
    assert run(capsys, "lattice", "count", "--t", 2, "--d", 2, "--method", "recursive")[1] == "13\n"
    code, out, _ = run(capsys, "lattice", "enum", "--t", 1.5, "--d", 2, "--half")
    assert out.splitlines() == ["k1,k2", "0,1", "1,-1", "1,0", "1,1"]
    doc = json.loads(run(capsys, "lattice", "bounds", "--t", 1, "--d", 4)[1])
    assert doc["N"] == 9 and doc["holds"]


def test_basis_eval(capsys):
    assert float(run(capsys, "basis", "eval", "--kind", "sin", "--k", 1, "--x", 0.125)[1]) == pytest.approx(0.5)


def test_gram(capsys, tmp_path):
    csv = tmp_path / "g.csv"
    code, out, _ = run(capsys, "gram", "--radius", 3, "--dim", 2, "--normalized", "--csv", csv)
    doc = json.loads(out)
    assert code == 0 and 0.5 <= doc["eig_min"] <= doc["eig_max"] <= 1.5
    assert csv.read_text().startswith("i,j,id_i,id_j,value\n")


def test_transform_roundtrip(capsys, tmp_path):
    f = tmp_path / "f.json"
    f.write_text(json.dumps({"dim": 1, "a0": 0.0, "terms": [{"k": [1], "c": 1.0, "s": 0.0}]}))
    r = tmp_path / "r.json"
    assert run(capsys, "transform", "--dir", "f2r", "--in", f, "--out", r, "--trunc", 10)[0] == 0
    doc = json.loads(r.read_text())
    assert doc["terms"][0]["c"] == pytest.approx(np.pi**2 / 8)
    code, _, err = run(capsys, "transform", "--dir", "r2f", "--in", f)
    assert code == EXIT_INVALID and "Riesz" in err


def test_net_build_eval_check(capsys, tmp_path, coeffs_file):
    net_path = tmp_path / "n.json"
    for arch in ("stacked", "inline"):
        assert run(capsys, "net", "build", "--arch", arch, "--in", coeffs_file, "--out", net_path)[0] == 0
        net = deserialize(net_path.read_bytes())
        c = RieszCoeffs.from_dict(json.loads(coeffs_file.read_text()))
        assert eval_net(net, [0.2, 0.7]) == pytest.approx(float(c.evaluate([0.2, 0.7])[0]))
        code, out, _ = run(capsys, "net", "eval", "--net", net_path, "--x", 0.2, 0.7)
        assert float(out) == pytest.approx(float(c.evaluate([0.2, 0.7])[0]))
        code, out, _ = run(capsys, "net", "check", "--net", net_path)
        assert code == EXIT_OK and json.loads(out)["failed"] == []


def test_net_check_corrupted(capsys, tmp_path, coeffs_file):
    net_path = tmp_path / "n.json"
    run(capsys, "net", "build", "--in", coeffs_file, "--out", net_path)
    doc = json.loads(net_path.read_text())
    doc["layers"][0]["weights"][0][0] = 99.0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, _, err = run(capsys, "net", "check", "--net", bad)
    assert code == EXIT_AUDIT
    assert "weights <= 8*max" in err
    truncated = tmp_path / "t.json"
    truncated.write_text(net_path.read_text()[:40])
    assert run(capsys, "net", "check", "--net", truncated)[0] == EXIT_INVALID


def test_net_export(capsys, tmp_path, coeffs_file):
    net_path = tmp_path / "n.json"
    run(capsys, "net", "build", "--in", coeffs_file, "--out", net_path)
    code, out, _ = run(capsys, "net", "export", "--net", net_path)
    assert code == 0 and out.startswith("dim_in 2")
    npz = tmp_path / "n.npz"
    run(capsys, "net", "export", "--net", net_path, "--format", "npz", "--out", npz)
    assert "W0" in np.load(npz).files


def test_approx(capsys, tmp_path, coeffs_file):
    out_net, rep = tmp_path / "a.json", tmp_path / "rep.json"
    code, _, _ = run(capsys, "approx", "sobolev", "--s", 0.5, "--eps", 0.3, "--in", coeffs_file,
                     "--out", out_net, "--report", rep)
    assert code == 0 and json.loads(rep.read_text())["error_l2_exact"] <= 1e-10
    code, out, _ = run(capsys, "approx", "barron", "--s", 0.5, "--eps", 0.2, "--arch", "inline",
                       "--in", coeffs_file, "--out", out_net)
    doc = json.loads(out)
    assert code == 0 and doc["architecture"] == "inline"
    assert run(capsys, "approx", "sobolev", "--s", 1.5, "--eps", 0.3, "--in", coeffs_file,
               "--out", out_net)[0] == EXIT_INVALID


def test_recover(capsys, tmp_path, coeffs_file):
    code, out, _ = run(capsys, "recover", "--method", "ls", "--radius", 2, "--n-samples", 40,
                       "--truth", coeffs_file)
    doc = json.loads(out)
    assert code == 0 and doc["report"]["error_l2_exact"] <= 1e-8
    code, _, err = run(capsys, "recover", "--method", "bp", "--radius", 2, "--n-samples", 40,
                       "--truth", coeffs_file, "--delta", -1)
    assert code == EXIT_INVALID


def test_recover_batch(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"methods": ["ls"], "dims": [1], "s": [0.5], "radii": [2],
                               "n_samples": [30], "seeds": [0]}))
    out = tmp_path / "out.csv"
    assert run(capsys, "recover", "--batch", cfg, "--csv", out)[0] == 0
    rows = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert rows[0].startswith("method,d,s,R") and len(rows) == 2


def test_experiment_validation(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"kind": "gram_check", "dims": [], "radii": [3]}))
    code, _, err = run(capsys, "experiment", "run", "--config", cfg)
    assert code == EXIT_INVALID and "dims" in err
    cfg.write_text("{not json")
    assert run(capsys, "experiment", "run", "--config", cfg)[0] == EXIT_INVALID


def test_bad_arguments(capsys):
    assert run(capsys, "lattice", "count", "--t", 1)[0] == EXIT_INVALID
    assert run(capsys, "nosuch")[0] == EXIT_INVALID


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "reluriesz", "lattice", "count", "--t", "1", "--d", "4"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout == "9\n"
