import json

import pytest

from jacobi_jost import cli
from jacobi_jost.coeffs import powerlaw, model_from_config
from jacobi_jost.recurrence import forward_polynomials
from jacobi_jost.scalednum import working_precision


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_z():
    assert cli.parse_z("1+2i") == complex(1, 2)
    assert cli.parse_z("-i") == -1j
    assert cli.parse_z("0.5") == 0.5
    with pytest.raises(ValueError):
        cli.parse_z("1+x")


@pytest.mark.parametrize(
    "tokens,label",
    [
        (["powerlaw", "sigma=2", "tau=4"], "critical singular supercritical"),
        (["powerlaw", "σ=2", "τ=-4"], "critical singular subcritical"),
        (["powerlaw", "sigma=1", "gamma=2", "beta=0"], "non-critical"),
        (["hermite"], "non-critical regular"),
    ],
)
def test_classify(capsys, tokens, label):
    code, out, err = run(capsys, "classify", *tokens)
    assert code == 0
    assert label in err
    assert json.loads(out)["classification"]["label"] in err


def test_classify_errors(capsys, tmp_path):
    assert run(capsys, "classify", "powerlaw", "sigma=two")[0] == 2
    assert run(capsys, "classify", "nosuchfamily")[0] == 2
    cfg = tmp_path / "t.json"
    cfg.write_text(json.dumps({"variant": "table", "rows": [[1, 0], [2, 0], [3, 0]]}))
    code, _, err = run(capsys, "classify", str(cfg))
    assert code == 3 and "family metadata" in err


def test_bad_z_exit_code(capsys):
    assert run(capsys, "poly", "powerlaw", "sigma=2", "--z", "1+x")[0] == 2
    assert run(capsys, "poly", "powerlaw", "sigma=2", "--n-max", "-3")[0] == 2


def test_poly_csv_matches_recurrence(capsys):
    code, out, _ = run(capsys, "poly", "powerlaw", "sigma=2", "tau=-4", "--z", "1", "--n-max", "30", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,re,im,abs,log10_abs"
    with working_precision(256):
        ps = forward_polynomials(powerlaw(2, tau=-4), 1, 30)
        for line in lines[1:]:
            n, re, im = line.split(",")[:3]
            assert abs(float(re) - float(ps[int(n)].real)) <= 1e-15 * max(1, abs(float(re)))
            assert float(im) == 0


def test_eigs_agreement_and_replay(capsys, tmp_path):
    out = tmp_path / "eigs.json"
    argv = ["eigs", "powerlaw", "sigma=2", "tau=4", "--interval", "-5", "12", "--out", str(out)]
    code, stdout, _ = run(capsys, *argv)
    assert code == 0 and stdout.strip()
    rep = json.loads(out.read_text())
    assert rep["agreement"]["max_abs_delta"] <= 1e-8
    assert [round(p["jost"], 9) for p in rep["agreement"]["pairs"]] == [1.570089268, 4.289154163, 10.540662296]
    man = tmp_path / "eigs.json.manifest.json"
    assert json.loads(man.read_text())["outputs"][0]["path"] == "eigs.json"
    before = out.read_bytes()
    code, stdout, _ = run(capsys, "replay", str(man))
    assert code == 0 and "byte for byte" in stdout
    assert out.read_bytes() == before


def test_replay_detects_tampering(capsys, tmp_path):
    out = tmp_path / "c.json"
    assert run(capsys, "classify", "powerlaw", "sigma=3", "tau=1", "--out", str(out))[0] == 0
    man = tmp_path / "c.json.manifest.json"
    data = json.loads(man.read_text())
    data["outputs"][0]["sha256"] = "0" * 64
    man.write_text(json.dumps(data))
    assert run(capsys, "replay", str(man))[0] == 6
    assert run(capsys, "replay", str(tmp_path / "missing.json"))[0] == 2


def test_asym_conjugate_symmetry(capsys):
    code, out, _ = run(capsys, "asym", "powerlaw", "sigma=2", "tau=-4", "--z", "1")
    assert code == 0
    rep = json.loads(out)
    assert rep["conj_symmetry_residual"] <= 1e-15
    assert rep["tail_mode"] in ("asymptotic", "unit")


def test_weights(capsys):
    code, out, _ = run(capsys, "weights", "powerlaw", "sigma=2", "tau=4", "--interval", "-5", "12")
    assert code == 0
    rep = json.loads(out)
    assert rep["count"] == 3
    assert 0.99 < rep["partial_sum"] <= 1


def test_dediag_command(capsys):
    code, out, _ = run(capsys, "dediag", "hermite", "--check", "identity", "--z", "2.3", "--n-max", "20", "--sign", "-")
    assert code == 0
    assert json.loads(out)["identity"]["-"]["max_residual"] <= 1e-60
    code, out, _ = run(capsys, "dediag", "hermite", "--check", "interleave", "--n-max", "8")
    assert code == 0 and json.loads(out)["interlaced"]


def test_config_roundtrip(tmp_path, capsys):
    cfg = tmp_path / "m.json"
    cfg.write_text(json.dumps({"variant": "powerlaw", "sigma": 2, "alpha": 0, "beta": 1, "gamma": 1}))
    assert model_from_config(json.loads(cfg.read_text())).arrays(5) == powerlaw(2, tau=4).arrays(5)
    code, out, _ = run(capsys, "classify", str(cfg))
    assert code == 0 and json.loads(out)["classification"]["cell"] == "CriticalSingularSuper"
