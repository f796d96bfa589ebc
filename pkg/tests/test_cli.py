import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from kplab.cli import main
from kplab.output import read_header_config
from kplab.symbols import builtin_symbol


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    return header, [l.split(",") for l in lines[1:]]


def test_audit_exit_codes(capsys):
    assert run(capsys, "audit", "--model", "whitham")[0] == 0
    code, out, _ = run(capsys, "audit", "--model", "expr:k")
    assert code == 1 and "H1" in out
    code, _, err = run(capsys, "audit", "--model", "fkdv")
    assert code == 2 and "beta" in err
    assert run(capsys, "audit", "--model", "nope")[0] == 2


def test_collide_whitham(capsys):
    code, out, _ = run(capsys, "collide", "--model", "whitham", "--sigma", "1", "-k", "1", "--xi", "0")
    assert code == 0
    header, rows = csv_rows(out)
    assert header == ["p", "q", "xi", "ell_sq", "omega", "kappa_p", "kappa_q", "dangerous"]
    pairs = {(int(r[0]), int(r[1])): float(r[3]) for r in rows}
    assert_allclose(pairs[(-2, 1)], 0.237896, atol=1e-6)
    assert "verdict periodic x, finite/short y: predict-unstable" in out


def test_collide_kp(capsys):
    _, out, _ = run(capsys, "collide", "--model", "fkdv", "--beta", "2", "--sigma", "-1", "-k", "1", "--xi", "0")
    assert any(float(r[3]) == 4.0 for r in csv_rows(out)[1])
    _, out, _ = run(capsys, "collide", "--model", "fkdv:beta=2", "--sigma", "1", "-k", "1", "--xi", "0")
    assert csv_rows(out)[1] == []


def test_config_errors(capsys):
    assert run(capsys, "collide", "--model", "bo", "-k", "1")[0] == 2  # missing sigma
    assert run(capsys, "spectrum", "--model", "bo", "--sigma", "1", "-N", "4")[0] == 2
    assert run(capsys, "spectrum", "--model", "bo", "--sigma", "1", "--xi", "0.7")[0] == 2
    assert run(capsys, "spectrum", "--model", "expr:k", "--sigma", "1")[0] == 2
    assert run(capsys, "scan", "--model", "bo", "--sigma", "1", "--ell-grid", "0:1")[0] == 2
    with pytest.raises(SystemExit):
        main(["band", "--context", "bogus"])


def test_band_exit_codes(capsys):
    code, _, err = run(capsys, "band", "--model", "whitham", "--sigma", "1", "--context", "longwave")
    assert code == 3 and "imaginary" in err
    code, _, _ = run(capsys, "band", "--model", "bo", "--sigma", "1", "--context", "delta3")
    assert code == 3
    code, _, _ = run(capsys, "band", "--model", "ilw", "--sigma", "1", "--context", "bloch01")
    assert code == 2  # xi = 0 is not a Bloch context
    code, _, err = run(capsys, "band", "--model", "fkdv", "--beta", "2", "--sigma", "-1",
                       "-a", "0.05", "--context", "delta3")
    assert code == 4 and "no growth" in err


def test_band_bloch01_with_plot(capsys, tmp_path):
    svg = tmp_path / "bubble.svg"
    code, out, _ = run(capsys, "band", "--model", "ilw", "--sigma", "1", "-k", "1", "-a", "0.05",
                       "--xi", "0.25", "--context", "bloch01", "--plot", str(svg))
    assert code == 0
    report = json.loads(out)
    assert 0.9 < report["agreement_ratio"] < 1.1
    text = svg.read_text()
    assert text.startswith("<svg") and 'width="800"' in text
    header, rows = csv_rows(svg.with_suffix(".csv").read_text())
    assert header == ["ell", "re_lambda1", "im_lambda1", "re_lambda2", "im_lambda2"]
    assert max(abs(float(r[1])) for r in rows) > 1e-3


def test_spectrum_zero_amplitude_matches_omega(capsys):
    code, out, _ = run(capsys, "spectrum", "--model", "bo", "--sigma", "1", "-a", "0", "--ell", "0.5",
                       "--xi", "0.25", "-N", "8")
    assert code == 0
    ev = np.array(json.loads(out)["eigenvalues"])
    sym = builtin_symbol("bo")
    q = np.arange(-8, 9) + 0.25
    w = np.sort(q * (sym(1.0) - sym(q)) - 0.25 / q)
    assert_allclose(ev[:, 1], w, atol=1e-12)
    assert len(ev) == 17


def test_spectrum_periodic_dimension(capsys):
    _, out, _ = run(capsys, "spectrum", "--model", "bo", "--sigma", "1", "-N", "8", "--format", "csv")
    header, rows = csv_rows(out)
    assert header == ["re_lambda", "im_lambda"] and len(rows) == 16


def test_spectrum_json_csv_agree(capsys):
    args = ["spectrum", "--model", "ilw", "--sigma", "1", "-a", "0.05", "--ell", "0.18",
            "--xi", "0.25", "-N", "12"]
    _, js, _ = run(capsys, *args)
    _, cs, _ = run(capsys, *args, "--format", "csv")
    ev_json = json.loads(js)["eigenvalues"]
    ev_csv = [[float(x) for x in r] for r in csv_rows(cs)[1]]
    assert ev_json == ev_csv
    keys = [(im, re) for re, im in ev_json]
    assert keys == sorted(keys)


def test_scan_output_and_determinism(capsys, tmp_path, monkeypatch):
    args = ["scan", "--model", "ilw", "--sigma", "1", "-a", "0.05", "-N", "12",
            "--ell-grid", "0.1,0.18,0.3", "--xi-grid", "0,0.25"]
    monkeypatch.setenv("KPLAB_THREADS", "4")
    _, first, _ = run(capsys, *args)
    monkeypatch.setenv("KPLAB_THREADS", "1")
    _, second, _ = run(capsys, *args)
    assert first == second
    header, rows = csv_rows(first)
    assert header == ["ell", "xi", "max_real_part"]
    assert [(float(r[0]), float(r[1])) for r in rows] == [
        (e, x) for x in (0.0, 0.25) for e in (0.1, 0.18, 0.3)]
    assert float(rows[4][2]) > 0  # inside the ILW bubble


@pytest.mark.parametrize("argv,name", [
    (["scan", "--model", "bo", "--sigma", "1", "-N", "10", "--ell-grid", "0:1:3"], "out.csv"),
    (["wave", "--model", "whitham", "-a", "0.04", "--newton"], "out.json"),
    (["collide", "--model", "ilw", "--sigma", "1", "--xi", "0.25"], "out.csv"),
])
def test_config_round_trip(capsys, tmp_path, argv, name):
    path = tmp_path / name
    assert main(argv + ["-o", str(path)]) == 0
    first = path.read_text()
    cfg = read_header_config(first)
    assert cfg["command"] == argv[0]
    again = tmp_path / ("again_" + name)
    assert main([argv[0], "--config", str(path), "-o", str(again)]) == 0
    assert again.read_text() == first


def test_flags_override_config(capsys, tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"model": "bo", "a": 0.02}))
    _, out, _ = run(capsys, "wave", "--config", str(path), "-a", "0.03")
    data = json.loads(out)
    assert data["a"] == 0.03 and data["symbol"] == "bo"
    path.write_text(json.dumps({"model": "bo", "bogus": 1}))
    assert run(capsys, "wave", "--config", str(path))[0] == 2
    assert run(capsys, "wave", "--config", str(tmp_path / "missing.json"))[0] == 2
