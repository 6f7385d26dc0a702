import csv
import io
import json
import subprocess
import sys
from math import sqrt

import numpy as np
import pytest

from entvec import cli
from entvec.errors import InvariantViolation, ParseError
from entvec.states import cj_depolarizing, ghz
from entvec.tensor import DensityMatrix


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_state_family_documents():
    rho = cli.parse_state('{"family":"rho1","params":{"pABC":1.0,"pA":0,"pB":0,"pC":0}}')
    np.testing.assert_allclose(rho.entries, ghz(3).density().entries, atol=1e-15)
    cj = cli.parse_state('{"family":"cj_global","params":{"q":0.5}}')
    np.testing.assert_allclose(cj.entries, cj_depolarizing(q=0.5).entries)


def test_state_file_roundtrip(tmp_path, rng):
    from entvec.oracle import random_density_matrix
    rho = random_density_matrix((2, 3), rng)
    path = tmp_path / "state.json"
    path.write_text(json.dumps(cli.state_to_json(rho)))
    back = cli.parse_state(str(path))
    assert back.dims == (2, 3)
    np.testing.assert_array_equal(back.entries, rho.entries)


def test_state_file_bad_trace(tmp_path, capsys):
    doc = cli.state_to_json(DensityMatrix((2,), np.eye(2) / 2))
    doc["matrix"][0][0] = [1.0, 0.0]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(InvariantViolation, match="trace"):
        cli.parse_state(str(path))
    code, _, err = run(["witness", "--state", str(path), "--R", "A"], capsys)
    assert code == 3 and "trace" in err


def test_parse_state_malformed():
    for text in ("{not json", '{"dims": [2]}', '[1, 2]', '{"dims":[2],"matrix":[[1,0],[0,1]]}'):
        with pytest.raises(ParseError):
            cli.parse_state(text)


def test_parse_params_and_grid():
    assert cli.parse_params("pA=0.1, pB=0.2") == {"pA": 0.1, "pB": 0.2}
    assert cli.parse_params(None) == {}
    with pytest.raises(ParseError):
        cli.parse_params("pA")
    with pytest.raises(ParseError):
        cli.parse_params("pA=x")
    sweeps = cli.parse_grid("p=0:1:200,q=0:1:200")
    assert [s.name for s in sweeps] == ["p", "q"]
    assert sweeps[0].values()[-1] == 1.0 and len(sweeps[1].values()) == 200
    for bad in ("p=0:1", "p=0:1:0", "p=a:1:3", "p=0:1:2,q=0:1:2,r=0:1:2", ""):
        with pytest.raises(ParseError):
            cli.parse_grid(bad)


def test_rho1_fourth_weight_derived():
    rho = cli.build_family("rho1", {"pA": 0.1, "pB": 0.2, "pC": 0.3})
    from entvec.states import Rho1Params, rho1
    np.testing.assert_allclose(rho.entries, rho1(Rho1Params(0.1, 0.2, 0.3, 0.4)).entries)
    with pytest.raises(ParseError):
        cli.build_family("rho1", {"pA": 0.5})


def test_classify_ghz5_ksep(capsys):
    code, out, _ = run(["classify", "--family", "ghz", "--params", "n=5", "--question", "ksep"], capsys)
    assert code == 0
    assert "not 2-separable (GME), W=1.0" in out


def test_classify_dimension_ghz33(capsys):
    code, out, _ = run(["classify", "--family", "ghz", "--params", "n=3,d=3", "--question", "dimension"], capsys)
    assert code == 0 and "(3,3,3)" in out


def test_classify_decompose_white_noise(capsys):
    code, out, _ = run(["classify", "--family", "rho2", "--params", "N=3,p=1,q=0",
                        "--question", "decompose", "--R", "A|BC,B|AC"], capsys)
    assert code == 0 and "no certificate" in out


def test_classify_normal_form_json(capsys):
    code, out, _ = run(["classify", "--family", "psi_eps", "--params", "eps=0.05", "--normal-form",
                        "--question", "dimension", "--json"], capsys)
    assert code == 0
    reports = json.loads(out)
    assert reports[0]["question"] == "normalform" and reports[0]["converged"]
    assert reports[1]["families"][0]["dimensions"] == [3, 3, 3]


def test_witness_command(capsys):
    code, out, _ = run(["witness", "--family", "rho1", "--params", "pA=0,pB=0,pC=0",
                        "--R", "A,B", "--C", "000-111,000-110,001-111", "--j", "2", "--json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["value"] == pytest.approx(1 / sqrt(3))
    assert doc["C"] == "000-111,000-110,001-111"


def test_cj_through_cli(capsys):
    # R = {A, B} in the party order A, A', B, B' is letters A and C
    code, out, _ = run(["witness", "--family", "cj_global", "--params", "q=1", "--R", "A,C",
                        "--C", "0000-1111", "--json"], capsys)
    assert code == 0 and json.loads(out)["value"] == pytest.approx(0.5)


@pytest.mark.parametrize("argv, code", [
    (["witness", "--family", "nope", "--R", "A"], 2),
    (["witness", "--family", "ghz", "--R", "A|Q"], 2),
    (["witness", "--family", "rho1", "--params", "pA=0.9,pB=0.9,pC=0"], None),
    (["witness", "--family", "rho1", "--params", "pA=0.9,pB=0.9,pC=0", "--R", "A"], 3),
    (["normal-form", "--family", "rho2", "--params", "N=3,alpha=1,p=0,q=0"], 4),
    (["witness", "--state", '{"dims":[2,2],"matrix":[[[1,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]],'
                            '[[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]]]}', "--R", "A"], 5),
    (["scan", "--family", "rho2", "--params", "q=0", "--grid", "p=0:1:2", "--question", "ksep", "--out", "/nonexistent/x.csv"], 6),
])
def test_exit_codes(argv, code, capsys):
    if code is None:
        with pytest.raises(SystemExit) as exc:
            cli.main(argv)
        assert exc.value.code == 2  # argparse usage error
        return
    got, _, err = run(argv, capsys)
    assert got == code
    assert err.startswith("error:")


def _scan(argv, capsys):
    code, out, _ = run(["scan"] + argv, capsys)
    assert code == 0
    return out


def test_scan_csv_shape_and_determinism(capsys):
    argv = ["--family", "rho2", "--params", "N=5", "--grid", "p=0:1:6,q=0:1:5",
            "--question", "ksep", "--question", "depth"]
    first = _scan(argv, capsys)
    assert _scan(argv, capsys) == first
    rows = list(csv.reader(io.StringIO(first)))
    header, body = rows[0], rows[1:]
    assert header[:2] == ["p", "q"] and "ksep_at_most_k" in header and "depth" in header
    assert len(body) == 30
    # row-major: q varies fastest
    assert [r[1] for r in body[:5]] == [cli._fmt(x) for x in np.linspace(0, 1, 5)]
    # q > p is outside the domain: NaN witnesses
    nan_row = next(r for r in body if float(r[1]) > float(r[0]))
    assert nan_row[2] == "nan"


def test_scan_verdicts_follow_witness_columns(capsys):
    out = _scan(["--family", "rho2", "--params", "N=4", "--grid", "p=0:1:8,q=0:1:8",
                 "--question", "ksep"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    for r in rows:
        ws = {k: float(r[f"W_ksep_k{k}"]) for k in range(1, 4)}
        if any(np.isnan(v) for v in ws.values()):
            continue
        positive = [k for k, v in ws.items() if v > 1e-12]
        assert int(r["ksep_at_most_k"]) == (min(positive) if positive else 0)


def test_scan_single_point(capsys):
    out = _scan(["--family", "rho2", "--params", "N=3,q=0", "--grid", "p=0.2:0.2:1", "--question", "depth"], capsys)
    assert len(out.strip().splitlines()) == 2


def test_scan_parallel_matches_serial(tmp_path, capsys):
    base = ["--family", "rho1", "--params", "pABC=0.25", "--grid", "pA=0:0.75:4,pB=0:0.75:4",
            "--question", "decompose", "--R", "A,B"]
    serial = _scan(base, capsys)
    path = tmp_path / "par.csv"
    _scan(base + ["--jobs", "2", "--out", str(path)], capsys)
    assert path.read_text() == serial


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "entvec", "classify", "--family", "ghz", "--params", "n=3",
                           "--question", "depth"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "3-partite entangled" in proc.stdout
