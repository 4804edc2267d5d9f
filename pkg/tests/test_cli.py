import io as _io
import json
import subprocess
import sys

import numpy as np
import pytest

from pfperiods import cli
from pfperiods.errors import InvariantError

CURVE = {"a": [4, 5, 6], "h1": -7, "h2": 6}
DETOUR = {"space": "h", "segments": [
    {"kind": "line", "from": [-7, 6], "to": [[-6.5, 0.5], 6]},
    {"kind": "line", "from": [[-6.5, 0.5], 6], "to": [-6, 6]}]}
LITERAL = {"space": "h", "segments": [{"kind": "line", "from": [-7, 6], "to": [-6, 6]}]}
DISC_LOOP = {"space": "h", "closed": True, "segments": [
    {"kind": "circle", "center": [-3 * 3 ** (2 / 3), 6], "radius": 0.3, "phase": np.pi}]}


def call(*argv, doc=None):
    argv = list(argv)
    if doc is not None:
        argv += ["--input", json.dumps(doc)]
    out = _io.StringIO()
    code = cli.run(argv, stdout=out)
    return code, out.getvalue()


def call_json(*argv, doc=None):
    code, text = call(*argv, doc=doc)
    return code, json.loads(text)


def test_periods_single_and_list():
    code, out = call_json("periods", doc={**CURVE, "cycle": {"kind": "branch_pair", "pair": [1, 2]}})
    assert code == 0 and len(out["J"]) == 5 and all(len(z) == 2 for z in out["J"])
    code, out = call_json("periods", doc={"curve": CURVE, "cycles": [
        {"kind": "branch_pair", "pair": [1, 2]}, {"kind": "big_loop", "radius": 30}]})
    assert code == 0 and len(out["periods"]) == 2
    J = out["periods"][1]["J"]
    assert abs(complex(*J[2]) - 2j * np.pi) < 1e-8 and abs(complex(*J[3]) - 15j * np.pi) < 1e-8


def test_gm_check_csv_and_json():
    code, text = call("gm-check", doc=CURVE)
    lines = text.strip().splitlines()
    assert code == 0 and lines[0] == "k,residual,delta" and len(lines) == 7
    assert max(float(l.split(",")[1]) for l in lines[1:]) <= 1e-5
    code, out = call_json("gm-check", "--output", "json", doc=CURVE)
    assert code == 0 and [r["k"] for r in out["rows"]] == [1, 2, 3, 4, 5, 6]


def test_pf_check():
    code, out = call_json("pf-check", doc=CURVE)
    assert code == 0
    assert out["route_equivalence_residual"] <= 1e-12
    assert max(out["fd_residuals"].values()) <= 1e-5
    assert out["curvature_residual"] <= 1e-4


def test_pf_transport_json_and_csv():
    code, out = call_json("pf-transport", doc={"curve": CURVE, "path": DETOUR})
    assert code == 0 and len(out["transports"]) == 3
    assert max(max(t["relative_error"]) for t in out["transports"]) <= 1e-7
    code, text = call("pf-transport", "--output", "csv", doc={"curve": CURVE, "path": DETOUR,
                                                             "oracle": False})
    rows = text.strip().splitlines()
    assert code == 0 and rows[0].startswith("cycle,t,J1_re,J1_im") and len(rows[1].split(",")) == 12


def test_pf_transport_singular_path_exit_3():
    code, out = call_json("pf-transport", doc={"curve": CURVE, "path": LITERAL})
    assert code == 3 and out["error"]["type"] == "ClearanceError"
    assert abs(out["error"]["param"] - (7 - 3 * 3 ** (2 / 3))) < 1e-9


def test_monodromy():
    code, out = call_json("monodromy", doc={"curve": CURVE, "path": DISC_LOOP})
    assert code == 0
    M = np.array([[complex(*z) for z in row] for row in out["M"]])
    assert np.linalg.norm(M - np.eye(5)) > 1e-3
    assert out["liouville_residual"] <= 1e-8 and out["residual_vs_oracle"] <= 1e-8
    assert len(out["basis"]) == 5
    code, out = call_json("monodromy", doc={"curve": CURVE, "path": DETOUR})
    assert code == 2


def test_actions():
    code, out = call_json("actions", doc=CURVE)
    assert code == 0 and len(out["actions"]) == 5
    assert out["residuals"]["route_agreement"] <= 1e-10


def test_legendre_and_exit_codes():
    code, out = call_json("legendre", "--k", "0.5")
    assert code == 0 and abs(out["K"][0] - 1.6857503548125961) < 1e-11
    assert call("legendre", "--k", "1")[0] == 3
    assert call("legendre", "--k", "0.999999999")[0] == 4
    assert call("legendre", "--k", "abc")[0] == 2


@pytest.mark.parametrize("argv,doc", [
    (("periods",), None),                                    # no input
    (("periods",), [1, 2]),                                  # not an object
    (("periods",), {"a": [4, 5], "h1": 0, "h2": 0}),
    (("periods", "--tol", "1"), CURVE),
    (("periods", "--tol", "1e-20"), CURVE),
    (("periods", "--output", "xml"), CURVE),
    (("frobnicate",), None),
    (("gm-check",), {**CURVE, "delta": -1}),
    (("periods",), {**CURVE, "cycle": {"kind": "branch_pair", "pair": [1, 9]}}),
])
def test_malformed_input_exit_2(argv, doc):
    code, text = call(*argv, doc=doc)
    assert code == 2 and json.loads(text)["error"]["code"] == 2


def test_degenerate_curve_exit_3():
    code, out = call_json("periods", doc={"a": [4, 4, 6], "h1": -7, "h2": 6})
    assert code == 3 and out["error"]["type"] == "DegenerateCurveError"


def test_verify_failure_exit_5(monkeypatch):
    def boom(seed):
        raise InvariantError("forced")
    monkeypatch.setattr(cli, "run_all", boom)
    assert call("verify")[0] == 5


def test_unexpected_exception_exit_5(monkeypatch):
    monkeypatch.setattr(cli, "period_vector", lambda *a: 1 / 0)
    code, out = call_json("periods", doc=CURVE)
    assert code == 5 and out["error"]["type"] == "ZeroDivisionError"


def test_verify_curve_input():
    code, out = call_json("verify", doc={"a": [1, 2.5, 3], "h1": -4, "h2": 1})
    assert code == 0 and out["all_pass"]


def test_verify_is_deterministic():
    a, b = call("verify", "--seed", "3"), call("verify", "--seed", "3")
    assert a[0] == 0 and a[1] == b[1]
    doc = json.loads(a[1])
    assert doc["all_pass"] and len(doc["criteria"]) == 10


def test_module_entry_point(tmp_path):
    f = tmp_path / "curve.json"
    f.write_text(json.dumps(CURVE))
    r = subprocess.run([sys.executable, "-m", "pfperiods", "periods", "--input", str(f)],
                       capture_output=True, text=True, timeout=120)
    assert r.returncode == 0 and len(json.loads(r.stdout)["J"]) == 5
    r = subprocess.run([sys.executable, "-m", "pfperiods", "periods", "--input", "-"],
                       input=json.dumps(CURVE), capture_output=True, text=True, timeout=120)
    assert r.returncode == 0
