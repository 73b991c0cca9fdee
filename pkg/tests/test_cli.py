from __future__ import annotations

import json
import subprocess
import sys

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from g2spectral import cli, threeform

EXAMPLE_CURVE = {"g_base": 2, "f": ["3"], "q": ["0", "1"]}
UNIT_TANGENT = {"f_dot": ["0"], "q_dot": ["1"]}


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return str(p)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def scalar(s):
    return s[0] if s[1:] == ["0/1", "0/1", "0/1"] else s


# --------------------------------------------------------------------------
# invariants / stabilizer / charpoly


def test_invariants_rho0(tmp_path, capsys):
    path = write(tmp_path, "rho.json", threeform.rho0().to_json())
    code, rep = run_json(capsys, "invariants", "--input", path)
    assert code == 0
    assert rep["command"] == "invariants"
    assert rep["results"]["stabilizer_dim"] == 14
    assert scalar(rep["results"]["kappa"]) == "1/512"
    assert rep["inputs_digest"].startswith("sha256:")


def test_invariants_norm2(tmp_path, capsys):
    path = write(tmp_path, "n2.json", threeform.omega_norm2().to_json())
    code, rep = run_json(capsys, "invariants", "--input", path)
    assert code == 0
    res = rep["results"]
    assert scalar(res["lambda"]) == "0/1"
    assert res["kernel_dim"] == 3
    assert res["stabilizer_dim_with_symp"] == 8
    assert res["eigenspaces"] is None


def test_invariants_empty_form(tmp_path, capsys):
    path = write(tmp_path, "empty.json", {"dim": 7, "degree": 3, "terms": []})
    code, rep = run_json(capsys, "invariants", "--input", path)
    assert code == 0
    res = rep["results"]
    assert scalar(res["kappa"]) == "0/1"
    assert res["metric"] is None
    assert all(scalar(x) == "0/1" for row in res["c"] for x in row)


def test_invariants_wrapped_form_with_volume(tmp_path, capsys):
    data = {"form": threeform.rho0().to_json(), "vol_ref": threeform.vol7_ref().to_json()}
    code, rep = run_json(capsys, "invariants", "--input", write(tmp_path, "w.json", data))
    assert code == 0 and scalar(rep["results"]["kappa"]) == "1/512"


def test_invariants_wrong_degree(tmp_path, capsys):
    code, rep = run_json(capsys, "invariants", "--input", write(tmp_path, "x.json", {"dim": 7, "degree": 2, "terms": []}))
    assert code == 2
    assert rep["error"]["code"] == "input"


def test_stabilizer_pair(tmp_path, capsys):
    data = {"forms": [threeform.symplectic_omega().to_json(), threeform.omega_norm2().to_json()]}
    code, rep = run_json(capsys, "stabilizer", "--input", write(tmp_path, "s.json", data))
    assert code == 0 and rep["results"]["stabilizer_dim"] == 8


def test_charpoly_g2_shape(tmp_path, capsys):
    diag = [[0] * 7 for _ in range(7)]
    for k, v in enumerate([1, 1, -2, -1, -1, 2, 0]):
        diag[k][k] = str(v)
    code, rep = run_json(capsys, "charpoly", "--input", write(tmp_path, "m.json", {"matrix": diag}))
    assert code == 0
    assert scalar(rep["results"]["g2"]["f"]) == "6/1"
    assert scalar(rep["results"]["g2"]["q"]) == "4/1"


def test_charpoly_not_g2_is_check_failure(tmp_path, capsys):
    ident = [[str(int(i == j)) for j in range(7)] for i in range(7)]
    code, rep = run_json(capsys, "charpoly", "--input", write(tmp_path, "m.json", {"matrix": ident}))
    assert code == 1
    assert rep["checks"][0]["status"] == "fail" and "witness" in rep["checks"][0]


# --------------------------------------------------------------------------
# curve / cubic


def test_curve_example(tmp_path, capsys):
    code, rep = run_json(capsys, "curve", "--input", write(tmp_path, "c.json", EXAMPLE_CURVE))
    assert code == 0
    res = rep["results"]
    assert res["numerology"]["g_S_G2"] == 37
    assert [scalar(c) for c in res["discriminant"]] == ["0/1", "27/2", "-27/1"]
    assert all(c["status"] == "pass" for c in rep["checks"])


def test_curve_dual_of_constant(tmp_path, capsys):
    code, rep = run_json(capsys, "curve", "--input", write(tmp_path, "c.json", {"g_base": 2, "f": ["3"], "q": ["0"]}))
    assert [scalar(c) for c in rep["results"]["dual"]["q"]] == ["1/2"]


def test_curve_collision_is_rejected_with_witness(tmp_path, capsys):
    # q = f^3/108 makes q and q_dual coincide
    f = ["1", "1"]
    q = ["1/108", "3/108", "3/108", "1/108"]
    code, rep = run_json(capsys, "curve", "--input", write(tmp_path, "c.json", {"g_base": 2, "f": f, "q": q}))
    assert code == 1
    smooth = [c for c in rep["checks"] if c["name"] == "smooth"][0]
    assert smooth["status"] == "fail"
    assert smooth["witness"]["gcd"]


def test_cubic_example(tmp_path, capsys):
    data = {"curve": EXAMPLE_CURVE, "tangents": [UNIT_TANGENT] * 3}
    code, rep = run_json(capsys, "cubic", "--input", write(tmp_path, "t.json", data))
    assert code == 0
    assert scalar(rep["results"]["value"]) == "0/1"
    assert rep["results"]["invariant"] is True
    assert rep["results"]["certificates"] == {"bvw": True, "cos6": True}


def test_cubic_zero_tangent(tmp_path, capsys):
    zero = {"f_dot": [], "q_dot": []}
    data = {"curve": EXAMPLE_CURVE, "tangents": [zero, UNIT_TANGENT, UNIT_TANGENT]}
    code, rep = run_json(capsys, "cubic", "--input", write(tmp_path, "t.json", data))
    assert code == 0 and scalar(rep["results"]["value"]) == "0/1"


def test_cubic_random_suite_reproducible(capsys):
    _, a = run(capsys, "cubic", "--seed", "7", "--count", "3")
    _, b = run(capsys, "cubic", "--seed", "7", "--count", "3")
    _, c = run(capsys, "cubic", "--seed", "8", "--count", "3")
    assert a == b
    assert a != c
    assert json.loads(a)["results"]["mode"] == "random"


# --------------------------------------------------------------------------
# check


def test_check_zero_cases(capsys):
    code, rep = run_json(capsys, "check", "all", "--count", "0")
    assert code == 0
    vacuous = [c for c in rep["checks"] if c["cases"] == 0]
    assert vacuous and all(c.get("note") == "0 cases" for c in vacuous)


def test_check_curves(capsys):
    code, rep = run_json(capsys, "check", "curves", "--count", "3")
    assert code == 0
    names = {c["name"]: c["status"] for c in rep["checks"]}
    assert names["curves.numerology"] == "pass"


def test_check_text_output(capsys):
    code, out = run(capsys, "check", "curves", "--count", "1", "--output", "text")
    assert code == 0
    assert "[PASS] curves.numerology" in out


# --------------------------------------------------------------------------
# determinism and error handling


def test_byte_identical_reports(tmp_path, capsys):
    path = write(tmp_path, "c.json", EXAMPLE_CURVE)
    _, first = run(capsys, "curve", "--input", path)
    _, second = run(capsys, "curve", "--input", path)
    assert first == second


def test_digest_ignores_key_order_and_whitespace(tmp_path, capsys):
    a = write(tmp_path, "a.json", '{"g_base": 2, "f": ["3"], "q": ["0", "1"]}')
    b = write(tmp_path, "b.json", '{\n  "q": ["0","1"],\n  "f": ["3"],\n  "g_base": 2\n}')
    _, ra = run_json(capsys, "curve", "--input", a)
    _, rb = run_json(capsys, "curve", "--input", b)
    assert ra["inputs_digest"] == rb["inputs_digest"]


def test_digest_depends_on_seed(capsys):
    _, a = run_json(capsys, "check", "curves", "--count", "0", "--seed", "1")
    _, b = run_json(capsys, "check", "curves", "--count", "0", "--seed", "2")
    assert a["inputs_digest"] != b["inputs_digest"]


def test_parse_error_reports_line(tmp_path, capsys):
    path = write(tmp_path, "bad.json", '{\n  "g_base": 2,\n  "f": [3\n}')
    code, rep = run_json(capsys, "curve", "--input", path)
    assert code == 2
    assert rep["error"]["code"] == "input"
    assert rep["error"]["line"] == 4


def test_field_error_reports_path(tmp_path, capsys):
    data = {"curve": EXAMPLE_CURVE, "tangents": [UNIT_TANGENT, UNIT_TANGENT, {"f_dot": []}]}
    code, rep = run_json(capsys, "cubic", "--input", write(tmp_path, "t.json", data))
    assert code == 2
    assert rep["error"]["path"] == "tangents[2]"


def test_precondition_error_code(tmp_path, capsys):
    data = {"curve": {"g_base": 2, "f": ["3"], "q": ["0", "0", "1"]}, "tangents": [UNIT_TANGENT] * 3}
    code, rep = run_json(capsys, "cubic", "--input", write(tmp_path, "t.json", data))
    assert code == 2
    assert rep["error"]["code"] == "precondition"
    assert rep["error"]["witness"]


def test_usage_errors_are_structured(capsys):
    for argv in ([], ["nope"], ["check", "--seed", "-1"], ["check", "--count", "x"], ["check", "bogus"]):
        code, rep = run_json(capsys, *argv)
        assert code == 2
        assert rep["error"]["code"] == "input"


def test_missing_file(capsys):
    code, rep = run_json(capsys, "curve", "--input", "/nonexistent/file.json")
    assert code == 2 and rep["error"]["code"] == "input"


json_values = st.recursive(
    st.none() | st.booleans() | st.integers(-10, 10) | st.text(max_size=6) | st.sampled_from(["1/0", "1/2", "x"]),
    lambda inner: st.lists(inner, max_size=4) | st.dictionaries(
        st.sampled_from(["dim", "degree", "terms", "idx", "c", "g_base", "f", "q", "matrix", "forms",
                         "form", "curve", "tangents", "f_dot", "q_dot", "vol_ref", "symp"]),
        inner, max_size=5),
    max_leaves=12,
)


@settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.sampled_from(["invariants", "stabilizer", "charpoly", "curve", "cubic"]), json_values)
def test_fuzzed_inputs_never_crash(tmp_path, capsys, command, data):
    path = write(tmp_path, "fuzz.json", json.dumps(data))
    code, out = run(capsys, command, "--input", path)
    rep = json.loads(out)
    assert code in (0, 1, 2)
    if code == 2:
        assert set(rep["error"]) >= {"code", "message"}
        assert rep["error"]["code"] != "internal"
    else:
        assert rep["command"] == command


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.binary(max_size=40))
def test_fuzzed_bytes_never_crash(tmp_path, capsys, blob):
    p = tmp_path / "blob.json"
    p.write_bytes(blob)
    code, out = run(capsys, "curve", "--input", str(p))
    rep = json.loads(out)
    assert code in (0, 1, 2)
    if code == 2:
        assert rep["error"]["code"] != "internal"


def test_module_entry_point_subprocess(tmp_path):
    path = write(tmp_path, "c.json", EXAMPLE_CURVE)
    cmd = [sys.executable, "-m", "g2spectral", "curve", "--input", path]
    first = subprocess.run(cmd, capture_output=True, check=False)
    second = subprocess.run(cmd, capture_output=True, check=False)
    assert first.returncode == 0
    assert first.stdout == second.stdout
    assert json.loads(first.stdout)["results"]["numerology"]["g_W"] == 85


@pytest.mark.parametrize("fmt", ["json", "text"])
def test_output_formats(tmp_path, capsys, fmt):
    path = write(tmp_path, "c.json", EXAMPLE_CURVE)
    code, out = run(capsys, "curve", "--input", path, "--output", fmt)
    assert code == 0
    if fmt == "text":
        assert out.startswith("command: curve")
        assert "27/2*z - 27*z^2" in out
    else:
        json.loads(out)
