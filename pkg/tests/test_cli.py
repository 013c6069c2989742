import io
import json

import pytest

from posmat import factorizations as fz
from posmat import matrixlab as ml
from posmat.cli import run
from posmat.matrix import from_json, identity, ingest_matrix


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


FAMILIES = {
    "pascal": ml.pascal_matrix,
    "beta": ml.beta_matrix,
    "cauchy": ml.cauchy_matrix,
    "stirling1": lambda n: ml.stirling_matrix(ml.FIRST, n),
    "stirling2": lambda n: ml.stirling_matrix(ml.SECOND, n),
    "sym-stirling1": lambda n: ml.symmetrized_stirling(ml.FIRST, n),
    "sym-stirling2": lambda n: ml.symmetrized_stirling(ml.SECOND, n),
    "bell": ml.bell_matrix,
    "bell-shifted": lambda n: ml.delete_rc(ml.bell_matrix(n), n, 1),
    "bell-triangle": ml.bell_triangle_matrix,
    "bell-triangle-shifted": ml.shifted_bell_triangle_matrix,
    "factorial-hankel": ml.factorial_hankel,
    "beta-inverse": fz.beta_inverse_closed,
    "identity": identity,
    "ones": ml.ones,
}


@pytest.mark.parametrize("fmt", ["json", "csv"])
@pytest.mark.parametrize("family", sorted(FAMILIES))
def test_gen_round_trip(tmp_path, family, fmt):
    for n in range(2, 11):
        code, out, _ = call("gen", "--family", family, "--n", str(n), "--format", fmt)
        assert code == 0
        path = tmp_path / f"{family}{n}.{fmt}"
        path.write_text(out)
        assert ingest_matrix(path) == FAMILIES[family](n)


def test_gen_real_family_round_trip(tmp_path):
    code, out, _ = call("gen", "--family", "gamma", "--lambdas", "0.5,1.5", "--mus", "1,2.25", "--format", "json")
    assert code == 0
    A = from_json(out)
    B = ml.gamma_matrix(["0.5", "1.5"], ["1", "2.25"], 128)
    assert all(x == y for r, s in zip(A.data, B.data) for x, y in zip(r, s))


def test_gen_beta_json():
    code, out, _ = call("gen", "--family", "beta", "--n", "3", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["schema"] == 1
    assert ml.beta_matrix(3) == from_json(out)
    assert d["data"][2] == ["3/1", "12/1", "30/1"]


def test_gen_sequence():
    code, out, _ = call("gen", "--sequence", "bell", "--n", "6")
    assert code == 0 and out.split() == ["1", "1", "2", "5", "15", "52", "203"]


def test_det_beta5():
    code, out, _ = call("det", "--family", "beta", "--n", "5")
    assert code == 0 and out.strip() == "120"


def test_det_json_schema():
    code, out, _ = call("det", "--family", "bell", "--n", "4", "--format", "json")
    assert json.loads(out) == {"schema": 1, "determinant": "12"}


def test_inv(tmp_path):
    code, out, _ = call("inv", "--family", "beta", "--n", "4", "--format", "json")
    assert code == 0 and from_json(out) == fz.beta_inverse_closed(4)


def test_inv_singular():
    code, _, _ = call("inv", "--family", "ones", "--n", "3")
    assert code == 1


def test_ldl_and_closed_agree():
    a = json.loads(call("ldl", "--family", "bell", "--n", "5", "--format", "json")[1])
    b = json.loads(call("ldl", "--family", "bell", "--n", "5", "--closed", "--format", "json")[1])
    assert a == b and a["d"] == ["1/1", "1/1", "2/1", "6/1", "24/1"]


def test_seb_closed_matches_algorithm():
    a = json.loads(call("seb", "--family", "beta", "--n", "5", "--format", "json")[1])
    b = json.loads(call("seb", "--family", "beta", "--n", "5", "--closed", "--format", "json")[1])
    assert a == b and set(a) == {"schema", "lower", "diag", "upper"}
    assert fz.SEBFactorization.from_dict(a) == fz.beta_seb_closed(5)


def test_seb_reports_negative_params_and_zero_pivots(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("1,2\n3,4\n")
    code, out, _ = call("seb", "--input", str(p), "--format", "json")
    assert code == 0 and json.loads(out)["diag"] == ["1/1", "-2/1"]
    p.write_text("1,0,0\n0,0,1\n0,1,0\n")
    code, out, _ = call("seb", "--input", str(p), "--format", "json")
    assert code == 1 and json.loads(out)["stage"] == 2


def test_check_tp_bell():
    code, out, _ = call("check", "tp", "--family", "bell", "--n", "5", "--mode", "all_minors")
    assert code == 0 and "verdict: pass" in out


def test_check_fail_exit_1_with_witness():
    code, out, _ = call("check", "tp", "--family", "identity", "--n", "2", "--format", "json")
    d = json.loads(out)
    assert code == 1 and d["verdict"] == "fail" and d["witness"]["rows"] == [1]


def test_check_hp_retry_resolves(tmp_path):
    p = tmp_path / "near.json"
    eps = "1180591620717411303425/1180591620717411303424"  # 1 + 2^-70
    p.write_text(json.dumps({"data": [["1", "1"], ["1", eps]]}))
    code, out, _ = call("check", "pd-hp", "--input", str(p), "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["verdict"] == "pass" and d["details"]["retried_at"] == 256


def test_check_gamma_tp_hp():
    code, _, _ = call("check", "tp-hp", "--family", "gamma", "--lambdas", "0.5,1.5,2.5", "--mus", "0.1,0.2,5")
    assert code == 0


def test_check_horn():
    assert call("check", "infdiv-horn", "--family", "bell", "--n", "4")[0] == 0


def test_check_tshift():
    assert call("check", "tshift", "--n", "5")[0] == 0


def test_infdiv_bell5_quarter():
    code, out, _ = call("infdiv", "--family", "bell", "--n", "5", "--grid", "1/4", "--format", "json")
    d = json.loads(out)
    assert code == 1 and d["witness"]["r"] == "1/4" and d["witness"]["value"].startswith("-1.6235")


def test_infdiv_pass():
    assert call("infdiv", "--family", "cauchy", "--n", "4")[0] == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["gen", "--family", "nope", "--n", "3"],
        ["gen", "--family", "beta"],
        ["gen", "--family", "beta", "--n", "0"],
        ["det", "--family", "beta", "--n", "3", "--precision", "16"],
        ["infdiv", "--family", "bell", "--n", "3", "--grid", "x"],
        ["infdiv", "--family", "bell", "--n", "3", "--grid", "-1"],
        ["gen", "--family", "gamma", "--lambdas", "2,1"],
        ["check", "infdiv-horn", "--family", "identity", "--n", "2"],
        ["ldl", "--family", "cauchy", "--n", "3", "--closed"],
        [],
    ],
)
def test_usage_errors_exit_2(argv):
    assert call(*argv)[0] == 2


def test_malformed_file_exit_2(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"data": [["1", "2//3"], ["1", "1"]]}))
    code, _, err = call("det", "--input", str(p))
    assert code == 2 and "row 1, column 2" in err
    assert call("det", "--input", str(tmp_path / "missing.json"))[0] == 2


def test_env_override(monkeypatch):
    monkeypatch.setenv("POSMAT_FORMAT", "json")
    code, out, _ = call("det", "--family", "beta", "--n", "3")
    assert json.loads(out)["determinant"] == "6"
    code, out, _ = call("det", "--family", "beta", "--n", "3", "--format", "pretty")
    assert out.strip() == "6"


def test_reproduce_subset_is_deterministic_across_jobs():
    a = json.loads(call("reproduce", "--format", "json")[1])
    b = json.loads(call("reproduce", "--format", "json", "--jobs", "4")[1])
    assert a["schema"] == 1 and a["overall"] == "pass"
    strip = lambda d: [(e["name"], e["verdict"], e.get("detail")) for e in d["entries"]]
    assert strip(a) == strip(b)
    names = [e["name"] for e in a["entries"]]
    assert names == sorted(names)
