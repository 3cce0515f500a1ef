import io
import json
from importlib import resources

import jsonschema

from negafib.cli import run


def invoke(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def load_schema(name):
    path = resources.files("negafib").joinpath("schemas", name)
    return json.loads(path.read_text(encoding="utf-8"))


def validate(payload, schema_name):
    jsonschema.validate(payload, load_schema(schema_name))


def test_kfib_text_output():
    code, out, _ = invoke(["kfib", "4", "-12"])
    assert code == 0 and out == "-8\n"


def test_kfib_rejects_low_order():
    code, _out, err = invoke(["kfib", "1", "5"])
    assert code == 3 and "k" in err


def test_unknown_subcommand():
    code, _out, _err = invoke(["no-such-command"])
    assert code == 3


def test_window_csv():
    code, out, _ = invoke(["window", "4", "-5", "-1", "--format", "csv"])
    assert code == 0
    assert out.splitlines() == ["n,value", "-5,0", "-4,-1", "-3,1", "-2,0", "-1,0"]


def test_scan_json_schema_and_reference_note():
    code, out, _ = invoke(["scan", "4", "-104", "0", "--repeats-only",
                           "--format", "json"])
    assert code == 0
    payload = json.loads(out)
    validate(payload, "scan_result.schema.json")
    assert payload["classes"]["0"] == [-10, -6, -5, -2, -1, 0]
    assert "one-index shift" in payload["reference_note"]
    assert "mismatches [5, 6]" in payload["reference_note"]


def test_solve_pm_json_schema():
    code, out, _ = invoke(["solve-pm", "4", "4", "1..30", "-225..-1",
                           "--format", "json"])
    assert code == 0
    payload = json.loads(out)
    validate(payload, "match_result.schema.json")
    assert payload["value_classes"] == [1, 2, 4, 8, 56]


def test_bad_range_argument():
    code, _out, err = invoke(["solve-pm", "4", "4", "1:30", "-5..-1"])
    assert code == 3 and "range" in err


def test_roots_json_schema(tmp_path):
    code, out, _ = invoke(["roots", "4", "--format", "json"])
    assert code == 0
    payload = json.loads(out)
    validate(payload, "root_profile.schema.json")
    assert payload["separation_certified"] is True


def test_roots_cache_transparency(tmp_path):
    cold = invoke(["roots", "5", "--cache-dir", str(tmp_path), "--format", "json"])
    assert (tmp_path / "roots_k5_p384.json").exists()
    warm = invoke(["roots", "5", "--cache-dir", str(tmp_path), "--format", "json"])
    plain = invoke(["roots", "5", "--format", "json"])
    assert cold == warm == plain


def test_determinism():
    a = invoke(["constants", "4", "--format", "json"])
    b = invoke(["constants", "4", "--format", "json"])
    assert a == b


def test_height_subcommand(tmp_path):
    poly = tmp_path / "poly.json"
    poly.write_text(json.dumps({"coeffs": [-3, 2]}))
    code, out, _ = invoke(["height", str(poly), "--format", "json"])
    assert code == 0
    assert json.loads(out)["height"]["mid"].startswith("1.0986")
    code, _out, err = invoke(["height", str(tmp_path / "missing.json")])
    assert code == 3
    poly.write_text(json.dumps({"coeffs": "nope"}))
    assert invoke(["height", str(poly)])[0] == 3


def test_matveev_subcommand(tmp_path):
    inst = tmp_path / "inst.json"
    inst.write_text(json.dumps({"t": 1, "D": 1, "B": 1, "A": ["0.16"]}))
    code, out, _ = invoke(["matveev", str(inst), "--format", "json"])
    assert code == 0
    assert json.loads(out)["exponent"]["mid"].startswith("181440")
    inst.write_text(json.dumps({"t": 1, "D": 1, "B": 1, "A": ["0.01"]}))
    assert invoke(["matveev", str(inst)])[0] == 3


def test_reduce_subcommand(tmp_path):
    inst = tmp_path / "bd.json"
    inst.write_text(json.dumps({
        "kappa": "0.5", "mu": "0.25", "A": "5", "B": "1.5", "M": 10,
        "exact": True,
    }))
    code, out, _ = invoke(["reduce", str(inst), "--format", "json"])
    assert code == 0
    payload = json.loads(out)
    validate(payload, "reduction_trace.schema.json")
    assert payload["trace"][0]["q"] == 2
    assert payload["trace"][0]["status"] == "reduced"


def test_reduce_precision_exhaustion(tmp_path):
    # three decimals of kappa cannot certify a convergent past M = 10^20
    inst = tmp_path / "bd.json"
    inst.write_text(json.dumps({
        "kappa": "0.389", "mu": "-2.03", "A": "9.14", "B": "1.056",
        "M": 10**20,
    }))
    code, _out, err = invoke(["reduce", str(inst)])
    assert code == 2 and "precision" in err.lower()


def test_pipeline_json_schema():
    code, out, _ = invoke(["pipeline-k4", "--format", "json"])
    assert code == 0
    payload = json.loads(out)
    validate(payload, "pipeline_report.schema.json")
    assert payload["certified"] is True
    assert payload["solution_value_classes"] == [1, 2, 4, 8, 56]


def test_precision_flag_beats_environment(monkeypatch):
    monkeypatch.setenv("NEGAFIB_PRECISION_BITS", "64")
    _code, out_env, _ = invoke(["constants", "4", "--format", "json"])
    _code, out_flag, _ = invoke(["constants", "4", "--precision-bits", "384",
                                 "--format", "json"])
    env_exp = json.loads(out_env)["c1"]["radius_exp"]
    flag_exp = json.loads(out_flag)["c1"]["radius_exp"]
    assert env_exp > flag_exp  # wider enclosure at the env's 64 bits


def test_precision_out_of_bounds():
    code, _out, err = invoke(["kfib", "--precision-bits", "32", "4", "8"])
    assert code == 3 and "precision" in err


def test_global_flags_before_subcommand():
    code, out, _ = invoke(["--format", "json", "kfib", "4", "8"])
    assert code == 0 and json.loads(out)["value"] == 56


def test_cache_dir_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("NEGAFIB_CACHE_DIR", str(tmp_path))
    code, _out, _err = invoke(["roots", "6", "--format", "json"])
    assert code == 0
    assert (tmp_path / "roots_k6_p384.json").exists()


def test_order_check_subcommand():
    code, out, _ = invoke(["order-check", "4", "--format", "json"])
    assert code == 0
    payload = json.loads(out)
    validate(payload, "misc_results.schema.json")
    assert payload["all_certified"] is True


def test_misc_outputs_validate():
    for argv in (["kfib", "4", "8"], ["window", "2", "0", "5"],
                 ["constants", "4"], ["powers", "4", "1", "20"]):
        code, out, _ = invoke(argv + ["--format", "json"])
        assert code == 0
        validate(json.loads(out), "misc_results.schema.json")


def test_matveev_log_floor_input(tmp_path):
    inst = tmp_path / "inst.json"
    inst.write_text(json.dumps({
        "t": 1, "D": 1, "B": 1, "A": ["2"], "log_gamma_abs": ["1.5"],
    }))
    code, out, _ = invoke(["matveev", str(inst), "--format", "json"])
    assert code == 0
    validate(json.loads(out), "misc_results.schema.json")
    inst.write_text(json.dumps({
        "t": 1, "D": 1, "B": 1, "A": ["2"], "log_gamma_abs": ["2.5"],
    }))
    assert invoke(["matveev", str(inst)])[0] == 3  # floor above A_1
