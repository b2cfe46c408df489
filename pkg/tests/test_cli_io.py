import io
import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from projcert import records
from projcert.certifier import CertifyConfig, certify
from projcert.cli import run_cli
from projcert.fixtures import FixtureSpec, generate_fixture, h1_network, projection_cases
from projcert.network import Network, forward
from projcert.oracle import enumerate_feasible_patterns
from projcert.serialization import (
    ModelFormatError,
    load_inputs,
    load_model,
    network_from_dict,
    network_to_dict,
    save_inputs,
    save_model,
)

VALIDATOR = jsonschema.Draft202012Validator(records.RECORD_SCHEMA)


@pytest.fixture
def h1_files(tmp_path):
    model = tmp_path / "h1.json"
    inputs = tmp_path / "x.json"
    save_model(h1_network(), model)
    save_inputs([[0.5, 0.2], [0.5, 0.2]], inputs)
    return model, inputs


def run(argv):
    buf = io.StringIO()
    code = run_cli([str(a) for a in argv], out=buf)
    recs = [json.loads(line) for line in buf.getvalue().splitlines()]
    for r in recs:
        VALIDATOR.validate(r)
    return code, recs


def test_h1_round_trip(tmp_path):
    save_model(h1_network(), tmp_path / "m.json")
    net = load_model(tmp_path / "m.json")
    np.testing.assert_allclose(forward(net, [0.5, 0.2]), [0.3, -0.3], atol=1e-15)


@given(st.integers(0, 10_000))
def test_round_trip_is_bit_exact(seed):
    net = generate_fixture(FixtureSpec(3, (4, 2), 3, seed, scale=1.7))
    back = network_from_dict(json.loads(json.dumps(network_to_dict(net))))
    for a, b in zip(net.layers, back.layers):
        np.testing.assert_array_equal(a.weights, b.weights)
        np.testing.assert_array_equal(a.bias, b.bias)


def test_truncated_document_names_missing_field():
    doc = network_to_dict(h1_network())
    del doc["layers"]
    with pytest.raises(ModelFormatError, match="layers"):
        network_from_dict(doc)
    doc = network_to_dict(h1_network())
    del doc["layers"][1]["bias"]
    with pytest.raises(ModelFormatError, match=r"layers\[1\].*bias"):
        network_from_dict(doc)


def test_shape_mismatch_names_layer_index():
    doc = network_to_dict(h1_network())
    doc["layers"][1]["weights"] = [[1.0, 2.0, 3.0]]
    doc["layers"][1]["bias"] = [0.0]
    with pytest.raises(ModelFormatError, match=r"layers\[1\]"):
        network_from_dict(doc)


def test_non_json_model(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{\"format_version\": 1, ")
    with pytest.raises(ModelFormatError):
        load_model(p)


def test_inputs_validated(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("[[1, 2], [3]]")
    with pytest.raises(ModelFormatError, match=r"inputs\[1\]"):
        load_inputs(p, 2)


def test_generate_fixture_deterministic(tmp_path):
    spec = FixtureSpec(2, (4, 4), 3, seed=7)
    save_model(generate_fixture(spec), tmp_path / "a.json")
    save_model(generate_fixture(spec), tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert generate_fixture(FixtureSpec(2, (), 3, seed=1)).hidden_widths == ()
    net = generate_fixture(FixtureSpec(2, (4, 4), 3, seed=1))
    assert net.num_hidden == 8
    assert len(enumerate_feasible_patterns(net)) >= 1


def test_cli_certify_h1(h1_files):
    model, inputs = h1_files
    save_inputs([[0.5, 0.2]], inputs)
    code, r1 = run(["certify", "--model", model, "--inputs", inputs, "--epsilon", 0.1])
    code2, r2 = run(["certify", "--model", model, "--inputs", inputs, "--epsilon", 0.25])
    assert code == code2 == 0
    assert [r["status"] for r in r1 + r2] == ["robust", "not_robust"]
    np.testing.assert_allclose(r2[0]["witness"], [0.35, 0.35], atol=1e-9)


def test_cli_oracle_h1(h1_files):
    model, inputs = h1_files
    code, recs = run(["oracle", "--model", model, "--inputs", inputs])
    assert code == 0
    assert all(r["distortion"] == pytest.approx(0.212132034, abs=1e-9) for r in recs)
    assert all(r["status"] is None for r in recs)
    _, recs = run(["oracle", "--model", model, "--inputs", inputs, "--epsilon", 0.25])
    assert recs[0]["status"] == "not_robust" and recs[0]["witness"] is not None


def test_cli_lower_bound_h1(h1_files):
    model, inputs = h1_files
    code, recs = run(["lower-bound", "--model", model, "--inputs", inputs, "--epsilon-max", 1])
    assert code == 0
    assert recs[0]["status"] == "stopped_at_boundary" and recs[0]["tight"]
    assert recs[0]["bound"] == pytest.approx(0.212132034, abs=1e-9)


@pytest.mark.parametrize("eps", ["0", "-1", "nan", "abc"])
def test_bad_epsilon_is_usage_error(h1_files, eps, capsys):
    model, inputs = h1_files
    code = run_cli(["certify", "--model", str(model), "--inputs", str(inputs), "--epsilon", eps])
    assert code == 2
    assert "epsilon" in capsys.readouterr().err


def test_missing_model_file(tmp_path, capsys):
    code = run_cli(["certify", "--model", str(tmp_path / "nope.json"), "--inputs", str(tmp_path / "x.json"), "--epsilon", "1"])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_wrong_input_dimension(h1_files, capsys):
    model, inputs = h1_files
    save_inputs([[1.0, 2.0, 3.0]], inputs)
    assert run_cli(["certify", "--model", str(model), "--inputs", str(inputs), "--epsilon", "1"]) == 1


def test_cli_matches_library_and_keeps_order(tmp_path):
    spec = {"input_dim": 3, "hidden": [5, 4], "num_classes": 3, "seed": 4, "scale": 1.0}
    model, inputs = tmp_path / "m.json", tmp_path / "x.json"
    assert run_cli(["gen-fixture", "--spec", json.dumps(spec), "--out", str(model),
                    "--num-inputs", "30", "--inputs-out", str(inputs)]) == 0
    net = load_model(model)
    pts = load_inputs(inputs, 3)
    for flags in ([], ["--full-queue"], ["--exact-fallback"]):
        _, recs = run(["certify", "--model", model, "--inputs", inputs, "--epsilon", 0.3, "--jobs", 4, *flags])
        assert [r["id"] for r in recs] == list(range(30))
        cfg = CertifyConfig(0.3, full_queue="--full-queue" in flags, exact_fallback="--exact-fallback" in flags)
        assert [r["status"] for r in recs] == [certify(net, x, cfg).status.value for x in pts]


def test_unknown_and_timeout_records_validate(tmp_path):
    net, x, eps = projection_cases()["center"]
    rec = records.certify_record(0, eps, certify(net, x, CertifyConfig(eps)))
    VALIDATOR.validate(rec)
    assert rec["status"] == "unknown" and rec["pending_boundaries"] == 1
    bad = dict(rec, witness=[0.0, 0.0])
    assert not VALIDATOR.is_valid(bad)
    assert not VALIDATOR.is_valid(dict(rec, status="maybe"))


def test_records_deterministic_modulo_timing(h1_files):
    model, inputs = h1_files
    argv = ["certify", "--model", model, "--inputs", inputs, "--epsilon", 0.25]
    a = [records.strip_timing(r) for r in run(argv)[1]]
    b = [records.strip_timing(r) for r in run(argv)[1]]
    assert a == b


def test_console_entry_point(h1_files):
    model, inputs = h1_files
    proc = subprocess.run([sys.executable, "-m", "projcert.cli", "certify", "--model", str(model),
                           "--inputs", str(inputs), "--epsilon", "0.1"], capture_output=True, text=True, check=True)
    assert [json.loads(l)["status"] for l in proc.stdout.splitlines()] == ["robust", "robust"]


def test_network_construction_errors():
    with pytest.raises(ValueError):
        Network.from_arrays([], [])
