import io
import json
import subprocess
import sys

import numpy as np
import pytest

from daseinizer import cli
from daseinizer.errors import ModelError
from daseinizer.export import poset_json, to_dot
from daseinizer.models import BUNDLED, load_model, parse_model
from daseinizer.operators import DensityMatrix, StateVector, spectral_decompose
from daseinizer.tolerance import get_eps
from daseinizer.verify import Check

from cabello_rays import CABELLO_BASES


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out=out)
    return code, out.getvalue()


def minimal_model(**extra):
    data = {"schemaVersion": 1, "dim": 2, "operators": {"Z": [[1, 0], [0, -1]]}, "contexts": [["Z"]]}
    data.update(extra)
    return data


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_models_load(name):
    m = load_model(name)
    assert m.poset().dim == m.dim
    assert load_model(name + ".json").name == m.name


def test_cabello_model_matches_the_ray_table():
    m = load_model("model-cabello4")
    for k, basis in enumerate(CABELLO_BASES, start=1):
        parts = spectral_decompose(m.operators[f"B{k}"])
        assert len(parts) == 4
        for (lam, p), v in zip(parts, basis):
            v = np.array(v, dtype=float)
            assert np.allclose(p.matrix, np.outer(v, v) / v.dot(v))


def test_complex_entries_and_states():
    m = parse_model(minimal_model(states={"i": [1, [0, 1]]}, densities={"mix": [[0.5, 0], [0, 0.5]]}))
    assert isinstance(m.states["i"], StateVector)
    assert m.states["i"].amplitudes[1] == pytest.approx(1j / np.sqrt(2))
    assert isinstance(m.states["mix"], DensityMatrix)


@pytest.mark.parametrize(
    "data, fragment",
    [
        ({"dim": 2}, "schemaVersion"),
        (minimal_model(schemaVersion=2), "schemaVersion"),
        (minimal_model(contexts=[["Y"]]), "undefined operator 'Y'"),
        (minimal_model(operators={"Z": [[1, 0, 0], [0, 1, 0]]}), "shape"),
        (minimal_model(operators={"Z": [[0, 1], [0, 0]]}), "Hermitian"),
        (minimal_model(extra=1), "extra"),
        (minimal_model(states={"z": [[1, 2, 3]]}), "states/z/0"),
    ],
)
def test_schema_and_invariant_violations(data, fragment):
    with pytest.raises(ModelError) as e:
        parse_model(data)
    assert fragment in str(e.value)


def test_unknown_model_lists_bundled():
    with pytest.raises(ModelError) as e:
        load_model("nope.json")
    assert "model-d3" in str(e.value)


def test_model_tolerance_is_applied_and_restored(tmp_path):
    f = tmp_path / "m.json"
    f.write_text(json.dumps(minimal_model(options={"tolerance": 1e-6})))
    eps = get_eps()
    code, _ = run("poset", str(f))
    assert code == 0 and get_eps() == eps


def test_sections_cabello():
    assert run("sections", "model-cabello4.json") == (0, "global sections: 0\n")


def test_sections_list():
    code, out = run("sections", "--list", "model-d2")
    assert code == 0 and out.splitlines()[0] == "global sections: 4" and len(out.splitlines()) == 5


def test_truth_psi1_total_everywhere():
    code, out = run("truth", "--prop", "A in [-0.5,0.5]", "--state", "psi1", "model-d3.json")
    assert code == 0
    rows = [l.split() for l in out.splitlines()[3:]]
    assert len(rows) == 4 and all(r[1] == "yes" for r in rows)


def test_truth_json_and_compound():
    code, out = run("truth", "--json", "--prop", "A in [0,0] or A in [1,1]", "--state", "psi2", "model-d3")
    data = json.loads(out)
    assert code == 0 and data["schemaVersion"] == 1
    assert all(data["truthValue"][k] for k in data["truthValue"])


def test_verify_d3_passes():
    code, out = run("verify", "model-d3.json")
    assert code == 0
    assert "FAIL" not in out and out.strip().endswith("0 failed")


def test_verify_failure_exit_code(monkeypatch):
    monkeypatch.setattr(cli, "run_suite", lambda model: [Check("deliberately broken", False, "x")])
    code, out = run("verify", "model-d2")
    assert code == 2 and "FAIL  deliberately broken" in out


def test_domain_errors_exit_one(capsys):
    assert run("truth", "--prop", "B in [0,1]", "--state", "psi1", "model-d3")[0] == 1
    assert "unknown operator 'B'" in capsys.readouterr().err
    assert run("truth", "--prop", "A in [0,1", "--state", "psi1", "model-d3")[0] == 1
    assert run("truth", "--prop", "A in [0,1]", "--state", "nobody", "model-d3")[0] == 1
    assert run("daseinise", "--op", "A", "model-d3")[0] == 1
    assert run("sections", "--cap", "3", "model-cabello4")[0] == 1
    assert "block cap" not in capsys.readouterr().err


def test_usage_error_exit_one():
    with pytest.raises(SystemExit) as e:
        cli.main(["frobnicate"])
    assert e.value.code == 1


def test_daseinise_table():
    code, out = run("daseinise", "--op", "P", "model-d3")
    lines = out.splitlines()
    assert code == 0 and lines[0].split() == ["context", "outer", "inner"]
    assert lines[1].split() == ["A", "{0,1}", "{}"]
    code, out = run("daseinise", "--op", "A", "--set", "[0.5,2.5]", "--json", "model-d3")
    assert json.loads(out)["outer"]["A"] == [1, 2]


def test_eval_and_export():
    code, out = run("eval", "--json", "--prop", "A in [0,0]", "model-d3")
    assert json.loads(out)["subobject"]["A"] == [0]
    code, dot = run("export", "--dot", "model-d3")
    assert dot == to_dot(load_model("model-d3").poset(), title="diagonal qutrit")
    code, js = run("export", "--json", "model-d3")
    assert json.loads(js) == json.loads(json.dumps(poset_json(load_model("model-d3").poset())))
    code, dot = run("export", "--dot", "--prop", "A in [0,0]", "--state", "psi2", "model-d3")
    assert dot.count("fillcolor") == 1


def test_classical_subcommand():
    assert run("classical", "--quantity", "A", "--set", "[0,4.5]", "--state", "s3", "model-classical10") == (0, "1\n")


def test_outputs_are_byte_identical_across_processes():
    argv = [sys.executable, "-m", "daseinizer", "truth", "--prop", "A in [0,0] => not A in [2,2]", "--state", "psi2", "model-d3"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second and first
    argv = [sys.executable, "-m", "daseinizer", "export", "--json", "model-cabello4"]
    assert subprocess.run(argv, capture_output=True).stdout == subprocess.run(argv, capture_output=True).stdout


def test_env_var_overrides_model_tolerance(tmp_path):
    f = tmp_path / "m.json"
    f.write_text(json.dumps(minimal_model(options={"tolerance": 1e-3})))
    code = "import sys; from daseinizer import cli as c; from daseinizer.tolerance import get_eps; c._load(c.build_parser().parse_args(['poset', sys.argv[1]])); print(get_eps())"
    env = {"DASEINIZER_EPS": "1e-7", "PATH": ""}
    out = subprocess.run([sys.executable, "-c", code, str(f)], capture_output=True, text=True, env=env, check=True).stdout
    assert float(out) == 1e-7
    out = subprocess.run([sys.executable, "-c", code, str(f)], capture_output=True, text=True, env={"PATH": ""}, check=True).stdout
    assert float(out) == 1e-3
