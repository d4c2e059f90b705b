import io
import json
import subprocess
import sys

import pytest

from horn_amoeba import cli
from horn_amoeba.amoeba import AmoebaGrid, census_from_grid, classify_grid
from horn_amoeba.cli import EXIT_INCONCLUSIVE, EXIT_INVALID, EXIT_OK, run


def call(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


COMMANDS = [
    ["horn", "--ore-sato", "example1"],
    ["supports", "--ore-sato", "example1.json", "--window", "12"],
    ["fan", "--ore-sato", "cardano"],
    ["symbols", "--ore-sato", "cardano"],
    ["resultant", "--ore-sato", "example1"],
    ["discriminant", "--equation", "y^3+x1*y^2+x2*y-1"],
    ["bergman", "--p", "1", "1"],
    ["mellin", "--m", "3", "--exps", "2", "1"],
    ["verify", "--ore-sato", "nonbergman", "--num", "1", "--den", "(1-x1)^2-x2-x3"],
    ["screens", "--ore-sato", "cardano"],
    ["amoeba", "--poly", "1-x1-x2", "--resolution", "30"],
    ["spine", "--poly", "1-x1-x2"],
]


@pytest.mark.parametrize("argv", COMMANDS, ids=[a[0] for a in COMMANDS])
def test_every_command_succeeds_and_emits_json(argv, tmp_path):
    code, out, err = call(argv + ["--out", str(tmp_path)])
    assert code == EXIT_OK, err
    doc = json.loads(out)
    assert json.loads((tmp_path / f"{argv[0]}.json").read_text()) == doc


def test_command_payloads():
    doc = json.loads(call(["verify", "--ore-sato", "nonbergman", "--num", "1", "--den", "(1-x1)^2-x2-x3"])[1])
    assert doc["solves"] is True
    doc = json.loads(call(["fan", "--ore-sato", "counterexample"])[1])
    assert doc["verdict"] == "not a fan"
    assert [[1, 4, 5], [2, 4, 5]] in doc["witness_pairs"]
    doc = json.loads(call(["resultant", "--ore-sato", "cardano"])[1])
    assert sorted(map(tuple, doc["newton_vertices"])) == [(0, 0), (0, 3), (2, 2), (3, 0)]
    doc = json.loads(call(["amoeba", "--poly", "7*x1^2*x2", "--resolution", "8"])[1])
    assert doc["count"] == 1 and doc["empty_amoeba"] is True


def test_config_file_and_unknown_keys(tmp_path):
    cfg = tmp_path / "job.json"
    cfg.write_text(json.dumps({"command": "bergman", "inputs": {"p": [2, 1]}}))
    code, out, _ = call(["--config", str(cfg)])
    assert code == EXIT_OK and json.loads(out)["p"] == [2, 1]

    cfg.write_text(json.dumps({"command": "bergman", "inputs": {"p": [1, 1]}, "bogus": 1}))
    code, _, err = call(["--config", str(cfg)])
    assert code == EXIT_INVALID and "field bogus" in err

    cfg.write_text(json.dumps({"command": "bergman", "inputs": {"q": [1, 1]}}))
    code, _, err = call(["--config", str(cfg)])
    assert code == EXIT_INVALID and "inputs.q" in err


@pytest.mark.parametrize("argv,field", [
    (["bergman", "--p", "0", "1"], "inputs.p"),
    (["amoeba", "--poly", "1-x1-x2", "--resolution", "0"], "resolution"),
    (["amoeba", "--poly", "1-x1", "--resolution", "10"], "inputs.poly"),
    (["mellin", "--m", "3", "--exps", "1", "2"], "exps"),
    (["horn", "--ore-sato", "{\"n\": 2, \"num_rows\": [{\"A\": [1, 0], \"c\": \"0\"}]}"], "num_rows"),
])
def test_invalid_inputs_name_the_field(argv, field):
    code, out, err = call(argv)
    assert code == EXIT_INVALID and out == ""
    assert f"field {field}" in err


def test_outputs_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert call(["amoeba", "--poly", "(1-x1)*(1-x2)*(1-x1-x2)", "--resolution", "40", "--out", str(d)])[0] == 0
    for name in ("amoeba.json", "grid.csv", "amoeba.svg", "amoeba_grid.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_inconclusive_census_exits_3(monkeypatch):
    def crippled(f, lo, hi, resolution, *args):
        g = classify_grid(f, (-3, -3), (3, 3), (10, 10))
        states = g.states.copy()
        states[:30] = 0
        return census_from_grid(f, AmoebaGrid(g.nvars, g.lo, g.hi, g.resolution, states, g.orders))

    monkeypatch.setattr(cli, "component_census", crippled)
    code, out, _ = call(["amoeba", "--poly", "1-x1-x2"])
    assert code == EXIT_INCONCLUSIVE
    assert json.loads(out)["verdict"] == "inconclusive, refine resolution"


def test_render_every_artifact_type(tmp_path):
    call(["supports", "--ore-sato", "example1", "--out", str(tmp_path)])
    sups = json.loads((tmp_path / "supports.json").read_text())["supports"]
    art = {"type": "support-lattice", "window": 6, "supports": sups}
    sources = {
        "support-lattice": json.dumps(art),
        "fan": json.dumps(json.loads(call(["fan", "--ore-sato", "example1"])[1])),
        "polytope": json.dumps({"type": "polytope", "vertices": [[0, 0, 0], [4, 0, 0], [0, 4, 0], [0, 0, 4]]}),
        "spine-2d": json.dumps(json.loads(call(["spine", "--poly", "(1-x1)*(1-x2)*(1-x1-x2)"])[1])),
    }
    call(["amoeba", "--poly", "1-x1-x2", "--resolution", "20", "--out", str(tmp_path)])
    sources["amoeba-grid"] = str(tmp_path / "amoeba_grid.json")
    for kind, src in sources.items():
        out_dir = tmp_path / kind
        code, out, err = call(["render", "--artifact", src, "--type", kind, "--out", str(out_dir)])
        assert code == EXIT_OK, (kind, err)
        svg = (out_dir / "render.svg").read_text()
        assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")


def test_render_rejects_unknown_type():
    cfg = json.dumps({"command": "render", "inputs": {"artifact": "{\"type\": \"pie\"}"}})
    code, _, err = call(["--config", cfg])
    assert code == EXIT_INVALID and "field type" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "horn_amoeba", "bergman", "--p", "1", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["p"] == [1, 1]
