import json
import subprocess
import sys


from hispace.cli import main
from hispace.kernel import vec_from_json
from hispace.tsirelson import cert_from_json


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def test_ra_example(capsys):
    assert main(["ra", "--xi", "0", "--M", "[4,7,9]", "--n", "2"]) == 0
    assert capsys.readouterr().out.strip() == '{"7":"1/1"}'


def test_mtnorm_prints_and_writes_certificate(tmp_path, capsys):
    params = write(tmp_path / "toy.json", {"families": ["A3"], "thetas": ["1/2"]})
    vec = write(tmp_path / "vec.json", [[1, "1"], [2, "1"], [3, "1"]])
    assert main(["mtnorm", "--params", params, "--in", vec]) == 0
    assert capsys.readouterr().out.strip() == "3/2"
    doc = json.loads((tmp_path / "vec.cert.json").read_text())
    assert doc["schema_version"] == 1 and doc["norm"] == "3/2"
    assert cert_from_json(doc["certificate"]).to_json() == doc["certificate"]
    assert vec_from_json(doc["vector"]) == vec_from_json(json.loads((tmp_path / "vec.json").read_text()))


def test_outputs_are_deterministic(tmp_path):
    params = write(tmp_path / "p.json", {"families": ["A2", "S1"], "thetas": ["1/2", "1/3"]})
    vec = write(tmp_path / "v.json", {"1": "1", "3": "-1/2", "4": "2"})
    outs = []
    for k in range(2):
        out = tmp_path / f"o{k}.json"
        assert main(["mtnorm", "--params", params, "--in", vec, "--out", str(out)]) == 0
        outs.append(out.read_bytes())
        manifest = json.loads((tmp_path / f"o{k}.json.manifest.json").read_text())
        assert set(manifest) >= {"command", "inputs", "params_digest", "version", "outputs", "wall_time"}
    assert outs[0] == outs[1]


def test_validation_error_exit_code(tmp_path, capsys):
    params = write(tmp_path / "bad.json", {"families": ["A3"], "thetas": ["3/2"]})
    vec = write(tmp_path / "v.json", [[1, "1"]])
    assert main(["mtnorm", "--params", params, "--in", vec]) == 2
    diag = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert diag["error"] == "ValueError"


def test_usage_exit_codes():
    assert main(["nonsense"]) == 64
    assert main([]) == 64
    assert main(["mtnorm"]) == 64  # missing --params


def test_family_and_admissible(capsys):
    assert main(["family", "--family", "S1", "--set", "[2,3]"]) == 0
    assert main(["family", "--family", "S1", "--sets", "[[1],[2]]"]) == 0
    assert capsys.readouterr().out.split() == ["true", "false"]


def test_tree_commands(tmp_path, capsys):
    dy = write(tmp_path / "dy.json", {"depth": 3, "kind": "dyadic"})
    gin = write(tmp_path / "g.json", {"x": {"": "1", "0": "1", "0.1": "1"}, "n": 2})
    assert main(["gauge", "--params", dy, "--in", gin]) == 0
    din = write(tmp_path / "d.json", {"x": {"": "1", "0": "1"}, "N": 3})
    assert main(["diag", "--params", dy, "--in", din]) == 0
    tree = write(tmp_path / "t.json", {"depth": 4, "kind": "coefficient", "base": 8})
    lin = write(tmp_path / "l.json", {"lambdas": {"1": "1/2", "3": "-2"}})
    assert main(["certify", "--params", tree, "--in", lin]) == 0
    bin_ = write(tmp_path / "b.json", {"branch": [3, 64]})
    assert main(["treenorm", "--params", tree, "--in", bin_]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "4/17" and out[-1] == "1/1"


def test_partition_and_split(tmp_path):
    dy = write(tmp_path / "dy.json", {"depth": 5, "kind": "dyadic"})
    pin = write(tmp_path / "p.json", {"bands": [[0, 1], [2, 3]],
                                      "ws": [[["1/2", "", "0.1"]], [["1/2", "0.1.0", "0.1.0.1"]]],
                                      "xstar": {"0": "1/2", "0.1.0": "1/2"}, "eps": "1/2"})
    assert main(["partition", "--params", dy, "--in", pin, "--out", str(tmp_path / "o.json")]) == 0
    assert json.loads((tmp_path / "o.json").read_text())["ok"]
    sin = write(tmp_path / "s.json", {"band": [1, 2], "phi": {"0": "1", "0.1": "1"}, "eps": "1/2"})
    assert main(["split", "--params", dy, "--in", sin]) == 0


def test_dependent_command(tmp_path):
    out = tmp_path / "dep.json"
    assert main(["dependent", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    statuses = {r["paper_ref"]: r["status"] for r in doc["reports"]}
    assert "holds" in statuses.values() and doc["registry"]


def test_verify_suite_exit_zero(tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "--suite", "tsirelson", "--budget", "5", "--out", str(out)]) == 0
    claims = json.loads(out.read_text())["claims"]
    assert all(set(c) == {"claim", "paper_ref", "status", "lhs", "rhs", "witness"} for c in claims)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "hispace", "ra", "--xi", "1", "--M", "[2,3,4,5,6]", "--n", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout) == {"2": "1/2", "3": "1/2"}
