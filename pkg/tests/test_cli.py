import json
from importlib import resources

import jsonschema
import pytest

from conftest import octahedron_complex
from systolic.cli import cmd_verify_all, main
from systolic.serialize import dump_complex


@pytest.fixture(scope="module")
def disc_file(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    path = d / "disc.json"
    assert main(["build-disc", "--degree", "7", "--radius", "5", "--out", str(path)]) == 0
    return path


@pytest.fixture(scope="module")
def schema():
    text = resources.files("systolic").joinpath("schemas/report.schema.json").read_text()
    return json.loads(text)


def test_verify_disc_passes(disc_file, tmp_path, schema):
    out = tmp_path / "r.json"
    code = main(["verify", "--complex", str(disc_file), "--samples", "10", "--pairs", "100", "--report", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    jsonschema.validate(data, schema)
    assert data["passed"] and list(data["inputs"].values())[0]


def test_verify_octahedron_fails(tmp_path, schema):
    path = tmp_path / "oct.json"
    dump_complex(octahedron_complex(), path)
    out = tmp_path / "r.json"
    assert main(["verify", "--complex", str(path), "--report", str(out)]) == 1
    data = json.loads(out.read_text())
    jsonschema.validate(data, schema)
    names = {r["name"]: r for r in data["reports"]}
    assert names["is_locally_7_large"]["status"] == "fail"


def test_missing_file_is_input_error(tmp_path):
    assert main(["verify", "--complex", str(tmp_path / "nope.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["load", "--complex", str(bad)]) == 2


def test_single_check_selection(disc_file, capsys):
    assert main(["verify", "--complex", str(disc_file), "--check", "chain", "--check", "flag"]) == 0
    out = capsys.readouterr().out
    assert "chain_condition" in out and "condition_R" not in out


def test_report_dir_env(disc_file, tmp_path, monkeypatch):
    monkeypatch.setenv("SYSTOLIC_REPORT_DIR", str(tmp_path / "reports"))
    assert main(["hyperbolicity", "--complex", str(disc_file), "--radius", "3", "--inner", "1"]) == 0
    assert (tmp_path / "reports" / "hyperbolicity.json").exists()


def test_project_point(disc_file, capsys):
    assert main(["project", "--complex", str(disc_file), "--level", "2", "--point", "8:1/2,9:1/2", "--times", "1"]) == 0
    pts = json.loads(capsys.readouterr().out)
    assert pts[0]["level"] == 2 and pts[1]["level"] == 1
    assert main(["project", "--complex", str(disc_file), "--level", "2"]) == 0


def test_boundary_command(disc_file, tmp_path):
    out = tmp_path / "b.json"
    assert main(["boundary", "--complex", str(disc_file), "--depth", "3", "--samples", "5", "--report", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["threads"] and all(p["coeffs"] for t in data["threads"] for p in t)


def test_pontryagin_command(tmp_path):
    assert main(["pontryagin", "--stages", "3", "--out", str(tmp_path / "p")]) == 0
    assert (tmp_path / "p" / "stats.csv").read_text().splitlines()[2].startswith("2,20,78,52,-6,4")


def test_export(disc_file, tmp_path):
    out = tmp_path / "s.dot"
    assert main(["export", "--complex", str(disc_file), "--what", "sphere", "--level", "1", "--out", str(out)]) == 0
    assert out.read_text().count("--") == 7
    out = tmp_path / "sd.dot"
    assert main(["export", "--complex", str(disc_file), "--what", "subdivision", "--level", "1", "--out", str(out)]) == 0
    assert out.read_text().count("--") == 14
    out = tmp_path / "empty.json"
    assert main(["export", "--complex", str(disc_file), "--what", "sphere", "--level", "40", "--format", "json", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["maximal_simplices"] == []


def test_load_and_spheres(disc_file, capsys):
    assert main(["load", "--complex", str(disc_file)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["f_vector"][0] == 1 + 7 + 21 + 56 + 147 + 385
    assert main(["spheres", "--complex", str(disc_file), "--facts"]) == 0


def test_manifest_separates_timings(disc_file):
    from systolic.serialize import load_complex

    X = load_complex(disc_file)
    m = cmd_verify_all(X, 0, checks=("flag", "chain"), input_path=str(disc_file))
    assert "timings" not in m.to_dict(timings=False)
    assert set(m.timings) == {"flag", "chain_condition"}
