import json

import pytest

from gentlekit.algebra.quiver import nonzero_paths
from gentlekit.config import get_settings
from gentlekit.main import main
from gentlekit.schemas import Report


def _run(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_analyze_d6(capsys, fixtures_dir):
    code, out = _run(capsys, "analyze", str(fixtures_dir / "d6.bq"), "--json")
    assert code == 0 and out["success"]
    dimensions = out["data"]["dimensions"]
    assert dimensions["algebra"] == 17
    assert dimensions["gorenstein"] == {"kind": "finite", "value": 2, "period": None, "start": None}
    assert dimensions["global_dimension"]["kind"] == "infinite"
    assert not out["data"]["classification"]["gentle"]
    Report.model_validate(out["data"])


def test_cm_d6(capsys, fixtures_dir):
    code, out = _run(capsys, "cm", str(fixtures_dir / "d6.bq"), "--m", "2", "--json")
    assert code == 0
    cm = out["data"]["cm"]
    assert cm["cm_modules"] == ["@3", "@6", "e", "b"]
    assert cm["sets_agree"]
    assert cm["trichotomy"] == {}


def test_blocks_with_potential(capsys, fixtures_dir):
    path = str(fixtures_dir / "ej8.bq")
    code, out = _run(capsys, "blocks", path, "--potential", "--char", "0", "--json")
    assert code == 0
    assert out["data"]["blocks"]["counts"] == {"I": 2, "II": 3, "Loop": 1}

    code, out = _run(capsys, "blocks", path, "--potential", "--char", "3", "--json")
    assert code == 1
    assert out["data"]["jacobian"][0]["missing"] == ["d1 d1"]


def test_jacobian_refuses_oracle_in_characteristic_three(capsys, fixtures_dir):
    code, out = _run(capsys, "jacobian", str(fixtures_dir / "ej8.bq"), "--char", "3", "--json")
    assert code == 1
    assert out["data"]["caveats"][0].startswith("oracle cross-check skipped")


def test_jacobian_from_potential_file(capsys, fixtures_dir, ej8):
    code, out = _run(capsys, "jacobian", str(fixtures_dir / "ej8.bq"),
                     "--potential-file", str(fixtures_dir / "ej8.pot"), "--json")
    assert code == 0
    assert out["data"]["jacobian"][0]["equal"]
    assert out["data"]["blocks"] is None
    section = out["data"]["jacobian"][0]
    assert section["basis_matches"] is True
    assert section["jacobian_dimension"] == len(nonzero_paths(ej8))


def test_from_angulation_emits_quiver(capsys, fixtures_dir, tmp_path):
    target = tmp_path / "triangle.bq"
    code, out = _run(capsys, "from-angulation", str(fixtures_dir / "hexagon_triangle.ang"),
                     "--emit-bq", str(target), "--json")
    assert code == 0
    text = target.read_text()
    assert text == out["data"]["emitted_bq"]
    assert sum(line.startswith("rel ") for line in text.splitlines()) == 3
    assert out["data"]["angulation"]["gentle"]


@pytest.mark.parametrize("argv", [
    ["from-angulation", "pentagon_bad.ang"],
    ["analyze", "missing.bq"],
    ["analyze", "d6.bq", "--char", "4"],
    ["from-angulation", "d6.bq"],
])
def test_input_errors_exit_two(capsys, fixtures_dir, argv):
    argv = [argv[0], str(fixtures_dir / argv[1]), *argv[2:], "--json"]
    code, out = _run(capsys, *argv)
    assert code == 2
    assert out["success"] is False
    assert out["error"]["message"]
    assert out["meta"]["exit_code"] == 2


def test_text_rendering(capsys, fixtures_dir):
    assert main(["analyze", str(fixtures_dir / "ej8.bq")]) == 0
    out = capsys.readouterr().out
    assert "Gorenstein dimension 1" in out
    assert "verified: True" in out


def test_suite_blocks(capsys):
    code, out = _run(capsys, "suite", "--suite", "blocks", "--count", "3", "--json")
    assert code == 0
    assert out["data"]["suite"]["passed"] == 3
    code, out = _run(capsys, "suite", "--suite", "blocks", "--count", "0", "--json")
    assert code == 0
    assert out["data"]["suite"]["count"] == 0


def test_runs_are_reproducible(capsys, fixtures_dir):
    argv = ["analyze", str(fixtures_dir / "d6.bq"), "--json"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def test_options_leave_settings_alone(capsys, fixtures_dir):
    before = get_settings().model_dump()
    code, out = _run(capsys, "cm", str(fixtures_dir / "d6.bq"), "--m", "2",
                     "--trials", "3", "--seed", "99", "--json")
    assert code == 0
    assert (out["data"]["run"]["trials"], out["data"]["run"]["seed"]) == (3, 99)
    assert get_settings().model_dump() == before
