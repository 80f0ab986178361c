import json
from pathlib import Path

import pytest
from jsonschema import validate

from gentlekit.main import main
from gentlekit.schemas.export import document_schemas, write_schemas

DOCS = Path(__file__).resolve().parent.parent / "docs"


def _shipped(name):
    return json.loads((DOCS / name).read_text())


def _shape(schema):
    """Definition names with their property names and required sets."""
    defs = dict(schema.get("$defs", {}))
    defs[schema["title"]] = schema
    return {
        name: (set(d.get("properties", {})), set(d.get("required", [])), tuple(d.get("enum", ())))
        for name, d in defs.items()
    }


@pytest.mark.parametrize("name", ["report.schema.json", "error.schema.json"])
def test_shipped_schemas_match_models(name):
    assert _shape(_shipped(name)) == _shape(document_schemas()[name])


@pytest.mark.parametrize("argv", [
    ["analyze", "d6.bq"],
    ["cm", "d6.bq", "--m", "2"],
    ["blocks", "ej8.bq", "--potential", "--char", "0"],
    ["from-angulation", "annulus_p2_q1_m1.ang"],
])
def test_reports_validate(capsys, fixtures_dir, argv):
    main([argv[0], str(fixtures_dir / argv[1]), *argv[2:], "--json"])
    out = json.loads(capsys.readouterr().out)
    validate(instance=out["data"], schema=_shipped("report.schema.json"))


def test_suite_report_validates(capsys):
    main(["suite", "--suite", "blocks", "--count", "2", "--json"])
    out = json.loads(capsys.readouterr().out)
    validate(instance=out["data"], schema=_shipped("report.schema.json"))


def test_error_document_validates(capsys, fixtures_dir):
    code = main(["analyze", str(fixtures_dir / "missing.bq"), "--json"])
    out = json.loads(capsys.readouterr().out)
    assert code == 2
    validate(instance=out, schema=_shipped("error.schema.json"))


def test_write_schemas(tmp_path):
    written = write_schemas(tmp_path / "out")
    assert sorted(p.name for p in written) == ["error.schema.json", "report.schema.json"]
    for path in written:
        assert json.loads(path.read_text()) == document_schemas()[path.name]
