"""
JSON schemas of the documents printed by --json runs.

    python -m gentlekit.schemas.export docs
"""
import argparse
import json
from pathlib import Path
from typing import Any, Dict, List, Optional

from gentlekit.schemas.errors import ErrorResponse
from gentlekit.schemas.reports import Report


def document_schemas() -> Dict[str, Dict[str, Any]]:
    """File name -> schema, for the report and the error document."""
    return {
        "report.schema.json": Report.model_json_schema(),
        "error.schema.json": ErrorResponse.model_json_schema(),
    }


def write_schemas(directory: Path) -> List[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, schema in document_schemas().items():
        path = directory / name
        path.write_text(json.dumps(schema, indent=2) + "\n")
        written.append(path)
    return written


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(description="Write the report and error JSON schemas")
    parser.add_argument("directory", type=Path, nargs="?", default=Path("docs"))
    args = parser.parse_args(argv)
    for path in write_schemas(args.directory):
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
