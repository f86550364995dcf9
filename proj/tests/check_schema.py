"""Validates every corpus model against the published JSON Schema."""
import json
import pathlib
import sys

import jsonschema


def main() -> int:
    schema = json.loads(pathlib.Path(sys.argv[1]).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    models = sorted(pathlib.Path(sys.argv[2]).glob("*.json"))
    for path in models:
        errors = list(validator.iter_errors(json.loads(path.read_text())))
        for error in errors:
            print(f"{path.name}: {'/'.join(map(str, error.absolute_path))}: {error.message}")
        failures += bool(errors)
    print(f"{len(models) - failures}/{len(models)} models valid")
    return 1 if failures or not models else 0


if __name__ == "__main__":
    sys.exit(main())
