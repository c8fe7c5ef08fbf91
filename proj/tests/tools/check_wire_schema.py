"""Replays an NDJSON request file through `serve --stdio` and validates every
message the server writes against the protocol schema."""
import json
import subprocess
import sys

import jsonschema


def main():
    cli, schema_path, requests_path = sys.argv[1:4]
    with open(schema_path) as f:
        schema = json.load(f)
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)

    with open(requests_path) as f:
        requests = f.read()
    ops = set(schema["$defs"]["request"]["properties"]["op"]["enum"])
    for line in requests.splitlines():
        req = json.loads(line) if line.strip() else None
        # deliberately bad requests are there to provoke error responses
        if req and req.get("op") in ops:
            error = jsonschema.exceptions.best_match(validator.iter_errors(req))
            if error:
                sys.exit(f"request {line[:120]} invalid: {error.message[:200]}")

    out = subprocess.run([cli, "serve", "--stdio"], input=requests, capture_output=True, text=True, check=True).stdout
    messages = [json.loads(l) for l in out.splitlines() if l.strip()]
    if not messages or messages[0].get("v") != 1:
        sys.exit("no hello with v=1")
    bad = 0
    for m in messages:
        errors = list(validator.iter_errors(m))
        if errors:
            bad += 1
            print("INVALID", json.dumps(m)[:200], "::", errors[0].message[:200])
    kinds = {k for m in messages for k in ("hello", "result", "error", "event") if k in m}
    print(f"{len(messages)} messages, {bad} invalid, kinds {sorted(kinds)}")
    sys.exit(1 if bad or kinds != {"hello", "result", "error", "event"} else 0)


if __name__ == "__main__":
    main()
