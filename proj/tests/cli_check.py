#!/usr/bin/env python3
"""Run the srk binary and check its exit status and JSON output.

usage: cli_check.py SRK SCHEMA_DIR EXPECTED_EXIT SCHEMA|- [--cells N] -- ARGS...

SCHEMA validates stdout on success and stderr on failure.
"""
import argparse
import json
import pathlib
import subprocess
import sys

import jsonschema
import referencing


def registry(schema_dir):
    resources = []
    for path in sorted(pathlib.Path(schema_dir).glob("*.schema.json")):
        contents = json.loads(path.read_text())
        resources.append((path.name, referencing.Resource.from_contents(contents)))
    return referencing.Registry().with_resources(resources)


def main():
    argv = sys.argv[1:]
    split = argv.index("--")
    parser = argparse.ArgumentParser()
    parser.add_argument("srk")
    parser.add_argument("schema_dir")
    parser.add_argument("expected_exit", type=int)
    parser.add_argument("schema")
    parser.add_argument("--cells", type=int)
    opts = parser.parse_args(argv[:split])

    proc = subprocess.run([opts.srk, *argv[split + 1:]], capture_output=True, text=True, timeout=1200)
    if proc.returncode != opts.expected_exit:
        sys.exit(f"exit {proc.returncode}, expected {opts.expected_exit}\nstderr: {proc.stderr}")
    stream = proc.stdout if opts.expected_exit == 0 else proc.stderr
    if opts.schema != "-":
        doc = json.loads(stream)
        reg = registry(opts.schema_dir)
        schema = reg.contents(opts.schema)
        jsonschema.Draft202012Validator(schema, registry=reg).validate(doc)
        if opts.cells is not None and len(doc["cells"]) != opts.cells:
            sys.exit(f"{len(doc['cells'])} cells, expected {opts.cells}")
        if "summary" in doc and doc["summary"]["failures"] != 0:
            sys.exit(f"{doc['summary']['failures']} sandwich failures")
    print(f"ok: exit {proc.returncode}")


if __name__ == "__main__":
    main()
