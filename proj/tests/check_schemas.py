#!/usr/bin/env python3
"""Validate shipped configs and emitted reports against the JSON schemas."""
import argparse
import json
import pathlib
import sys

import jsonschema
from referencing import Registry, Resource


def load(path):
    with open(path) as fh:
        return json.load(fh)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--schemas", required=True, type=pathlib.Path)
    ap.add_argument("--configs", required=True, type=pathlib.Path)
    ap.add_argument("--reports", required=True, type=pathlib.Path)
    args = ap.parse_args()

    config_schema = load(args.schemas / "config.schema.json")
    report_schema = load(args.schemas / "report.schema.json")
    registry = Registry().with_resource("config.schema.json", Resource.from_contents(config_schema))
    cfg_v = jsonschema.Draft202012Validator(config_schema)
    rep_v = jsonschema.Draft202012Validator(report_schema, registry=registry)

    bad = 0
    checked = 0
    jobs = [(p, cfg_v) for p in sorted(args.configs.glob("*.json"))]
    jobs += [(p, rep_v) for p in sorted(args.reports.glob("*/report.json"))]
    for path, v in jobs:
        checked += 1
        errors = sorted(v.iter_errors(load(path)), key=lambda e: list(e.path))
        for e in errors:
            print(f"{path}: {'/'.join(map(str, e.path))}: {e.message}")
        bad += bool(errors)
    reports = sum(1 for p, v in jobs if v is rep_v)
    print(f"{checked} documents checked ({reports} reports), {bad} invalid")
    if reports == 0:
        print("no reports found")
        return 1
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
