#!/usr/bin/env python3
"""Validate varineq report.json files against docs/report.schema.json.

Also checks that the summary counts agree with the per-job statuses.
"""
import argparse
import json
import sys

import jsonschema


def check(schema, path):
    with open(path) as f:
        doc = json.load(f)
    jsonschema.validate(doc, schema, cls=jsonschema.Draft202012Validator)
    counts = {}
    for job in doc["jobs"]:
        counts[job["status"]] = counts.get(job["status"], 0) + 1
    s = doc["summary"]
    for key in ("holds", "violated", "inconclusive", "skipped", "invalid-parameters", "error"):
        if s[key] != counts.get(key, 0):
            raise ValueError(f"summary.{key} = {s[key]} but {counts.get(key, 0)} jobs have that status")
    if s["jobs"] != len(doc["jobs"]):
        raise ValueError("summary.jobs does not match the job list")
    ids = [j["id"] for j in doc["jobs"]]
    if ids != sorted(ids):
        raise ValueError("jobs are not sorted by id")
    failing = any(j["status"] in ("violated", "invalid-parameters", "error") for j in doc["jobs"])
    if s["exit_code"] != int(failing):
        raise ValueError("exit_code disagrees with the job statuses")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("schema")
    ap.add_argument("reports", nargs="+")
    args = ap.parse_args()
    with open(args.schema) as f:
        schema = json.load(f)
    jsonschema.Draft202012Validator.check_schema(schema)
    bad = 0
    for path in args.reports:
        try:
            check(schema, path)
            print(f"ok  {path}")
        except (jsonschema.ValidationError, ValueError) as e:
            bad += 1
            print(f"FAIL {path}: {e}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
