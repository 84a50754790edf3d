#!/usr/bin/env python3
# Copyright 2026 The Unround Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Runs every JSON-emitting command and validates its output against schemas/."""

import json
import pathlib
import subprocess
import sys

import jsonschema


def main() -> int:
    cli, data, schemas = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
    age = ["--schema", str(data / "age_schema.json")]
    cases = [
        ("findings", ["scan", *age, "--data", str(data / "appendix_age_published.csv"), "--verify"], 0),
        ("findings", ["scan", *age, "--data", str(data / "age_quiet_published.csv")], 0),
        ("findings", ["scan", "--schema", str(data / "family_schema.json"),
                      "--data", str(data / "family_published.csv")], 0),
        ("solution_space", ["enumerate", "--data", str(data / "instance_two_solutions.json"),
                            "--mass", "0.9"], 0),
        ("solution_space", ["enumerate", "--data", str(data / "instance_free_family.json"),
                            "--k", "2"], 0),
        ("trial_report", ["simulate", "--kind", "prob_invariant", "--n", "3",
                          "--trials", "200000", "--seed", "5"], 0),
        ("rates", ["rates"], 0),
        ("utility", ["utility", "--t", "1.45", "--clamp", "--draws", "20000"], 0),
        ("validate", ["validate", *age, "--data", str(data / "age_toy_true.csv")], 0),
        ("validate", ["validate", *age, "--data", str(data / "age_bad_true.csv")], 2),
    ]
    for name in ("age_schema", "celtic_schema", "family_schema", "sex_schema"):
        doc = json.loads((data / f"{name}.json").read_text())
        jsonschema.validate(doc, json.loads((schemas / "hierarchy.schema.json").read_text()))

    failures = 0
    for schema_name, args, want_rc in cases:
        proc = subprocess.run([cli, *args], capture_output=True, text=True)
        label = " ".join(args[:1] + [a for a in args[1:] if not a.startswith("/")])
        if proc.returncode != want_rc:
            print(f"FAIL {label}: exit {proc.returncode}, want {want_rc}\n{proc.stderr}")
            failures += 1
            continue
        schema = json.loads((schemas / f"{schema_name}.schema.json").read_text())
        try:
            jsonschema.validate(json.loads(proc.stdout), schema)
        except (jsonschema.ValidationError, json.JSONDecodeError) as e:
            print(f"FAIL {label}: {e}")
            failures += 1
            continue
        print(f"ok   {label}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
