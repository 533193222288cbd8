#!/usr/bin/env python3
"""Runs every CLI subcommand and validates each JSON artifact against docs/schemas.

usage: validate_schemas.py CLI SCHEMA_DIR WORKDIR
"""
import json
import shutil
import subprocess
import sys
from pathlib import Path

import jsonschema

FAST = ["--trees", "30", "--bootstrap-iters", "5", "--gap-refs", "3", "--k-max", "4"]


def run(cli, *args, ok=True):
    proc = subprocess.run([cli, *args], capture_output=True, text=True)
    if ok and proc.returncode != 0:
        sys.exit(f"{' '.join(args)} exited {proc.returncode}: {proc.stderr}")
    if not ok and proc.returncode == 0:
        sys.exit(f"{' '.join(args)} unexpectedly succeeded")


def main():
    cli, schema_dir, work = sys.argv[1], Path(sys.argv[2]), Path(sys.argv[3])
    shutil.rmtree(work, ignore_errors=True)
    work.mkdir(parents=True)
    schemas = {p.name.removesuffix(".schema.json"): json.loads(p.read_text()) for p in schema_dir.glob("*.schema.json")}
    for s in schemas.values():
        jsonschema.Draft202012Validator.check_schema(s)

    checks = []
    for mode in ("--reconstructed", "--appendix-a"):
        out = work / mode.strip("-")
        run(cli, "simulate", mode, "--output-dir", str(out))
        checks.append((out / "simulate.json", "simulate"))
    cohort = str(work / "reconstructed" / "cohort.csv")

    artifacts = {
        "describe": ["describe"], "ctt": ["ctt"], "features": ["features"], "train": ["train", "model"],
        "cv": ["cv"], "importance": ["importance"], "cluster": ["cluster"], "stability": ["stability"],
        "report": ["report"],
    }
    for command, names in artifacts.items():
        out = work / command
        run(cli, command, "--input", cohort, "--output-dir", str(out), *FAST)
        checks += [(out / f"{n}.json", n) for n in names]

    bad = work / "bad"
    bad.mkdir()
    (bad / "bad.csv").write_text("student_id,q1\na,3\n")
    run(cli, "ctt", "--input", str(bad / "bad.csv"), "--output-dir", str(bad), ok=False)
    checks.append((bad / "error.json", "error"))
    run(cli, "cv", "--folds", "1", "--input", cohort, "--output-dir", str(bad / "cfg"), ok=False)
    checks.append((bad / "cfg" / "error.json", "error"))

    failures = 0
    for path, name in checks:
        validator = jsonschema.Draft202012Validator(schemas[name])
        errors = sorted(validator.iter_errors(json.loads(path.read_text())), key=lambda e: list(e.path))
        for e in errors[:5]:
            print(f"{path}: {'/'.join(map(str, e.path))}: {e.message}")
        failures += bool(errors)
        print(f"{'ok  ' if not errors else 'FAIL'} {path.relative_to(work)} against {name}")
    unused = set(schemas) - {n for _, n in checks}
    if unused:
        print(f"schemas never exercised: {sorted(unused)}")
        failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
