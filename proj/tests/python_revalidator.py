"""The standalone numpy revalidator agrees with `entlen revalidate`."""

import json
import os
import subprocess
import sys
import tempfile

BIN, SCRIPT = sys.argv[1], sys.argv[2]
failures = []


def check(cond, label):
    print(("ok: " if cond else "FAILED: ") + label)
    if not cond:
        failures.append(label)


def cli_metrics(path):
    proc = subprocess.run([BIN, "revalidate", path], capture_output=True, text=True)
    metrics = {}
    for line in proc.stdout.splitlines():
        key, _, value = line.partition(": ")
        try:
            metrics[key] = float(value)
        except ValueError:
            pass
    return proc.returncode, metrics


def py_result(path):
    proc = subprocess.run([sys.executable, SCRIPT, path, "--json"], capture_output=True, text=True)
    return proc.returncode, json.loads(proc.stdout) if proc.stdout.strip() else {}


with tempfile.TemporaryDirectory() as tmp:
    cfg = os.path.join(tmp, "tfi.json")
    with open(cfg, "w") as fh:
        json.dump({
            "model": {"family": "tfi", "params": {"coupling": 1, "field": 1}},
            "geometry": {"A": [1], "B": [3, 6], "C": [1]},
        }, fh)
    subprocess.run([BIN, "certify", "--config", cfg, "--out", tmp], capture_output=True)

    for name, expect_valid in (("report_A1_B6_C1.json", True), ("report_A1_B3_C1.json", True)):
        path = os.path.join(tmp, name)
        code_cli, m = cli_metrics(path)
        code_py, r = py_result(path)
        check(code_cli == 0 and code_py == 0, f"{name}: both accept")
        for key in ("reconstruction_rel_err", "worst_ball_margin", "worst_factor_margin"):
            a, b = m.get(key), r.get(key)
            check(a is not None and b is not None and abs(a - b) <= 1e-9 * max(1.0, abs(a)),
                  f"{name}: {key} agrees ({a} vs {b})")

    # Tampering with a product weight must be caught by both.
    with open(os.path.join(tmp, "report_A1_B6_C1.json")) as fh:
        doc = json.load(fh)
    cert = doc["certificate"]
    check(cert["verdict"] == "SeparableByConstruction", "B=6 report is certified")
    cert["products"][0]["weight"] *= 1.5
    bad = os.path.join(tmp, "tampered.json")
    with open(bad, "w") as fh:
        json.dump(cert, fh)
    check(cli_metrics(bad)[0] == 1, "CLI rejects tampered certificate")
    check(py_result(bad)[0] == 1, "numpy rejects tampered certificate")

sys.exit(1 if failures else 0)
