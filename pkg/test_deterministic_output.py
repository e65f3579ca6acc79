#!/usr/bin/env python3
"""
Test script to verify deterministic output from hgbps.

This script runs ``hgbps report`` several times with the same seed and
configuration and checks that report.json and the CSV files are identical.
"""

import subprocess
import sys
import tempfile
from pathlib import Path

RUNS = 3
ARTIFACTS = ("report.json", "rays.csv", "borel_residuals.csv", "tau_fit.csv")
ARGS = ["report", "--curve", "Bes", "--m", "1.2", "--nu", "0.3", "--seed", "11"]


def run_report_test() -> bool:
    """Run the report with fixed inputs and compare the artifacts."""
    outputs = []

    for i in range(RUNS):
        with tempfile.TemporaryDirectory() as temp_dir:
            output_dir = Path(temp_dir) / "report"
            process = subprocess.run(
                ["hgbps", *ARGS, "--output-dir", str(output_dir)],
                capture_output=True,
                text=True,
                cwd=temp_dir,
            )
            if process.returncode not in (0, 1) or not (output_dir / "report.json").exists():
                print(f"Run {i+1}: Failed to write the report (exit {process.returncode})")
                print(f"Stderr: {process.stderr}")
                return False
            contents = {name: (output_dir / name).read_text(encoding="utf-8") for name in ARTIFACTS}
            outputs.append(contents)
            print(f"Run {i+1}: report.json has {len(contents['report.json'])} characters")

    first = outputs[0]
    for i, other in enumerate(outputs[1:], start=2):
        for name in ARTIFACTS:
            if first[name] != other[name]:
                print(f"❌ FAIL: {name} differs between run 1 and run {i}")
                for j, (c1, c2) in enumerate(zip(first[name], other[name])):
                    if c1 != c2:
                        print(f"  First difference at character {j}: '{c1}' vs '{c2}'")
                        break
                return False

    print("✅ PASS: All artifacts are identical (deterministic)")
    return True


if __name__ == "__main__":
    print("🧪 Testing hgbps Deterministic Output")
    print("=" * 50)

    success = run_report_test()

    if success:
        print("\n🎉 Deterministic output test PASSED!")
    else:
        print("\n💥 Deterministic output test FAILED!")
        sys.exit(1)
