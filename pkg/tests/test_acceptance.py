"""The twelve acceptance criteria at their stated tolerances.

Each test prints one PASS/FAIL line; the lines are repeated in the
"acceptance criteria" section of the pytest summary.  Run directly with
``python tests/test_acceptance.py`` for the lines alone.
"""

import subprocess
import sys
import time

import pytest

from gerbelab import suite
from gerbelab.sampling import seed_from_env

SEED = seed_from_env()

# wall-clock limits in seconds where a criterion states one
LIMITS = {1: 10.0, 3: 30.0, 5: 5.0, 8: 60.0}


def _detail(res, secs):
    parts = [res.name]
    if res.cid in LIMITS:
        parts.append(f"{secs:.2f} s (limit {LIMITS[res.cid]:g} s)")
    if res.failures:
        parts.append(f"first failure {res.failures[0]}")
    return ", ".join(parts)


@pytest.mark.parametrize("cid", range(1, 12))
def test_criterion(cid, acceptance_line):
    fn = suite.CRITERIA[cid - 1]
    t0 = time.perf_counter()
    res = fn(SEED)
    secs = time.perf_counter() - t0
    ok = res.passed and secs < LIMITS.get(cid, float("inf"))
    acceptance_line(cid, ok, _detail(res, secs))
    assert res.passed, res.failures[:3]
    if cid in LIMITS:
        assert secs < LIMITS[cid], f"criterion {cid} took {secs:.2f} s"


def _suite_bytes():
    return subprocess.run([sys.executable, "-m", "gerbelab.cli", "suite", "--seed", str(SEED)],
                          capture_output=True, check=False).stdout


def test_criterion_12_determinism(acceptance_line):
    first, second = _suite_bytes(), _suite_bytes()
    ok = bool(first) and first == second
    acceptance_line(12, ok, f"determinism, {len(first)} bytes per report")
    assert first, "suite produced no output"
    assert first == second


if __name__ == "__main__":
    all_ok = True
    for fn in suite.CRITERIA:
        t0 = time.perf_counter()
        r = fn(SEED)
        secs = time.perf_counter() - t0
        ok = r.passed and secs < LIMITS.get(r.cid, float("inf"))
        all_ok &= ok
        print(f"criterion {r.cid:2d} {'PASS' if ok else 'FAIL'}  {_detail(r, secs)}")
    a, b = _suite_bytes(), _suite_bytes()
    ok = bool(a) and a == b
    all_ok &= ok
    print(f"criterion 12 {'PASS' if ok else 'FAIL'}  determinism")
    sys.exit(0 if all_ok else 1)
