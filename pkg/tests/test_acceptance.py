"""Acceptance gate: every criterion at its stated tolerance and budget.

Run with -s to see one pass/fail line per criterion; `greedylab verify`
prints the same lines.
"""

import time

import pytest

from greedylab import acceptance


@pytest.mark.parametrize(
    "number,name,func,budget",
    acceptance.CRITERIA,
    ids=[f"criterion_{c[0]:02d}" for c in acceptance.CRITERIA],
)
def test_criterion(number, name, func, budget):
    start = time.perf_counter()
    passed, detail = func()
    elapsed = time.perf_counter() - start
    status = "PASS" if passed else "FAIL"
    print(f"[{status}] criterion {number}: {name} ({elapsed:.2f}s) - {detail}")
    assert passed, f"criterion {number} ({name}): {detail}"
    assert elapsed < budget, f"criterion {number} took {elapsed:.2f}s (budget {budget}s)"
