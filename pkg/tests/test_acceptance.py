"""Acceptance suite: every verification check at its frozen tolerance.

Each test prints one PASS/FAIL line with the measured numbers, and the
whole set is what `zollspec verify` runs.
"""

import pytest

from zollspec.verify import CHECK_NAMES, run_check


@pytest.mark.parametrize("name", CHECK_NAMES)
def test_acceptance(name):
    result = run_check(name)
    status = "PASS" if result.passed else "FAIL"
    print(f"{status}  {result.name}  {result.details}")
    assert result.passed, f"{result.name} failed: {result.details}"
