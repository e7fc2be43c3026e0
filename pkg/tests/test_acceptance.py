"""Full-size acceptance runs: one test and one PASS/FAIL line per criterion.

Every criterion uses the fixed master seed ``ACCEPTANCE_SEED``; run with
``pytest tests/test_acceptance.py -v`` (lines print even without ``-s``).
"""
import pytest

from bipmaps.suites import ACCEPTANCE, ACCEPTANCE_SEED, run_criterion


@pytest.mark.slow
@pytest.mark.parametrize("criterion", ACCEPTANCE, ids=lambda c: f"criterion-{c.number}")
def test_criterion(criterion, capsys):
    ok, line, _ = run_criterion(criterion, ACCEPTANCE_SEED)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line
