"""Acceptance criteria 1-10 on the fixture a = (4, 5, 6), h = (-7, 6).

Each criterion prints its checks, PASS/FAIL and wall time against its budget.
"""
import pytest

from pfperiods import verify


@pytest.mark.parametrize("criterion", verify.CRITERIA, ids=lambda f: f.__name__)
def test_criterion(criterion, capsys):
    report = criterion()
    with capsys.disabled():
        status = "PASS" if report.passed else "FAIL"
        print(f"\n[{status}] criterion {report.number}: {report.title} "
              f"({report.runtime:.2f}s / budget {report.budget:.0f}s)")
        for c in report.checks:
            print(f"    {'ok ' if c.passed else 'BAD'} {c.name}: {c.value:.3e} "
                  f"(threshold {c.op} {c.threshold:g})")
    failed = [c.name for c in report.checks if not c.passed]
    assert not failed, f"criterion {report.number} failed checks: {failed}"
    assert report.runtime < report.budget, f"criterion {report.number} over its time budget"
