"""One test per acceptance criterion; each prints its pass/fail line, and
the lines are collected again at the end of the pytest run."""

import pytest

from spreadlab.acceptance import CRITERIA, run_all

from conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("number", [fn.number for fn in CRITERIA])
def test_criterion(number):
    (res,) = run_all([number])
    line = res.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert res.ok, line
