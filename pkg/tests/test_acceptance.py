"""The eleven acceptance criteria, one test each; every run prints its pass/fail line."""

import pytest

from bergdbar.acceptance import CRITERIA


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"{i + 1:02d}-{c.__name__}" for i, c in enumerate(CRITERIA)])
def test_acceptance(criterion, capsys):
    result = criterion()
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
