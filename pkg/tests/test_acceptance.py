"""End-to-end acceptance checks, one test per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see the PASS/FAIL lines.
Checks 8 and 9 are known to fail on some legs; see README.
"""

import json

import pytest

from catpaths import acceptance as AC


@pytest.mark.parametrize("number", [c[0] for c in AC.CHECKS], ids=[f"check{c[0]}" for c in AC.CHECKS])
def test_acceptance(number):
    r = AC.run_check(number)
    print()
    print(r.line())
    print(json.dumps(r.details, default=str, indent=1))
    assert r.passed, r.line()
