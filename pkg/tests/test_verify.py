"""The verification harness itself."""
import json

import pytest

from student_levy.verify import CRITERIA, SUITES, CriterionResult, run_suite


class TestHarness:
    def test_every_criterion_in_all(self):
        assert set(CRITERIA) == set(range(1, 11))
        assert set(SUITES["all"]) == set(CRITERIA) | {"carlitz"}
        grouped = set().union(*(set(v) for k, v in SUITES.items() if k != "all"))
        assert grouped == set(SUITES["all"])

    def test_corollary_suite(self):
        lines = []
        res = run_suite("corollary", echo=lines.append)
        assert len(res) == 1 and res[0].passed and res[0].number == 2
        assert lines == [res[0].line()]

    def test_unknown_suite(self):
        with pytest.raises(ValueError):
            run_suite("nope")

    def test_line_format(self):
        r = CriterionResult(4, "demo", False, {"dev": 0.012345, "n": 3}, 1.26)
        assert r.line() == "[FAIL] criterion 4: demo (dev=0.0123, n=3; 1.3s)"
        assert json.loads(json.dumps(r.to_dict()))["passed"] is False
