from fractions import Fraction

import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

rationals = st.fractions(min_value=-3, max_value=3, max_denominator=6)
points6 = st.lists(rationals, min_size=6, max_size=6)
floats6 = st.lists(st.floats(-2, 2, allow_nan=False), min_size=6, max_size=6).map(np.array)
positive_rationals = st.fractions(min_value=Fraction(1, 6), max_value=3, max_denominator=6)


def as_fractions(values):
    return [Fraction(v) for v in values]


# acceptance summary ----------------------------------------------------------

_CRITERIA: dict = {}


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when != "call":
        return
    n, title = mark.args
    passed = call.excinfo is None
    _CRITERIA[n] = (title, passed, call.duration)
    print(f"\ncriterion {n:>2} {'PASS' if passed else 'FAIL'}  {title}  ({call.duration:.1f} s)")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(_CRITERIA):
        title, passed, seconds = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:>2} {'PASS' if passed else 'FAIL'}  {title}  ({seconds:.1f} s)")
