import math

import numpy as np
import pytest
from hypothesis import settings

from cauchymean import families as fam
from cauchymean.funcmodel import Interval
from cauchymean.qam import builtin_generator

settings.register_profile("repo", derandomize=True, deadline=None, max_examples=100)
settings.load_profile("repo")

GENERATORS = ("identity", "ln", "power:2", "power:-1")

# windows where every generator is well conditioned
VERIFY_WINDOWS = {
    "identity": Interval(-1.0, 1.0),
    "ln": Interval(math.exp(-1), math.e),
    "power:2": Interval(0.1, 1.0),
    "power:-1": Interval(1.0, 10.0),
}
CLASSIFY_WINDOWS = {
    "identity": Interval(-1.0, 1.0),
    "ln": Interval(0.5, 2.0),
    "power:2": Interval(0.5, 1.5),
    "power:-1": Interval(0.5, 2.0),
}

# free functions defined on every window above
FREE_FUNCTIONS = (
    "sin(3*x) + x^2",
    "exp(x) - x",
    "x^3 - 2*x",
    "cosh(x)",
    "1/(2 + x^2)",
    "sqrt(2 + x)",
)


def generator(name):
    return builtin_generator(name)


def random_typed_spec(case, rng, mu_range=(0.3, 3.0)):
    """Typed spec whose two non-constant coefficient pairs are well separated."""
    while True:
        cphi = rng.uniform(-3, 3, 3)
        cpsi = rng.uniform(-3, 3, 3)
        lead = min(np.abs(cphi[1:]).max(), np.abs(cpsi[1:]).max())
        det = abs(cphi[1] * cpsi[2] - cphi[2] * cpsi[1])
        if lead >= 0.1 and det >= 0.1:
            break
    mu = None if case == fam.QUADRATIC else float(rng.uniform(*mu_range))
    return fam.FamilySpec(case, tuple(cphi), tuple(cpsi), mu=mu)


def random_dependent_spec(rng):
    c = rng.uniform(-3, 3, 3)
    if rng.random() < 0.2:
        c[0] = 0.0
    if abs(c[0]) < 0.1 and abs(c[1]) < 0.1:
        c[1] = 1.0
    free = FREE_FUNCTIONS[rng.integers(len(FREE_FUNCTIONS))]
    return fam.FamilySpec(fam.DEPENDENT, dependence=tuple(c), free=free)


# ---------------------------------------------------------------------------
# acceptance summary: one line per criterion

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None or not (rep.when == "call" or rep.failed or rep.skipped):
        return
    n, title = m.args
    ok, _ = _criteria.get(n, (True, title))
    _criteria[n] = (ok and rep.passed and rep.when == "call", title)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(_criteria):
        ok, title = _criteria[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}")
