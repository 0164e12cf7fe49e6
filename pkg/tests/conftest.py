import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from orbifold.category import Category
from orbifold.groups import FiniteGroup

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def dags(draw, max_vertices=6):
    """A random relation on v0..vn-1 whose pairs point forward, as a thin category."""
    n = draw(st.integers(1, max_vertices))
    vs = [f"v{i}" for i in range(n)]
    pairs = [(vs[i], vs[j]) for i in range(n) for j in range(i + 1, n)]
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Category.from_relation(vs, [p for p, k in zip(pairs, keep) if k])


def small_groups():
    return st.sampled_from(
        [
            FiniteGroup.trivial(),
            FiniteGroup.cyclic(2),
            FiniteGroup.cyclic(3),
            FiniteGroup.cyclic(4),
            FiniteGroup.product(FiniteGroup.cyclic(2), FiniteGroup.cyclic(2)),
            FiniteGroup.from_permutations({"s": {0: 1, 1: 0}, "t": {1: 2, 2: 1}})[0],
        ]
    )


@pytest.fixture
def rng():
    return random.Random(1234)


_criteria: list[tuple[int, str]] = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py::test_criterion_" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        number = int(name.split("_")[2])
        _criteria.append((number, "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if _criteria:
        terminalreporter.section("acceptance criteria")
        for number, status in sorted(_criteria):
            terminalreporter.write_line(f"{status} criterion {number}")
