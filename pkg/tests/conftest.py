import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dsets.automorphisms import automorphism_group  # noqa: E402
from dsets.groups import group_from_generators  # noqa: E402
from dsets.library import get_group  # noqa: E402


def cyclic(n: int):
    """Z_n with element i equal to the i-th power of the generator."""
    return group_from_generators(n, [tuple((i + 1) % n for i in range(n))], label=f"Z{n}")


@pytest.fixture
def z7():
    return cyclic(7)


@pytest.fixture
def z5():
    return cyclic(5)


@pytest.fixture(scope="session")
def g96_230():
    G = get_group("96.230")
    return G, automorphism_group(G)


@pytest.fixture(scope="session")
def g96_231():
    G = get_group("96.231")
    return G, automorphism_group(G)


# -- acceptance summary ---------------------------------------------------

_criteria: dict[str, tuple[str, str]] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            item.user_properties += [("criterion", str(m.args[0])), ("title", m.args[1])]


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    key = props["criterion"]
    if report.when == "call" or report.outcome != "passed":
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        if _criteria.get(key, ("", "PASS"))[1] != "FAIL":
            _criteria[key] = (props.get("title", ""), status)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria, key=int):
        title, status = _criteria[key]
        terminalreporter.write_line(f"criterion {key}: {title} ... {status}")
