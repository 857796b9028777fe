"""Shared fixtures and the acceptance-criteria reporter.

The acceptance tests record one entry per criterion into
ACCEPTANCE_RESULTS; the terminal-summary hook prints a single PASS/FAIL
line for each after the run, so the criteria are visible even under
captured stdout.
"""

import pytest

from rifclark import catalog

# criterion index -> (label, passed)
ACCEPTANCE_RESULTS: dict[int, tuple[str, bool]] = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for idx in sorted(ACCEPTANCE_RESULTS):
        label, ok = ACCEPTANCE_RESULTS[idx]
        terminalreporter.write_line(
            f"criterion {idx} ({label}): {'PASS' if ok else 'FAIL'}")


@pytest.fixture(scope="session")
def fav():
    return catalog.simple_singular_rif()


@pytest.fixture(scope="session")
def squared():
    return catalog.squared_singular_rif()


@pytest.fixture(scope="session")
def monomial():
    return catalog.monomial_rif()


@pytest.fixture(scope="session")
def product():
    return catalog.product_singular_rif()


@pytest.fixture(scope="session")
def diagonal():
    return catalog.diagonal_rif()


@pytest.fixture(scope="session")
def corpus(monomial, fav, squared, product, diagonal):
    return {
        "monomial": monomial,
        "fav": fav,
        "squared": squared,
        "product": product,
        "diagonal": diagonal,
    }


@pytest.fixture(scope="session")
def fav_measure_alpha1(fav):
    from rifclark import clark

    return clark.build_measure(fav, 1.0 + 0.0j, 1024)


@pytest.fixture(scope="session")
def fav_measure_alphai(fav):
    from rifclark import clark

    return clark.build_measure(fav, 1.0j, 1024)
