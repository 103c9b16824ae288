import functools

import pytest

from freesd import GaussScaled, HalfExp, QuadSpec, SymExp, TransformContext, build_density

FAMILIES = {
    "symexp": SymExp(),
    "half-exp": HalfExp(),
    "gauss-scaled": GaussScaled(),
}


@functools.lru_cache(maxsize=None)
def context(name):
    return TransformContext(FAMILIES[name], QuadSpec())


@functools.lru_cache(maxsize=None)
def default_curve(name):
    return build_density(context(name))


@pytest.fixture(scope="session")
def sym_ctx():
    return context("symexp")


@pytest.fixture(scope="session")
def sym_curve():
    return default_curve("symexp")


_ACCEPTANCE = []


def record_criterion(number, name, passed, detail):
    _ACCEPTANCE.append((number, name, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(_ACCEPTANCE):
        terminalreporter.write_line(
            f"criterion {number:>2} {name}: {'PASS' if passed else 'FAIL'}  {detail}"
        )
