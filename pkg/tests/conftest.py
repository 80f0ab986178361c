import logging
from pathlib import Path
from typing import Callable

import pytest

from gentlekit.algebra.linalg import ExactField, make_field
from gentlekit.algebra.quiver import BoundQuiver, parse_bound_quiver
from gentlekit.core.logging import PACKAGE_LOGGER

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def _load(name: str) -> BoundQuiver:
    return parse_bound_quiver((FIXTURES / f"{name}.bq").read_text())


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def load_bq() -> Callable[[str], BoundQuiver]:
    return _load


@pytest.fixture
def lin3() -> BoundQuiver:
    return _load("lin3")


@pytest.fixture
def a3c() -> BoundQuiver:
    return _load("a3c")


@pytest.fixture
def loop() -> BoundQuiver:
    return _load("loop")


@pytest.fixture
def ej8() -> BoundQuiver:
    return _load("ej8")


@pytest.fixture
def d6() -> BoundQuiver:
    return _load("d6")


@pytest.fixture
def gf() -> ExactField:
    return make_field(10007)


@pytest.fixture
def qq() -> ExactField:
    return make_field(0)


@pytest.fixture(autouse=True)
def detach_log_handlers():
    # handlers bound to a captured stderr must not outlive the test
    yield
    logging.getLogger(PACKAGE_LOGGER).handlers.clear()
