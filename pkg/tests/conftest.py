"""Shared pytest configuration: ``--runslow`` and the small test parameter sets."""

from collections.abc import Iterator

import numpy as np
import pytest

from cs_mdpc.params import ParameterSet, custom_params
from cs_mdpc.StringLogger import default_logger


def pytest_addoption(parser: pytest.Parser) -> None:
    """Register ``--runslow``."""
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run acceptance-scale tests"
    )


def pytest_collection_modifyitems(config: pytest.Config, items: list[pytest.Item]) -> None:
    """Skip tests marked ``slow`` unless ``--runslow`` is given."""
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def reset_logger_state() -> Iterator[None]:
    """Start every test with a disabled, empty logger."""
    previous = default_logger.enable
    default_logger.enable = False
    default_logger.pop_all()
    try:
        yield
    finally:
        default_logger.enable = previous
        default_logger.pop_all()


@pytest.fixture
def small_params() -> ParameterSet:
    """A toy CS-MDPC set: r = 211, d_v = 11, t = 4."""
    return custom_params("small", 2, "211", 11, 4, 10, 1)


@pytest.fixture
def small_qc_params(small_params: ParameterSet) -> ParameterSet:
    """The QC-MDPC variant of :func:`small_params`."""
    return small_params.as_qc()


@pytest.fixture
def rng() -> np.random.Generator:
    """A generator with a fixed seed."""
    return np.random.default_rng(20240611)
