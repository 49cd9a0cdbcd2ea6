import functools

import pytest

from twobridge.markoff import geometric_evaluation
from twobridge.mcshane import cusp_shape
from twobridge.slopes import Slope


@functools.lru_cache(maxsize=None)
def _evaluation(num, den):
    return geometric_evaluation(Slope(num, den))


@functools.lru_cache(maxsize=None)
def _report(num, den):
    return cusp_shape(Slope(num, den), ev=_evaluation(num, den))


@pytest.fixture(scope="session")
def evaluation_for():
    """Cached geometric evaluations keyed by slope."""
    return lambda r: _evaluation(r.num, r.den)


@pytest.fixture(scope="session")
def report_for():
    """Cached identity reports keyed by slope."""
    return lambda r: _report(r.num, r.den)


@pytest.fixture(scope="session")
def ev25(evaluation_for):
    return evaluation_for(Slope(2, 5))
