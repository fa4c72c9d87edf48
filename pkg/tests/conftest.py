import pytest

from quadhecke.fields import field_constants
from quadhecke.moments import FamilySweep, WeightFunction

# Sweeps are the expensive shared resource: one per (field, X) for the
# whole session, reused by every statistic that needs the same family.
_SWEEPS = {}


@pytest.fixture(scope="session")
def weight():
    return WeightFunction()


@pytest.fixture(scope="session")
def sweep_cache(weight):
    def get(d: int, X: float) -> FamilySweep:
        key = (d, X)
        if key not in _SWEEPS:
            _SWEEPS[key] = FamilySweep(field_constants(d), X, weight)
        return _SWEEPS[key]
    return get


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: extra-heavy duplicate runs")
