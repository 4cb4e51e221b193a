import numpy as np
import pytest

from dkpsim.algebra import Kind, build_representation

ALL_KINDS = [Kind.SPIN1, Kind.SPIN0, Kind.DIRAC]
DKP_KINDS = [Kind.SPIN1, Kind.SPIN0]


@pytest.fixture(params=ALL_KINDS, ids=lambda k: k.value)
def rep(request):
    return build_representation(request.param)


@pytest.fixture(params=DKP_KINDS, ids=lambda k: k.value)
def dkp_rep(request):
    return build_representation(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])
