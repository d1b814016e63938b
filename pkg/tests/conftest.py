import sys
import numpy as np
import pytest

from gsa_relay import _kernels_py
from gsa_relay.channel import TrialSeed, sample_channel_set
from gsa_relay.core import build_scheme

try:
    from gsa_relay import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None

KERNEL_MODULES = [_kernels_py] + ([_kernels_c] if _kernels_c is not None else [])


@pytest.fixture(params=KERNEL_MODULES, ids=lambda k: k.BACKEND)
def kernels(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def draw(m, n, seed=7, trial=0):
    ch = sample_channel_set(m, n, TrialSeed(seed, trial))
    return ch, build_scheme(ch)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.VERDICTS, key=str):
        terminalreporter.write_line(mod.VERDICTS[key])
