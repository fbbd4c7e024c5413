import numpy as np
import pytest

from fraclt.core.types import PathGrid, ProcessKind, ProcessSpec
from fraclt.samplers.cholesky import sample_cholesky


def _make_path(values, horizon=1.0, tau=0.5, kind=ProcessKind.FBM, seed=0):
    """PathGrid over hand-written values on the uniform grid of [0, horizon]"""
    values = np.asarray(values, dtype=float)
    spec = ProcessSpec(kind=kind, tau=tau, horizon=horizon, n_steps=values.size - 1)
    return PathGrid(times=spec.times(), values=values, spec=spec, seed=seed, origin=float(values[0]))


@pytest.fixture(scope="session")
def brownian_spec():
    return ProcessSpec(kind=ProcessKind.FBM, tau=0.5, horizon=1.0, n_steps=256)


@pytest.fixture(scope="session")
def brownian_path(brownian_spec):
    return sample_cholesky(brownian_spec, seed=11)


@pytest.fixture(scope="session")
def ramp_path():
    # X(t_i) = t_i on 0, 0.25, ..., 1
    return _make_path(np.linspace(0.0, 1.0, 5))


@pytest.fixture(scope="session")
def make_path():
    return _make_path
