import asyncio

import numpy as np
import pytest

from fraclt.core.client import SimulationClient
from fraclt.core.types import ProcessKind, ProcessSpec, SamplerType
from fraclt.exceptions import ConfigurationError, ValidationError
from fraclt.utils import derive_seed

SPEC = ProcessSpec(kind=ProcessKind.FBM, tau=0.3, horizon=1.0, n_steps=64)


class TestSimulationClient:
    def test_rejects_zero_threads(self):
        with pytest.raises(ConfigurationError):
            SimulationClient(threads=0)

    def test_replicates_come_back_in_order(self):
        seeds = SimulationClient(threads=4).collect(SPEC, 8, 7, fn=lambda path: path.seed)
        assert seeds == [derive_seed(7, r) for r in range(8)]

    @pytest.mark.parametrize("threads", [2, 5])
    def test_thread_count_does_not_change_results(self, threads):
        serial = SimulationClient(threads=1).collect(SPEC, 6, 99)
        parallel = SimulationClient(threads=threads).collect(SPEC, 6, 99)
        for a, b in zip(serial, parallel):
            np.testing.assert_array_equal(a.values, b.values)

    def test_sample_matches_the_ensemble(self):
        client = SimulationClient(threads=2)
        ensemble = client.collect(SPEC, 3, 1)
        np.testing.assert_array_equal(client.sample(SPEC, 2, 1).values, ensemble[2].values)

    def test_map_replicates_is_awaitable(self):
        client = SimulationClient(threads=2)
        maxima = asyncio.run(client.map_replicates(SPEC, 4, 3, fn=lambda path: float(path.values.max())))
        assert len(maxima) == 4
        assert all(m >= 0.0 for m in maxima)

    def test_samplers_are_reused(self):
        client = SimulationClient()
        assert client.sampler_for(SPEC) is client.sampler_for(SPEC.replace(n_steps=32))

    def test_rejects_bad_requests_before_sampling(self):
        client = SimulationClient(cholesky_cap=32)
        with pytest.raises(ValidationError):
            client.collect(SPEC, 0, 1)
        with pytest.raises(ValidationError):
            client.collect(SPEC, 2, 1)
        with pytest.raises(ValidationError):
            client.collect(SPEC.replace(sampler=SamplerType.CIRCULANT, n_steps=48), 2, 1)
