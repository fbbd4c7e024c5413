"""
Client interface for the fraclt package.
Provides the main entry point for experiments: it owns one sampler per
sampler type and maps work over seeded replicates on a thread pool.
"""

import asyncio
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, TypeVar

from ..samplers.base import BaseSampler
from ..samplers.cholesky import DEFAULT_CAP, CholeskySampler
from ..samplers.circulant import CirculantSampler
from ..samplers.kernel import KernelSampler
from ..utils import derive_seed
from .types import PathGrid, ProcessSpec, SamplerType
from ..exceptions import ConfigurationError, ValidationError

logger = logging.getLogger(__name__)

T = TypeVar("T")


class SimulationClient:
    """Main client class for seeded replicate experiments"""

    _sampler_map = {
        SamplerType.CHOLESKY: CholeskySampler,
        SamplerType.CIRCULANT: CirculantSampler,
        SamplerType.KERNEL_CONV: KernelSampler,
    }

    def __init__(self, threads: int = 1, cholesky_cap: int = DEFAULT_CAP):
        """
        Initialize the client.

        Args:
            threads: Worker threads used for replicate maps
            cholesky_cap: Largest n_steps accepted by the Cholesky sampler
        """
        if threads < 1:
            raise ConfigurationError(f"threads must be >= 1, got {threads}")
        self.threads = threads
        self.cholesky_cap = cholesky_cap
        self._samplers: Dict[str, BaseSampler] = {}

    def _initialize_sampler(self, sampler_type: str) -> BaseSampler:
        """
        Initialize the sampler of a given type.

        Raises:
            ConfigurationError: If the sampler type is unknown
        """
        sampler_class = self._sampler_map.get(sampler_type)
        if not sampler_class:
            raise ConfigurationError(f"Unsupported sampler type: {sampler_type}")
        if sampler_class is CholeskySampler:
            return CholeskySampler(cap=self.cholesky_cap)
        if sampler_class is CirculantSampler:
            return CirculantSampler(fallback=CholeskySampler(cap=self.cholesky_cap))
        return sampler_class()

    def sampler_for(self, spec: ProcessSpec) -> BaseSampler:
        """The sampler instance for a spec, created on first use"""
        if spec.sampler not in self._samplers:
            self._samplers[spec.sampler] = self._initialize_sampler(spec.sampler)
        return self._samplers[spec.sampler]

    def validate(self, spec: ProcessSpec) -> None:
        """
        Check that a spec can be sampled before any work is scheduled.

        Raises:
            ValidationError: On an unsupported spec, a non-power-of-two circulant
                grid or a Cholesky grid above the cap
        """
        self.sampler_for(spec).validate_spec(spec)

    def sample(self, spec: ProcessSpec, replicate: int, master_seed: int) -> PathGrid:
        """Sample replicate r of an experiment"""
        return self.sampler_for(spec).sample(spec, derive_seed(master_seed, replicate))

    async def map_replicates(
        self,
        spec: ProcessSpec,
        replicates: int,
        master_seed: int,
        fn: Optional[Callable[[PathGrid], T]] = None,
    ) -> List[T]:
        """
        Sample every replicate and apply fn to it on the worker pool.

        Results come back in replicate order whatever the number of threads.

        Args:
            spec: Process to sample
            replicates: Number of replicates
            master_seed: Experiment seed
            fn: Per-path reduction; the path itself when omitted

        Returns:
            list: fn(path_r) for r = 0 .. replicates - 1
        """
        if replicates < 1:
            raise ValidationError(f"replicates must be >= 1, got {replicates}")
        self.validate(spec)

        def work(r: int):
            path = self.sample(spec, r, master_seed)
            return fn(path) if fn is not None else path

        loop = asyncio.get_running_loop()
        logger.info("Sampling %d replicates of %s on %d threads", replicates, spec, self.threads)
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            futures = [loop.run_in_executor(pool, work, r) for r in range(replicates)]
            return list(await asyncio.gather(*futures))

    def collect(
        self,
        spec: ProcessSpec,
        replicates: int,
        master_seed: int,
        fn: Optional[Callable[[PathGrid], T]] = None,
    ) -> List[T]:
        """Blocking form of map_replicates for synchronous callers"""
        return asyncio.run(self.map_replicates(spec, replicates, master_seed, fn))
