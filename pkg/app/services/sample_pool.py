"""
Chunked Monte Carlo execution.

Every chunk draws from its own Philox stream keyed by (seed, chunk index) and
results are merged in chunk order, so a run is reproducible from
(seed, samples) whatever the number of worker threads.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional

import numpy as np

from app.config.settings import config

logger = logging.getLogger(__name__)

ChunkFn = Callable[[np.random.Generator, int], Dict[str, np.ndarray]]


def chunk_generator(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, chunk])))


class SamplePool:
    """Runs a sampling function over fixed-size chunks, in threads when worthwhile"""

    def __init__(self, threads: Optional[int] = None, chunk_size: Optional[int] = None,
                 parallel_threshold: Optional[int] = None):
        mc_config = config.get_monte_carlo_config()
        self.logger = logging.getLogger(__name__)
        self.threads = threads or config.get_threads()
        self.chunk_size = chunk_size or mc_config.get('chunk_size', 20000)
        self.parallel_threshold = parallel_threshold or mc_config.get('parallel_threshold', 2)

    def chunk_sizes(self, samples: int) -> List[int]:
        full, rest = divmod(samples, self.chunk_size)
        return [self.chunk_size] * full + ([rest] if rest else [])

    def run(self, fn: ChunkFn, samples: int, seed: int) -> Dict[str, np.ndarray]:
        sizes = self.chunk_sizes(samples)
        if not sizes:
            return {}
        try:
            if self.threads == 1 or len(sizes) < self.parallel_threshold:
                self.logger.info(f"Sampling {samples} draws sequentially in {len(sizes)} chunks")
                parts = [fn(chunk_generator(seed, idx), size) for idx, size in enumerate(sizes)]
            else:
                self.logger.info(f"Sampling {samples} draws on {self.threads} threads in {len(sizes)} chunks")
                with ThreadPoolExecutor(max_workers=self.threads) as executor:
                    futures = [executor.submit(fn, chunk_generator(seed, idx), size) for idx, size in enumerate(sizes)]
                    parts = [f.result() for f in futures]
        except Exception as e:
            self.logger.error(f"Error in sample pool: {e}")
            raise
        return {key: np.concatenate([p[key] for p in parts]) for key in parts[0]}
