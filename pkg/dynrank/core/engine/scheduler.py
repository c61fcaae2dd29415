from typing import Callable, List, Optional, TypeVar

import numpy as np
from joblib import Parallel, delayed

T = TypeVar('T')


def split_chunks(vertices: np.ndarray, chunk_size: int) -> List[np.ndarray]:
    return [vertices[start:start + chunk_size] for start in range(0, len(vertices), chunk_size)]


class ChunkScheduler:
    """Distributes vertex chunks over a pool of worker threads.

    Chunks are handed out one at a time to whichever worker is idle, the
    equivalent of a dynamic schedule. With a single thread chunks run in
    order on the calling thread, which keeps results bit-reproducible.
    The pool is kept alive between :meth:`map` calls while the scheduler
    is used as a context manager.

    Args:
        threads: number of worker threads
        chunk_size: number of vertices per chunk
    """

    def __init__(self, threads: int, chunk_size: int):
        self.threads = threads
        self.chunk_size = chunk_size
        self._parallel: Optional[Parallel] = None

    def __enter__(self) -> 'ChunkScheduler':
        if self.threads > 1:
            self._parallel = Parallel(n_jobs=self.threads, backend='threading', batch_size=1)
            self._parallel.__enter__()
        return self

    def __exit__(self, *args):
        if self._parallel is not None:
            self._parallel.__exit__(*args)
            self._parallel = None
        return False

    def map(self, func: Callable[[np.ndarray], T], vertices: np.ndarray) -> List[T]:
        chunks = split_chunks(vertices, self.chunk_size)
        if self._parallel is None or len(chunks) < 2:
            return [func(chunk) for chunk in chunks]
        return self._parallel(delayed(func)(chunk) for chunk in chunks)
