import random
from typing import List, Optional

import numpy as np

# Bit generator behind np.random.default_rng; recorded with benchmark results
RNG_ALGORITHM = 'PCG64'


def make_rng(seed: Optional[int]) -> np.random.Generator:
    """ Creates an independent generator for the given 64-bit seed """
    return np.random.Generator(np.random.PCG64(seed))


def derive_seeds(base_seed: int, count: int) -> List[int]:
    """ Splits ``base_seed`` into ``count`` statistically independent 64-bit seeds.
    The same base seed always yields the same list. """
    children = np.random.SeedSequence(base_seed).spawn(count)
    return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in children]


def set_random_seed(seed: Optional[int]):
    """ Seeds the global numpy and ``random`` generators """
    if seed is not None:
        np.random.seed(seed)
        random.seed(seed)
