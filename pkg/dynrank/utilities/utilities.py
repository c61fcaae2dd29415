import os
from typing import Optional

from joblib import cpu_count

from dynrank.core.constants import THREADS_ENV_VAR


def determine_threads(threads: Optional[int] = None) -> int:
    """ Resolves the number of worker threads for engine runs.

    Explicit value wins over the ``DYNRANK_THREADS`` environment variable,
    which wins over the number of available CPUs. Negative values count back
    from the CPU number as joblib does (``-1`` means all CPUs).
    """
    if threads is None:
        env_value = os.environ.get(THREADS_ENV_VAR)
        if env_value:
            try:
                threads = int(env_value)
            except ValueError:
                raise ValueError(f'{THREADS_ENV_VAR} must be an integer, got {env_value!r}')
        else:
            threads = -1

    cpu_num = cpu_count()
    if threads > cpu_num:
        threads = cpu_num
    elif threads <= 0:
        if threads <= -cpu_num - 1 or threads == 0:
            raise ValueError(f'Invalid thread count {threads}: expected a positive count '
                             f'or a negative one not below {-cpu_num}')
        threads = cpu_num + 1 + threads
    return threads
