import time
from typing import Optional


class Timer:
    """ Monotonic wall-clock timer with nanosecond resolution.

    Usage::

        with Timer() as timer:
            ...
        timer.seconds
    """

    def __init__(self):
        self._start_ns: Optional[int] = None
        self._stop_ns: Optional[int] = None

    def __enter__(self) -> 'Timer':
        self.start()
        return self

    def __exit__(self, *args):
        self.stop()
        return False

    def start(self):
        self._start_ns = time.perf_counter_ns()
        self._stop_ns = None

    def stop(self):
        self._stop_ns = time.perf_counter_ns()

    @property
    def elapsed_ns(self) -> int:
        if self._start_ns is None:
            return 0
        stop = self._stop_ns if self._stop_ns is not None else time.perf_counter_ns()
        return stop - self._start_ns

    @property
    def seconds(self) -> float:
        return self.elapsed_ns / 1e9
