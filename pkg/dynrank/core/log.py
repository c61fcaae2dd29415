import json
import logging
import multiprocessing
import os
import pathlib
import sys
from logging.config import dictConfig
from logging.handlers import RotatingFileHandler
from typing import Dict, Literal, Optional, Tuple, Union

from dynrank.core.paths import default_data_dir
from dynrank.utilities.singleton_meta import SingletonMeta

DEFAULT_LOG_PATH = pathlib.Path(default_data_dir(), 'log.log')
LOG_FILE_MAX_BYTES = 100_000_000

CONSOLE_FORMAT = '%(asctime)s - %(message)s'
FILE_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'

# between warning and error: summaries that stay visible at the default verbosity
MESSAGE_LEVEL = 45

LEVELS: Dict[str, int] = {
    'debug': logging.DEBUG,
    'info': logging.INFO,
    'warning': logging.WARNING,
    'error': logging.ERROR,
    'critical': logging.CRITICAL,
    'message': MESSAGE_LEVEL,
}

LevelType = Union[int, Literal['debug', 'info', 'warning', 'error', 'critical', 'message']]


def resolve_level(level: Union[LevelType, str]) -> int:
    """ Numeric level for a level name in any case, e.g. ``'WARNING'`` or ``'message'`` """
    if isinstance(level, int):
        return level
    try:
        return LEVELS[level.lower()]
    except KeyError:
        raise ValueError(f'Unknown logging level {level!r}, expected one of {list(LEVELS)}')


class Log(metaclass=SingletonMeta):
    """Process-wide owner of the root logger and of the prefixed adapters.

    The console handler writes to the error stream, so benchmark output on the
    standard output stays machine readable. A rotating file keeps the full log.

    Args:
        config_json_file: ``json`` file with a :func:`logging.config.dictConfig` setup; replaces the defaults
        output_logging_level: level of the logger and of its handlers
        log_file: file to write logs in, ``log.log`` in the data folder by default
        use_console: whether to attach the error-stream handler
    """

    __adapters: Dict[str, 'LoggerAdapter'] = {}

    def __init__(self,
                 config_json_file: str = 'default',
                 output_logging_level: int = logging.INFO,
                 log_file: Optional[Union[str, pathlib.Path]] = None,
                 use_console: bool = True):
        self.log_file = pathlib.Path(log_file or DEFAULT_LOG_PATH)
        self.logger = logging.getLogger()
        if config_json_file != 'default':
            self._configure_from_file(config_json_file)
        else:
            self._configure(output_logging_level, use_console)

    @staticmethod
    def setup_in_mp(logging_level: int, logs_dir: pathlib.Path):
        """ Sets up logging of a worker process: the level of the main process
        and a ``log_<process name>.log`` file of its own, without console output """
        process_name = multiprocessing.current_process().name
        Log(output_logging_level=logging_level,
            log_file=pathlib.Path(logs_dir, f'log_{process_name}.log'),
            use_console=False)

    def get_parameters(self) -> Tuple[int, pathlib.Path]:
        """ Arguments of :meth:`setup_in_mp` reproducing this setup in a worker """
        return self.logger.level, self.log_file.parent

    def reset_logging_level(self, logging_level: Union[LevelType, str]):
        """ Applies the level to the logger, its handlers and every adapter issued so far """
        logging_level = resolve_level(logging_level)
        self.logger.setLevel(logging_level)
        for handler in self.handlers:
            handler.setLevel(logging_level)
        for adapter in self.__adapters.values():
            adapter.logging_level = logging_level

    def get_adapter(self, prefix: str) -> 'LoggerAdapter':
        """ Adapter prefixing messages with ``prefix``, usually the emitting class name """
        adapter = self.__adapters.get(prefix)
        # adapters issued before the logging module was reloaded point to a stale root logger
        if adapter is None or adapter.logger is not self.logger:
            adapter = LoggerAdapter(self.logger, {'prefix': prefix})
            self.__adapters[prefix] = adapter
        return adapter

    def _configure(self, logging_level: int, use_console: bool):
        if use_console:
            self.logger.addHandler(_make_handler(logging.StreamHandler(sys.stderr), logging_level, CONSOLE_FORMAT))
        file_handler = RotatingFileHandler(self.log_file, maxBytes=LOG_FILE_MAX_BYTES, backupCount=1)
        self.logger.addHandler(_make_handler(file_handler, logging_level, FILE_FORMAT))
        self.logger.setLevel(logging_level)

    @staticmethod
    def _configure_from_file(config_file: str):
        try:
            with open(config_file, 'rt') as file:
                dictConfig(json.load(file))
        except Exception as ex:
            raise Exception(f'Can not open the log config file because of {ex}')

    @property
    def handlers(self):
        return self.logger.handlers

    def release_handlers(self):
        for handler in self.handlers:
            handler.close()

    def __str__(self):
        return f'Log object for {self.logger.name} module'

    def __repr__(self):
        return self.__str__()


def _make_handler(handler: logging.Handler, level: int, fmt: str) -> logging.Handler:
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(fmt))
    return handler


class LoggerAdapter(logging.LoggerAdapter):
    """ Logger view that prepends ``<prefix> - `` to every message """

    def __init__(self, logger: logging.Logger, extra: dict):
        super().__init__(logger=logger, extra=extra)
        self.logging_level = logger.level
        self.setLevel(self.logging_level)

    def process(self, msg, kwargs):
        self.logger.setLevel(self.logging_level)
        return f'{self.extra["prefix"]} - {msg}', kwargs

    def message(self, msg: str, **kwargs):
        """ Records a user-facing summary at :data:`MESSAGE_LEVEL` """
        self.log(MESSAGE_LEVEL, msg, **kwargs)

    def log_or_raise(self, level: LevelType, exc: Union[BaseException, object], **log_kwargs):
        """ Raises the exception inside a test session and logs it with its traceback otherwise.

        Called inside an ``except`` block, the exception being handled becomes
        the cause of the given one.

        Args:
            level: numeric level or its lower-case name, ``message`` included
            exc: exception to report; anything else is wrapped into ``Exception``
            log_kwargs: keyword arguments for :py:func:`logging.log`
        """
        _, handled, _ = sys.exc_info()
        if not isinstance(exc, BaseException):
            exc = Exception(exc)
        if handled is not None and handled is not exc:
            exc.__cause__ = handled
        if is_test_session():
            raise exc
        self.log(resolve_level(level), exc,
                 exc_info=log_kwargs.pop('exc_info', (type(exc), exc, exc.__traceback__)),
                 stacklevel=log_kwargs.pop('stacklevel', 2),
                 **log_kwargs)

    def __str__(self):
        return f'LoggerAdapter object for {self.extra["prefix"]} module'

    def __repr__(self):
        return self.__str__()


def is_test_session() -> bool:
    return 'PYTEST_CURRENT_TEST' in os.environ


def default_log(prefix: Optional[object] = 'default') -> LoggerAdapter:
    """ Adapter of the process-wide :class:`Log`

    Args:
        prefix: message prefix; objects are replaced with their class name
    """
    if not isinstance(prefix, str):
        prefix = prefix.__class__.__name__
    return Log().get_adapter(prefix=prefix)
