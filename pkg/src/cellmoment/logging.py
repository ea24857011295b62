'''
Package loggers. Handlers are only attached when the first record comes through,
so importing cellmoment as a library leaves logging configuration alone.

Env vars:
- CELLMOMENT_LOGS: level override, e.g. CELLMOMENT_LOGS=debug
- COLLAPSE_DEBUG_LOGS: redraw consecutive debug lines in place (handy for long random sweeps)
'''
from fractions import Fraction
import logging
import os
import sys
from typing import Any, Optional, Union, cast
import warnings

LevelIsh = Optional[Union[int, str]]


def _level(level: LevelIsh) -> int:
    env = os.environ.get('CELLMOMENT_LOGS')
    if env is not None:
        level = env
    if level is None:
        return logging.NOTSET
    if isinstance(level, str):
        return logging.getLevelName(level.upper())
    return level


_FMT = '[%(levelname)-7s %(asctime)s %(name)s %(filename)s:%(lineno)d] %(message)s'
_FMT_COLOR = '%(color)s' + _FMT.replace('] ', ']%(end_color)s ', 1)
_DATEFMT = '%H:%M:%S'


def _formatter() -> logging.Formatter:
    try:
        import logzero  # type: ignore[import]
    except ModuleNotFoundError:
        warnings.warn("install 'logzero' for colored logs")
        return logging.Formatter(fmt=_FMT, datefmt=_DATEFMT)
    return logzero.LogFormatter(fmt=_FMT_COLOR, datefmt=_DATEFMT)


def _plain(x: Any) -> Any:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (tuple, list)) and any(isinstance(y, (Fraction, tuple, list)) for y in x):
        return '(' + ', '.join(str(_plain(y)) for y in x) + ')'
    return x


class RationalArgs(logging.Filter):
    '''
    Points and matrices are tuples of Fractions; %s on those prints Fraction(1, 3) reprs.
    Renders them as (1/3, 0) instead.
    '''
    def filter(self, record: logging.LogRecord) -> bool:
        if isinstance(record.args, tuple):
            record.args = tuple(_plain(a) for a in record.args)
        return True


class AddExceptionTraceback(logging.Filter):
    '''
    logger.error(exc) doesn't attach the traceback on its own; the batch driver logs returned exceptions that way.
    '''
    def filter(self, record: logging.LogRecord) -> bool:
        exc = record.msg
        if record.levelno >= logging.ERROR and isinstance(exc, BaseException) and not record.exc_info:
            record.exc_info = (type(exc), exc, exc.__traceback__)
        return True


class CollapseDebugHandler(logging.StreamHandler):
    '''
    Consecutive one-line debug records overwrite each other; anything else starts a fresh line.
    '''
    def __init__(self) -> None:
        super().__init__(sys.stderr)
        self.pending = False

    def emit(self, record: logging.LogRecord) -> None:
        try:
            msg = self.format(record)
            transient = record.levelno <= logging.DEBUG and '\n' not in msg
            prefix = '\r\033[K' if self.pending and transient else ('\n' if self.pending else '')
            self.stream.write(prefix + msg + ('' if transient else '\n'))
            self.pending = transient
            self.flush()
        except Exception:
            self.handleError(record)


class _SetupOnFirstRecord(logging.Filter):
    def __init__(self, logger: logging.Logger) -> None:
        super().__init__()
        self.logger = logger

    def filter(self, record: logging.LogRecord) -> bool:
        lg = self.logger
        lg.removeFilter(self)
        collapse = bool(os.environ.get('COLLAPSE_DEBUG_LOGS'))
        h = CollapseDebugHandler() if collapse else logging.StreamHandler()
        h.setFormatter(_formatter())
        lg.addHandler(h)
        lg.propagate = False
        return True


class LazyLogger(logging.Logger):
    '''
    Usage: logger = LazyLogger('cellmoment', level='INFO'). Returns the plain logging.getLogger(name),
    with its level set and handler setup deferred to the first record.
    '''
    def __new__(cls, name: str, level: LevelIsh = 'INFO') -> 'LazyLogger':
        lg = logging.getLogger(name)
        if not getattr(lg, '_cellmoment_setup', False):
            lg._cellmoment_setup = True  # type: ignore[attr-defined]
            lg.setLevel(_level(level))
            lg.addFilter(AddExceptionTraceback())
            lg.addFilter(RationalArgs())
            lg.addFilter(_SetupOnFirstRecord(lg))
        return cast(LazyLogger, lg)
