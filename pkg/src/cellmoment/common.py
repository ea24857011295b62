from __future__ import annotations

from contextlib import contextmanager
import logging
from pathlib import Path
from time import perf_counter
from typing import Callable, Iterator, TypeVar, Union

from .logging import LazyLogger


T = TypeVar('T')
# batch workers hand back exceptions instead of raising them
Res = Union[T, Exception]

PathIsh = Union[str, Path]


logger = LazyLogger('cellmoment', level='INFO')


_UNITS = {'s': 1, 'ms': 10 ** 3, 'us': 10 ** 6}


@contextmanager
def measure(tag: str, *, logger: logging.Logger = logger, unit: str = 'ms') -> Iterator[Callable[[], float]]:
    '''
    Times the block and logs it at debug level. The yielded callable returns the seconds elapsed so far.
    '''
    start = perf_counter()
    yield lambda: perf_counter() - start
    logger.debug('[%s]: %.1f%s', tag, (perf_counter() - start) * _UNITS[unit], unit)
