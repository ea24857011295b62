from __future__ import annotations

import importlib.util
import os
from pathlib import Path
from typing import TYPE_CHECKING, Any, List, NamedTuple, Optional, Sequence

from .common import PathIsh, logger

if TYPE_CHECKING:
    from .catalog import CatalogEntry


DEFAULT_CAP = 5

FORMATS = ('json', 'csv', 'text')


class ConfigError(Exception):
    pass


class RunConfig(NamedTuple):
    # above this dimension anything that enumerates polytope vertices refuses to run
    CAP: int = DEFAULT_CAP

    # rerun the equality chain for every deep hole, not just the lexicographically least one
    ALL_DEEP_HOLES: bool = False

    # 0 means Monte-Carlo cross-checks are off
    MC_SAMPLES: int = 0
    SEED: int = 0

    FORMAT: str = 'text'

    # verify/random write reports here instead of stdout; --save with this unset uses the user data dir
    OUTPUT_DIR: Optional[PathIsh] = None

    # extra catalog entries: CatalogEntry objects or (name, gram) pairs
    LATTICES: List[Any] = []

    @property
    def cap(self) -> int:
        env = os.environ.get('HLR_CAP', None)
        if env is not None:
            try:
                return int(env)
            except ValueError as e:
                raise ConfigError(f'HLR_CAP should be an integer, got {env!r}') from e
        return self.CAP

    @property
    def output_dir(self) -> Path:
        odir = self.OUTPUT_DIR
        opath = default_output_dir() if odir is None else Path(odir)
        opath.mkdir(exist_ok=True, parents=True)
        return opath

    @property
    def lattices(self) -> Sequence[CatalogEntry]:
        from .catalog import CatalogEntry, entry

        res = []
        for x in self.LATTICES:
            if isinstance(x, CatalogEntry):
                res.append(x)
            else:
                name, gram = x
                res.append(entry(name, gram, note='from config'))
        return res

    def check(self) -> None:
        if self.cap < 1:
            raise ConfigError(f'dimension cap should be >= 1, got {self.cap}')
        if self.MC_SAMPLES < 0:
            raise ConfigError(f'Monte-Carlo sample count should be >= 0, got {self.MC_SAMPLES}')
        if self.FORMAT not in FORMATS:
            raise ConfigError(f'unknown output format {self.FORMAT!r}, expected one of {FORMATS}')


instance: Optional[RunConfig] = None


def has() -> bool:
    return instance is not None


def get() -> RunConfig:
    assert instance is not None, "Expected config to be set, but it's not"
    return instance


def reset() -> None:
    global instance
    assert instance is not None
    instance = None


def import_config(config_file: PathIsh) -> RunConfig:
    '''
    Executes the file as a module and picks up the RunConfig fields it defines.
    '''
    p = Path(config_file)
    if not p.is_file():
        raise ConfigError(f'config file {p} does not exist')
    spec = importlib.util.spec_from_file_location(f'cellmoment_config_{p.stem}', p)
    if spec is None or spec.loader is None:
        raise ConfigError(f"couldn't load {p} as a Python module")
    mod = importlib.util.module_from_spec(spec)
    try:
        spec.loader.exec_module(mod)
    except Exception as e:
        raise ConfigError(f'error while executing {p}: {e}') from e

    fields = set(RunConfig._fields)
    unknown = sorted(k for k in vars(mod) if k.isupper() and k not in fields)
    if unknown:
        # most likely a typo, e.g. MC_SAMPLE
        logger.warning('%s: ignoring unknown settings %s (known: %s)', p, unknown, sorted(fields))
    return RunConfig(**{k: v for k, v in vars(mod).items() if k in fields})


def dimension_cap(explicit: Optional[int] = None) -> int:
    if explicit is not None:
        return explicit
    if has():
        return get().cap
    return RunConfig().cap


def default_output_dir() -> Path:
    under_test = os.environ.get('PYTEST_CURRENT_TEST') is not None
    name = 'cellmoment-test' if under_test else 'cellmoment'
    import appdirs as ad  # type: ignore[import]
    return Path(ad.AppDirs(appname=name).user_data_dir)


def use_cores() -> Optional[int]:
    '''
    None: process lattices sequentially; 0: use all cores; otherwise the number of workers.
    '''
    cs = os.environ.get('CELLMOMENT_CORES', None)
    if cs is None:
        return None
    try:
        return int(cs)
    except ValueError:  # any other value means 'use all'
        return 0
