import json
import logging
import math
import sys
from concurrent.futures import Executor, ProcessPoolExecutor
from contextlib import contextmanager
from typing import Any, Callable, Iterator, List, Optional, TypeVar

from ..config import logger
from ..errors import ConfigurationError

T = TypeVar('T')


def parse_list(text: str, cast: Callable[[str], T], name: str) -> List[T]:
    '''Parse a comma-separated CLI list like "16,64,256"'''
    try:
        values = [cast(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise ConfigurationError(f'{name} must be a comma-separated list, got {text!r}.')
    if not values:
        raise ConfigurationError(f'{name} must not be empty.')
    return values


@contextmanager
def episode_pool(threads: int) -> Iterator[Optional[Executor]]:
    '''Worker pool for per-seed episodes; None means run in-process'''
    if threads < 1:
        raise ConfigurationError(f'--threads must be >= 1, got {threads}.')
    if threads == 1:
        yield None
        return
    logger.debug(f'Starting a pool of {threads} workers')
    with ProcessPoolExecutor(max_workers=threads) as executor:
        yield executor


def show_progress() -> bool:
    '''Progress bars only for an interactive stderr at INFO or below'''
    return sys.stderr.isatty() and logger.getEffectiveLevel() <= logging.INFO


def _finite(value: Any) -> Any:
    if isinstance(value, float) and math.isinf(value):
        return 'inf'
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_finite(v) for v in value]
    return value


def print_json(data: Any) -> None:
    '''Write JSON to stdout; infinite values are spelled "inf"'''
    json.dump(_finite(data), sys.stdout, indent=2)
    sys.stdout.write('\n')
