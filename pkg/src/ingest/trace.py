import io
from dataclasses import dataclass
from typing import BinaryIO, List, Sequence, Union

import numpy as np
import pandas as pd

from ..config import logger
from ..core.types import AccuracyProfile, ConfidenceGrid, CostModel, InstanceSpec
from ..errors import ConfigurationError, TraceParseError

TraceInput = Union[bytes, str, BinaryIO]


@dataclass(frozen=True)
class TraceRow:
    '''One logged inference: the local model's confidence and whether it was right'''
    confidence: float
    correct: int

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise TraceParseError(f'confidence {self.confidence} outside [0, 1]')
        if self.correct not in (0, 1):
            raise TraceParseError(f'correct flag {self.correct} not in {{0, 1}}')


@dataclass(frozen=True)
class QuantizedTrace:
    '''Trace rows mapped to grid bins, in file order'''
    grid: ConfidenceGrid
    bins: np.ndarray
    correct: np.ndarray
    bin_counts: np.ndarray
    bin_correct_counts: np.ndarray

    def __post_init__(self):
        k = len(self.grid)
        if self.bins.size and (self.bins.min() < 0 or self.bins.max() >= k):
            raise ConfigurationError('Quantized trace holds bins outside the grid.')
        if int(self.bin_counts.sum()) != len(self.bins):
            raise ConfigurationError('Quantized trace bin counts do not match its rows.')

    def __len__(self) -> int:
        return len(self.bins)

    @classmethod
    def from_rows(cls, grid: ConfidenceGrid, bins: np.ndarray, correct: np.ndarray) -> 'QuantizedTrace':
        k = len(grid)
        bins = np.asarray(bins, dtype=np.int64)
        correct = np.asarray(correct, dtype=bool)
        counts = np.bincount(bins, minlength=k)[:k] if bins.size else np.zeros(k, dtype=np.int64)
        hits = (np.bincount(bins, weights=correct, minlength=k)[:k].astype(np.int64)
                if bins.size else np.zeros(k, dtype=np.int64))
        return cls(grid, bins, correct, counts, hits)


def _open_text(source: TraceInput) -> io.StringIO:
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    elif isinstance(source, str):
        with open(source, 'rb') as f:
            data = f.read()
    else:
        data = source.read()
    try:
        return io.StringIO(data.decode('utf-8-sig'))
    except UnicodeDecodeError as e:
        raise TraceParseError(f'trace is not UTF-8: {e}')


def _is_number(text) -> bool:
    try:
        float(text)
        return True
    except (TypeError, ValueError):
        return False


def _check_field_counts(text: str) -> None:
    '''Every non-blank line must hold exactly two fields'''
    for line, content in enumerate(text.split('\n'), start=1):
        if content.strip() and content.count(',') != 1:
            raise TraceParseError(f'expected 2 fields (confidence,correct), got {content.count(",") + 1}', line)


def read_trace_frame(source: TraceInput) -> pd.DataFrame:
    '''Parse a `confidence,correct` CSV into a validated frame.

    An optional header is detected by a non-numeric first field. The frame
    index is the 1-based line number of each row.
    '''
    text = _open_text(source)
    _check_field_counts(text.getvalue())
    try:
        raw = pd.read_csv(text, header=None, names=['confidence', 'correct'], dtype=str, index_col=False,
                          skip_blank_lines=False, engine='python', on_bad_lines='error')
    except pd.errors.EmptyDataError:
        return pd.DataFrame({'confidence': pd.Series(dtype=float), 'correct': pd.Series(dtype=np.int8)})
    except pd.errors.ParserError as e:
        raise TraceParseError(str(e))

    raw.index = raw.index + 1
    raw = raw.dropna(how='all')
    if len(raw) and not _is_number(raw['confidence'].iloc[0]):
        raw = raw.iloc[1:]

    confidence = pd.to_numeric(raw['confidence'], errors='coerce')
    correct = pd.to_numeric(raw['correct'], errors='coerce')
    bad_conf = confidence.isna() | (confidence < 0) | (confidence > 1)
    bad_corr = ~correct.isin([0, 1])
    bad = bad_conf | bad_corr
    if bad.any():
        line = int(bad.idxmax())
        if bad_conf.loc[line]:
            raise TraceParseError(f'invalid confidence {raw.loc[line, "confidence"]!r}', line)
        raise TraceParseError(f'invalid correct flag {raw.loc[line, "correct"]!r}', line)

    frame = pd.DataFrame({'confidence': confidence.astype(float), 'correct': correct.astype(np.int8)})
    logger.debug(f'Parsed {len(frame)} trace rows')
    return frame


def parse_trace(source: TraceInput) -> List[TraceRow]:
    '''Parse a trace into rows, preserving order'''
    frame = read_trace_frame(source)
    return [TraceRow(c, int(y)) for c, y in zip(frame['confidence'].tolist(), frame['correct'].tolist())]


def bits_to_bins(bits: int) -> int:
    if bits < 1:
        raise ConfigurationError(f'Quantization needs at least 1 bit, got {bits}.')
    return 2 ** bits


def quantize(rows: Union[Sequence[TraceRow], pd.DataFrame], K: int) -> QuantizedTrace:
    '''Map confidences to K uniform bins: bin(c) = min(floor(c*K), K-1), labelled by midpoints'''
    if K < 1:
        raise ConfigurationError(f'Number of bins must be >= 1, got {K}.')
    if isinstance(rows, pd.DataFrame):
        confidence = rows['confidence'].to_numpy(dtype=np.float64)
        correct = rows['correct'].to_numpy().astype(bool)
    else:
        confidence = np.fromiter((r.confidence for r in rows), dtype=np.float64, count=len(rows))
        correct = np.fromiter((r.correct for r in rows), dtype=bool, count=len(rows))
    bins = np.minimum(np.floor(confidence * K).astype(np.int64), K - 1)
    return QuantizedTrace.from_rows(ConfidenceGrid.uniform(K), bins, correct)


def _fill_empty_bins(f_hat: np.ndarray, counts: np.ndarray) -> np.ndarray:
    '''Mean of the nearest observed bins on each side, or the single neighbour at the edges'''
    observed = np.flatnonzero(counts > 0)
    filled = f_hat.copy()
    for b in np.flatnonzero(counts == 0):
        left = observed[observed < b]
        right = observed[observed > b]
        neighbours = ([f_hat[left[-1]]] if left.size else []) + ([f_hat[right[0]]] if right.size else [])
        filled[b] = float(np.mean(neighbours))
    return filled


def estimate_instance(qt: QuantizedTrace, cost: CostModel) -> InstanceSpec:
    '''Empirical instance: per-bin accuracy and arrival frequency'''
    total = int(qt.bin_counts.sum())
    if total == 0:
        raise ConfigurationError('Cannot estimate an instance from a trace with no rows.')
    counts = qt.bin_counts.astype(np.float64)
    with np.errstate(invalid='ignore', divide='ignore'):
        f_hat = np.where(counts > 0, qt.bin_correct_counts / np.maximum(counts, 1), 0.0)
    empty = int((counts == 0).sum())
    if empty:
        logger.warning(f'{empty} of {len(counts)} bins are empty; their accuracy is interpolated')
        f_hat = _fill_empty_bins(f_hat, qt.bin_counts)
    weights = counts / total

    instance = InstanceSpec(grid=qt.grid, profile=AccuracyProfile(tuple(f_hat.tolist())),
                            cost=cost, weights=tuple(weights.tolist()))
    if not instance.profile.monotone:
        logger.warning('Estimated accuracy is not monotone in confidence')
    return instance


def calibration_table(qt: QuantizedTrace) -> pd.DataFrame:
    '''Per-bin count, accuracy and arrival share'''
    counts = qt.bin_counts
    total = max(int(counts.sum()), 1)
    with np.errstate(invalid='ignore', divide='ignore'):
        accuracy = np.where(counts > 0, qt.bin_correct_counts / np.maximum(counts, 1), np.nan)
    return pd.DataFrame({
        'bin': np.arange(len(counts)),
        'confidence': np.asarray(qt.grid.values),
        'count': counts,
        'correct': qt.bin_correct_counts,
        'accuracy': accuracy,
        'weight': counts / total,
    })


def write_quantized_trace(qt: QuantizedTrace, path: str) -> None:
    pd.DataFrame({'bin': qt.bins, 'correct': qt.correct.astype(np.int8)}).to_csv(path, index=False)


def load_quantized_trace(path: str, grid: ConfidenceGrid) -> QuantizedTrace:
    '''Read a `bin,correct` file written by write_quantized_trace'''
    try:
        frame = pd.read_csv(path, dtype={'bin': np.int64, 'correct': np.int8})
    except (OSError, ValueError) as e:
        raise TraceParseError(f'cannot read quantized trace {path}: {e}')
    if list(frame.columns) != ['bin', 'correct'] or not frame['correct'].isin([0, 1]).all():
        raise TraceParseError(f'{path} is not a bin,correct trace')
    return QuantizedTrace.from_rows(grid, frame['bin'].to_numpy(), frame['correct'].to_numpy())
