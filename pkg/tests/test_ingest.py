import io

import numpy as np
import pandas as pd
import pytest

from src.core import ConfidenceGrid, CostModel
from src.errors import ConfigurationError, TraceParseError
from src.ingest import (
    TraceRow, bits_to_bins, calibration_table, estimate_instance, load_quantized_trace,
    parse_trace, quantize, read_trace_frame, write_quantized_trace
)


def test_parse_with_header():
    rows = parse_trace(b'confidence,correct\n0.93,1\n0.41,0')
    assert rows == [TraceRow(0.93, 1), TraceRow(0.41, 0)]


def test_parse_without_header_keeps_order():
    rows = parse_trace(b'0.2,0\n0.9,1\n0.5,1\n')
    assert [r.confidence for r in rows] == [0.2, 0.9, 0.5]


def test_parse_accepts_file_objects_and_paths(tmp_path):
    path = tmp_path / 'trace.csv'
    path.write_bytes(b'0.7,1\n')
    assert parse_trace(str(path)) == [TraceRow(0.7, 1)]
    assert parse_trace(io.BytesIO(b'0.7,1\n')) == [TraceRow(0.7, 1)]


def test_empty_trace_is_valid():
    assert parse_trace(b'') == []


@pytest.mark.parametrize('data, line', [
    (b'0.5,2', 1),
    (b'confidence,correct\n0.5,1\n1.5,0\n', 3),
    (b'0.5,1\nabc,1\n', 2),
    (b'0.5,1\n0.4,\n', 2),
    (b'0.5,1,9\n0.7,1\n', 1),
    (b'0.5,1\n0.7,1,9\n', 2),
    (b'confidence,correct\n0.7\n', 2),
])
def test_parse_errors_carry_line_number(data, line):
    with pytest.raises(TraceParseError) as err:
        parse_trace(data)
    assert err.value.line == line
    assert str(err.value).startswith(f'line {line}:')


@pytest.mark.parametrize('confidence, expected', [(1.0, 15), (0.0, 0), (0.5, 8), (0.999, 15), (0.0624, 0)])
def test_quantize_bins(confidence, expected):
    qt = quantize([TraceRow(confidence, 1)], 16)
    assert qt.bins.tolist() == [expected]


def test_quantize_grid_midpoints():
    qt = quantize([TraceRow(0.1, 1)], 4)
    assert qt.grid == ConfidenceGrid.uniform(4)


def test_quantize_rejects_bad_k():
    with pytest.raises(ConfigurationError):
        quantize([], 0)


def test_quantize_frame_matches_rows():
    data = b'0.05,1\n0.55,0\n0.95,1\n0.52,1\n'
    by_rows = quantize(parse_trace(data), 4)
    by_frame = quantize(read_trace_frame(data), 4)
    assert by_rows.bins.tolist() == by_frame.bins.tolist() == [0, 2, 3, 2]
    assert by_frame.bin_counts.tolist() == [1, 0, 2, 1]
    assert by_frame.bin_correct_counts.tolist() == [1, 0, 1, 1]


def test_bits_to_bins():
    assert bits_to_bins(4) == 16
    with pytest.raises(ConfigurationError):
        bits_to_bins(0)


def _trace(pairs):
    rows = []
    for confidence, correct, n in pairs:
        rows += [TraceRow(confidence, 1)] * correct + [TraceRow(confidence, 0)] * (n - correct)
    return rows


def test_estimate_empirical_accuracy_and_weights():
    qt = quantize(_trace([(0.3, 80, 100), (0.8, 50, 100)]), 2)
    instance = estimate_instance(qt, CostModel.fixed(0.5))
    assert instance.profile.f == pytest.approx((0.8, 0.5))
    assert instance.weights == pytest.approx((0.5, 0.5))
    assert not instance.profile.monotone


def test_estimate_single_bin_is_one_hot():
    qt = quantize(_trace([(0.9, 3, 4)]), 4)
    instance = estimate_instance(qt, CostModel.fixed(0.5))
    assert instance.weights == pytest.approx((0.0, 0.0, 0.0, 1.0))
    assert instance.profile.f == pytest.approx((0.75, 0.75, 0.75, 0.75))


def test_estimate_interpolates_empty_bins(caplog):
    qt = quantize(_trace([(0.1, 6, 10), (0.9, 8, 10)]), 3)
    instance = estimate_instance(qt, CostModel.fixed(0.5))
    assert instance.profile.f[1] == pytest.approx(0.7)
    assert instance.weights[1] == 0.0
    assert 'empty' in caplog.text


def test_estimate_rejects_empty_trace():
    with pytest.raises(ConfigurationError):
        estimate_instance(quantize([], 4), CostModel.fixed(0.5))


def test_calibration_table():
    qt = quantize(_trace([(0.1, 6, 10), (0.9, 8, 10)]), 2)
    table = calibration_table(qt)
    assert table['count'].tolist() == [10, 10]
    assert table['accuracy'].tolist() == pytest.approx([0.6, 0.8])
    assert table['confidence'].tolist() == [0.25, 0.75]
    assert table['weight'].sum() == pytest.approx(1.0)


def test_calibration_table_empty_bin_has_no_accuracy():
    table = calibration_table(quantize(_trace([(0.1, 1, 2)]), 2))
    assert np.isnan(table['accuracy'].iloc[1])


def test_quantized_trace_file_round_trip(tmp_path):
    qt = quantize(parse_trace(b'0.05,1\n0.55,0\n0.95,1\n'), 4)
    path = tmp_path / 'trace.csv'
    write_quantized_trace(qt, str(path))
    assert path.read_text(encoding='utf-8').splitlines()[0] == 'bin,correct'
    loaded = load_quantized_trace(str(path), qt.grid)
    assert loaded.bins.tolist() == qt.bins.tolist()
    assert loaded.correct.tolist() == qt.correct.tolist()


def test_load_quantized_trace_rejects_other_files(tmp_path):
    path = tmp_path / 'other.csv'
    path.write_text('confidence,correct\n0.5,1\n', encoding='utf-8')
    with pytest.raises(TraceParseError):
        load_quantized_trace(str(path), ConfidenceGrid.uniform(4))


def _sample_and_estimate(truth, n: int, seed: int):
    '''Sample a trace at bin midpoints from a known instance, then quantize and estimate it'''
    f, w, k = truth.f_array, truth.weight_array, truth.k
    rng = np.random.default_rng(seed)
    bins = rng.choice(k, size=n, p=w)
    correct = rng.random(n) < f[bins]
    frame = pd.DataFrame({'confidence': (bins + 0.5) / k, 'correct': correct.astype(np.int8)})
    qt = quantize(frame, k)
    assert qt.bins.tolist() == bins.tolist()
    return qt, estimate_instance(qt, truth.cost)


def _assert_within_three_se(truth, qt, estimate, n: int):
    f, w = truth.f_array, truth.weight_array
    assert np.all(np.abs(estimate.f_array - f) <= 3 * np.sqrt(f * (1 - f) / qt.bin_counts))
    assert np.all(np.abs(estimate.weight_array - w) <= 3 * np.sqrt(w * (1 - w) / n))


def test_estimate_recovers_sampled_instance(instance_a):
    qt, estimate = _sample_and_estimate(instance_a, 20000, seed=11)
    _assert_within_three_se(instance_a, qt, estimate, 20000)


@pytest.mark.slow
def test_estimate_recovers_sampled_instance_full_trace(instance_a):
    qt, estimate = _sample_and_estimate(instance_a, 10 ** 6, seed=12)
    _assert_within_three_se(instance_a, qt, estimate, 10 ** 6)
