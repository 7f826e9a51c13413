# Trace parsing, quantization and empirical instances
from .trace import (
    TraceRow, QuantizedTrace, read_trace_frame, parse_trace, bits_to_bins, quantize,
    estimate_instance, calibration_table, write_quantized_trace, load_quantized_trace
)
