"""Waveform ingestion and assertion evaluation over sampled traces."""

from .evaluate import evaluate
from .junit import junit_xml
from .model import (
    ClockMismatch,
    ClockNotFound,
    EvalReport,
    InstanceTooLarge,
    MalformedVcd,
    NoEdges,
    SignalMissingFromTrace,
    Trace,
    TraceError,
)
from .oracle import oracle_evaluate
from .vcd import VcdWriter, ingest_vcd, read_vcd_file, trace_to_vcd

__all__ = [
    "ClockMismatch", "ClockNotFound", "EvalReport", "InstanceTooLarge", "MalformedVcd", "NoEdges",
    "SignalMissingFromTrace", "Trace", "TraceError", "VcdWriter", "evaluate", "ingest_vcd",
    "junit_xml", "oracle_evaluate", "read_vcd_file", "trace_to_vcd",
]
