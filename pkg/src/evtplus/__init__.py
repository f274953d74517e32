"""Encoder, decoder and tooling for the EVT+ event-sensor data format."""

__version__ = "0.1.0"

from .container import Segment, decode_recording, read_recording, write_recording
from .costmodel import (
    EVT_PLUS, VectorCostParams, serial_cost_bits, should_vectorize, vector_cost_bits,
)
from .decoder import (
    DecoderState, EventRecord, StreamDecoder, assemble_timestamp, decode_payload,
    expand_vector, iter_events,
)
from .encoder import EncodeConfig, VectorPolicy, encode_payload, partition_row
from .errors import Diagnostic, EvtError
from .genstream import GenParams, generate
from .header import (
    DataModality, HeaderRecord, PointerTable, SensorModality, decode_header, encode_header,
)
from .index import build_pointer_table, seek
from .wire import DatumCode, Polarity, decode_word, encode_word

__all__ = [
    "DataModality", "DatumCode", "DecoderState", "Diagnostic", "EVT_PLUS", "EncodeConfig",
    "EventRecord", "EvtError", "GenParams", "HeaderRecord", "PointerTable", "Polarity",
    "Segment", "SensorModality", "StreamDecoder", "VectorCostParams", "VectorPolicy",
    "assemble_timestamp", "build_pointer_table", "decode_header", "decode_payload",
    "decode_recording", "decode_word", "encode_header", "encode_payload", "encode_word",
    "expand_vector", "generate", "iter_events", "partition_row", "read_recording", "seek",
    "serial_cost_bits", "should_vectorize", "vector_cost_bits", "write_recording",
]
