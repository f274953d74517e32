"""Exception hierarchy shared by every EVT+ layer.

Each error class name doubles as its machine-readable code, which is what
lenient decoders put into diagnostics and what the CLI prints after
``code=``.
"""

from __future__ import annotations

from typing import NamedTuple


class EvtError(Exception):
    """Base class for all format errors."""

    def __init__(self, detail: str = "", offset: int | None = None):
        self.detail = detail
        self.offset = offset
        msg = detail if offset is None else f"{detail} (byte offset {offset})"
        super().__init__(msg)

    @property
    def code(self) -> str:
        return type(self).__name__


class Diagnostic(NamedTuple):
    offset: int
    code: str
    detail: str

    def __str__(self) -> str:
        return f"offset={self.offset} code={self.code} detail={self.detail}"

    @classmethod
    def from_error(cls, err: EvtError, offset: int | None = None) -> Diagnostic:
        if offset is None:
            offset = err.offset if err.offset is not None else 0
        return cls(offset, err.code, err.detail)


# word level
class FieldOverflow(EvtError, ValueError):
    pass


class UnknownDatumCode(EvtError):
    pass


class NonzeroPadding(EvtError):
    pass


# header / container level
class NonAsciiModel(EvtError, ValueError):
    pass


class InvalidHeader(EvtError, ValueError):
    pass


class BadHeaderId(EvtError):
    pass


class Truncated(EvtError):
    pass


class ReservedNonzero(EvtError):
    pass


class CountMismatch(EvtError, ValueError):
    pass


class TrailingGarbage(EvtError):
    pass


# payload decoding
class PayloadError(EvtError):
    pass


class MissingTimestamp(PayloadError):
    pass


class MissingRow(PayloadError):
    pass


class OrphanVectorLsb(PayloadError):
    pass


class OrphanIntensity(PayloadError):
    pass


class DanglingMixedMsb(PayloadError):
    pass


class IntensityUnderrun(PayloadError):
    pass


class ModalityViolation(PayloadError):
    pass


class ColumnOverflow(PayloadError):
    pass


class AddressOutOfRange(PayloadError):
    pass


# encoding
class UnsortedInput(EvtError, ValueError):
    pass


class MissingIntensity(EvtError, ValueError):
    pass


class UnexpectedIntensity(EvtError, ValueError):
    pass


class SpanTooLarge(EvtError, ValueError):
    pass


# index
class UndecodablePayload(EvtError):
    pass


class SentinelInterval(EvtError, LookupError):
    pass


# generators
class BadParams(EvtError, ValueError):
    pass
