"""When is a one-hot vector cheaper than sending each column address?

Two accountings live here. The bit-level one counts address bits only and
reproduces the textbook comparison (one 16-bit root plus 24-bit one-hot
extensions against 16 bits per serial address). The word-level one counts
whole 32-bit words, which is what the encoder actually pays for and what
``should_vectorize`` decides on.

The word-cost helpers are written with plain arithmetic so they accept
numpy integer arrays as well as ints.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import SpanTooLarge

MAX_CHAIN_LSB_WORDS = 2


@dataclass(frozen=True)
class VectorCostParams:
    nbits_root: int = 16
    nbits_offst: int = 24
    msb_free_span: int = 8

    def __post_init__(self):
        if min(self.nbits_root, self.nbits_offst, self.msb_free_span) <= 0:
            raise ValueError(f"cost parameters must be positive: {self}")

    @property
    def max_span(self) -> int:
        """Columns one chain of an MSB word and two LSB words can cover."""
        return self.msb_free_span + MAX_CHAIN_LSB_WORDS * self.nbits_offst


EVT_PLUS = VectorCostParams()


def _ceil_div(a, b):
    return -(-a // b)


def extension_words(span, params: VectorCostParams = EVT_PLUS):
    """One-hot extension words needed beyond the root word for ``span`` columns."""
    return (span > params.msb_free_span) * _ceil_div(span - params.msb_free_span, params.nbits_offst)


def vector_word_cost(span, params: VectorCostParams = EVT_PLUS):
    return 1 + extension_words(span, params)


def serial_word_cost(count):
    return count


def serial_cost_bits(n_events: int, params: VectorCostParams = EVT_PLUS) -> int:
    if n_events < 0:
        raise ValueError(f"negative event count {n_events}")
    return params.nbits_root * n_events


def _span(root: int, xs) -> int:
    xs = list(xs)
    if not xs:
        raise ValueError("empty column set")
    if min(xs) < root:
        raise ValueError(f"column {min(xs)} lies below root {root}")
    return max(xs) - root + 1


def vector_cost_bits(root: int, xs, params: VectorCostParams = EVT_PLUS) -> int:
    span = _span(root, xs)
    if span > params.max_span:
        raise SpanTooLarge(f"span {span} exceeds {params.max_span} columns")
    return params.nbits_root + params.nbits_offst * extension_words(span, params)


def should_vectorize(xs, params: VectorCostParams = EVT_PLUS) -> bool:
    """True when one vector chain rooted at ``min(xs)`` takes strictly fewer
    words than serial addresses. Ties go to serial, which keeps the
    finer timestamp."""
    xs = set(xs)
    span = _span(min(xs) if xs else 0, xs)
    if span > params.max_span:
        raise SpanTooLarge(f"span {span} exceeds {params.max_span} columns")
    return vector_word_cost(span, params) < serial_word_cost(len(xs))
