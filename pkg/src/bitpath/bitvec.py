"""Fixed-universe bit-vectors with a word-aligned run-length representation.

A vector addresses a fixed number of bit positions (the "universe", one bit
per graph edge) and is frozen after construction.  Payloads are sequences of
64-bit words, kept either plain or run-length encoded: maximal runs of all-0
or all-1 words become fill tokens, everything else stays a literal word.
Intersection walks both payloads run-at-a-time, so compressed inputs are
never expanded into full plain copies.
"""

from __future__ import annotations

import struct
from typing import Iterable, Iterator, Sequence

import numpy as np

WORD_BITS = 64
ALL_ONES = (1 << WORD_BITS) - 1

PLAIN = 0
RUN_LENGTH = 1

# Serialized run-length token: top bit set => fill, bit 62 = fill value,
# low 62 bits = run length in words.  A literal is a zero marker word
# followed by the raw word.
_FILL_FLAG = 1 << 63
_FILL_VALUE = 1 << 62
_RUN_MASK = (1 << 62) - 1

_HEADER = struct.Struct("<BQQQ")  # tag, universe_size, ones_count, payload words

# In-memory token: (is_fill, value, nwords).  Fill tokens carry the fill bit
# in `value`; literal tokens carry the raw word and always span one word.
Token = tuple[bool, int, int]


class BitVectorError(ValueError):
    """Malformed construction input or serialized payload."""


def word_count(universe_size: int) -> int:
    return (universe_size + WORD_BITS - 1) // WORD_BITS


def _tail_mask(universe_size: int) -> int:
    """Mask of valid bits in the final word."""
    rem = universe_size % WORD_BITS
    return ALL_ONES if rem == 0 else (1 << rem) - 1


def _popcount(words: np.ndarray) -> int:
    return int(np.bitwise_count(words).sum()) if len(words) else 0


def _encode_tokens(words: np.ndarray, universe_size: int) -> tuple[list[Token], int]:
    """Tokenize a plain word array.

    Returns the token list and the serialized payload word count (fills take
    one word, literals two: marker plus raw word).
    """
    n = len(words)
    if n == 0:
        return [], 0
    classes = np.full(n, 2, dtype=np.int8)
    classes[words == 0] = 0
    classes[words == np.uint64(ALL_ONES)] = 1
    # The trailing partial word joins a 1-run when all its valid bits are set;
    # decoding masks the padding back off.
    tail = _tail_mask(universe_size)
    if tail != ALL_ONES and int(words[-1]) == tail:
        classes[-1] = 1
    tokens: list[Token] = []
    payload_words = 0
    starts = [0, *(np.flatnonzero(np.diff(classes)) + 1).tolist(), n]
    for seg_start, seg_end in zip(starts, starts[1:]):
        cls = int(classes[seg_start])
        if cls == 2:
            for w in words[seg_start:seg_end].tolist():
                tokens.append((False, w, 1))
            payload_words += 2 * (seg_end - seg_start)
        else:
            tokens.append((True, cls, seg_end - seg_start))
            payload_words += 1
    return tokens, payload_words


def _decode_tokens(tokens: list[Token], universe_size: int) -> np.ndarray:
    n = word_count(universe_size)
    out = np.zeros(n, dtype=np.uint64)
    pos = 0
    for is_fill, value, nwords in tokens:
        if pos + nwords > n:
            raise BitVectorError("run-length payload decodes past the universe")
        if is_fill:
            if value:
                out[pos : pos + nwords] = np.uint64(ALL_ONES)
        else:
            out[pos] = np.uint64(value)
        pos += nwords
    if pos != n:
        raise BitVectorError(f"run-length payload decodes to {pos} words, expected {n}")
    if n:
        out[-1] &= np.uint64(_tail_mask(universe_size))
    out.setflags(write=False)
    return out


def _count_tokens(tokens: list[Token], universe_size: int) -> int:
    """Population count straight off the token stream (tail padding excluded)."""
    n = word_count(universe_size)
    tail_bits = universe_size - WORD_BITS * (n - 1) if n else 0
    count = 0
    pos = 0
    for is_fill, value, nwords in tokens:
        if is_fill:
            if value:
                count += WORD_BITS * nwords
                if pos + nwords == n:
                    count -= WORD_BITS - tail_bits
        else:
            word = value & _tail_mask(universe_size) if pos == n - 1 else value
            count += word.bit_count()
        pos += nwords
    return count


class CompressedBitVector:
    """Immutable bit set over ``universe_size`` positions.

    Construct through :meth:`from_positions` or :meth:`from_words`; the
    representation is picked by the 50% rule unless compression is disabled.
    """

    __slots__ = ("universe_size", "representation", "ones_count", "_words", "_tokens")

    def __init__(
        self,
        universe_size: int,
        representation: int,
        ones_count: int,
        words: np.ndarray | None,
        tokens: list[Token] | None,
    ):
        self.universe_size = universe_size
        self.representation = representation
        self.ones_count = ones_count
        self._words = words
        self._tokens = tokens

    @classmethod
    def from_words(
        cls,
        words: Sequence[int] | np.ndarray,
        universe_size: int | None = None,
        compress: bool = True,
    ) -> "CompressedBitVector":
        """Build from a plain word sequence, choosing the representation.

        Run-length form is used iff its serialized payload occupies at most
        half the plain word count.  With ``compress=False`` the vector stays
        plain regardless (used for the per-label indexes, whose interleaved
        bits defeat run-length coding).
        """
        arr = np.ascontiguousarray(words, dtype=np.uint64)
        if universe_size is None:
            universe_size = WORD_BITS * len(arr)
        if len(arr) != word_count(universe_size):
            raise BitVectorError(
                f"{len(arr)} words cannot back a universe of {universe_size} bits"
            )
        if len(arr):
            arr[-1] &= np.uint64(_tail_mask(universe_size))
        arr.setflags(write=False)
        ones = _popcount(arr)
        if compress:
            tokens, payload_words = _encode_tokens(arr, universe_size)
            if 2 * payload_words <= len(arr):
                return cls(universe_size, RUN_LENGTH, ones, None, tokens)
        return cls(universe_size, PLAIN, ones, arr, None)

    @classmethod
    def from_positions(
        cls,
        positions: Iterable[int],
        universe_size: int,
        compress: bool = True,
    ) -> "CompressedBitVector":
        """Build from strictly ascending bit positions."""
        words = np.zeros(word_count(universe_size), dtype=np.uint64)
        prev = -1
        for i, pos in enumerate(positions):
            if pos <= prev:
                raise BitVectorError(f"positions must be strictly ascending at index {i}")
            if pos >= universe_size:
                raise BitVectorError(
                    f"position {pos} at index {i} out of range for universe {universe_size}"
                )
            words[pos >> 6] |= np.uint64(1 << (pos & 63))
            prev = pos
        return cls.from_words(words, universe_size, compress=compress)

    @classmethod
    def empty(cls, universe_size: int) -> "CompressedBitVector":
        return cls.from_positions((), universe_size)

    def decoded_words(self) -> np.ndarray:
        """The plain word array (read-only; decoded on demand for RLE)."""
        if self.representation == PLAIN:
            return self._words
        return _decode_tokens(self._tokens, self.universe_size)

    def iter_ones(self) -> Iterator[int]:
        """Yield set bit positions in ascending order."""
        if self.representation == PLAIN:
            words = self._words
            for i in np.flatnonzero(words).tolist():
                w = int(words[i])
                base = i << 6
                while w:
                    lsb = w & -w
                    yield base + lsb.bit_length() - 1
                    w ^= lsb
            return
        pos = 0
        for is_fill, value, nwords in self._tokens:
            if is_fill:
                if value:
                    start = pos << 6
                    yield from range(start, min(start + (nwords << 6), self.universe_size))
                pos += nwords
            else:
                w = value
                base = pos << 6
                while w:
                    lsb = w & -w
                    bit = base + lsb.bit_length() - 1
                    if bit < self.universe_size:
                        yield bit
                    w ^= lsb
                pos += 1

    def _runs(self) -> list[tuple[int, int, np.ndarray | None]]:
        """Payload as (kind, nwords, words) runs; kind 0/1 fills, 2 literals."""
        n = word_count(self.universe_size)
        if self.representation == PLAIN:
            return [(2, n, self._words)] if n else []
        runs: list[tuple[int, int, np.ndarray | None]] = []
        literals: list[int] = []
        for is_fill, value, nwords in self._tokens:
            if is_fill:
                if literals:
                    runs.append((2, len(literals), np.array(literals, dtype=np.uint64)))
                    literals = []
                runs.append((value, nwords, None))
            else:
                literals.append(value)
        if literals:
            runs.append((2, len(literals), np.array(literals, dtype=np.uint64)))
        return runs

    def to_bytes(self) -> bytes:
        header = _HEADER.pack(
            self.representation, self.universe_size, self.ones_count, self.payload_word_count()
        )
        if self.representation == PLAIN:
            return header + self._words.astype("<u8").tobytes()
        out: list[int] = []
        for is_fill, value, nwords in self._tokens:
            if is_fill:
                out.append(_FILL_FLAG | (_FILL_VALUE if value else 0) | nwords)
            else:
                out.append(0)
                out.append(value)
        return header + np.array(out, dtype=np.uint64).astype("<u8").tobytes()

    def payload_word_count(self) -> int:
        if self.representation == PLAIN:
            return len(self._words)
        return sum(1 if is_fill else 2 for is_fill, _, _ in self._tokens)

    def serialized_size(self) -> int:
        return _HEADER.size + 8 * self.payload_word_count()

    @classmethod
    def from_bytes(cls, buf: bytes, offset: int = 0) -> tuple["CompressedBitVector", int]:
        """Parse one serialized vector, validating structure and counts."""
        if len(buf) < offset + _HEADER.size:
            raise BitVectorError("truncated bit-vector header")
        tag, universe_size, ones, payload_words = _HEADER.unpack_from(buf, offset)
        offset += _HEADER.size
        end = offset + 8 * payload_words
        if len(buf) < end:
            raise BitVectorError("truncated bit-vector payload")
        raw = np.frombuffer(buf, dtype="<u8", count=payload_words, offset=offset)
        if tag == PLAIN:
            if payload_words != word_count(universe_size):
                raise BitVectorError(
                    f"plain payload of {payload_words} words for universe {universe_size}"
                )
            if payload_words and int(raw[-1]) & ~_tail_mask(universe_size):
                raise BitVectorError("padding bits set beyond the universe")
            if _popcount(raw) != ones:
                raise BitVectorError("stored ones_count disagrees with payload")
            return cls(universe_size, PLAIN, ones, raw, None), end
        if tag != RUN_LENGTH:
            raise BitVectorError(f"unknown representation tag {tag}")
        tokens: list[Token] = []
        decoded = 0
        prev_fill: int | None = None
        i = 0
        while i < payload_words:
            word = int(raw[i])
            if word & _FILL_FLAG:
                run = word & _RUN_MASK
                bit = 1 if word & _FILL_VALUE else 0
                if run == 0:
                    raise BitVectorError("zero-length fill token")
                if prev_fill == bit:
                    raise BitVectorError("adjacent fill tokens share a fill bit")
                tokens.append((True, bit, run))
                decoded += run
                prev_fill = bit
                i += 1
            else:
                if word != 0:
                    raise BitVectorError("literal marker word is not zero")
                if i + 1 >= payload_words:
                    raise BitVectorError("literal marker without literal word")
                tokens.append((False, int(raw[i + 1]), 1))
                decoded += 1
                prev_fill = None
                i += 2
        if decoded != word_count(universe_size):
            raise BitVectorError(
                f"run-length payload decodes to {decoded} words, "
                f"expected {word_count(universe_size)}"
            )
        if _count_tokens(tokens, universe_size) != ones:
            raise BitVectorError("stored ones_count disagrees with payload")
        return cls(universe_size, RUN_LENGTH, ones, None, tokens), end

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CompressedBitVector):
            return NotImplemented
        return self.universe_size == other.universe_size and bool(
            np.array_equal(self.decoded_words(), other.decoded_words())
        )

    __hash__ = None  # mutable-equality semantics; not hashable

    def __repr__(self) -> str:
        kind = "plain" if self.representation == PLAIN else "rle"
        return f"<CompressedBitVector {kind} universe={self.universe_size} ones={self.ones_count}>"


def build_from_positions(positions: Iterable[int], universe_size: int) -> CompressedBitVector:
    return CompressedBitVector.from_positions(positions, universe_size)


def choose_representation(
    plain_words: Sequence[int] | np.ndarray, universe_size: int | None = None
) -> CompressedBitVector:
    return CompressedBitVector.from_words(plain_words, universe_size)


def intersect(a: CompressedBitVector, b: CompressedBitVector) -> CompressedBitVector:
    """Bitwise AND, processing fills run-at-a-time.

    The result is always plain: intersections are short-lived query
    intermediates that get counted and iterated, not stored.
    """
    if a.universe_size != b.universe_size:
        raise BitVectorError(
            f"universe mismatch: {a.universe_size} != {b.universe_size}"
        )
    universe = a.universe_size
    n = word_count(universe)
    if n == 0 or a.ones_count == 0 or b.ones_count == 0:
        return CompressedBitVector.from_positions((), universe, compress=False)
    out = np.zeros(n, dtype=np.uint64)
    runs_a, runs_b = a._runs(), b._runs()
    ia = ib = 0
    off_a = off_b = pos = 0
    while pos < n:
        kind_a, len_a, words_a = runs_a[ia]
        kind_b, len_b, words_b = runs_b[ib]
        take = min(len_a - off_a, len_b - off_b)
        if kind_a != 0 and kind_b != 0:
            if kind_a == 1 and kind_b == 1:
                out[pos : pos + take] = np.uint64(ALL_ONES)
            elif kind_a == 1:
                out[pos : pos + take] = words_b[off_b : off_b + take]
            elif kind_b == 1:
                out[pos : pos + take] = words_a[off_a : off_a + take]
            else:
                out[pos : pos + take] = (
                    words_a[off_a : off_a + take] & words_b[off_b : off_b + take]
                )
        pos += take
        off_a += take
        off_b += take
        if off_a == len_a:
            ia += 1
            off_a = 0
        if off_b == len_b:
            ib += 1
            off_b = 0
    out[-1] &= np.uint64(_tail_mask(universe))
    out.setflags(write=False)
    return CompressedBitVector(universe, PLAIN, _popcount(out), out, None)


def intersect3(
    a: CompressedBitVector, b: CompressedBitVector, c: CompressedBitVector
) -> CompressedBitVector:
    return intersect(intersect(a, b), c)


def iter_ones(v: CompressedBitVector) -> Iterator[int]:
    return v.iter_ones()


def count_ones(v: CompressedBitVector) -> int:
    return v.ones_count


def is_empty(v: CompressedBitVector) -> bool:
    return v.ones_count == 0
