"""Bit-vector unit tests against a naive pure-python bitmap oracle."""

from __future__ import annotations

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bitpath import bitvec
from bitpath.bitvec import (
    ALL_ONES,
    PLAIN,
    RUN_LENGTH,
    BitVectorError,
    CompressedBitVector,
    build_from_positions,
    choose_representation,
    count_ones,
    intersect,
    intersect3,
    is_empty,
    iter_ones,
    word_count,
)


def naive_words(positions, universe_size):
    """Oracle: build the plain word list bit by bit, no numpy involved."""
    words = [0] * word_count(universe_size)
    for p in positions:
        words[p // 64] |= 1 << (p % 64)
    return words


def decoded(v):
    return [int(w) for w in v.decoded_words()]


def test_empty_vector():
    v = build_from_positions([], 100)
    assert v.ones_count == 0
    assert is_empty(v)
    assert list(iter_ones(v)) == []
    assert decoded(v) == [0, 0]


def test_full_vector_is_single_one_fill():
    v = build_from_positions(list(range(100)), 100)
    assert v.representation == RUN_LENGTH
    assert v._tokens == [(True, 1, 2)]
    assert v.ones_count == 100
    assert decoded(v) == [ALL_ONES, (1 << 36) - 1]


def test_random_positions_match_naive_bitmap():
    rng = random.Random(7)
    positions = sorted(rng.sample(range(10**6), 1000))
    v = build_from_positions(positions, 10**6)
    assert decoded(v) == naive_words(positions, 10**6)
    assert list(iter_ones(v)) == positions
    assert count_ones(v) == 1000


def test_positions_out_of_range_names_index():
    with pytest.raises(BitVectorError, match="index 2"):
        build_from_positions([1, 2, 100], 100)


def test_positions_must_ascend():
    with pytest.raises(BitVectorError, match="ascending"):
        build_from_positions([5, 5], 100)


def test_choose_representation_all_zero():
    v = choose_representation([0] * 1000)
    assert v.representation == RUN_LENGTH
    assert v._tokens == [(True, 0, 1000)]


def test_choose_representation_incompressible():
    words = [0xAAAAAAAAAAAAAAAA, 0x5555555555555555] * 500
    v = choose_representation(words)
    assert v.representation == PLAIN
    assert decoded(v) == words


def test_choose_representation_round_trips():
    rng = random.Random(3)
    for _ in range(50):
        n = rng.randrange(0, 40)
        words = [
            rng.choice([0, ALL_ONES, rng.getrandbits(64)]) for _ in range(n)
        ]
        v = choose_representation(words)
        assert decoded(v) == words


def test_compress_false_stays_plain():
    v = CompressedBitVector.from_words([0] * 100, compress=False)
    assert v.representation == PLAIN


def test_boundary_word_iteration():
    v = build_from_positions([0, 63, 64, 1000], 1024)
    assert list(iter_ones(v)) == [0, 63, 64, 1000]


def test_intersect_annihilator_and_idempotence():
    v = build_from_positions([3, 70, 500], 600)
    empty = build_from_positions([], 600)
    assert is_empty(intersect(v, empty))
    assert intersect(v, v) == v


def test_intersect_universe_mismatch_names_both_sizes():
    a = build_from_positions([], 100)
    b = build_from_positions([], 200)
    with pytest.raises(BitVectorError, match="100 != 200"):
        intersect(a, b)


def _random_vector(rng, universe, mode):
    """Vectors with runs (clustered) or scattered bits, to hit both reprs."""
    if mode == "clustered":
        positions = set()
        for _ in range(rng.randrange(1, 6)):
            start = rng.randrange(universe)
            positions.update(range(start, min(universe, start + rng.randrange(1, 300))))
        positions = sorted(positions)
    else:
        positions = sorted(rng.sample(range(universe), rng.randrange(0, universe // 50)))
    return positions, build_from_positions(positions, universe)


def test_intersect_matches_word_oracle_across_representations():
    rng = random.Random(11)
    universe = 10**4
    for trial in range(200):
        pos_a, a = _random_vector(rng, universe, rng.choice(["clustered", "scattered"]))
        pos_b, b = _random_vector(rng, universe, rng.choice(["clustered", "scattered"]))
        expected = [
            wa & wb
            for wa, wb in zip(naive_words(pos_a, universe), naive_words(pos_b, universe))
        ]
        got = intersect(a, b)
        assert decoded(got) == expected, f"trial {trial}"
        assert got.ones_count == sum(w.bit_count() for w in expected)


def test_intersect3_equals_nested_and_hand_fixture():
    # Successor/predecessor/label sets of the movie fixture, as bit positions
    # (edge ID - 1): {1..6} & {2,5,6} & {5,6} -> {5,6}.
    universe = 6
    succ = build_from_positions([0, 1, 2, 3, 4, 5], universe)
    pred = build_from_positions([1, 4, 5], universe)
    lab = build_from_positions([4, 5], universe)
    got = intersect3(succ, pred, lab)
    assert list(iter_ones(got)) == [4, 5]

    rng = random.Random(23)
    universe = 3000
    for _ in range(50):
        vs = [_random_vector(rng, universe, rng.choice(["clustered", "scattered"]))[1] for _ in range(3)]
        assert intersect3(*vs) == intersect(intersect(vs[0], vs[1]), vs[2])


def test_intersect_with_empty_input_short_circuits():
    a = build_from_positions([], 128)
    b = build_from_positions([0, 1], 128)
    assert is_empty(intersect3(a, b, b))


def test_count_monotonicity():
    rng = random.Random(5)
    for _ in range(50):
        _, a = _random_vector(rng, 5000, "clustered")
        _, b = _random_vector(rng, 5000, "scattered")
        c = intersect(a, b)
        assert count_ones(c) <= min(count_ones(a), count_ones(b))


def test_serialization_round_trip_and_byte_stability():
    rng = random.Random(17)
    for _ in range(40):
        universe = rng.randrange(0, 4000)
        k = rng.randrange(0, max(1, universe)) if universe else 0
        positions = sorted(rng.sample(range(universe), min(k, universe))) if universe else []
        v = build_from_positions(positions, universe)
        blob = v.to_bytes()
        w, consumed = CompressedBitVector.from_bytes(blob)
        assert consumed == len(blob)
        assert w == v
        assert w.representation == v.representation
        assert w.to_bytes() == blob


def test_full_vector_serialized_form():
    # Single 1-fill over 2 words: header (25 bytes) plus one token word.
    v = build_from_positions(list(range(100)), 100)
    blob = v.to_bytes()
    assert len(blob) == 25 + 8
    token = int.from_bytes(blob[25:], "little")
    assert token >> 63 == 1
    assert (token >> 62) & 1 == 1
    assert token & (1 << 62) - 1 == 2


def test_from_bytes_rejects_corruption():
    v = build_from_positions([1, 5, 1000, 1001, 1002], 2048)
    blob = bytearray(v.to_bytes())
    with pytest.raises(BitVectorError):
        CompressedBitVector.from_bytes(bytes(blob[:10]))
    blob[0] = 7
    with pytest.raises(BitVectorError, match="tag"):
        CompressedBitVector.from_bytes(bytes(blob))


def test_from_bytes_rejects_bad_ones_count():
    v = build_from_positions([0, 64, 128], 256)
    blob = bytearray(v.to_bytes())
    blob[9] ^= 0xFF  # ones_count field
    with pytest.raises(BitVectorError, match="ones_count"):
        CompressedBitVector.from_bytes(bytes(blob))


@settings(max_examples=200, deadline=None)
@given(
    st.integers(min_value=0, max_value=600).flatmap(
        lambda universe: st.tuples(
            st.just(universe),
            st.lists(st.integers(min_value=0, max_value=max(0, universe - 1)), unique=True).map(sorted)
            if universe
            else st.just([]),
        )
    )
)
def test_round_trip_property(case):
    universe, positions = case
    words = naive_words(positions, universe)
    v = choose_representation(words, universe)
    assert decoded(v) == words
    assert list(iter_ones(v)) == positions
    assert count_ones(v) == len(positions)


@settings(max_examples=150, deadline=None)
@given(
    st.lists(st.integers(min_value=0, max_value=299), unique=True).map(sorted),
    st.lists(st.integers(min_value=0, max_value=299), unique=True).map(sorted),
    st.lists(st.integers(min_value=0, max_value=299), unique=True).map(sorted),
)
def test_intersect3_is_set_intersection(pa, pb, pc):
    universe = 300
    a = build_from_positions(pa, universe)
    b = build_from_positions(pb, universe)
    c = build_from_positions(pc, universe)
    got = list(iter_ones(intersect3(a, b, c)))
    assert got == sorted(set(pa) & set(pb) & set(pc))
