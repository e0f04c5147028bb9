import itertools

import numpy as np
import pytest

from qgt.bch import DecodeFailure, build_parity_check, syndrome_decode
from qgt.gf2m import make_field

H_1_7 = np.array(
    [
        [1, 0, 0, 1, 0, 1, 1],
        [0, 1, 0, 1, 1, 1, 0],
        [0, 0, 1, 0, 1, 1, 1],
    ],
    dtype=np.uint8,
)


def test_single_error_matrix_gf8():
    pcm = build_parity_check(1, 7)
    assert pcm.q == 3
    assert pcm.num_rows == 3
    # column i is the bit expansion of alpha^i, bit j in row j
    assert np.array_equal(pcm.rows, H_1_7)


def test_two_error_matrix_second_block_is_cubes():
    pcm = build_parity_check(2, 7)
    f = make_field(3)
    assert pcm.rows.shape == (6, 7)
    assert np.array_equal(pcm.rows[:3], H_1_7)
    for i in range(7):
        val = f.alpha_pow(3 * i)
        col = [(val >> j) & 1 for j in range(3)]
        assert pcm.rows[3:, i].tolist() == col


def test_min_distance_supports_capability():
    # no up-to-2t columns may XOR to zero, else two <=t patterns would collide
    for t, r in [(1, 7), (2, 7)]:
        pcm = build_parity_check(t, r)
        cols = pcm.rows.T
        for w in range(1, 2 * t + 1):
            for combo in itertools.combinations(range(r), w):
                xor = np.bitwise_xor.reduce(cols[list(combo)], axis=0)
                assert xor.any(), (t, r, combo)


def test_syndrome_of_matches_dense_rows():
    pcm = build_parity_check(2, 13)
    rng = np.random.default_rng(3)
    for _ in range(30):
        w = int(rng.integers(0, 3))
        pos = sorted(rng.choice(13, size=w, replace=False).tolist())
        manual = np.bitwise_xor.reduce(pcm.rows[:, pos], axis=1) if pos else np.zeros(pcm.num_rows, np.uint8)
        assert np.array_equal(pcm.syndrome_of(pos), manual)


def test_round_trip_small():
    for t in (1, 2, 3, 4):
        for r in (7, 15):
            pcm = build_parity_check(t, r)
            for w in range(t + 1):
                for pos in itertools.combinations(range(r), w):
                    got = syndrome_decode(pcm, pcm.syndrome_of(list(pos)), w)
                    assert got == sorted(pos)


def test_shortened_r5_all_syndromes():
    # q stays 3 but only positions 0..4 exist; the 8 possible weight-1
    # syndromes split into 5 decodes, 2 out-of-range failures and the zero case
    pcm = build_parity_check(1, 5)
    assert pcm.q == 3
    f = make_field(3)
    for val in range(8):
        syn = np.array([(val >> j) & 1 for j in range(3)], dtype=np.uint8)
        if val == 0:
            with pytest.raises(DecodeFailure):
                syndrome_decode(pcm, syn, 1)
        elif int(f.log[val]) < 5:
            assert syndrome_decode(pcm, syn, 1) == [int(f.log[val])]
        else:
            with pytest.raises(DecodeFailure):
                syndrome_decode(pcm, syn, 1)


def test_weight_zero():
    pcm = build_parity_check(2, 7)
    assert syndrome_decode(pcm, np.zeros(6, np.uint8), 0) == []
    with pytest.raises(DecodeFailure):
        syndrome_decode(pcm, pcm.syndrome_of([2]), 0)


def test_overweight_pattern_never_slips_through():
    # true weight above the expected one: outcome must be a failure or a
    # self-consistent set of the requested weight, never silent garbage
    pcm = build_parity_check(2, 7)
    returned = 0
    for pos in itertools.combinations(range(7), 3):
        syn = pcm.syndrome_of(list(pos))
        try:
            got = syndrome_decode(pcm, syn, 2)
        except DecodeFailure:
            continue
        returned += 1
        assert len(got) == 2
        assert np.array_equal(pcm.syndrome_of(got), syn)
    # with full-syndrome verification most of these 35 patterns must fail
    assert returned < 35


def test_random_syndromes_fail_or_verify():
    rng = np.random.default_rng(17)
    pcm = build_parity_check(3, 21)
    for _ in range(500):
        syn = rng.integers(0, 2, size=pcm.num_rows).astype(np.uint8)
        for w in range(1, 4):
            try:
                got = syndrome_decode(pcm, syn, w)
            except DecodeFailure:
                continue
            assert len(got) == w
            assert np.array_equal(pcm.syndrome_of(got), syn)


def test_contract_violations():
    pcm = build_parity_check(2, 7)
    with pytest.raises(ValueError):
        syndrome_decode(pcm, np.zeros(5, np.uint8), 1)  # bad length
    with pytest.raises(ValueError):
        syndrome_decode(pcm, np.zeros(6, np.uint8), 3)  # above capability
    with pytest.raises(ValueError):
        build_parity_check(5, 7)
    with pytest.raises(ValueError):
        build_parity_check(1, 2)
