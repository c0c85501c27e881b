"""Field arithmetic, encode/recode/eliminate, and the incremental decoder."""

import random

import pytest

from acnc.gf256 import (FIELD_SIZE, IncrementalDecoder, eliminate, encode,
                        gf_add, gf_div, gf_inv, gf_mul, recode, vec_add,
                        vec_scale)


def dense(row, n):
    out = [0] * n
    for k, v in row.items():
        out[k] = v
    return out


def test_field_axioms():
    rng = random.Random(1)
    for _ in range(2000):
        a, b, c = (rng.randrange(FIELD_SIZE) for _ in range(3))
        assert gf_add(a, b) == gf_add(b, a)
        assert gf_mul(a, b) == gf_mul(b, a)
        assert gf_mul(gf_mul(a, b), c) == gf_mul(a, gf_mul(b, c))
        assert gf_add(gf_add(a, b), c) == gf_add(a, gf_add(b, c))
        assert gf_mul(a, gf_add(b, c)) == gf_add(gf_mul(a, b), gf_mul(a, c))
        assert gf_add(a, a) == 0
        assert gf_mul(a, 1) == a
        if a:
            assert gf_mul(a, gf_inv(a)) == 1
            assert gf_div(b, a) == gf_mul(b, gf_inv(a))


def test_inverse_of_zero_rejected():
    with pytest.raises(ZeroDivisionError):
        gf_inv(0)
    with pytest.raises(ZeroDivisionError):
        gf_div(3, 0)


def test_vec_helpers():
    assert vec_scale([1, 2, 3], 0) == [0, 0, 0]
    assert vec_scale([1, 2, 3], 1) == [1, 2, 3]
    assert vec_add([1, 2, 3], [1, 2, 3]) == [0, 0, 0]


def test_encode_identity_and_zero():
    p0, p1 = [5, 6, 7], [9, 10, 11]
    assert encode([p0], [1]) == p0
    assert encode([p0, p1], [0, 0]) == [0, 0, 0]
    # characteristic 2: coefficients (1,1) xor the payloads
    assert encode([p0, p1], [1, 1]) == [a ^ b for a, b in zip(p0, p1)]


def test_encode_length_mismatch():
    with pytest.raises(ValueError):
        encode([[1, 2]], [1, 1])
    with pytest.raises(ValueError):
        encode([[1, 2], [1]], [1, 1])


def test_recode_single_row_identity():
    cv, pl = [1, 2, 3], [4, 5, 6]
    out_cv, out_pl = recode([(cv, pl)], [1])
    assert out_cv == cv and out_pl == pl
    with pytest.raises(ValueError):
        recode([], [])


def test_recode_stays_in_row_space():
    rng = random.Random(2)
    n = 6
    rows = [[rng.randrange(FIELD_SIZE) for _ in range(n)] for _ in range(3)]
    base_rank, _, _ = eliminate(rows)
    for _ in range(20):
        mu = [rng.randrange(FIELD_SIZE) for _ in range(3)]
        mixed, _ = recode([(r, None) for r in rows], mu)
        rank2, _, _ = eliminate(rows + [mixed])
        assert rank2 == base_rank


def test_recode_rank_preservation_monte_carlo():
    # k independent rows recoded k times keep rank k almost always
    rng = random.Random(3)
    k, n, full = 4, 8, 0
    trials = 200
    for _ in range(trials):
        rows = [[rng.randrange(FIELD_SIZE) for _ in range(n)] for _ in range(k)]
        if eliminate(rows)[0] < k:
            continue
        mixes = []
        for _ in range(k):
            mu = [rng.randrange(FIELD_SIZE) for _ in range(k)]
            mixes.append(recode([(r, None) for r in rows], mu)[0])
        if eliminate(mixes)[0] == k:
            full += 1
    assert full >= trials * (1 - 1 / FIELD_SIZE) ** k - 25


def test_eliminate_basic():
    ident = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    rank, solved, _ = eliminate(ident)
    assert rank == 3 and solved == [0, 1, 2]
    rank, solved, _ = eliminate([[3, 7], [3, 7]])
    assert rank == 1 and solved == []
    assert eliminate([]) == (0, [], [])


def test_eliminate_idempotent():
    rng = random.Random(4)
    rows = [[rng.randrange(FIELD_SIZE) for _ in range(5)] for _ in range(4)]
    rank, solved, rref = eliminate(rows)
    rank2, solved2, _ = eliminate(rref)
    assert (rank, solved) == (rank2, solved2)


def test_decode_encode_identity():
    # encode w packets with an invertible matrix, eliminate, recover payloads
    rng = random.Random(5)
    w, ell = 5, 8
    packets = [[rng.randrange(FIELD_SIZE) for _ in range(ell)] for _ in range(w)]
    while True:
        mat = [[rng.randrange(FIELD_SIZE) for _ in range(w)] for _ in range(w)]
        if eliminate(mat)[0] == w:
            break
    rows = [mat[i] + encode(packets, mat[i]) for i in range(w)]
    rank, solved, rref = eliminate(rows, ncols=w)
    assert rank == w and solved == list(range(w))
    for row in rref:
        lead = next(i for i in range(w) if row[i])
        assert row[w:] == packets[lead]


def test_incremental_decoder_matches_batch_rank():
    rng = random.Random(6)
    for reverse in (False, True):
        for _ in range(30):
            n = rng.randrange(3, 10)
            dec = IncrementalDecoder(reverse=reverse)
            rows = []
            for _ in range(rng.randrange(1, 14)):
                lo = rng.randrange(n)
                hi = rng.randrange(lo, n)
                row = {i: rng.randrange(FIELD_SIZE) for i in range(lo, hi + 1)}
                rows.append(dense(row, n))
                expect = eliminate(rows)[0]
                dec.absorb(row)
                assert dec.rank == expect


def test_incremental_decoder_frontier():
    dec = IncrementalDecoder()
    assert dec.inorder_frontier() == -1
    assert dec.absorb({0: 1})
    assert dec.inorder_frontier() == 0
    assert dec.absorb({1: 2, 2: 5})
    assert dec.inorder_frontier() == 0      # 1 and 2 entangled
    assert not dec.absorb({1: 4, 2: 10})    # dependent (scalar multiple)
    assert dec.absorb({2: 1})
    assert dec.inorder_frontier() == 2
    assert dec.solved_indices() == [0, 1, 2]


def test_reverse_decoder_exposes_narrow_subspaces():
    # pivots with index <= e must count exactly dim(rowspace over packets 0..e),
    # independently computed as rank(rows) - rank(rows restricted to cols > e)
    rng = random.Random(7)
    for _ in range(25):
        n = rng.randrange(4, 9)
        dec = IncrementalDecoder(reverse=True)
        rows = []
        for _ in range(rng.randrange(2, 12)):
            lo = rng.randrange(n)
            hi = rng.randrange(lo, n)
            row = {i: rng.randrange(FIELD_SIZE) for i in range(lo, hi + 1)}
            rows.append(dense(row, n))
            dec.absorb(row)
        total = eliminate(rows)[0]
        for e in range(n):
            tail = [r[e + 1:] for r in rows]
            want = total - eliminate(tail)[0]
            got = sum(1 for p in dec.pivots if p <= e)
            assert got == want
            for p, prow in dec.pivots.items():
                assert max(prow) == p
