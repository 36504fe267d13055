"""Batched 2x2 helpers against dense linear-algebra oracles."""

import numpy as np
import pytest

from domsplit import MatSequence, cocycle_product, norm_floor, op_norm
from domsplit.mat2 import (
    SingularFactor,
    backward_product,
    det2,
    inv2,
    is_singular,
    singular_values,
    sv_direction_vectors,
)

from conftest import random_matseq


def test_matsequence_indexing():
    vals = np.arange(12, dtype=float).reshape(3, 2, 2).astype(complex)
    seq = MatSequence(5, vals)
    assert len(seq) == 3
    assert seq.window == (5, 7)
    assert np.array_equal(seq.at(6), vals[1])
    assert seq.index_of(7) == 2
    with pytest.raises(IndexError):
        seq.at(8)
    with pytest.raises(IndexError):
        seq.at(4)


def test_matsequence_from_fn():
    seq = MatSequence.from_fn(lambda j: np.array([[j, 0], [0, 1]], complex), -2, 2)
    assert seq.window == (-2, 2)
    assert seq.at(-2)[0, 0] == -2
    assert seq.at(2)[0, 0] == 2


def test_det2_matches_numpy():
    rng = np.random.default_rng(11)
    m = rng.standard_normal((50, 2, 2)) + 1j * rng.standard_normal((50, 2, 2))
    assert np.allclose(det2(m), np.linalg.det(m), rtol=1e-12, atol=1e-12)


def test_singular_values_match_numpy():
    rng = np.random.default_rng(12)
    for _ in range(200):
        m = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        s1, s2 = singular_values(m)
        ref = np.linalg.svd(m, compute_uv=False)
        assert s1 == pytest.approx(ref[0], rel=1e-12, abs=1e-13)
        assert s2 == pytest.approx(ref[1], rel=1e-10, abs=1e-12)
        assert s1 >= s2 >= 0


def test_singular_values_degenerate_cases():
    # exactly singular and exactly scalar matrices
    s1, s2 = singular_values(np.array([[1.0, 2.0], [2.0, 4.0]], complex))
    assert s2 == pytest.approx(0.0, abs=1e-14)
    s1, s2 = singular_values(3.0 * np.eye(2, dtype=complex))
    assert s1 == pytest.approx(3.0, rel=1e-14)
    assert s2 == pytest.approx(3.0, rel=1e-14)


def test_op_norm_batched():
    rng = np.random.default_rng(13)
    m = rng.standard_normal((30, 2, 2)) + 1j * rng.standard_normal((30, 2, 2))
    ref = np.array([np.linalg.norm(x, 2) for x in m])
    assert np.allclose(op_norm(m), ref, rtol=1e-12)


def test_sv_direction_vectors_align_with_svd():
    rng = np.random.default_rng(14)
    m = rng.standard_normal((40, 2, 2)) + 1j * rng.standard_normal((40, 2, 2))
    left, right = sv_direction_vectors(m)
    for k in range(40):
        U, _, Vh = np.linalg.svd(m[k])
        # directions match up to phase: the wedge with the reference vanishes
        for mine, ref in ((left[k], U[:, 0]), (right[k], Vh[0].conj())):
            wedge = mine[0] * ref[1] - mine[1] * ref[0]
            assert abs(wedge) < 1e-10
            assert np.linalg.norm(mine) == pytest.approx(1.0, rel=1e-12)


def test_is_singular_flags():
    sing = np.array([[1.0, 2.0], [0.5, 1.0]], complex)
    well = np.array([[2.0, 0.0], [0.0, 1.0]], complex)
    flags = is_singular(np.stack([sing, well]))
    assert flags[0] and not flags[1]


def test_inv2_matches_numpy_and_rejects_singular():
    rng = np.random.default_rng(15)
    m = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    assert np.allclose(inv2(m), np.linalg.inv(m), rtol=1e-12)
    with pytest.raises(SingularFactor):
        inv2(np.array([[1.0, 1.0], [1.0, 1.0]], complex))


def brute_product(seq, j, n):
    out = np.eye(2, dtype=complex)
    for k in range(j, j + n):
        out = seq.at(k) @ out
    return out


def test_cocycle_product_short_and_long():
    rng = np.random.default_rng(16)
    seq = random_matseq(rng, n=60, j_lo=-30)
    for j, n in ((-30, 1), (-10, 5), (-25, 12)):
        got = cocycle_product(seq, j, n)
        ref = brute_product(seq, j, n)
        assert np.allclose(got, ref, rtol=1e-12, atol=1e-12)
    # long products route through extended precision
    got = cocycle_product(seq, -30, 60)
    ref = brute_product(seq, -30, 60)
    scale = np.abs(ref).max()
    assert np.abs(got - ref).max() < 1e-10 * scale


def test_cocycle_product_bounds():
    rng = np.random.default_rng(17)
    seq = random_matseq(rng, n=10)
    with pytest.raises(IndexError):
        cocycle_product(seq, 5, 6)
    assert np.array_equal(cocycle_product(seq, 3, 0), np.eye(2))
    with pytest.raises(ValueError):
        cocycle_product(seq, 0, -1)


def test_backward_product_inverts_the_span_below():
    rng = np.random.default_rng(18)
    seq = random_matseq(rng, n=20, j_lo=3)
    got = backward_product(seq, 10, 6)
    ref = np.linalg.inv(brute_product(seq, 4, 6))
    assert np.allclose(got, ref, rtol=1e-9)


def test_norm_floor_matches_bruteforce():
    rng = np.random.default_rng(19)
    seq = random_matseq(rng, n=24, j_lo=0)
    for n in (1, 2, 5, 8):
        ref = min(
            np.linalg.norm(brute_product(seq, j, n), 2)
            for j in range(0, 24 - n + 1)
        )
        assert norm_floor(seq, n) == pytest.approx(ref, rel=1e-10)


def test_norm_floor_zero_on_dead_factor():
    vals = np.stack([np.eye(2), np.zeros((2, 2)), np.eye(2)]).astype(complex)
    seq = MatSequence(0, vals)
    assert norm_floor(seq, 3) == pytest.approx(0.0, abs=1e-300)


def test_sup_bound_covers_factors():
    rng = np.random.default_rng(20)
    seq = random_matseq(rng, n=15, scale=2.5)
    assert seq.sup_bound >= op_norm(seq.values).max()
