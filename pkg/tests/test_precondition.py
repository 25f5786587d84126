import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hs

from framesub.errors import InvalidInputError
from framesub.precondition import (
    block_count,
    extend_with_blocks,
    orthonormalize_columns,
    padded_size,
    zero_pad,
)


def _orthonormal(Q, tol=1e-10):
    return np.abs(Q.conj().T @ Q - np.eye(Q.shape[1])).max() <= tol


def _contains_range(Q, Y):
    R = Y - Q @ (Q.conj().T @ Y)
    return np.linalg.norm(R) <= 1e-8 * max(np.linalg.norm(Y), 1e-300)


def test_single_column():
    pf = orthonormalize_columns(np.array([[1.0], [1.0]]))
    assert np.allclose(np.abs(pf.Ytilde[:, 0]), 1 / math.sqrt(2))


def test_orthonormal_input_kept_up_to_phase(rng):
    Q, _ = np.linalg.qr(rng.standard_normal((9, 4)) + 1j * rng.standard_normal((9, 4)))
    out = orthonormalize_columns(Q).Ytilde
    ratio = out / Q
    assert np.allclose(np.abs(ratio), 1.0)
    assert np.allclose(ratio, ratio[0:1, :])


def test_rank_deficient_completion():
    c = np.array([1.0, 2.0, 0.0, -1.0])
    pf = orthonormalize_columns(np.column_stack([c, 2 * c]), seed=4)
    Q = pf.Ytilde
    assert _orthonormal(Q)
    assert pf.origin_map == ["input", "completion"]
    assert abs(np.vdot(c, Q[:, 1])) < 1e-10
    assert np.linalg.norm(Q) ** 2 == pytest.approx(2.0)


def test_more_columns_than_rows_rejected():
    with pytest.raises(InvalidInputError):
        orthonormalize_columns(np.ones((2, 3)))


@settings(max_examples=40)
@given(hs.integers(1, 8), hs.integers(0, 10), hs.integers(0, 3), hs.integers(0, 2**31))
def test_orthonormalisation_properties(m, extra, deficit, seed):
    rng = np.random.default_rng(seed)
    M = m + extra
    Y = rng.standard_normal((M, m)) + 1j * rng.standard_normal((M, m))
    k = min(deficit, m - 1)
    if k:
        Y[:, -k:] = Y[:, :k] @ rng.standard_normal((k, k))
    Q = orthonormalize_columns(Y, seed=seed).Ytilde
    assert Q.shape == (M, m)
    assert _orthonormal(Q)
    assert _contains_range(Q, Y)


def test_zero_pad():
    Y = np.ones((10, 2))
    assert zero_pad(Y, 10) is not None and zero_pad(Y, 10).shape == (10, 2)
    assert padded_size(10, 4) == 12
    P = zero_pad(Y, 12)
    assert P.shape == (12, 2) and np.all(P[10:] == 0)
    with pytest.raises(InvalidInputError):
        zero_pad(Y, 9)


def test_padded_size_range():
    for M in range(1, 60):
        for K in range(1, M + 1):
            Mp = padded_size(M, K)
            assert Mp % K == 0 and M <= Mp < 2 * M


def test_zero_pad_mean_energy(rng):
    Y = rng.standard_normal((10, 3))
    P = zero_pad(Y, padded_size(10, 4))
    a = rng.standard_normal(3)
    assert np.sum((Y @ a) ** 2) / 10 <= 2 * np.sum((P @ a) ** 2) / len(P)


def test_blocks_only_for_zero_input():
    M, m, alpha = 12, 5, 0.8
    K = block_count(alpha, m)
    pf = extend_with_blocks(np.zeros((M, m)), alpha)
    assert pf.m_prime == K == 4
    assert np.allclose(np.sum(np.abs(pf.Ytilde) ** 2, axis=1), K / M)


def test_blocks_need_divisibility():
    with pytest.raises(InvalidInputError, match="zero_pad"):
        extend_with_blocks(np.ones((10, 5)), 0.8)


@settings(max_examples=40)
@given(hs.integers(1, 10), hs.integers(1, 6), hs.floats(0.05, 1.0), hs.integers(0, 2**31))
def test_block_extension_properties(m, mult, alpha, seed):
    rng = np.random.default_rng(seed)
    K = block_count(alpha, m)
    M = K * max(mult, -(-m // K) + 1)
    Y = (rng.standard_normal((M, m)) + 1j * rng.standard_normal((M, m))) * rng.exponential(size=(M, 1))
    pf = extend_with_blocks(Y, alpha)
    Q = pf.Ytilde
    assert _orthonormal(Q)
    assert K <= pf.m_prime <= math.ceil(round((1 + alpha) * m, 9))
    # exact, no tolerance
    assert np.all(np.sum(Q.real**2 + Q.imag**2, axis=1) >= K / M)
    assert _contains_range(Q, Y)
