"""Column orthonormalisation that turns a vector system into a tight frame,
plus the block-indicator extension and zero padding used by PlainBSS."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .frames import as_frame

DEPENDENCY_RTOL = 1e-10


@dataclass
class PreconditionedFrame:
    Ytilde: np.ndarray
    m_prime: int
    # per output column: "input", "block" or "completion"
    origin_map: list


def _mgs_append(Q, v, rtol):
    """Project ``v`` off the columns of Q twice; return the unit residual or None."""
    norm0 = np.linalg.norm(v)
    if norm0 == 0:
        return None
    w = v.astype(complex, copy=True)
    for _ in range(2):
        for j in range(Q.shape[1]):
            w -= (Q[:, j].conj() @ w) * Q[:, j]
    nw = np.linalg.norm(w)
    if nw <= rtol * norm0:
        return None
    return w / nw


def _orthonormal_span(cols, origins, rtol, M):
    Q = np.zeros((M, 0), complex)
    kept = []
    for v, o in zip(cols, origins):
        q = _mgs_append(Q, v, rtol)
        if q is not None:
            Q = np.column_stack([Q, q])
            kept.append(o)
    return Q, kept


def orthonormalize_columns(Y, seed=0, rtol=DEPENDENCY_RTOL) -> PreconditionedFrame:
    """Orthonormal basis with ``m`` columns whose span contains range(Y).

    Dependent columns are replaced by seeded Gaussian completion vectors.
    """
    Y = as_frame(Y)
    M, m = Y.shape
    if M < m:
        raise InvalidInputError(f"need M >= m to orthonormalise columns, got M={M}, m={m}")
    Q, origins = _orthonormal_span(Y.T, ["input"] * m, rtol, M)
    rng = np.random.default_rng(seed)
    while Q.shape[1] < m:
        g = rng.standard_normal(M) + 1j * rng.standard_normal(M)
        q = _mgs_append(Q, g, rtol)
        if q is not None:
            Q = np.column_stack([Q, q])
            origins.append("completion")
    return PreconditionedFrame(Q, m, origins)


def padded_size(M: int, K: int) -> int:
    """Smallest multiple of K that is at least M."""
    if K < 1:
        raise InvalidInputError("block count must be positive")
    return -(-M // K) * K


def zero_pad(Y, target_M: int) -> np.ndarray:
    Y = as_frame(Y)
    M = Y.shape[0]
    if target_M < M:
        raise InvalidInputError(f"target_M={target_M} is below M={M}")
    if target_M == M:
        return Y
    return np.vstack([Y, np.zeros((target_M - M, Y.shape[1]), complex)])


def block_count(alpha: float, m: int) -> int:
    return math.ceil(round(alpha * m, 9))


def extend_with_blocks(Y, alpha: float, rtol=DEPENDENCY_RTOL) -> PreconditionedFrame:
    """Block indicators first, then Gram-Schmidt with the columns of Y.

    Every row of the result has squared norm at least ``ceil(alpha m)/M``.
    """
    Y = as_frame(Y)
    M, m = Y.shape
    if not alpha > 0:
        raise InvalidInputError("alpha must be positive")
    K = block_count(alpha, m)
    if M % K:
        raise InvalidInputError(
            f"M={M} is not divisible by ceil(alpha m)={K}; zero_pad to {padded_size(M, K)} first"
        )
    size = M // K
    target = K / M
    c = math.sqrt(target)
    while c * c < target:
        c = np.nextafter(c, np.inf)
    D = np.zeros((M, K), complex)
    for k in range(K):
        D[k * size : (k + 1) * size, k] = c
    # block columns are orthonormal already, up to the nextafter bump
    Q = D
    origins = ["block"] * K
    for v in Y.T:
        q = _mgs_append(Q, v, rtol)
        if q is not None:
            Q = np.column_stack([Q, q])
            origins.append("input")
    return PreconditionedFrame(Q, Q.shape[1], origins)
