"""Frequency index sets, node sets and multivariate Fourier frames."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError


@dataclass
class FrequencyIndexSet:
    indices: np.ndarray  # (m, d) integers
    kind: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.indices = np.atleast_2d(np.asarray(self.indices, dtype=np.int64))
        if len({tuple(k) for k in self.indices.tolist()}) != len(self.indices):
            raise InvalidInputError("frequency indices must be distinct")

    @property
    def m(self):
        return self.indices.shape[0]

    @property
    def d(self):
        return self.indices.shape[1]


def hyperbolic_cross(d: int, R: int) -> FrequencyIndexSet:
    """All k in Z^d with prod_j max(1, |k_j|) <= R."""
    if d < 1 or R < 1:
        raise InvalidInputError("hyperbolic cross needs d >= 1 and R >= 1")
    out = []

    def rec(prefix, budget):
        if len(prefix) == d:
            out.append(tuple(prefix))
            return
        for k in range(-budget, budget + 1):
            rec(prefix + [k], budget // max(1, abs(k)))

    rec([], R)
    return FrequencyIndexSet(np.array(out), "hyperbolic-cross", {"d": d, "R": R})


def full_grid(d: int, lo: int, hi: int) -> FrequencyIndexSet:
    """{lo, ..., hi}^d."""
    if hi < lo:
        raise InvalidInputError("empty frequency range")
    pts = np.array(list(itertools.product(range(lo, hi + 1), repeat=d)))
    return FrequencyIndexSet(pts, "full-grid", {"d": d, "lo": lo, "hi": hi})


def random_frequencies(d: int, count: int, box: int, seed=0) -> FrequencyIndexSet:
    """``count`` distinct uniform frequencies from {-box, ..., box}^d."""
    rng = np.random.default_rng(seed)
    seen = set()
    out = []
    while len(out) < count:
        k = tuple(rng.integers(-box, box + 1, size=d).tolist())
        if k not in seen:
            seen.add(k)
            out.append(k)
    return FrequencyIndexSet(np.array(out), "random", {"d": d, "count": count, "box": box, "seed": seed})


def equispaced_grid(d: int, per_axis: int, shift=None) -> np.ndarray:
    """Nodes i/per_axis in [0, 1)^d, optionally shifted (no wrap-around)."""
    if per_axis < 1 or d < 1:
        raise InvalidInputError("grid needs d >= 1 and per_axis >= 1")
    axis = np.arange(per_axis) / per_axis
    X = np.array(list(itertools.product(axis, repeat=d)), dtype=float).reshape(-1, d)
    if shift is not None:
        X = X + np.asarray(shift, dtype=float)
    return X


def random_nodes(d: int, M: int, seed=0) -> np.ndarray:
    return np.random.default_rng(seed).random((M, d))


def fourier_matrix(I: FrequencyIndexSet, X) -> np.ndarray:
    """exp(2 pi i <k, x>) for nodes x (rows) and frequencies k (columns)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != I.d:
        raise InvalidInputError(f"node dimension {X.shape[1]} does not match frequency dimension {I.d}")
    phase = np.mod(X @ I.indices.T.astype(float), 1.0)
    return np.exp(2j * np.pi * phase)


def fourier_frame(I: FrequencyIndexSet, X) -> np.ndarray:
    """Analysis operator with rows conj(y_i), y_i = exp(2 pi i <k, x_i>)/sqrt(M)."""
    F = fourier_matrix(I, X)
    return F.conj() / math.sqrt(F.shape[0])


class FourierGridCandidates:
    """Candidate source over the implicit grid {0, 1/g, ..., (g-1)/g}^d.

    The grid is far too large to enumerate, so each scan visits a fresh
    seeded random sample of grid points; a grid point's key is its mixed-radix
    index (a Python int, possibly beyond 64 bits).
    """

    def __init__(self, I: FrequencyIndexSet, per_axis: int, pool: int = 4096):
        self.I = I
        self.g = per_axis
        self.d = I.d
        self.m = I.m
        self.M = per_axis**self.d
        self.pool = pool
        self._rows = {}

    def _encode(self, digits):
        key = 0
        for v in digits:
            key = key * self.g + int(v)
        return key

    def chunks(self, traversal, rng, size):
        drawn = 0
        while drawn < self.pool:
            digits = rng.integers(0, self.g, size=(size, self.d))
            keys = [self._encode(r) for r in digits]
            X = digits / self.g
            rows = fourier_matrix(self.I, X).conj() / math.sqrt(float(self.M))
            self._rows = dict(zip(keys, rows))
            drawn += size
            yield keys

    def rows(self, keys):
        return np.array([self._rows[k] for k in keys])

    def keys(self, keys):
        return list(keys)

    def node(self, key):
        digits = []
        for _ in range(self.d):
            key, r = divmod(key, self.g)
            digits.append(r)
        return np.array(digits[::-1]) / self.g

    def frame_rows(self, keys):
        X = np.array([self.node(k) for k in keys])
        return fourier_matrix(self.I, X).conj() / math.sqrt(float(self.M))
