"""Frame data model, frame-bound computation and frame file I/O.

A frame of M vectors in C^m is stored as its analysis operator: a dense
``(M, m)`` complex array ``Y`` whose i-th row is ``conj(y_i)``, so that
``Y @ a`` lists the coefficients ``<a, y_i>`` and ``Y^H Y = sum_i y_i y_i^H``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidInputError

# eigenvalues below this fraction of lambda_max are reported as 0
CLAMP_RTOL = 1e-12


def as_frame(Y) -> np.ndarray:
    """Validate and return ``Y`` as a 2-d complex array."""
    Y = np.asarray(Y)
    if Y.ndim == 1:
        Y = Y[:, None]
    if Y.ndim != 2 or Y.shape[0] < 1 or Y.shape[1] < 1:
        raise InvalidInputError(f"frame must be a non-empty 2-d array, got shape {Y.shape}")
    Y = Y.astype(complex, copy=False)
    if not np.all(np.isfinite(Y)):
        raise InvalidInputError("frame has non-finite entries")
    return Y


@dataclass(frozen=True)
class FrameBounds:
    A: float
    B: float

    def __post_init__(self):
        if not (np.isfinite(self.A) and np.isfinite(self.B)):
            raise InvalidInputError("frame bounds must be finite")
        if self.A < 0 or self.B < self.A:
            raise InvalidInputError(f"need 0 <= A <= B, got A={self.A}, B={self.B}")

    @property
    def is_frame(self) -> bool:
        return self.A > 0

    @property
    def condition(self) -> float:
        return self.B / self.A if self.A > 0 else np.inf

    def to_dict(self):
        return {"A": float(self.A), "B": float(self.B)}


@dataclass
class WeightedSubframe:
    """Index subset J of a parent frame with nonnegative weights.

    Indices are 0-based.  For implicit (streamed) parents the indices may be
    Python ints beyond int64, in which case ``indices`` has dtype object.
    """

    indices: np.ndarray
    weights: np.ndarray
    parent_M: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        idx = np.asarray(self.indices)
        if idx.dtype != object:
            idx = idx.astype(np.int64)
        self.indices = idx
        self.weights = np.asarray(self.weights, dtype=float)
        self.validate()

    def validate(self, M=None):
        M = self.parent_M if M is None else M
        if self.indices.shape != self.weights.shape or self.indices.ndim != 1:
            raise InvalidInputError("indices and weights must be 1-d of equal length")
        if len(set(self.indices.tolist())) != len(self.indices):
            raise InvalidInputError("subframe indices must be distinct")
        if any(i < 0 or i >= M for i in self.indices.tolist()):
            raise InvalidInputError(f"subframe index out of range [0, {M})")
        if np.any(self.weights < 0) or not np.all(np.isfinite(self.weights)):
            raise InvalidInputError("subframe weights must be finite and nonnegative")

    def __len__(self):
        return len(self.indices)

    @classmethod
    def unweighted(cls, indices, parent_M):
        indices = np.asarray(indices)
        return cls(indices, np.ones(len(indices)), parent_M)

    def to_dict(self):
        return {
            "parent_M": int(self.parent_M),
            "J": [int(i) for i in self.indices.tolist()],
            "weights": [float(w) for w in self.weights],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(np.array(d["J"]), np.array(d["weights"], dtype=float), int(d["parent_M"]))


def gram(Y, weights=None) -> np.ndarray:
    """``sum_i w_i y_i y_i^H`` for the rows of the analysis operator ``Y``."""
    Y = np.asarray(Y)
    if weights is None:
        return Y.conj().T @ Y
    return (Y.conj().T * weights) @ Y


def hermitian_bounds(G) -> FrameBounds:
    """Extreme eigenvalues of a Hermitian PSD matrix, tiny ones clamped to 0."""
    lam = np.linalg.eigvalsh(G)
    lmax = max(float(lam[-1]), 0.0)
    lmin = float(lam[0])
    if lmin < CLAMP_RTOL * lmax:
        lmin = 0.0
    return FrameBounds(lmin, lmax)


def frame_bounds(Y) -> FrameBounds:
    """Optimal frame bounds (A, B) from the m x m Gram matrix."""
    return hermitian_bounds(gram(as_frame(Y)))


def weighted_frame_bounds(Y, sub: WeightedSubframe) -> FrameBounds:
    Y = as_frame(Y)
    sub.validate(Y.shape[0])
    idx = sub.indices.astype(np.int64)
    return hermitian_bounds(gram(Y[idx], sub.weights))


def subset_bounds(Y, indices, scale=1.0) -> FrameBounds:
    """Bounds of the unweighted sub-system ``scale * sum_{i in J} y_i y_i^H``.

    ``indices`` may repeat; every occurrence counts.
    """
    Y = as_frame(Y)
    idx = np.asarray(indices, dtype=np.int64)
    return hermitian_bounds(scale * gram(Y[idx]))


def frobenius_norm_sq(Y) -> float:
    Y = as_frame(Y)
    return float(np.sum(Y.real**2 + Y.imag**2))


def row_norms_sq(Y) -> np.ndarray:
    Y = np.asarray(Y)
    return np.sum(Y.real**2 + Y.imag**2, axis=1)


def pencil_lambda_min(G_num, G_den, rtol=1e-10) -> float:
    """Smallest generalized eigenvalue of (G_num, G_den) on range(G_den).

    This is the largest c with ``a^H G_num a >= c a^H G_den a`` for all a.
    """
    lam, V = np.linalg.eigh(G_den)
    keep = lam > rtol * max(lam[-1], 0.0)
    if not np.any(keep):
        return np.inf
    W = V[:, keep] / np.sqrt(lam[keep])
    return float(np.linalg.eigvalsh(W.conj().T @ G_num @ W)[0])


# -- I/O -------------------------------------------------------------------

def _interleave(Y):
    out = np.empty((Y.shape[0], 2 * Y.shape[1]))
    out[:, 0::2] = Y.real
    out[:, 1::2] = Y.imag
    return out


def _deinterleave(R, m):
    R = np.asarray(R, dtype=float).reshape(-1, 2 * m)
    return R[:, 0::2] + 1j * R[:, 1::2]


def frame_to_json(Y) -> dict:
    Y = as_frame(Y)
    return {"m": Y.shape[1], "M": Y.shape[0], "rows": _interleave(Y).tolist()}


def frame_from_json(d) -> np.ndarray:
    try:
        m, M = int(d["m"]), int(d["M"])
        rows = np.asarray(d["rows"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed frame JSON: {exc}") from exc
    if rows.shape != (M, 2 * m):
        raise InvalidInputError(f"frame JSON rows have shape {rows.shape}, expected {(M, 2 * m)}")
    return as_frame(_deinterleave(rows, m))


def write_frame_csv(path, Y):
    Y = as_frame(Y)
    with open(path, "w") as fh:
        fh.write(f"m={Y.shape[1]},M={Y.shape[0]}\n")
        np.savetxt(fh, _interleave(Y), delimiter=",", fmt="%.17g")


def read_frame_csv(path) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().strip()
        try:
            fields = dict(part.split("=") for part in header.split(","))
            m, M = int(fields["m"]), int(fields["M"])
        except (KeyError, ValueError) as exc:
            raise InvalidInputError(f"bad frame CSV header {header!r}") from exc
        rows = np.loadtxt(fh, delimiter=",", ndmin=2)
    if rows.shape != (M, 2 * m):
        raise InvalidInputError(f"frame CSV body has shape {rows.shape}, expected {(M, 2 * m)}")
    return as_frame(_deinterleave(rows, m))


def read_frame(path) -> np.ndarray:
    path = Path(path)
    if path.suffix.lower() == ".json":
        return frame_from_json(json.loads(path.read_text()))
    return read_frame_csv(path)


def write_frame(path, Y):
    path = Path(path)
    if path.suffix.lower() == ".json":
        path.write_text(json.dumps(frame_to_json(Y)))
    else:
        write_frame_csv(path, Y)
