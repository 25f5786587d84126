"""Deterministic weighted frame subsampling with spectral barriers (BSS).

The iteration keeps every eigenvalue of the accumulator
``A_k = sum t_j y_{i_j} y_{i_j}^H`` strictly between a lower and an upper
barrier that both move right each step.  After ``ceil(b m)`` rank-one updates
the accumulated weights are rescaled so the weighted subframe has bounds in
``[A, gamma B (1 + delta)]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InternalInvariantError,
    InvalidConfigError,
    InvalidInputError,
    SelectionFailureError,
)
from .frames import FrameBounds, WeightedSubframe, as_frame, row_norms_sq

TRAVERSALS = ("random", "sequential")


def ceil_mul(b, m):
    """ceil(b*m), immune to products like 1.12*100 = 112.00000000000001."""
    return math.ceil(round(b * m, 9))


def kappa(A: float, B: float) -> float:
    if not (A > 0 and B >= A):
        raise InvalidInputError(f"kappa needs 0 < A <= B, got A={A}, B={B}")
    h = B / (2 * A) + 0.5
    return h + math.sqrt(max(h * h - 1.0, 0.0))


def gamma(b: float, kappa: float) -> float:
    """(sqrt(b)+1)^2 / ((sqrt(b)-1)(sqrt(b)-kappa))."""
    if kappa < 1 or not b > kappa**2:
        raise InvalidInputError(f"gamma needs b > kappa^2 >= 1, got b={b}, kappa={kappa}")
    sb = math.sqrt(b)
    return (sb + 1) ** 2 / ((sb - 1) * (sb - kappa))


@dataclass
class BssConfig:
    b: float
    delta: float = 0.0
    traversal: str = "random"
    seed: int = 0
    variable_shifts: bool = True
    chunk: int = 16  # candidates evaluated per vectorised batch

    def __post_init__(self):
        if self.traversal not in TRAVERSALS:
            raise InvalidConfigError(f"traversal must be one of {TRAVERSALS}")
        if not self.delta >= 0:
            raise InvalidConfigError(f"stability factor must be >= 0, got {self.delta}")
        if not self.b > 1:
            raise InvalidConfigError(f"oversampling factor must exceed 1, got {self.b}")
        if self.chunk < 1:
            raise InvalidConfigError("chunk must be positive")


class DenseCandidates:
    """Candidates are the rows of an explicit analysis operator."""

    def __init__(self, Y, exclude=None):
        self.Y = as_frame(Y)
        self.M, self.m = self.Y.shape
        active = row_norms_sq(self.Y) > 0
        if exclude is not None:
            active[np.asarray(exclude, dtype=np.int64)] = False
        self.active = np.flatnonzero(active)

    def chunks(self, traversal, rng, size):
        order = rng.permutation(self.active) if traversal == "random" else self.active
        for s in range(0, len(order), size):
            yield order[s : s + size]

    def rows(self, idx):
        return self.Y[idx]

    def keys(self, idx):
        return [int(i) for i in idx]


@dataclass
class BssRun:
    subframe: WeightedSubframe
    kappa: float
    gamma: float
    n_iterations: int
    l_final: float
    u_final: float
    raw_weights: dict
    inner_scans: list
    bounds_in: FrameBounds
    trace: list = field(default_factory=list)

    @property
    def avg_inner_scans(self):
        return float(np.mean(self.inner_scans)) if self.inner_scans else 0.0

    def report(self, cfg, m, M, bounds_out=None):
        d = {
            "m": int(m),
            "M": int(M),
            "b": float(cfg.b),
            "delta": float(cfg.delta),
            "kappa": self.kappa,
            "gamma": self.gamma,
            "n_iterations": self.n_iterations,
            "J": [int(i) for i in self.subframe.indices.tolist()],
            "weights": [float(w) for w in self.subframe.weights],
            "bounds_in": self.bounds_in.to_dict(),
            "avg_inner_scans": self.avg_inner_scans,
        }
        if bounds_out is not None:
            d["bounds_out"] = bounds_out.to_dict()
        return d


def _check_containment(lam, l, u, k):
    scale = max(1.0, abs(l), abs(u))
    if not (lam[0] - l > -1e-10 * scale and u - lam[-1] > -1e-10 * scale):
        raise InternalInvariantError(
            f"spectrum [{lam[0]:.6g}, {lam[-1]:.6g}] left barriers ({l:.6g}, {u:.6g})",
            iteration=k,
        )


def run_bss(source, bounds: FrameBounds, cfg: BssConfig, trace=False) -> BssRun:
    """Run the barrier iteration on ``source`` (a frame array or candidate source).

    ``bounds`` must certify the full candidate system.  With ``trace=True``
    every iteration's barriers, shifts, potentials and gates are recorded.
    """
    if not hasattr(source, "chunks"):
        source = DenseCandidates(source)
    A, B = float(bounds.A), float(bounds.B)
    if not A > 0:
        raise InvalidInputError("BSS needs a frame certificate with A > 0")
    m, M = source.m, source.M
    kap = kappa(A, B)
    b = cfg.b
    if not b > kap**2:
        raise InvalidConfigError(
            f"oversampling factor b={b} must exceed kappa^2={kap**2:.6g}", kappa=kap
        )
    gam = gamma(b, kap)
    dlt = cfg.delta
    sb = math.sqrt(b)
    ratio = B / A
    n = ceil_mul(b, m)
    rng = np.random.default_rng(cfg.seed)

    l = -m * sb * kap / (1 + dlt)
    u = m * (b + sb) / (sb - 1) * ratio
    dL0 = 1.0 / (1 + dlt)
    dU0 = (sb + 1) / (sb - 1) * ratio
    threshold = dlt / (2.0 * float(M)) * (1 - 1 / sb)

    Amat = np.zeros((m, m), complex)
    lam, U = np.zeros(m), np.eye(m, dtype=complex)
    raw = {}
    scans = []
    records = []
    eps0 = None

    for k in range(1, n + 1):
        if k > 1:
            lam, U = np.linalg.eigh(Amat)
        _check_containment(lam, l, u, k - 1)
        epsL = float(np.sum(1.0 / (lam - l)))
        epsU = float(np.sum(1.0 / (u - lam)))
        if eps0 is None:
            eps0 = (epsL, epsU)
        if cfg.variable_shifts:
            dL = 1.0 / (1.0 / dL0 - kap * eps0[0] + kap * epsL)
            dU = 1.0 / (1.0 / dU0 + eps0[1] - epsU)
        else:
            dL, dU = dL0, dU0
        l_new, u_new = l + dL, u + dU
        if not lam[0] > l_new:
            raise InternalInvariantError(
                f"lower shift {dL:.6g} overtakes lambda_min at iteration {k}", iteration=k
            )
        dl = lam - l_new
        du = u_new - lam
        gapL = float(np.sum(1.0 / dl)) - epsL
        gapU = epsU - float(np.sum(1.0 / du))
        cL2, cL1 = dl**-2 / gapL, 1.0 / dl
        cU2, cU1 = du**-2 / gapU, 1.0 / du

        chosen = None
        scanned = 0
        for idx in source.chunks(cfg.traversal, rng, cfg.chunk):
            R = source.rows(idx)
            P = R @ U
            P = P.real**2 + P.imag**2
            Lg = P @ cL2 - P @ cL1
            Ug = P @ cU2 + P @ cU1
            ok = np.flatnonzero((Lg - Ug >= threshold) & (Ug > 0))
            if ok.size:
                j = ok[0]
                scanned += j + 1
                chosen = (idx[j : j + 1], R[j], float(Lg[j]), float(Ug[j]))
                break
            scanned += len(idx)
        if chosen is None:
            hint = " Retry with delta=1e-8." if dlt == 0 else " Increase delta."
            raise SelectionFailureError(
                f"no candidate satisfied the selection test in iteration {k}.{hint}",
                iteration=k,
            )
        cidx, row, Lk, Uk = chosen
        t = 2.0 / (Lk + Uk)
        key = source.keys(cidx)[0]
        raw[key] = raw.get(key, 0.0) + t
        Amat += t * np.outer(row.conj(), row)
        scans.append(scanned)
        if trace:
            records.append(
                {
                    "k": k,
                    "l": l,
                    "u": u,
                    "lam_min": float(lam[0]),
                    "lam_max": float(lam[-1]),
                    "eps_L": epsL,
                    "eps_U": epsU,
                    "delta_L": dL,
                    "delta_U": dU,
                    "conservation": 1.0 / dL - kap * epsL - ratio * (1.0 / dU + epsU),
                    "L": Lk,
                    "U": Uk,
                    "t": t,
                    "index": key,
                }
            )
        l, u = l_new, u_new

    lam = np.linalg.eigvalsh(Amat)
    _check_containment(lam, l, u, n)
    if trace:
        records.append({"k": n + 1, "l": l, "u": u, "lam_min": float(lam[0]), "lam_max": float(lam[-1])})

    scale = 0.5 * (A / l + B * gam * (1 + dlt) / u)
    keys = sorted(raw)
    idx = np.array(keys, dtype=object if M > np.iinfo(np.int64).max else np.int64)
    weights = np.array([scale * raw[i] for i in keys])
    sub = WeightedSubframe(idx, weights, M)
    return BssRun(sub, kap, gam, n, l, u, raw, scans, bounds, records)


def bss_subsample(Y, bounds: FrameBounds, cfg: BssConfig) -> WeightedSubframe:
    """Weighted subframe with at most ceil(b m) elements and bounds in
    [A, gamma(b, kappa) B (1 + delta)]."""
    return run_bss(Y, bounds, cfg).subframe
