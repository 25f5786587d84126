"""Barrier potentials and the rank-one update gates that drive BSS.

All resolvent quadratic forms ``v^H (A - cI)^{-p} v`` are evaluated from a
cached eigendecomposition ``A = U diag(lam) U^H`` as
``sum_j |u_j^H v|^2 / (lam_j - c)^p``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BarrierViolationError, InvalidInputError

INF_GATE = math.inf


def _slack(x):
    return 1e-12 * max(1.0, abs(x))


@dataclass(frozen=True)
class HermitianAccumulator:
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @classmethod
    def from_matrix(cls, A):
        A = np.asarray(A, dtype=complex)
        A = 0.5 * (A + A.conj().T)
        lam, U = np.linalg.eigh(A)
        return cls(A, lam, U)

    @classmethod
    def zeros(cls, m):
        return cls(np.zeros((m, m), complex), np.zeros(m), np.eye(m, dtype=complex))

    @property
    def m(self):
        return self.matrix.shape[0]

    @property
    def lam_min(self):
        return float(self.eigenvalues[0])

    @property
    def lam_max(self):
        return float(self.eigenvalues[-1])

    def coefficients(self, v):
        """|u_j^H v|^2 for a vector v, or row-wise for a stack of vectors."""
        v = np.asarray(v, dtype=complex)
        c = v @ self.eigenvectors.conj() if v.ndim == 2 else self.eigenvectors.conj().T @ v
        return c.real**2 + c.imag**2

    def resolvent_form(self, v, c, power=1):
        """``v^H (A - cI)^{-power} v`` via the eigen-cache."""
        return float(self.coefficients(v) @ (1.0 / (self.eigenvalues - c) ** power))


def _check_lower(acc, l):
    if not acc.lam_min - l > _slack(acc.lam_min):
        raise BarrierViolationError(
            f"lower barrier {l} is not below lambda_min={acc.lam_min}", barrier=l, lam=acc.lam_min
        )


def _check_upper(acc, u):
    if not u - acc.lam_max > _slack(acc.lam_max):
        raise BarrierViolationError(
            f"upper barrier {u} is not above lambda_max={acc.lam_max}", barrier=u, lam=acc.lam_max
        )


def lower_potential(acc: HermitianAccumulator, l: float) -> float:
    """Phi_l(A) = tr (A - lI)^{-1}."""
    _check_lower(acc, l)
    return float(np.sum(1.0 / (acc.eigenvalues - l)))


def upper_potential(acc: HermitianAccumulator, u: float) -> float:
    """Phi^u(A) = tr (uI - A)^{-1}."""
    _check_upper(acc, u)
    return float(np.sum(1.0 / (u - acc.eigenvalues)))


def lower_gate(acc: HermitianAccumulator, v, l: float, delta_L: float) -> float:
    """L_A(v; l, delta_L).  Rank-one updates with ``t >= 1/L`` keep the shifted
    lower barrier below the spectrum without raising the lower potential."""
    if delta_L < 0:
        raise InvalidInputError("negative lower shift is not supported")
    _check_lower(acc, l)
    if delta_L == 0:
        return INF_GATE
    lp = l + delta_L
    _check_lower(acc, lp)
    w = acc.coefficients(v)
    d = acc.eigenvalues - lp
    gap = np.sum(1.0 / d) - np.sum(1.0 / (acc.eigenvalues - l))
    return float((w @ d**-2) / gap - w @ (1.0 / d))


def upper_gate(acc: HermitianAccumulator, v, u: float, delta_U: float) -> float:
    """U_A(v; u, delta_U).  Updates with ``t <= 1/U`` keep the spectrum below
    the shifted upper barrier without raising the upper potential."""
    if delta_U < 0:
        raise InvalidInputError("negative upper shift is not supported")
    _check_upper(acc, u)
    if delta_U == 0:
        return INF_GATE
    up = u + delta_U
    w = acc.coefficients(v)
    d = up - acc.eigenvalues
    gap = np.sum(1.0 / (u - acc.eigenvalues)) - np.sum(1.0 / d)
    return float((w @ d**-2) / gap + w @ (1.0 / d))


def rank1_update(acc: HermitianAccumulator, v, t: float) -> HermitianAccumulator:
    """A + t v v^H with a fresh eigendecomposition."""
    if t == 0:
        return acc
    v = np.asarray(v, dtype=complex)
    return HermitianAccumulator.from_matrix(acc.matrix + t * np.outer(v, v.conj()))


def admissible_interval(acc, v, l, delta_L, u, delta_U):
    """[1/L, 1/U] if the gates admit an update for v, else None."""
    L = lower_gate(acc, v, l, delta_L)
    U = upper_gate(acc, v, u, delta_U)
    if not (L >= U > 0):
        return None
    return (0.0 if L == INF_GATE else 1.0 / L, 0.0 if U == INF_GATE else 1.0 / U)
