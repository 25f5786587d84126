"""User-facing subsampling strategies.

* ``random_weighted_subsample``: i.i.d. draws proportional to squared row norms,
  reweighted so the sampled Gram matrix is unbiased.
* ``random_unweighted_subsample``: i.i.d. draws from a mixture of the uniform
  density and the leverage scores of the orthonormalised system.
* ``bss_perp``: BSS on the orthonormalised columns, weights attached to the
  original rows.
* ``plain_bss``: unweighted index selection via the block extension.
* ``two_step_unitnorm``: random thinning followed by ``plain_bss`` on the
  normalised drawn rows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bss import BssConfig, BssRun, ceil_mul, gamma, run_bss
from .errors import InternalInvariantError, InvalidConfigError, InvalidInputError
from .frames import FrameBounds, WeightedSubframe, as_frame, gram, pencil_lambda_min, row_norms_sq
from .precondition import extend_with_blocks, orthonormalize_columns, padded_size, zero_pad


def _open_unit(name, x):
    if not 0 < x < 1:
        raise InvalidConfigError(f"{name} must lie in (0, 1), got {x}")


@dataclass
class RandomDrawConfig:
    p: float = 0.1
    t: float = 0.5
    c: float = 0.5
    seed: int = 0
    n_override: Optional[int] = None

    def __post_init__(self):
        _open_unit("p", self.p)
        _open_unit("t", self.t)
        _open_unit("c", self.c)
        if self.n_override is not None and self.n_override < 1:
            raise InvalidConfigError("n_override must be positive")


def weighted_draw_count(m, A, B, p, t):
    return math.ceil(3 * B / (A * t * t) * m * math.log(2 * m / p))


def unweighted_draw_count(m, p, t, c):
    return math.ceil(3 / (c * t * t) * m * math.log(m / p))


def random_weighted_subsample(Y, bounds: FrameBounds, cfg: RandomDrawConfig) -> WeightedSubframe:
    """Draw n rows with probability ``|y_i|^2 / |Y|_F^2`` and weight each
    occurrence by ``1/(n rho_i)``; duplicates are merged by summing weights."""
    Y = as_frame(Y)
    M, m = Y.shape
    if not bounds.A > 0:
        raise InvalidInputError("random weighted subsampling needs A > 0")
    n = cfg.n_override or weighted_draw_count(m, bounds.A, bounds.B, cfg.p, cfg.t)
    norms = row_norms_sq(Y)
    rho = norms / norms.sum()
    rng = np.random.default_rng(cfg.seed)
    draws = rng.choice(M, size=n, p=rho)
    idx, counts = np.unique(draws, return_counts=True)
    w = counts / (n * rho[idx])
    return WeightedSubframe(idx, w, M, {"strategy": "random-weighted", "n_draws": n})


def unweighted_density(Y, c, seed=0):
    Yt = orthonormalize_columns(Y, seed=seed).Ytilde
    M, m = Yt.shape
    rho = (1 - c) / M + c * row_norms_sq(Yt) / m
    return rho / rho.sum()


def random_unweighted_subsample(Y, cfg: RandomDrawConfig) -> np.ndarray:
    """Index multiset drawn i.i.d. from the mixed uniform/leverage density."""
    Y = as_frame(Y)
    M, m = Y.shape
    if M < m:
        raise InvalidInputError(f"need M >= m, got M={M}, m={m}")
    n = cfg.n_override or unweighted_draw_count(m, cfg.p, cfg.t, cfg.c)
    rho = unweighted_density(Y, cfg.c, cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    return rng.choice(M, size=n, p=rho)


def unweighted_lower_certificate(beta: float, B: float, b: float) -> float:
    """Constant C with (1/M) sum_all <= C (1/m) sum_J when every row satisfies
    |y_i|^2 >= beta m / M and J comes from BSS on the tightened system."""
    if not beta > 0:
        raise InvalidInputError("beta must be positive")
    sb = math.sqrt(b)
    return B / beta * (sb + 1) ** 2 / (sb - 1) ** 2


def bss_perp_run(Y, b, delta=0.0, seed=0, traversal="random", trace=False) -> BssRun:
    Y = as_frame(Y)
    pre = orthonormalize_columns(Y, seed=seed)
    cfg = BssConfig(b=b, delta=delta, seed=seed, traversal=traversal)
    run = run_bss(pre.Ytilde, FrameBounds(1.0, 1.0), cfg, trace=trace)
    run.subframe.meta.update({"strategy": "bss-perp", "sandwich": gamma(b, 1.0) * (1 + delta)})
    return run


def bss_perp(Y, b, delta=0.0, seed=0, traversal="random") -> WeightedSubframe:
    """Weighted subframe whose Gram matrix G_J satisfies G <= G_J <= C G with
    C = ((sqrt b + 1)/(sqrt b - 1))^2 (1 + delta)."""
    return bss_perp_run(Y, b, delta, seed, traversal).subframe


@dataclass(frozen=True)
class PlainBssPlan:
    b_prime: float
    b: float
    alpha: float
    alpha_prime: float
    K: int  # ceil(alpha m)
    m_prime_bound: int

    @property
    def budget(self):
        """Upper bound ceil(b m') on the BSS output size; never exceeds ceil(b' m)."""
        return ceil_mul(self.b, self.m_prime_bound)


def plan_plain_bss(m: int, b_prime: float, strict: bool = True) -> PlainBssPlan:
    """Split the budget b' m into block columns and BSS oversampling.

    ``strict`` enforces m >= 10 and b' >= 1 + 10/m; the relaxed mode only
    needs at least one block column.
    """
    if strict:
        if m < 10:
            raise InvalidConfigError(f"PlainBSS needs m >= 10, got {m}")
        if b_prime < 1 + 10 / m:
            raise InvalidConfigError(f"PlainBSS needs b' >= 1 + 10/m = {1 + 10 / m:.6g}, got {b_prime}")
    if not b_prime > 1:
        raise InvalidConfigError("b' must exceed 1")
    b = (2 * b_prime + 1) / 3
    ap = (b_prime - 1) / (2 * b_prime + 1)
    K = math.floor(round(ap * m, 9))
    if K < 1:
        raise InvalidConfigError(f"b'={b_prime} leaves no block columns at m={m}")
    return PlainBssPlan(b_prime, b, K / m, ap, K, m + K)


def plain_bss_certificate_constant(b_prime, delta=0.0):
    return 432 * b_prime**3 / (b_prime - 1) ** 3 * (1 + delta)


@dataclass
class PlainBssResult:
    J: np.ndarray
    plan: PlainBssPlan
    run: BssRun
    padded_M: int
    m_prime: int
    meta: dict = field(default_factory=dict)


def plain_bss_run(Y, b_prime, delta=0.0, seed=0, traversal="random", strict=True) -> PlainBssResult:
    Y = as_frame(Y)
    M, m = Y.shape
    if strict and M < m + 10:
        raise InvalidConfigError(f"PlainBSS needs M >= m + 10, got M={M}")
    budget = ceil_mul(b_prime, m)
    if budget > M or (strict and budget < m + 10):
        raise InvalidConfigError(f"PlainBSS needs m + 10 <= ceil(b' m) = {budget} <= M = {M}")
    plan = plan_plain_bss(m, b_prime, strict=strict)
    Mp = padded_size(M, plan.K)
    ext = extend_with_blocks(zero_pad(Y, Mp), plan.alpha)
    cfg = BssConfig(b=plan.b, delta=delta, seed=seed, traversal=traversal)
    # padding rows carry a block entry, so they are legitimate candidates here
    run = run_bss(ext.Ytilde, FrameBounds(1.0, 1.0), cfg)
    sub = run.subframe
    J = np.sort(sub.indices[(sub.weights > 0) & (sub.indices < M)].astype(np.int64))
    if len(J) > budget:
        raise InternalInvariantError(f"PlainBSS selected {len(J)} > {budget} indices")
    meta = {
        "strategy": "plain-bss",
        "b_prime": b_prime,
        "alpha": plan.alpha,
        "certified_constant": plain_bss_certificate_constant(b_prime, delta),
    }
    return PlainBssResult(J, plan, run, Mp, ext.m_prime, meta)


def plain_bss(Y, b_prime, delta=0.0, seed=0, traversal="random", strict=True) -> np.ndarray:
    """Distinct indices J with |J| <= ceil(b' m) and
    (1/M) sum_all |<a,y>|^2 <= 432 b'^3/(b'-1)^3 (1+delta)/m sum_J |<a,y>|^2."""
    return plain_bss_run(Y, b_prime, delta, seed, traversal, strict).J


def plain_bss_pencil(Y, J):
    """lambda_min of ((1/m) sum_J yy*, (1/M) sum_all yy*)."""
    Y = as_frame(Y)
    M, m = Y.shape
    return pencil_lambda_min(gram(Y[np.asarray(J, dtype=np.int64)]) / m, gram(Y) / M)


@dataclass
class TwoStepResult:
    J: np.ndarray  # original indices; repeats only if a row was drawn twice and both copies kept
    draws: np.ndarray
    positions: np.ndarray
    n_draws: int
    lower_guarantee: float
    upper_guarantee: float


def two_step_unitnorm(Y, b_prime, p=0.1, t=0.5, seed=0, delta=0.0, strict=True) -> TwoStepResult:
    """Random norm-proportional draw, then PlainBSS on the normalised rows."""
    Y = as_frame(Y)
    M, m = Y.shape
    _open_unit("p", p)
    _open_unit("t", t)
    if strict and ceil_mul(b_prime, m) > M:
        raise InvalidConfigError(f"need M >= ceil(b' m), got M={M}")
    n = math.ceil(3 / t**2 * m * math.log(2 * m / p))
    norms = row_norms_sq(Y)
    rng = np.random.default_rng(seed)
    draws = rng.choice(M, size=n, p=norms / norms.sum())
    Z = Y[draws] / np.sqrt(norms[draws])[:, None]
    pos = plain_bss(Z, b_prime, delta=delta, seed=seed, strict=strict)
    lower = (1 - t) / plain_bss_certificate_constant(b_prime, delta)
    upper = (1 + t) * math.ceil(3 * math.log(2 * m / p) / t**2)
    return TwoStepResult(draws[pos], draws, pos, n, lower, upper)


def unit_norm_rows(Y, J):
    Y = as_frame(Y)
    R = Y[np.asarray(J, dtype=np.int64)]
    return R / np.linalg.norm(R, axis=1, keepdims=True)
