import math

import numpy as np
import pytest

from framesub.bss import ceil_mul
from framesub.errors import InvalidConfigError, InvalidInputError
from framesub.frames import frame_bounds, gram, pencil_lambda_min, row_norms_sq, weighted_frame_bounds
from framesub.strategies import (
    RandomDrawConfig,
    bss_perp,
    plain_bss,
    plain_bss_certificate_constant,
    plain_bss_pencil,
    plain_bss_run,
    plan_plain_bss,
    random_unweighted_subsample,
    random_weighted_subsample,
    two_step_unitnorm,
    unit_norm_rows,
    unweighted_density,
    unweighted_lower_certificate,
)

from conftest import random_frame, tight_frame


def test_config_ranges():
    for kw in ({"p": 0}, {"t": 1}, {"c": 1.5}):
        with pytest.raises(InvalidConfigError):
            RandomDrawConfig(**kw)


def test_certificate_values():
    assert unweighted_lower_certificate(1, 1, 4) == pytest.approx(9)
    c = unweighted_lower_certificate(1, 1, 1.5)
    assert c == pytest.approx(97.99, abs=0.01)
    assert 1 / c == pytest.approx(0.01021, abs=5e-6)
    assert unweighted_lower_certificate(2, 1, 1.5) == pytest.approx(c / 2)
    with pytest.raises(InvalidInputError):
        unweighted_lower_certificate(0, 1, 2)


def test_plan_examples():
    p = plan_plain_bss(100, 2)
    assert p.b == pytest.approx(5 / 3) and p.alpha_prime == pytest.approx(0.2)
    assert p.K == 20 and p.m_prime_bound == 120
    assert p.budget == 200 == ceil_mul(2, 100)


def test_plan_properties():
    for m in range(10, 120):
        for bp in np.linspace(1 + 10 / m, 4, 9):
            p = plan_plain_bss(m, bp)
            assert p.alpha >= p.alpha_prime - 1 / m
            assert p.K / m <= p.alpha_prime + 1e-12
            assert p.budget <= ceil_mul(bp, m)


def test_plan_strict_preconditions():
    with pytest.raises(InvalidConfigError):
        plan_plain_bss(9, 3)
    with pytest.raises(InvalidConfigError):
        plan_plain_bss(20, 1.2)
    assert plan_plain_bss(20, 1.2, strict=False).K == 1


def test_random_weighted_equal_norm_uniform(rng):
    Y = tight_frame(rng, 4, 16)
    Y = Y / np.linalg.norm(Y, axis=1, keepdims=True)
    sub = random_weighted_subsample(Y, frame_bounds(Y), RandomDrawConfig(seed=1, n_override=50))
    # uniform density: each weight is (number of draws) * M / n
    assert np.allclose(sub.weights * 50 / 16, np.round(sub.weights * 50 / 16))


def test_random_weighted_rescaled_equal_norm(rng):
    Y, _, _ = random_frame(rng, 5, 30)
    Y = Y * rng.uniform(0.5, 2, size=(30, 1))
    rho = row_norms_sq(Y) / np.sum(row_norms_sq(Y))
    fro = np.sum(row_norms_sq(Y))
    assert np.allclose(row_norms_sq(Y) / rho, fro)


def test_random_weighted_skips_zero_rows(rng):
    Y, _, _ = random_frame(rng, 3, 10)
    Y = np.vstack([Y, np.zeros((4, 3))])
    sub = random_weighted_subsample(Y, frame_bounds(Y), RandomDrawConfig(seed=0))
    assert np.all(sub.indices < 10)


def test_unweighted_density_sums_to_one(rng):
    Y, _, _ = random_frame(rng, 6, 40)
    for c in (0.01, 0.5, 0.99):
        assert unweighted_density(Y, c).sum() == pytest.approx(1.0)
    d = unweighted_density(Y, 1e-12)
    assert np.allclose(d, 1 / 40)


def test_random_unweighted_needs_enough_rows():
    with pytest.raises(InvalidInputError):
        random_unweighted_subsample(np.ones((2, 3)), RandomDrawConfig())


def test_bss_perp_identity_rows_sandwich():
    Y = np.eye(6)
    sub = bss_perp(Y, 4.0)
    fb = weighted_frame_bounds(Y, sub)
    assert fb.A >= 1 - 1e-8 and fb.B <= 9 + 1e-8
    assert sub.meta["sandwich"] == pytest.approx(9)


def test_bss_perp_pencil_sandwich(rng):
    Y, _, _ = random_frame(rng, 6, 50, 3.0)
    Y = Y * rng.uniform(0.3, 3, size=(50, 1))
    b = 2.5
    sub = bss_perp(Y, b, seed=1)
    G = gram(Y)
    Gw = gram(Y[sub.indices], sub.weights)
    lo = pencil_lambda_min(Gw, G)
    hi = -pencil_lambda_min(-Gw, G)
    c = (math.sqrt(b) + 1) ** 2 / (math.sqrt(b) - 1) ** 2
    assert lo >= 1 - 1e-8 and hi <= c + 1e-8


def test_plain_bss_tight_frame(rng):
    Y = tight_frame(rng, 20, 200)
    r = plain_bss_run(Y, 2.0, seed=3)
    assert len(r.J) <= 40 and len(set(r.J.tolist())) == len(r.J)
    assert plain_bss_pencil(Y, r.J) >= 1 / 3456
    assert r.meta["certified_constant"] == pytest.approx(3456)


def test_plain_bss_non_equal_norm_with_zero_rows(rng):
    m, M = 12, 70
    Y = (rng.standard_normal((M, m)) + 1j * rng.standard_normal((M, m))) * rng.exponential(size=(M, 1)) ** 2
    Y[:5] = 0
    J = plain_bss(Y, 2.5, seed=0)
    assert len(J) <= ceil_mul(2.5, m)
    assert plain_bss_pencil(Y, J) >= 1 / plain_bss_certificate_constant(2.5)


def test_plain_bss_preconditions(rng):
    Y = tight_frame(rng, 10, 15)
    with pytest.raises(InvalidConfigError):
        plain_bss(Y, 2.0)  # M < m + 10
    Y = tight_frame(rng, 10, 40)
    with pytest.raises(InvalidConfigError):
        plain_bss(Y, 5.0)  # budget above M


def test_two_step_unit_norm(rng):
    Y = tight_frame(rng, 10, 120)
    res = two_step_unitnorm(Y, 2.0, p=0.1, t=0.5, seed=2)
    assert len(res.J) <= 20
    U = unit_norm_rows(Y, res.J)
    assert np.allclose(np.linalg.norm(U, axis=1), 1)
    fb = frame_bounds(U)
    assert res.lower_guarantee <= fb.A and fb.B <= res.upper_guarantee
    # distinct draw positions, so the upper bound only depends on the count
    assert len(set(res.positions.tolist())) == len(res.positions)
