import math

import numpy as np
import pytest

from framesub.errors import CapabilityError, InvalidConfigError
from framesub.experiments import (
    CSV_COLUMNS,
    experiment_frame,
    loglog_slope,
    reports_to_csv,
    run_experiment,
    theoretical_lower,
)
from framesub.frames import frame_bounds


def test_theoretical_lower():
    assert theoretical_lower(4.0, 1.0) == pytest.approx(1 / 9)
    assert theoretical_lower(4.0, 2.0) == pytest.approx(1 / 18)


def test_exp3_frame_shape():
    I, Y = experiment_frame(3, seed=0, m3=30)
    assert Y.shape == (math.ceil(6 * 30 * math.log(30)), 30) and I.d == 25


def test_unknown_id():
    with pytest.raises(InvalidConfigError):
        run_experiment(4)
    with pytest.raises(InvalidConfigError):
        run_experiment(1, b=1.0)


def test_grid_requires_streaming():
    with pytest.raises(CapabilityError):
        run_experiment(3, b=2.0, grid=True, streaming=False, m3=10)


def test_grid_variant_reports_large_M():
    (r,) = run_experiment(3, b=2.0, grid=True, m3=10, pool=512)
    assert r.M == str(2001**25) and r.variant == "grid-streamed"
    assert r.lower_m_normalised >= (math.sqrt(2) - 1) ** 2 / (math.sqrt(2) + 1) ** 2 - 1e-8


def test_csv_and_threads(monkeypatch):
    reps = run_experiment(3, b=[1.5, 2.0], m3=20)
    monkeypatch.setenv("FRAMESUB_THREADS", "2")
    reps2 = run_experiment(3, b=[1.5, 2.0], m3=20)
    assert reports_to_csv(reps) == reports_to_csv(reps2)
    assert reports_to_csv(reps).splitlines()[0] == ",".join(CSV_COLUMNS)


def test_exp2_baseline_present():
    (r,) = run_experiment(2, seed=0)
    assert r.n_random == r.n and r.bounds_after_random is not None
    assert r.bounds_after_bss["A"] >= r.theoretical_lower


def test_loglog_slope_exact():
    b = np.array([1.1, 1.5, 2.0])
    assert loglog_slope(b, 3 * (b - 1) ** 2) == pytest.approx(2.0)
