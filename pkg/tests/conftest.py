import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")

_ACCEPTANCE = {}


def random_frame(rng, m, M, ratio=2.0):
    """Frame with Gram = V^H diag(c^2) V, c^2 in [1, ratio]; returns (Y, A, B)."""
    G = rng.standard_normal((M, m)) + 1j * rng.standard_normal((M, m))
    Q, _ = np.linalg.qr(G)
    c2 = rng.uniform(1.0, ratio, size=m)
    c2[0], c2[-1] = 1.0, ratio
    V, _ = np.linalg.qr(rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)))
    return (Q * np.sqrt(c2)) @ V, 1.0, ratio


def tight_frame(rng, m, M):
    Y, _, _ = random_frame(rng, m, M, 1.0)
    return Y


def binomial_upper(n, p, level=0.99):
    """Smallest k with P(Bin(n, p) <= k) >= level."""
    from math import comb

    acc = 0.0
    for k in range(n + 1):
        acc += comb(n, k) * p**k * (1 - p) ** (n - k)
        if acc >= level:
            return k
    return n


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def acceptance():
    def record(number, ok, detail=""):
        _ACCEPTANCE[number] = (bool(ok), detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
