"""Sampling densities, Marcinkiewicz-Zygmund node generation and least-squares
recovery on finite-dimensional function spaces."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidInputError, InvalidModelError, RankError, SelectionFailureError
from .fourier import FrequencyIndexSet, fourier_matrix
from .strategies import plain_bss_run

TAIL_CLAMP = 1e-10


@dataclass
class BasisSpec:
    """``evaluate(X)`` maps an (n, d) node array to the (n, m) matrix eta_k(x_i).

    The domain is either the box [lower, upper) with normalised Lebesgue
    measure or, when ``points`` is set, a finite set with uniform measure.
    """

    m: int
    d: int
    evaluate: Callable[[np.ndarray], np.ndarray]
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    points: Optional[np.ndarray] = None
    sup_sq_mean: Optional[float] = None  # sup_x sum_k |eta_k(x)|^2 / m, if known
    name: str = "custom"

    def __post_init__(self):
        if self.points is None:
            self.lower = np.zeros(self.d) if self.lower is None else np.asarray(self.lower, float)
            self.upper = np.ones(self.d) if self.upper is None else np.asarray(self.upper, float)

    def __call__(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.d:
            raise InvalidInputError(f"nodes have dimension {X.shape[1]}, basis expects {self.d}")
        return np.asarray(self.evaluate(X))

    def empirical_gram(self, count=20000, seed=0):
        """Monte-Carlo estimate of the L2 Gram matrix (identity if orthonormal)."""
        X = uniform_nodes(self, count, np.random.default_rng(seed))
        V = self(X)
        return V.conj().T @ V / count


def fourier_basis(I: FrequencyIndexSet) -> BasisSpec:
    return BasisSpec(I.m, I.d, lambda X: fourier_matrix(I, X), sup_sq_mean=1.0, name="fourier")


@dataclass
class NodeSet:
    nodes: np.ndarray
    weights: Optional[np.ndarray] = None
    source_indices: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.nodes = np.atleast_2d(np.asarray(self.nodes, dtype=float))
        if self.nodes.shape[0] < 1:
            raise InvalidInputError("node set is empty")
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=float)
            if self.weights.shape != (len(self.nodes),) or np.any(self.weights < 0):
                raise InvalidInputError("node weights must be nonnegative, one per node")

    def __len__(self):
        return len(self.nodes)


@dataclass
class SpectralModel:
    """Truncated singular system of an RKHS embedding.

    ``eta(X)`` returns the (n, N) values of the L2-orthonormal functions;
    the RKHS-orthonormal ones are e_k = sigma_k eta_k.
    """

    sigma: np.ndarray
    eta: Callable[[np.ndarray], np.ndarray]
    kernel_diag: Callable[[np.ndarray], np.ndarray]
    trace: float

    def __post_init__(self):
        self.sigma = np.asarray(self.sigma, dtype=float)
        if np.any(self.sigma <= 0) or np.any(np.diff(self.sigma) > 0):
            raise InvalidModelError("singular values must be positive and nonincreasing")

    @property
    def N(self):
        return len(self.sigma)

    def e(self, X):
        return self.eta(X) * self.sigma


# -- densities ---------------------------------------------------------------

def density_finite(basis: BasisSpec, X) -> np.ndarray:
    """1/2 + 1/2 * sum_k |eta_k(x)|^2 / m."""
    V = basis(X)
    return 0.5 + 0.5 * np.sum(V.real**2 + V.imag**2, axis=1) / basis.m


def rkhs_density(model: SpectralModel, m: int, X) -> np.ndarray:
    if not 0 < m < model.N:
        raise InvalidModelError(f"need 0 < m < N = {model.N}, got m={m}")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    s2 = model.sigma[:m] ** 2
    denom = model.trace - s2.sum()
    if not denom > 0:
        raise InvalidModelError("kernel trace does not exceed the partial sum of sigma^2")
    V = model.eta(X)[:, :m]
    P = V.real**2 + V.imag**2
    tail = np.asarray(model.kernel_diag(X), dtype=float) - P @ s2
    if np.any(tail < -TAIL_CLAMP):
        raise InvalidModelError(f"K(x,x) falls below the truncated sum by {-tail.min():.3g}")
    tail = np.maximum(tail, 0.0)
    return 0.5 * (P.sum(axis=1) / m + tail / denom)


def rkhs_weight(model: SpectralModel, m: int, X) -> np.ndarray:
    """rho_m(x)^(-1/2) where the density is positive, 0 elsewhere."""
    rho = rkhs_density(model, m, X)
    w = np.zeros_like(rho)
    pos = rho > 0
    w[pos] = rho[pos] ** -0.5
    return w


# -- sampling ----------------------------------------------------------------

def uniform_nodes(basis: BasisSpec, count, rng):
    if basis.points is not None:
        return np.asarray(basis.points, float)[rng.integers(0, len(basis.points), size=count)]
    return basis.lower + (basis.upper - basis.lower) * rng.random((count, basis.d))


def _envelope(basis, density, rng, probe=4096, safety=1.5):
    if basis.sup_sq_mean is not None and density is None:
        return 0.5 + 0.5 * basis.sup_sq_mean
    f = density or (lambda X: density_finite(basis, X))
    return safety * float(np.max(f(uniform_nodes(basis, probe, rng))))


def rejection_sampler(basis: BasisSpec, count: int, seed=0, density=None, envelope=None,
                      max_rounds=1000):
    """i.i.d. draws from ``density`` d(nu) (default: the finite-space density).

    Discrete domains are sampled exactly; boxes use rejection against the
    uniform measure with a constant envelope.
    """
    rng = np.random.default_rng(seed)
    f = density or (lambda X: density_finite(basis, X))
    if basis.points is not None:
        pts = np.asarray(basis.points, float)
        w = f(pts)
        return pts[rng.choice(len(pts), size=count, p=w / w.sum())]
    env = envelope or _envelope(basis, density, rng)
    out = []
    have = 0
    for _ in range(max_rounds):
        X = uniform_nodes(basis, max(2 * (count - have), 64), rng)
        keep = rng.random(len(X)) * env < f(X)
        out.append(X[keep])
        have += int(keep.sum())
        if have >= count:
            return np.vstack(out)[:count]
    raise SelectionFailureError(f"rejection sampler produced only {have} of {count} nodes")


def mz_draw_count(m, p, t):
    return math.ceil(4 / t**2 * m * math.log(m / p))


def mz_matrix(basis, X):
    """Rows eta(x)/sqrt(phi(x)) for the finite-space density phi."""
    V = basis(X)
    phi = 0.5 + 0.5 * np.sum(V.real**2 + V.imag**2, axis=1) / basis.m
    return V / np.sqrt(phi)[:, None]


def mz_lambda_min(basis, X, normalise=None):
    """lambda_min of (1/n) sum_i v(x_i) v(x_i)^*, v(x) = (eta_k(x))_k."""
    V = basis(X)
    n = normalise or len(V)
    return float(np.linalg.eigvalsh(V.conj().T @ V / n)[0])


def generate_mz_nodes(basis: BasisSpec, p=0.1, t=2 / 3, b=1.5, seed=0, redraw=False,
                      max_redraws=20, strict=True, M=None) -> NodeSet:
    """Oversample from the finite-space density, then thin with PlainBSS to at
    most ceil(b m) nodes."""
    if not (0 < p < 1 and 0 < t < 1):
        raise InvalidInputError("p and t must lie in (0, 1)")
    m = basis.m
    M = M or mz_draw_count(m, p, t)
    rng = np.random.default_rng(seed)
    for attempt in range(max_redraws if redraw else 1):
        s = int(rng.integers(2**63))
        Xt = rejection_sampler(basis, M, seed=s)
        L = mz_matrix(basis, Xt)
        lam = float(np.linalg.eigvalsh(L.conj().T @ L / M)[0])
        if not redraw or lam >= 1 - t:
            break
    else:
        raise SelectionFailureError(f"no draw met the lower frame bound 1 - t after {max_redraws} tries")
    res = plain_bss_run(L, b, seed=seed, strict=strict)
    meta = {"M": M, "b": b, "p": p, "t": t, "draw_lambda_min": lam, "redraws": attempt}
    return NodeSet(Xt[res.J], source_indices=res.J, meta=meta)


# -- least squares -----------------------------------------------------------

def _design(basis, nodes: NodeSet, weighted):
    L = basis(nodes.nodes)
    if not weighted:
        return L, None
    if nodes.weights is None:
        raise InvalidInputError("weighted recovery needs node weights")
    return L, np.sqrt(nodes.weights)


def least_squares_recover(basis: BasisSpec, nodes: NodeSet, samples, weighted=False, rtol=None):
    """Coefficients minimising sum_i w_i |g(x_i) - f_i|^2 over g in V_m
    (w_i = 1 for the plain operator), computed through the SVD."""
    f = np.asarray(samples, dtype=complex).ravel()
    L, sw = _design(basis, nodes, weighted)
    n, m = L.shape
    if f.shape != (n,):
        raise InvalidInputError(f"{f.size} samples for {n} nodes")
    if sw is not None:
        L = L * sw[:, None]
        f = f * sw
    U, s, Vh = np.linalg.svd(L, full_matrices=False)
    tol = (rtol if rtol is not None else max(n, m) * np.finfo(float).eps) * (s[0] if s.size else 0.0)
    if n < m or s[-1] <= tol:
        smin = float(s[-1]) if n >= m else 0.0
        raise RankError(f"design matrix is rank deficient (sigma_min={smin:.3g})", sigma_min=smin)
    return Vh.conj().T @ ((U.conj().T @ f) / s)


def pseudo_inverse_norm(basis, nodes, weighted=False):
    L, sw = _design(basis, nodes, weighted)
    if sw is not None:
        L = L * sw[:, None]
    return float(np.linalg.norm(np.linalg.pinv(L), 2))


@dataclass
class Quadrature:
    nodes: np.ndarray
    weights: np.ndarray

    @classmethod
    def tensor_grid(cls, d, per_axis):
        from .fourier import equispaced_grid

        X = equispaced_grid(d, per_axis)
        return cls(X, np.full(len(X), 1.0 / len(X)))

    def norm(self, values):
        v = np.asarray(values)
        return math.sqrt(float(np.sum(self.weights * (v.real**2 + v.imag**2))))


def recovery_error_report(basis, nodes: NodeSet, f, quadrature: Quadrature, weighted=False,
                          eval_grid=None, b=None):
    """Recovery error of the least-squares operator with reference norms from
    ``quadrature``.  The best-approximation proxy is the sup over
    ``eval_grid`` (default: the quadrature nodes) of |f - P_m f|, where P_m is
    the quadrature-discretised L2 projection."""
    c = least_squares_recover(basis, nodes, f(nodes.nodes), weighted=weighted)
    Xq = quadrature.nodes
    Vq = basis(Xq)
    fq = f(Xq)
    Sf = Vq @ c
    proj = Vq.conj().T @ (quadrature.weights * fq)
    Pf = Vq @ proj
    Xe = Xq if eval_grid is None else eval_grid
    res = f(Xe) - basis(Xe) @ proj
    linf = float(np.max(np.abs(res)))
    l2 = quadrature.norm(fq - Sf)
    n, m = len(nodes), basis.m
    return {
        "n": n,
        "m": m,
        "b": float(b if b is not None else nodes.meta.get("b", n / m)),
        "mz_lambda_min": mz_lambda_min(basis, nodes.nodes),
        "l2_error": l2,
        "projection_error": quadrature.norm(fq - Pf),
        "aliasing_error": quadrature.norm(Pf - Sf),
        "linf_best_proxy": linf,
        "ratio": l2 / linf if linf > 0 else (0.0 if l2 == 0 else math.inf),
        "weighted": bool(weighted),
        "eval_grid_size": int(len(Xe)),
    }


# -- I/O ---------------------------------------------------------------------

def write_nodes_csv(path, ns: NodeSet):
    d = ns.nodes.shape[1]
    cols = [f"x{j + 1}" for j in range(d)] + (["w"] if ns.weights is not None else [])
    data = ns.nodes if ns.weights is None else np.column_stack([ns.nodes, ns.weights])
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        np.savetxt(fh, data, delimiter=",", fmt="%.17g")


def read_nodes_csv(path) -> NodeSet:
    with open(path) as fh:
        cols = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.shape[1] != len(cols):
        raise InvalidInputError("node CSV body does not match its header")
    if cols[-1] == "w":
        return NodeSet(data[:, :-1], data[:, -1])
    return NodeSet(data)


def write_samples_csv(path, values):
    v = np.asarray(values, dtype=complex).ravel()
    with open(path, "w") as fh:
        fh.write("re,im\n")
        np.savetxt(fh, np.column_stack([v.real, v.imag]), delimiter=",", fmt="%.17g")


def read_samples_csv(path) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "re,im":
            raise InvalidInputError(f"samples CSV must start with 're,im', got {header!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return data[:, 0] + 1j * data[:, 1]
