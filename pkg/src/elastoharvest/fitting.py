"""
Parameter identification from mechanical test curves.

Yeoh coefficients enter the stress linearly, so a tensile curve is fitted
by one linear least-squares solve. Prony terms are fitted by separable
least squares: relaxation times are chosen from a fixed log-spaced grid,
the weights are solved linearly (non-negative, sum below one) for each
choice, and the best choice is then polished locally in log-time.
"""

from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
import csv
import math
import warnings

import numpy as np
from scipy.optimize import minimize, minimize_scalar, nnls

from .errors import ConfigError, FitError, IdentifiabilityError
from .material import PronyTerm, YeohCoefficients

__all__ = [
    "TestCurve",
    "YeohFit",
    "PronyFit",
    "TAU_GRID_POINTS",
    "read_curve_csv",
    "write_curve_csv",
    "yeoh_design_matrix",
    "fit_yeoh",
    "prony_curve",
    "tau_grid",
    "fit_prony",
]

TAU_GRID_POINTS = 64
MAX_G_SUM = 1.0 - 1e-9

_HEADERS = {
    "tensile": ("stretch", "nominal_stress_pa"),
    "relaxation": ("time_s", "normalized_stress"),
}


@dataclass(frozen=True)
class TestCurve:
    points: np.ndarray
    kind: str

    __test__ = False  # not a pytest class

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if self.kind not in _HEADERS:
            raise ConfigError(f"curve kind must be tensile or relaxation, got {self.kind!r}")
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 4:
            raise ConfigError("a test curve needs at least 4 (x, y) rows")
        if np.any(np.diff(pts[:, 0]) <= 0):
            raise ConfigError("curve abscissa must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @property
    def x(self):
        return self.points[:, 0]

    @property
    def y(self):
        return self.points[:, 1]


@dataclass(frozen=True)
class YeohFit:
    coefficients: YeohCoefficients
    residual_norm: float
    relative_residual: float
    n_points: int
    mode: str


@dataclass(frozen=True)
class PronyFit:
    terms: tuple
    residual_norm: float
    relative_residual: float
    n_points: int
    grid: np.ndarray


def read_curve_csv(path):
    """Two-column CSV whose header names the curve kind."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"curve file not found: {path}")
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    header = tuple(h.strip() for h in rows[0])
    kind = next((k for k, h in _HEADERS.items() if h == header), None)
    if kind is None:
        raise ConfigError(f"{path.name}: header must be one of {list(_HEADERS.values())}")
    try:
        pts = np.array([[float(a), float(b)] for a, b in rows[1:]])
    except ValueError as exc:
        raise ConfigError(f"{path.name}: {exc}") from None
    return TestCurve(pts, kind)


def write_curve_csv(curve, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_HEADERS[curve.kind])
        for a, b in curve.points:
            w.writerow([repr(float(a)), repr(float(b))])


# --- Yeoh ---------------------------------------------------------------------

def yeoh_design_matrix(lam, mode="equibiaxial"):
    """Columns map (c10, c20, c30) to nominal stress at each stretch.

    Nominal stress is the Cauchy stress divided by the loaded stretch, with
    the thickness (equibiaxial) or lateral (uniaxial) stress set to zero.
    """
    lam = np.asarray(lam, dtype=float)
    if mode == "equibiaxial":
        inv = 2 * lam**2 + lam**-4
        pre = 2 * (lam**2 - lam**-4) / lam
    elif mode == "uniaxial":
        inv = lam**2 + 2 / lam
        pre = 2 * (lam**2 - 1 / lam) / lam
    else:
        raise ConfigError(f"unknown tensile mode {mode!r}")
    x = inv - 3
    return np.column_stack([pre, pre * 2 * x, pre * 3 * x**2])


def fit_yeoh(curve, mode="equibiaxial"):
    if curve.kind != "tensile":
        raise ConfigError("fit_yeoh needs a tensile curve")
    A = yeoh_design_matrix(curve.x, mode)
    y = curve.y
    scale = np.linalg.norm(A, axis=0)
    if np.any(scale == 0) or np.linalg.matrix_rank(A / np.where(scale == 0, 1, scale)) < 3:
        raise IdentifiabilityError("tensile data cannot separate c10, c20, c30 "
                                   "(need stretches away from 1 at 3+ distinct levels)")
    sol, *_ = np.linalg.lstsq(A / scale, y, rcond=None)
    coeffs = sol / scale
    resid = float(np.linalg.norm(A @ coeffs - y))
    return YeohFit(YeohCoefficients(*map(float, coeffs)), resid,
                   resid / max(float(np.linalg.norm(y)), 1e-300),
                   int(y.size), mode)


# --- Prony --------------------------------------------------------------------

def prony_curve(terms, t):
    t = np.asarray(t, dtype=float)
    out = np.ones_like(t)
    for term in terms:
        out -= term.g * -np.expm1(-t / term.tau)
    return out


def tau_grid(t, n=TAU_GRID_POINTS):
    """Log-spaced candidates from 0.1x the first positive time to 10x the last."""
    t = np.asarray(t, dtype=float)
    positive = t[t > 0]
    if positive.size == 0:
        raise ConfigError("relaxation curve needs positive times")
    return np.geomspace(0.1 * positive[0], 10 * t[-1], n)


def _basis(t, taus):
    return np.column_stack([-np.expm1(-t / tau) for tau in taus])


def _solve_weights(t, y, taus):
    """Non-negative weights with sum below one; returns (g, residual, unconstrained residual)."""
    B = _basis(t, taus)
    rhs = 1.0 - y
    g, r = nnls(B, rhs)
    if g.sum() <= MAX_G_SUM:
        return g, r, r
    with warnings.catch_warnings():
        # SLSQP may probe just outside the bounds before clipping
        warnings.simplefilter("ignore", RuntimeWarning)
        res = _constrained_lsq(B, rhs, g, len(taus))
    w = np.clip(res.x, 0.0, None)
    if w.sum() > MAX_G_SUM:
        w *= MAX_G_SUM / w.sum()
    return w, float(np.linalg.norm(B @ w - rhs)), r


def _constrained_lsq(B, rhs, g, n):
    return minimize(lambda w: np.sum((B @ w - rhs) ** 2), g * (MAX_G_SUM / g.sum()),
                    jac=lambda w: 2 * B.T @ (B @ w - rhs), method="SLSQP",
                    bounds=[(0.0, MAX_G_SUM)] * n,
                    constraints=[{"type": "ineq", "fun": lambda w: MAX_G_SUM - w.sum(),
                                  "jac": lambda w: -np.ones_like(w)}],
                    options={"ftol": 1e-15, "maxiter": 500})


def fit_prony(curve, n_terms=1):
    """Fit ``n_terms`` relaxation terms to a normalized relaxation curve.

    Every combination of ``n_terms`` distinct grid times is tried; the one
    with the lowest residual wins (ties go to the smallest times), then
    each time constant is refined within one grid cell of its pick.
    """
    if curve.kind != "relaxation":
        raise ConfigError("fit_prony needs a relaxation curve")
    if n_terms < 1:
        raise ConfigError("n_terms must be >= 1")
    if curve.points.shape[0] < 2 * n_terms + 2:
        raise ConfigError(f"need at least {2 * n_terms + 2} points for {n_terms} terms")
    t, y = curve.x, curve.y
    grid = tau_grid(t)

    best = None
    best_unconstrained = math.inf
    for idx in combinations(range(grid.size), n_terms):
        g, r, r_free = _solve_weights(t, y, grid[list(idx)])
        best_unconstrained = min(best_unconstrained, r_free)
        if best is None or r < best[0] - 1e-15 * max(best[0], 1.0):
            best = (r, idx, g)
    if best is None or not np.all(np.isfinite(best[2])):
        raise FitError("no admissible Prony weights found", best_unconstrained)

    _, idx, g = best
    log_grid = np.log(grid)
    log_tau = log_grid[list(idx)].copy()
    for _ in range(3):
        for k in range(n_terms):
            i = idx[k]
            lo = log_grid[max(i - 1, 0)]
            hi = log_grid[min(i + 1, grid.size - 1)]

            def cost(x, k=k):
                trial = log_tau.copy()
                trial[k] = x
                return _solve_weights(t, y, np.exp(trial))[1]

            res = minimize_scalar(cost, bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-10})
            if res.fun <= cost(log_tau[k]):
                log_tau[k] = res.x
    taus = np.exp(log_tau)
    g, r, _ = _solve_weights(t, y, taus)
    if g.sum() >= 1.0:
        raise FitError("Prony weights violate sum(g) < 1 after projection", best_unconstrained)
    order = np.argsort(taus)
    terms = tuple(PronyTerm(float(g[k]), float(taus[k])) for k in order)
    signal = max(float(np.linalg.norm(1.0 - y)), float(np.linalg.norm(y)), 1e-300)
    return PronyFit(terms, float(r), float(r) / signal, int(t.size), grid)
