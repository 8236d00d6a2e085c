"""Nehari and Pohozaev-Nehari constraints, and the one-dimensional fiber searches.

Along the ray ``t -> (tu, tv)`` and along the dilation path
``t -> (t^a u(t.), t^a v(t.))`` the energy is a four-term power function of
``t`` whose coefficients are the kinetic, mass, gauge and coupling parts of
the starting pair.  Both projections work on those coefficients only.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .errors import ParameterError, ProjectionError
from .functionals import coefficients
from .grid import RadialFunction, StatePair

__all__ = [
    "ProblemParams",
    "PathDiagnostics",
    "default_alpha",
    "alpha_window",
    "nehari_value",
    "nehari_project",
    "scaling_path",
    "J_value",
    "path_exponents",
    "path_energy",
    "mb_project",
]


def alpha_window(p: float) -> tuple[float, float]:
    """Open interval of admissible dilation exponents for ``2 < p <= 3``."""
    if not 2 < p <= 3:
        raise ParameterError(f"the dilation path is used for 2 < p <= 3, got p={p}")
    lo = max(1.0, 1.0 / (p - 1.0))
    hi = np.inf if p == 3 else 1.0 / (3.0 - p)
    return lo, hi


def default_alpha(p: float) -> float:
    if p == 3:
        return 2.0
    lo, hi = alpha_window(p)
    return 0.5 * (1.0 + hi)


@dataclass(frozen=True)
class ProblemParams:
    p: float
    omega: float = 1.0
    b: float = 0.0
    alpha: float | None = None
    tol_manifold: float = 1e-10
    tol_gradient: float = 1e-8
    max_iter: int = 20000

    def __post_init__(self):
        if not self.p > 1:
            raise ParameterError(f"p must exceed 1, got {self.p}")
        if not self.omega > 0:
            raise ParameterError(f"omega must be positive, got {self.omega}")
        if not self.b >= 0:
            raise ParameterError(f"b must be non-negative, got {self.b}")
        if 2 < self.p <= 3:
            if self.alpha is None:
                object.__setattr__(self, "alpha", default_alpha(self.p))
            lo, hi = alpha_window(self.p)
            if not lo < self.alpha < hi:
                raise ParameterError(
                    f"alpha={self.alpha} outside the admissible window ({lo}, {hi}) for p={self.p}")
        if self.tol_manifold <= 0 or self.tol_gradient <= 0 or self.max_iter < 0:
            raise ParameterError("tolerances must be positive and max_iter non-negative")

    @property
    def regime(self) -> str:
        """``'nehari'`` for p > 3, ``'pohozaev'`` for 2 < p <= 3, ``'trivial'`` for p <= 2."""
        if self.p > 3:
            return "nehari"
        if self.p > 2:
            return "pohozaev"
        return "trivial"

    def replace(self, **changes) -> "ProblemParams":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class PathDiagnostics:
    t_star: float
    energy_at_t_star: float
    constraint_residual: float
    sign_changes: int
    scan_max_energy: float = float("nan")
    ray_correction: float = 1.0


def _coeffs(s: StatePair, params: ProblemParams):
    return coefficients(s.grid, s.stacked, (1.0, params.omega), params.p, params.b)


def nehari_value(s: StatePair, params: ProblemParams) -> float:
    """``<I'(u,v),(u,v)> = kin + mass + 3 gauge - coupling``."""
    K, M, Bg, F = _coeffs(s, params)
    return K + M + 3.0 * Bg - F


def J_value(s: StatePair, params: ProblemParams) -> float:
    """Derivative of the energy along the dilation path at ``t = 1``."""
    a = params.alpha
    if a is None:
        raise ParameterError("J_value needs an admissible alpha (2 < p <= 3)")
    K, M, Bg, F = _coeffs(s, params)
    p = params.p
    return a * K + (a - 1) * M + (3 * a - 2) * Bg - (p * a - 1) / p * F


def ray_exponents(p: float) -> np.ndarray:
    return np.array([2.0, 2.0, 6.0, 2.0 * p])


def path_exponents(p: float, alpha: float) -> np.ndarray:
    return np.array([2 * alpha, 2 * alpha - 2, 6 * alpha - 4, 2 * p * alpha - 2])


def _fiber_terms(K, M, Bg, F, p):
    return np.array([0.5 * K, 0.5 * M, 0.5 * Bg, -F / (2.0 * p)])


def path_energy(coeffs, p: float, exponents, t) -> np.ndarray:
    """``sum_k a_k t^{e_k}`` for the energy coefficients ``coeffs = (K, M, B, F)``."""
    a = _fiber_terms(*coeffs, p)
    t = np.asarray(t, dtype=float)
    return np.sum(a[:, None] * t.reshape(1, -1) ** np.asarray(exponents)[:, None], axis=0).reshape(t.shape)


def _fiber_slope(a, e, t):
    """``t f'(t) / t^{min e}``; same sign as ``f'(t)`` and free of overflow for moderate t."""
    e0 = e.min()
    t = np.asarray(t, dtype=float)
    return np.sum((a * e)[:, None] * t.reshape(1, -1) ** (e - e0)[:, None], axis=0).reshape(t.shape)


def fiber_maximum(coeffs, p, exponents, window=(1e-3, 1e3), n_scan=400):
    """Locate the maximum of ``t -> sum_k a_k t^{e_k}`` on ``(0, inf)``.

    The scan window brackets the crossing from the balance of each positive
    term against the coupling term, widened by ``window``.  Returns ``(t_star, f(t_star), sign_changes, scan_t, scan_f)``.
    """
    a = _fiber_terms(*coeffs, p)
    e = np.asarray(exponents, dtype=float)
    if not a[3] < 0:
        raise ProjectionError("ray never crosses: coupling term vanishes")
    lead = -a[3] * e[3]
    # t f'(t) = sum_k c_k t^{e_k} - lead t^{e_F}; at the crossing the coupling term
    # exceeds every positive term and is at most three times the largest of them
    c = a[:3] * e[:3]
    active = (c > 0) & (e[:3] < e[3])
    if active.any():
        gap = e[3] - e[:3][active]
        lo = np.max((c[active] / lead) ** (1.0 / gap))
        hi = np.max((3.0 * c[active] / lead) ** (1.0 / gap))
    else:
        lo = hi = 1.0
    t_lo, t_hi = lo * window[0], max(lo * window[1], hi / window[0])
    # large path exponents (p near 3) would overflow t^e far beyond the bracket
    t_hi = min(t_hi, max(np.exp(650.0 / e.max()), hi * (1 + 1e-6)))
    ts = np.geomspace(t_lo, t_hi, max(n_scan, int(n_scan * np.log(t_hi / t_lo) / np.log(window[1] / window[0]))))
    slope = _fiber_slope(a, e, ts)
    signs = np.sign(slope)
    changes = np.flatnonzero(signs[:-1] * signs[1:] < 0)
    f_scan = np.sum(a[:, None] * ts[None, :] ** e[:, None], axis=0)
    if not changes.size:
        raise ProjectionError("no sign change of the fiber derivative in the search window",
                              trace=list(zip(ts.tolist(), slope.tolist())))
    down = [i for i in changes if slope[i] > 0]
    if not down:
        raise ProjectionError("fiber derivative never turns negative in the window",
                              trace=list(zip(ts.tolist(), slope.tolist())))
    i = down[0]
    t_star = brentq(lambda t: float(_fiber_slope(a, e, t)), ts[i], ts[i + 1],
                    xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    f_star = float(np.sum(a * t_star**e))
    return t_star, f_star, int(changes.size), ts, f_scan


def ray_root_nearest_one(coeffs, p, alpha):
    """Root ``theta`` of ``J(theta U) = 0`` closest to 1 (log scale), or None."""
    K, M, Bg, F = coeffs
    A = alpha * K + (alpha - 1) * M
    C = (3 * alpha - 2) * Bg
    D = (p * alpha - 1) / p * F
    # q(s) = A + C s^2 - D s^(p-1) with s = theta^2
    q = lambda s: A + C * s * s - D * s ** (p - 1)
    if D <= 0:
        return None
    if p == 3:
        return (A / (D - C)) ** 0.25 if D > C else None
    s_min = ((p - 1) * D / (2 * C)) ** (1.0 / (3 - p)) if C > 0 else np.inf
    roots = []
    s_hi = s_min if np.isfinite(s_min) else 1.0
    if np.isfinite(s_min) and q(s_min) >= 0:
        return None
    if not np.isfinite(s_min):
        while q(s_hi) > 0:
            s_hi *= 2.0
    lo = s_hi
    while q(lo) < 0:
        lo *= 0.5
    roots.append(brentq(q, lo, s_hi, xtol=1e-300, rtol=1e-15))
    if np.isfinite(s_min):
        hi = s_min * 2.0
        while q(hi) < 0:
            hi *= 2.0
        roots.append(brentq(q, s_min, hi, xtol=1e-300, rtol=1e-15))
    thetas = np.sqrt(np.array(roots))
    return float(thetas[np.argmin(np.abs(np.log(thetas)))])


def nehari_project(s: StatePair, params: ProblemParams, window=(1e-3, 1e3), n_scan=400):
    """Scale the pair onto the Nehari set; unique for p > 3."""
    if params.p <= 3:
        raise ParameterError(f"ray projection onto the Nehari set needs p > 3, got {params.p}")
    coeffs = _coeffs(s, params)
    if coeffs[0] + coeffs[1] == 0:
        raise ParameterError("cannot project the zero pair")
    t, f, changes, _, f_scan = fiber_maximum(coeffs, params.p, ray_exponents(params.p), window, n_scan)
    out = s * t
    K, M, Bg, F = _coeffs(out, params)
    resid = (K + M + 3 * Bg - F) / (K + M)
    return out, PathDiagnostics(t, f, resid, changes, float(f_scan.max()))


def scaling_path(s: StatePair, t: float, alpha: float) -> StatePair:
    """``(t^a u(t.), t^a v(t.))`` resampled on the same grid; zero beyond ``r_max``."""
    if not t > 0:
        raise ParameterError(f"path parameter must be positive, got {t}")
    if t == 1:
        return StatePair(s.u * 1.0, s.v * 1.0)
    return StatePair(_dilate(s.u, t, alpha), _dilate(s.v, t, alpha))


def dilate_values(grid, values: np.ndarray, t: float, alpha: float) -> np.ndarray:
    """Array form of the path map ``u -> t^a u(t.)`` (cubic spline, zero beyond ``r_max``)."""
    r = grid.nodes
    spline = CubicSpline(r, values, bc_type=((1, 0.0), "not-a-knot"))
    x = t * r
    inside = x <= grid.r_max
    out = np.zeros_like(r)
    out[inside] = spline(x[inside])
    return t**alpha * out


def _dilate(f: RadialFunction, t: float, alpha: float) -> RadialFunction:
    return RadialFunction(f.grid, dilate_values(f.grid, f.values, t, alpha))


def mb_project(s: StatePair, params: ProblemParams, window=(1e-3, 1e3), n_scan=400):
    """Move the pair along its dilation path to the maximum of the path energy.

    The maximizer ``t*`` is found from the four energy coefficients alone.
    Resampling ``gamma(t*)`` onto the grid perturbs the constraint by the
    interpolation error, so the result is finally rescaled by the factor
    ``theta`` (close to 1, reported as ``ray_correction``) that zeroes J exactly.
    """
    if not 2 < params.p <= 3:
        raise ParameterError(f"dilation-path projection is for 2 < p <= 3, got {params.p}")
    coeffs = _coeffs(s, params)
    if coeffs[0] + coeffs[1] == 0:
        raise ParameterError("cannot project the zero pair")
    e = path_exponents(params.p, params.alpha)
    t, f, changes, _, f_scan = fiber_maximum(coeffs, params.p, e, window, n_scan)
    out = scaling_path(s, t, params.alpha)
    theta = ray_root_nearest_one(_coeffs(out, params), params.p, params.alpha)
    if theta is None:
        raise ProjectionError("no ray correction places the resampled pair on the constraint")
    out = out * theta
    K, M, Bg, F = _coeffs(out, params)
    resid = J_value(out, params) / (K + M)
    return out, PathDiagnostics(t, f, resid, changes, float(f_scan.max()), theta)
