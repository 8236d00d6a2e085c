"""Scalar Chern-Simons-Schrodinger equation.

    -Lap u + w u + (T(r) + h(r)^2/r^2) u = |u|^{2p-2} u

Ground states are computed by constrained descent on the Nehari set (p > 3)
or on the Pohozaev-Nehari set of the dilation path (2 < p <= 3).  The module
also evaluates the coupling thresholds built from scalar ground states and
the elementary nonexistence certificate for 1 < p <= 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .descent import descend, energy_from, project_onto
from .errors import ParameterError, ProjectionError, RegimeError
from .functionals import EnergyBreakdown, coefficients
from .grid import RadialFunction, RadialGrid
from .manifolds import ProblemParams
from .seeds import PRESCAN_WIDTHS, InitialGuess

__all__ = [
    "ScalarGroundState",
    "ThresholdSet",
    "solve_scalar",
    "thresholds",
    "nonexistence_certificate",
    "NonexistenceCertificate",
    "b_tilde",
    "SPLIT_P",
]

SPLIT_P = 3.0 + np.sqrt(6.0)
PRESCAN_AMPLITUDES = (0.5, 1.0, 2.0)


@dataclass(frozen=True, eq=False)
class ScalarGroundState:
    """Result of :func:`solve_scalar`.

    ``pohozaev_residual`` is the raw value ``w||u||^2 + 2B(u) - ||u||_{2p}^{2p}/p``;
    :attr:`relative_pohozaev` divides it by the mass term.
    """

    u: RadialFunction
    omega: float
    p: float
    level: float
    manifold_residual: float
    pohozaev_residual: float
    positive: bool
    status: str = "converged"
    gradient_residual: float = float("nan")
    iterations: int = 0
    alpha: float | None = None
    energy: EnergyBreakdown | None = None
    energy_trace: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)
    multiplier: float = 0.0

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    @property
    def power_norm(self) -> float:
        """``||u||_{2p}^{2p}``."""
        return self.energy.coupling

    @property
    def relative_pohozaev(self) -> float:
        return self.pohozaev_residual / self.energy.mass

    @property
    def regime(self) -> str:
        return "nehari" if self.p > 3 else "pohozaev"


def _constraint(mode, K, M, Bg, F, p, alpha):
    if mode == "nehari":
        return K + M + 3 * Bg - F
    return alpha * K + (alpha - 1) * M + (3 * alpha - 2) * Bg - (p * alpha - 1) / p * F


def _prescan(grid, kind, omegas, p, b, mode, alpha, amplitudes=PRESCAN_AMPLITUDES):
    """Return ``(A, sigma)`` whose profile has the lowest projected energy."""
    best = None
    guess = InitialGuess(kind="extremal_pair" if kind == "extremal_pair" else "gaussian_pair")
    amps = (1.0,) if mode == "nehari" else amplitudes  # ray projection ignores amplitude
    for A in amps:
        for sigma in PRESCAN_WIDTHS:
            row = guess.profile(grid, A, sigma)
            U = np.vstack([row] * len(omegas))
            try:
                _, (_, f, _) = project_onto(grid, U, omegas, p, b, mode, alpha)
            except ProjectionError:
                continue
            if best is None or f < best[0]:
                best = (f, A, float(sigma))
    if best is None:
        raise ProjectionError("no pre-scan seed could be projected onto the constraint")
    return best[1], best[2]


def _scalar_seed(grid, seed: InitialGuess, omega, p, mode, alpha):
    if seed.kind == "custom":
        return np.array(seed.custom.u.values, dtype=float)
    if seed.kind == "scalar_seeded":
        seed = InitialGuess(kind="gaussian_pair", amplitude_u=seed.amplitude_u, width_u=seed.width_u,
                            rng_seed=seed.rng_seed)
    seed = seed.resolved()
    A, sigma = seed.amplitude_u, seed.width_u
    if sigma is None:
        A0, sigma = _prescan(grid, seed.kind, (omega,), p, 0.0, mode, alpha)
        A = A0 if A is None else A
    return seed.profile(grid, 1.0 if A is None else A, sigma)


def solve_scalar(p: float, omega: float, grid: RadialGrid, seed: InitialGuess | None = None, *,
                 alpha: float | None = None, tol_gradient: float = 1e-8, tol_manifold: float = 1e-10,
                 max_iter: int = 20000) -> ScalarGroundState:
    """Positive ground state of the scalar equation at frequency ``omega``.

    Raises RegimeError for ``p <= 2`` and ProjectionError if the seed cannot
    be placed on the constraint.  Nonconvergence is reported through
    ``status`` (``'max_iter'``, ``'stalled'``) and collapse through ``'trivial'``.
    """
    if not p > 2:
        raise RegimeError(f"scalar ground states are computed for p > 2, got p={p}")
    params = ProblemParams(p=p, omega=omega, alpha=alpha, tol_gradient=tol_gradient,
                           tol_manifold=tol_manifold, max_iter=max_iter)
    mode, alpha = params.regime, params.alpha
    seed = seed or InitialGuess()
    omegas = (float(omega),)
    row = _scalar_seed(grid, seed, omega, p, mode, alpha)
    if not np.any(row[:-1]):
        raise ParameterError("seed is identically zero")
    U, _ = project_onto(grid, np.abs(row)[None, :], omegas, p, 0.0, mode, alpha)
    res = descend(grid, U, omegas, p, 0.0, mode, alpha, tol_gradient=tol_gradient, max_iter=max_iter)
    U = res.U
    K, M, Bg, F = coefficients(grid, U, omegas, p, 0.0)
    status = res.status
    if status == "zero" or K + M == 0:
        status = "trivial"
    scale = max(K + M, np.finfo(float).tiny)
    resid = _constraint(mode, K, M, Bg, F, p, alpha) / scale
    if status == "converged" and abs(resid) > tol_manifold:
        status = "off_manifold"
    u = RadialFunction(grid, U[0])
    return ScalarGroundState(
        u=u, omega=float(omega), p=float(p), level=float(energy_from((K, M, Bg, F), p)),
        manifold_residual=float(resid), pohozaev_residual=float(M + 2 * Bg - F / p),
        positive=bool(np.all(U[0, :-1] > 0)), status=status,
        gradient_residual=float(res.gradient_residual), iterations=res.iterations,
        alpha=alpha, energy=EnergyBreakdown.assemble(K, M, Bg, F, p),
        energy_trace=np.asarray(res.energy_trace), multiplier=res.multiplier)


# -- thresholds ----------------------------------------------------------------

@dataclass(frozen=True)
class ThresholdSet:
    """Coupling thresholds; ``b_star`` is the maximum of all four values.

    ``regime`` names the side of ``p = 3 + sqrt(6)``; ``regime_max`` is the
    larger threshold of the pair that carries the base ``3^{p/(p-1)}`` for
    ``p >= 3 + sqrt 6`` and ``3^{3/(p-3)}`` below it.
    """

    b1: float
    b2: float
    b3: float
    b4: float
    b_star: float
    regime: str
    regime_max: float
    p: float
    omega: float
    E1: float
    Ew: float
    norm1: float
    normw: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _threshold(p, base_exp, norm, level):
    return ((p - 1) * 3.0**base_exp * norm / (p * level)) ** (p - 1)


def thresholds(p: float, omega: float, gs1: ScalarGroundState, gsw: ScalarGroundState) -> ThresholdSet:
    if not p > 3:
        raise RegimeError(f"coupling thresholds are defined for p > 3, got p={p}")
    if gs1.level <= 0 or gsw.level <= 0:
        raise ParameterError("scalar levels must be positive")
    n1, nw, E1, Ew = gs1.power_norm, gsw.power_norm, gs1.level, gsw.level
    e12 = p / (p - 1)
    e34 = 3.0 / (p - 3)
    b1 = _threshold(p, e12, n1, Ew)
    b2 = _threshold(p, e12, nw, E1)
    b3 = _threshold(p, e34, n1, Ew)
    b4 = _threshold(p, e34, nw, E1)
    if p >= SPLIT_P:
        regime, regime_max = "p_geq_3plusSqrt6", max(b1, b2)
    else:
        regime, regime_max = "p_in_3_to_3plusSqrt6", max(b3, b4)
    return ThresholdSet(b1, b2, b3, b4, max(b1, b2, b3, b4), regime, regime_max,
                        float(p), float(omega), E1, Ew, n1, nw)


# -- nonexistence (1 < p <= 2) --------------------------------------------------

@dataclass(frozen=True)
class NonexistenceCertificate:
    holds: bool
    min_value: float
    argmin: float


def _f1(t, p, omega, b):
    return omega * t * t + 0.5 * t**4 - (1.0 + b) * t ** (2 * p)


def nonexistence_certificate(p: float, omega: float, b: float, t_max: float = 1e3,
                             tol: float = 1e-12, n_scan: int = 4000) -> NonexistenceCertificate:
    """Minimize ``w t^2 + t^4/2 - (1+b) t^{2p}`` over ``(0, t_max]``.

    The certificate holds when the minimum is ``>= -tol``.
    """
    if not 1 < p <= 2:
        raise RegimeError(f"the certificate applies to 1 < p <= 2, got p={p}")
    if b < 0 or not omega > 0:
        raise ParameterError("need b >= 0 and omega > 0")
    ts = np.geomspace(1e-8 * t_max, t_max, n_scan)
    vals = _f1(ts, p, omega, b)
    i = int(np.argmin(vals))
    t_best, f_best = ts[i], vals[i]
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, n_scan - 1)]
    if hi > lo:
        opt = minimize_scalar(lambda t: _f1(t, p, omega, b), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-14 * hi})
        if opt.fun < f_best:
            t_best, f_best = float(opt.x), float(opt.fun)
    return NonexistenceCertificate(bool(f_best >= -tol), float(f_best), float(t_best))


def _btilde_residual(b, p):
    return 1.0 + (p * (1 + b)) ** (1 / (2 - p)) * (p - 1) ** ((p - 1) / (2 - p)) * (p - 2)


def b_tilde(p: float, b_max: float = 1e6) -> float | None:
    """Root in ``(0, b_max]`` of ``1 + (p(1+b))^{1/(2-p)} (p-1)^{(p-1)/(2-p)} (p-2)``; None if absent."""
    if not 1 < p < 2:
        raise RegimeError(f"b_tilde needs 1 < p < 2, got p={p}")
    lo_val, hi_val = _btilde_residual(0.0, p), _btilde_residual(b_max, p)
    if lo_val * hi_val > 0:
        return None
    if lo_val == 0:
        return 0.0
    return brentq(_btilde_residual, 0.0, b_max, args=(p,), xtol=1e-15, rtol=4 * np.finfo(float).eps)
