"""Chern-Simons energy functionals on the radial grid.

All quantities are exact polynomial expressions in the nodal values, so the
homogeneity laws (degree 2 for the quadratic parts, 6 for the gauge term,
2p for the power terms) hold to rounding, and :func:`gradient` is the exact
derivative of :func:`energy` with respect to the cell-weighted inner product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .grid import RadialFunction, RadialGrid, StatePair, _kinetic, _laplacian, integrate

__all__ = [
    "GaugeProfile",
    "EnergyBreakdown",
    "gauge_profile",
    "B_functional",
    "coupling_F",
    "energy",
    "gradient",
    "pairing",
    "pohozaev_residual",
    "interpolation_gap",
    "extremal_profile",
]

FOUR_PI = 4.0 * np.pi


@dataclass(frozen=True, eq=False)
class GaugeProfile:
    """``h(r) = int_0^r (s/2) u^2 ds`` and the tail ``T(r) = int_r^R (h(s)/s) u^2 ds``."""

    grid: RadialGrid
    h_values: np.ndarray
    tail_values: np.ndarray


@dataclass(frozen=True)
class EnergyBreakdown:
    kinetic: float
    mass: float
    gauge: float
    coupling: float
    total: float

    @classmethod
    def assemble(cls, kinetic, mass, gauge, coupling, p) -> "EnergyBreakdown":
        total = 0.5 * kinetic + 0.5 * mass + 0.5 * gauge - coupling / (2.0 * p)
        return cls(float(kinetic), float(mass), float(gauge), float(coupling), float(total))

    def as_dict(self) -> dict:
        return {"kinetic": self.kinetic, "mass": self.mass, "gauge": self.gauge,
                "coupling": self.coupling, "total": self.total}


def _gauge_arrays(grid: RadialGrid, u: np.ndarray):
    w = grid.weights
    m = w * u * u
    h = (np.cumsum(m) - 0.5 * m) / FOUR_PI
    h[0] = 0.0
    q = m * h * grid.inv_r2 / (2.0 * np.pi)
    tail = np.cumsum(q[::-1])[::-1] - 0.5 * q
    tail[-1] = 0.0
    return h, tail


def gauge_profile(u: RadialFunction) -> GaugeProfile:
    h, tail = _gauge_arrays(u.grid, u.values)
    h.flags.writeable = False
    tail.flags.writeable = False
    return GaugeProfile(u.grid, h, tail)


def _B(grid: RadialGrid, u: np.ndarray) -> float:
    h, _ = _gauge_arrays(grid, u)
    return float(grid.weights @ (u * u * h * h * grid.inv_r2))


def B_functional(u: RadialFunction) -> float:
    """``B(u) = int u^2 h(|x|)^2 / |x|^2 dx``."""
    return _B(u.grid, u.values)


def _check_p(p):
    if not p > 1:
        raise ParameterError(f"exponent p must exceed 1, got {p}")


def _F(grid: RadialGrid, u: np.ndarray, v: np.ndarray, p: float, b: float) -> float:
    au, av = np.abs(u), np.abs(v)
    integrand = au ** (2 * p) + av ** (2 * p)
    if b:
        integrand = integrand + 2.0 * b * (au * av) ** p
    return float(grid.weights @ integrand)


def coupling_F(s: StatePair, p: float, b: float) -> float:
    """``F(u,v) = int u^{2p} + v^{2p} + 2b |uv|^p dx``."""
    _check_p(p)
    if b < 0:
        raise ParameterError(f"coupling b must be non-negative, got {b}")
    return _F(s.grid, s.u.values, s.v.values, p, b)


# -- stacked-array core used by the solvers ---------------------------------
#
# A state is an (m, n) array with m = 1 (scalar equation) or m = 2 (system);
# ``omegas`` holds the mass coefficient of each row.

def coefficients(grid: RadialGrid, U: np.ndarray, omegas, p: float, b: float):
    """Return ``(kinetic, mass, gauge, coupling)`` summed over components."""
    K = sum(_kinetic(grid, row) for row in U)
    M = sum(om * float(grid.weights @ (row * row)) for om, row in zip(omegas, U))
    Bg = sum(_B(grid, row) for row in U)
    if U.shape[0] == 2:
        F = _F(grid, U[0], U[1], p, b)
    else:
        F = float(grid.weights @ np.abs(U[0]) ** (2 * p))
    return K, M, Bg, F


def variation_parts(grid: RadialGrid, U: np.ndarray, omegas, p: float, b: float):
    """Pointwise variations ``(-Lap u, omega u, (T + h^2/r^2) u, nonlinearity)``.

    With these, the weighted-L2 gradient of ``cK*K + cM*M + cB*B + cF*F`` is
    ``2cK*lap + 2cM*mass + 2cB*gauge + 2p*cF*nonlin``.
    """
    lap = np.empty_like(U)
    gauge = np.empty_like(U)
    for k, row in enumerate(U):
        lap[k] = -_laplacian(grid, row)
        h, tail = _gauge_arrays(grid, row)
        gauge[k] = (tail + h * h * grid.inv_r2) * row
    mass = np.asarray(omegas, dtype=float)[:, None] * U
    A = np.abs(U)
    nonlin = A ** (2 * p - 2) * U
    if U.shape[0] == 2 and b:
        sgn_pow = np.sign(U) * A ** (p - 1)
        nonlin[0] += b * A[1] ** p * sgn_pow[0]
        nonlin[1] += b * A[0] ** p * sgn_pow[1]
    for arr in (lap, mass, gauge, nonlin):
        arr[:, -1] = 0.0
    return lap, mass, gauge, nonlin


def combine(parts, cK, cM, cB, cF, p):
    lap, mass, gauge, nonlin = parts
    return 2 * cK * lap + 2 * cM * mass + 2 * cB * gauge + 2 * p * cF * nonlin


def _check_params(params):
    _check_p(params.p)
    if not params.omega > 0:
        raise ParameterError(f"omega must be positive, got {params.omega}")
    if params.b < 0:
        raise ParameterError(f"coupling b must be non-negative, got {params.b}")


def energy(s: StatePair, params) -> EnergyBreakdown:
    """Energy ``I(u,v)`` split into its kinetic, mass, gauge and coupling parts."""
    _check_params(params)
    K, M, Bg, F = coefficients(s.grid, s.stacked, (1.0, params.omega), params.p, params.b)
    return EnergyBreakdown.assemble(K, M, Bg, F, params.p)


def gradient(s: StatePair, params) -> StatePair:
    """Weighted-L2 gradient of the energy: the left side minus the right side of the system.

    The boundary node carries the Dirichlet condition and gets a zero entry.
    """
    _check_params(params)
    parts = variation_parts(s.grid, s.stacked, (1.0, params.omega), params.p, params.b)
    G = combine(parts, 0.5, 0.5, 0.5, -1.0 / (2 * params.p), params.p)
    return StatePair.from_arrays(s.grid, G[0], G[1])


def pairing(a: StatePair, c: StatePair) -> float:
    """``int a_u c_u + a_v c_v dx``."""
    return integrate(a.u.values * c.u.values + a.v.values * c.v.values, a.grid)


def pohozaev_residual(s: StatePair, params) -> float:
    """``||u||^2 + w||v||^2 + 2(B(u)+B(v)) - F/p``; vanishes on solutions."""
    e = energy(s, params)
    return e.mass + 2.0 * e.gauge - e.coupling / params.p


def interpolation_gap(u: RadialFunction) -> float:
    """``4 sqrt(int|u'|^2) sqrt(B(u)) - int u^4``; non-negative, zero on the extremal family."""
    kin = _kinetic(u.grid, u.values)
    return 4.0 * np.sqrt(kin) * np.sqrt(B_functional(u)) - integrate(u.values**4, u.grid)


def extremal_profile(grid: RadialGrid, scale: float = 1.0) -> RadialFunction:
    """``u_l(r) = sqrt(8) l / (1 + l^2 r^2)`` sampled with the Dirichlet node zeroed."""
    lam = float(scale)
    return grid.sample(lambda r: np.sqrt(8.0) * lam / (1.0 + (lam * r) ** 2))
