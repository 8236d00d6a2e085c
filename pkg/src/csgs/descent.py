"""Preconditioned, manifold-constrained gradient descent shared by the solvers.

States are stacked ``(m, n)`` arrays (one row per component).  The
preconditioner is the energy-norm operator ``-Lap + omega_c`` of each
component, factored once as a banded Cholesky matrix; the last node is held
at zero.  Constrained modes project the step onto the tangent space of the
constraint and retract along the ray ``U -> theta U``, which changes every
energy part by an exact power of ``theta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded

from .errors import ProjectionError
from .functionals import coefficients, combine, variation_parts
from .grid import RadialGrid
from .manifolds import dilate_values, fiber_maximum, path_exponents, ray_exponents, ray_root_nearest_one

ENERGY_SLACK = 1e-12


@dataclass
class DescentResult:
    U: np.ndarray
    iterations: int
    energy_trace: list = field(default_factory=list)
    converged: bool = False
    status: str = "running"
    gradient_residual: float = np.inf
    multiplier: float = 0.0


class Preconditioner:
    def __init__(self, grid: RadialGrid, shifts):
        diag, off = grid.stiffness_bands()
        w = grid.weights
        self.factors = []
        for kappa in shifts:
            ab = np.zeros((2, grid.n - 1))
            ab[1] = diag[:-1] + kappa * w[:-1]
            ab[0, 1:] = off[:-1]
            self.factors.append(cholesky_banded(ab))
        self.weights = w

    def solve(self, G: np.ndarray) -> np.ndarray:
        """``P^{-1} W G`` with the Dirichlet node pinned to zero."""
        out = np.zeros_like(G)
        for k, fac in enumerate(self.factors):
            out[k, :-1] = cho_solve_banded((fac, False), self.weights[:-1] * G[k, :-1])
        return out


def energy_from(coeffs, p):
    K, M, Bg, F = coeffs
    return 0.5 * (K + M + Bg) - F / (2.0 * p)


def constraint_weights(mode, p, alpha):
    """``(cK, cM, cB, cF)`` of the constraint functional."""
    if mode == "nehari":
        return 1.0, 1.0, 3.0, -1.0
    if mode == "pohozaev":
        return alpha, alpha - 1.0, 3 * alpha - 2.0, -(p * alpha - 1.0) / p
    return None


def retract(U, coeffs, mode, p, alpha):
    """Return ``(theta, coeffs_after)`` placing ``theta U`` on the constraint, or ``(None, None)``."""
    if mode == "free":
        return 1.0, coeffs
    if mode == "nehari":
        try:
            theta = fiber_maximum(coeffs, p, ray_exponents(p))[0]
        except ProjectionError:
            return None, None
    else:
        theta = ray_root_nearest_one(coeffs, p, alpha)
        if theta is None:
            return None, None
    K, M, Bg, F = coeffs
    return theta, (theta**2 * K, theta**2 * M, theta**6 * Bg, theta ** (2 * p) * F)


def project_onto(grid, U, omegas, p, b, mode, alpha=None):
    """Move ``U`` onto the constraint of ``mode`` through the maximum of its fiber.

    Nehari: the ray maximum.  Pohozaev: the dilation-path maximum, followed by
    a ray correction that removes the resampling error.  Returns
    ``(U_new, (t_star, f_star, sign_changes))``; raises ProjectionError.
    """
    U = np.array(U, dtype=float)
    coeffs = coefficients(grid, U, omegas, p, b)
    if mode == "nehari":
        t, f, changes, _, _ = fiber_maximum(coeffs, p, ray_exponents(p))
        return t * U, (t, f, changes)
    if mode != "pohozaev":
        return U, (1.0, energy_from(coeffs, p), 0)
    t, f, changes, _, _ = fiber_maximum(coeffs, p, path_exponents(p, alpha))
    V = np.vstack([dilate_values(grid, row, t, alpha) for row in U])
    V[:, -1] = 0.0
    theta, _ = retract(V, coefficients(grid, V, omegas, p, b), mode, p, alpha)
    if theta is None:
        raise ProjectionError("ray correction after the path projection found no root")
    return theta * V, (t, f, changes)


def descend(grid, U0, omegas, p, b, mode, alpha=None, tol_gradient=1e-8, max_iter=20000,
            callback=None, zero_floor=1e-300, shifts=None):
    """Run constrained preconditioned descent from ``U0`` (assumed on the constraint).

    ``shifts`` are the preconditioner constants per row (default: ``omegas``).
    """
    U = np.array(U0, dtype=float)
    U[:, -1] = 0.0
    pre = Preconditioner(grid, omegas if shifts is None else shifts)
    w = grid.weights
    cw = constraint_weights(mode, p, alpha)
    coeffs = coefficients(grid, U, omegas, p, b)
    E = energy_from(coeffs, p)
    res = DescentResult(U=U, iterations=0, energy_trace=[E])
    tau = 1.0
    for it in range(max_iter + 1):
        norm2 = coeffs[0] + coeffs[1]
        if norm2 <= zero_floor:
            res.status, res.gradient_residual = "zero", 0.0
            res.converged = mode == "free"
            break
        parts = variation_parts(grid, U, omegas, p, b)
        G = combine(parts, 0.5, 0.5, 0.5, -1.0 / (2 * p), p)
        d = -pre.solve(G)
        mu = 0.0
        if cw is not None:
            Cg = combine(parts, *cw, p)
            z = pre.solve(Cg)
            denom = float(np.sum(w * Cg * z))
            mu = -float(np.sum(w * Cg * d)) / denom
            d = d + mu * z
        gnorm2 = -float(np.sum(w * G * d))
        res.gradient_residual = np.sqrt(max(gnorm2, 0.0) / norm2)
        res.multiplier = mu
        res.iterations = it
        if res.gradient_residual <= tol_gradient:
            res.converged, res.status = True, "converged"
            break
        if it == max_iter:
            res.status = "max_iter"
            break
        tau = min(1.0, 2.0 * tau)
        while True:
            trial = np.abs(U + tau * d)
            tc = coefficients(grid, trial, omegas, p, b)
            theta, tc = retract(trial, tc, mode, p, alpha)
            if theta is not None:
                E_new = energy_from(tc, p)
                if E_new <= E + ENERGY_SLACK * abs(E):
                    break
            tau *= 0.5
            if tau < 1e-14:
                res.status = "stalled"
                break
        if res.status == "stalled":
            break
        U = theta * trial
        coeffs, E = tc, E_new
        res.energy_trace.append(E)
        if callback is not None:
            callback(it, U, E)
    res.U = U
    return res
