"""Radial discretization of H^1_r(R^2).

Functions are sampled on the uniform mesh ``r_i = i*h``, ``i = 0..n-1``.
Integrals over the plane use the area of the annular cell around each node
(a disk of radius h/2 at the origin), so that ``sum(weights) == pi*R**2``.
The gradient energy is the midpoint rule on the staggered differences
``(u[i+1]-u[i])/h``; its variation with respect to the cell-weighted inner
product is exactly the five-point radial Laplacian stencil used below.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import GridError, ParameterError

__all__ = [
    "RadialGrid",
    "RadialFunction",
    "StatePair",
    "integrate",
    "gradient_energy",
    "h1_norm_sq",
    "apply_radial_laplacian",
]


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial mesh on ``[0, r_max]`` with ``n`` nodes (origin included)."""

    r_max: float = 40.0
    n: int = 4096

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 16:
            raise GridError(f"grid needs at least 16 nodes, got n={self.n}")
        if not (np.isfinite(self.r_max) and self.r_max > 0):
            raise GridError(f"r_max must be positive and finite, got {self.r_max}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "r_max", float(self.r_max))

    @property
    def spacing(self) -> float:
        return self.r_max / (self.n - 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        r = np.arange(self.n) * self.spacing
        r[-1] = self.r_max
        r.flags.writeable = False
        return r

    @cached_property
    def midpoints(self) -> np.ndarray:
        m = 0.5 * (self.nodes[1:] + self.nodes[:-1])
        m.flags.writeable = False
        return m

    @cached_property
    def weights(self) -> np.ndarray:
        """Area of the cell owned by each node."""
        h = self.spacing
        w = 2.0 * np.pi * self.nodes * h
        w[0] = np.pi * h * h / 4.0
        w[-1] = np.pi * (self.r_max**2 - (self.r_max - 0.5 * h) ** 2)
        w.flags.writeable = False
        return w

    @cached_property
    def inv_r2(self) -> np.ndarray:
        """``1/r**2`` with the origin entry set to 0 (every use multiplies a factor vanishing there)."""
        out = np.zeros(self.n)
        out[1:] = 1.0 / self.nodes[1:] ** 2
        out.flags.writeable = False
        return out

    def stiffness_bands(self) -> tuple[np.ndarray, np.ndarray]:
        """Diagonal and super-diagonal of half the Hessian of :func:`gradient_energy`."""
        h = self.spacing
        c = 2.0 * np.pi * self.midpoints / h
        diag = np.zeros(self.n)
        diag[:-1] += c
        diag[1:] += c
        return diag, -c

    def sample(self, f: Callable[[np.ndarray], np.ndarray], dirichlet: bool = True) -> "RadialFunction":
        values = np.array(f(np.asarray(self.nodes)), dtype=float)
        if dirichlet:
            values[-1] = 0.0
        return RadialFunction(self, values)

    def zeros(self) -> "RadialFunction":
        return RadialFunction(self, np.zeros(self.n))


def _check_finite(values: np.ndarray) -> None:
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise ValueError(f"non-finite value {values[bad[0]]!r} at node index {bad[0]}")


@dataclass(frozen=True, eq=False)
class RadialFunction:
    """Nodal values ``u(r_i)`` of a radial function on ``grid``.

    Solvers keep ``u(r_max) = 0``; the container itself does not force it,
    so that test functions such as constants can be represented.
    """

    grid: RadialGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != (self.grid.n,):
            raise GridError(f"expected {self.grid.n} values, got shape {vals.shape}")
        _check_finite(vals)
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __mul__(self, t):
        return RadialFunction(self.grid, self.values * float(t))

    __rmul__ = __mul__

    def __add__(self, other: "RadialFunction"):
        _same_grid(self.grid, other.grid)
        return RadialFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "RadialFunction"):
        _same_grid(self.grid, other.grid)
        return RadialFunction(self.grid, self.values - other.values)

    def __neg__(self):
        return RadialFunction(self.grid, -self.values)

    def __abs__(self):
        return RadialFunction(self.grid, np.abs(self.values))


def _same_grid(a: RadialGrid, b: RadialGrid) -> None:
    if a != b:
        raise GridError(f"grid mismatch: {a} vs {b}")


@dataclass(frozen=True, eq=False)
class StatePair:
    """The unknown ``(u, v)`` of the coupled system, on one shared grid."""

    u: RadialFunction
    v: RadialFunction

    def __post_init__(self):
        _same_grid(self.u.grid, self.v.grid)

    @property
    def grid(self) -> RadialGrid:
        return self.u.grid

    @classmethod
    def from_arrays(cls, grid: RadialGrid, u, v) -> "StatePair":
        return cls(RadialFunction(grid, u), RadialFunction(grid, v))

    @property
    def stacked(self) -> np.ndarray:
        return np.vstack([self.u.values, self.v.values])

    def __mul__(self, t):
        return StatePair(self.u * t, self.v * t)

    __rmul__ = __mul__

    def __add__(self, other: "StatePair"):
        return StatePair(self.u + other.u, self.v + other.v)


def _values(f) -> np.ndarray:
    return f.values if isinstance(f, RadialFunction) else np.asarray(f, dtype=float)


def integrate(f, grid: RadialGrid | None = None) -> float:
    """``int_{R^2} f dx`` for radial ``f`` (a RadialFunction, or an array plus ``grid``)."""
    if isinstance(f, RadialFunction):
        grid = f.grid
    elif grid is None:
        raise TypeError("integrate() needs a grid when given a bare array")
    vals = _values(f)
    _check_finite(vals)
    if vals.shape[-1] != grid.n:
        raise GridError(f"expected {grid.n} values, got {vals.shape[-1]}")
    return float(vals @ grid.weights)


def _kinetic(grid: RadialGrid, u: np.ndarray) -> float:
    d = np.diff(u)
    return float(2.0 * np.pi / grid.spacing * np.dot(grid.midpoints, d * d))


def gradient_energy(f: RadialFunction) -> float:
    """Discrete ``int |grad f|^2 dx``."""
    return _kinetic(f.grid, f.values)


def h1_norm_sq(s: StatePair, omega: float) -> float:
    """``||(u,v)||_E^2 = int |u'|^2 + u^2 + |v'|^2 + omega v^2``."""
    if not omega > 0:
        raise ParameterError(f"omega must be positive, got {omega}")
    g = s.grid
    u, v = s.u.values, s.v.values
    return (_kinetic(g, u) + _kinetic(g, v)
            + float(g.weights @ (u * u)) + omega * float(g.weights @ (v * v)))


def _laplacian(grid: RadialGrid, u: np.ndarray) -> np.ndarray:
    h = grid.spacing
    rm = grid.midpoints
    flux = rm * np.diff(u)  # r_{i+1/2} (u_{i+1} - u_i)
    out = np.empty_like(u)
    out[1:-1] = (flux[1:] - flux[:-1]) / (grid.nodes[1:-1] * h * h)
    out[0] = 4.0 * (u[1] - u[0]) / (h * h)
    out[-1] = 0.0
    return out


def apply_radial_laplacian(f: RadialFunction) -> RadialFunction:
    """``u'' + u'/r`` by the conservative stencil; ``4(u1-u0)/h^2`` at the origin, 0 at ``r_max``."""
    if f.grid.n < 3:
        raise GridError("Laplacian needs at least 3 nodes")
    return RadialFunction(f.grid, _laplacian(f.grid, f.values))
