"""Coupled ground states: constrained descent, classification and level comparisons."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .descent import descend, energy_from, project_onto
from .errors import ParameterError, RegimeError
from .functionals import EnergyBreakdown, coefficients
from .grid import RadialGrid, StatePair
from .manifolds import ProblemParams
from .seeds import InitialGuess
from .single_eq import ScalarGroundState, _prescan, solve_scalar

__all__ = [
    "InitialGuess",
    "SolveReport",
    "Comparisons",
    "solve_coupled",
    "flow_to_zero_check",
    "FlowCheck",
    "level_vs_b_sweep",
    "LevelSweep",
    "COMPONENT_FLOOR",
    "TRIVIAL_FLOOR",
    "STRICT_MARGIN",
]

COMPONENT_FLOOR = 1e-3  # relative to the E-norm
TRIVIAL_FLOOR = 1e-6
STRICT_MARGIN = 1e-4
MONOTONE_SLACK = 1e-6


@dataclass(frozen=True)
class Comparisons:
    """Computed level against the scalar levels.

    For p > 3 the bound is ``min(E_1, E_w)``; for 2 < p <= 3 it is
    ``E~_1 + E~_w``.  ``strict_below`` needs a relative margin of ``STRICT_MARGIN``.
    """

    c_level: float
    scalar_levels: tuple
    bound: float
    bound_kind: str
    relative_margin: float
    strict_below: bool

    def as_dict(self) -> dict:
        return {"c_level": self.c_level, "scalar_levels": list(self.scalar_levels), "bound": self.bound,
                "bound_kind": self.bound_kind, "relative_margin": self.relative_margin,
                "strict_below": self.strict_below}


@dataclass(frozen=True, eq=False)
class SolveReport:
    state: StatePair
    classification: str
    energy: EnergyBreakdown
    manifold_residual: float
    gradient_residual: float
    pohozaev_residual: float
    iterations: int
    energy_trace: np.ndarray = field(repr=False)
    comparisons: Comparisons | None
    params: ProblemParams | None = None
    status: str = "converged"
    l2_norms: tuple = (0.0, 0.0)
    e_norm: float = 0.0

    @property
    def relative_pohozaev(self) -> float:
        return self.pohozaev_residual / self.energy.mass if self.energy.mass else 0.0


@lru_cache(maxsize=64)
def _scalar(p, omega, grid, alpha, tol_gradient, max_iter) -> ScalarGroundState:
    return solve_scalar(p, omega, grid, alpha=alpha, tol_gradient=tol_gradient, max_iter=max_iter)


def scalar_pair(params: ProblemParams, grid: RadialGrid):
    """Scalar ground states at ``omega = 1`` and at ``params.omega`` (cached)."""
    args = (params.alpha, params.tol_gradient, params.max_iter)
    gs1 = _scalar(params.p, 1.0, grid, *args)
    gsw = gs1 if params.omega == 1.0 else _scalar(params.p, params.omega, grid, *args)
    return gs1, gsw


def build_seed(params: ProblemParams, grid: RadialGrid, seed: InitialGuess, mode: str | None = None) -> np.ndarray:
    """Stacked ``(2, n)`` starting array for ``seed``."""
    omegas = (1.0, params.omega)
    if seed.kind == "custom":
        if seed.custom.grid != grid:
            raise ParameterError("custom seed lives on a different grid")
        U = seed.custom.stacked
    elif seed.kind == "scalar_seeded":
        gs1, gsw = scalar_pair(params, grid)
        U = np.vstack([gs1.u.values, gsw.u.values])
    else:
        seed = seed.resolved()
        amps = [seed.amplitude_u, seed.amplitude_v]
        widths = [seed.width_u, seed.width_v]
        if None in widths:
            A, sigma = _prescan(grid, seed.kind, omegas, params.p, params.b, mode or params.regime, params.alpha)
            widths = [sigma if w is None else w for w in widths]
            amps = [A if a is None else a for a in amps]
        amps = [1.0 if a is None else a for a in amps]
        U = np.vstack([seed.profile(grid, a, w) for a, w in zip(amps, widths)])
    U = np.array(U, dtype=float)
    U[:, -1] = 0.0
    return U


def _constraint(mode, K, M, Bg, F, p, alpha):
    if mode == "nehari":
        return K + M + 3 * Bg - F
    if mode == "pohozaev":
        return alpha * K + (alpha - 1) * M + (3 * alpha - 2) * Bg - (p * alpha - 1) / p * F
    return 0.0


def _norms(grid, U, omega):
    l2 = tuple(float(np.sqrt(grid.weights @ (row * row))) for row in U)
    K, M, _, _ = coefficients(grid, U, (1.0, omega), 2.0, 0.0)
    return l2, float(np.sqrt(K + M))


def classify(l2, e_norm, status, trivial_floor=TRIVIAL_FLOOR, component_floor=COMPONENT_FLOOR):
    if e_norm < trivial_floor:
        return "trivial"
    if status != "converged":
        return "nonconverged"
    floor = component_floor * e_norm
    big = [n > floor for n in l2]
    if all(big):
        return "vector"
    return "semitrivial_u" if big[0] else "semitrivial_v"


def compare_levels(level, params: ProblemParams, gs1, gsw) -> Comparisons:
    E1, Ew = gs1.level, gsw.level
    if params.p > 3:
        bound, kind = min(E1, Ew), "min"
    else:
        bound, kind = E1 + Ew, "sum"
    margin = (bound - level) / abs(bound)
    return Comparisons(float(level), (E1, Ew), float(bound), kind, float(margin), bool(margin >= STRICT_MARGIN))


def solve_coupled(params: ProblemParams, grid: RadialGrid, seed: InitialGuess | None = None, *,
                  compare: bool = True, callback=None) -> SolveReport:
    """Ground state of the coupled system by projected preconditioned descent."""
    if params.p <= 2:
        raise RegimeError(f"solve_coupled needs p > 2 (use flow_to_zero_check), got p={params.p}")
    seed = seed or InitialGuess()
    mode, p, b, alpha = params.regime, params.p, params.b, params.alpha
    omegas = (1.0, params.omega)
    U = build_seed(params, grid, seed, mode)
    if not np.any(U[:, :-1]):
        raise ParameterError("seed is identically zero")
    U, _ = project_onto(grid, np.abs(U), omegas, p, b, mode, alpha)
    kappa = max(1.0, params.omega)
    res = descend(grid, U, omegas, p, b, mode, alpha, tol_gradient=params.tol_gradient,
                  max_iter=params.max_iter, callback=callback, shifts=(kappa, kappa))
    return _report(params, grid, res, compare)


def _report(params, grid, res, compare, mode=None):
    mode = mode or params.regime
    p, U = params.p, res.U
    K, M, Bg, F = coefficients(grid, U, (1.0, params.omega), p, params.b)
    l2, e_norm = _norms(grid, U, params.omega)
    classification = classify(l2, e_norm, "converged" if res.converged else res.status)
    scale = K + M if K + M > 0 else 1.0
    manifold = _constraint(mode, K, M, Bg, F, p, params.alpha) / scale
    comparisons = None
    if compare and p > 2:
        comparisons = compare_levels(energy_from((K, M, Bg, F), p), params, *scalar_pair(params, grid))
    return SolveReport(
        state=StatePair.from_arrays(grid, U[0], U[1]), classification=classification,
        energy=EnergyBreakdown.assemble(K, M, Bg, F, p), manifold_residual=float(manifold),
        gradient_residual=float(res.gradient_residual), pohozaev_residual=float(M + 2 * Bg - F / p),
        iterations=res.iterations, energy_trace=np.asarray(res.energy_trace), comparisons=comparisons,
        params=params, status=res.status, l2_norms=l2, e_norm=e_norm)


# -- nonexistence regime ---------------------------------------------------------

@dataclass(frozen=True)
class FlowCheck:
    all_trivial: bool
    final_norms: np.ndarray
    reports: tuple = field(repr=False, default=())
    certificate: object = None


def flow_to_zero_check(params: ProblemParams, grid: RadialGrid, seeds, *, trivial_floor: float = TRIVIAL_FLOOR,
                       with_certificate: bool = True) -> FlowCheck:
    """Unconstrained descent on the energy from each seed; trivial when every E-norm ends below the floor."""
    if not 1 < params.p <= 2:
        raise RegimeError(f"flow_to_zero_check is for 1 < p <= 2, got p={params.p}")
    omegas = (1.0, params.omega)
    kappa = max(1.0, params.omega)
    # stop once the state is far below the floor; the residual never gets small near zero
    zero_floor = (1e-3 * trivial_floor) ** 2
    norms, reports = [], []
    for seed in seeds:
        U = build_seed(params, grid, seed, mode="free") if _explicit(seed) else _random_pair(grid, seed)
        res = descend(grid, np.abs(U), omegas, params.p, params.b, "free", tol_gradient=params.tol_gradient,
                      max_iter=params.max_iter, zero_floor=zero_floor, shifts=(kappa, kappa))
        rep = _report(params, grid, res, compare=False, mode="free")
        reports.append(rep)
        norms.append(rep.e_norm)
    norms = np.array(norms)
    cert = None
    if with_certificate:
        from .single_eq import nonexistence_certificate
        cert = nonexistence_certificate(params.p, params.omega, params.b)
    return FlowCheck(bool(np.all(norms < trivial_floor)), norms, tuple(reports), cert)


def _explicit(seed: InitialGuess) -> bool:
    return seed.kind in ("custom", "scalar_seeded") or None not in (seed.width_u, seed.width_v) \
        or seed.rng_seed is not None


def _random_pair(grid, seed):
    # no widths and no rng seed: a fixed unit-width bump pair (no pre-scan without a constraint)
    return np.vstack([seed.profile(grid, 1.0 if seed.amplitude_u is None else seed.amplitude_u, seed.width_u or 1.0),
                      seed.profile(grid, 1.0 if seed.amplitude_v is None else seed.amplitude_v, seed.width_v or 1.0)])


# -- level sweep in b --------------------------------------------------------------

@dataclass(frozen=True)
class LevelSweep:
    """Levels ``c_b`` along a b-sweep plus the monotonicity cross-checks.

    ``cross_bounds[k]`` is the energy of the minimizer at ``b_k`` moved onto the
    constraint at ``b_{k+1}``: an upper bound for the level at ``b_{k+1}``.
    """

    b_values: tuple
    reports: tuple = field(repr=False)
    levels: np.ndarray
    all_positive: bool
    non_increasing: bool
    lower_bound: float
    cross_bounds: np.ndarray
    failures: tuple = ()


def level_vs_b_sweep(params_base: ProblemParams, b_values, grid: RadialGrid | None = None,
                     seed: InitialGuess | None = None, slack: float = MONOTONE_SLACK) -> LevelSweep:
    if not 2 < params_base.p <= 3:
        raise RegimeError(f"level sweeps are defined for 2 < p <= 3, got p={params_base.p}")
    b_values = [float(b) for b in b_values]
    if not b_values or any(b <= 0 for b in b_values) or b_values != sorted(b_values):
        raise ParameterError("b_values must be positive and sorted")
    grid = grid or RadialGrid()
    seed = seed or InitialGuess(kind="scalar_seeded")
    reports, levels, failures = [], [], []
    for b in b_values:
        try:
            rep = solve_coupled(params_base.replace(b=b), grid, seed)
            reports.append(rep)
            levels.append(rep.energy.total)
        except Exception as exc:  # recorded, sweep continues
            reports.append(None)
            levels.append(np.nan)
            failures.append((b, repr(exc)))
    levels = np.array(levels)
    cross = np.full(max(len(b_values) - 1, 0), np.nan)
    for k in range(len(b_values) - 1):
        if reports[k] is None:
            continue
        U = reports[k].state.stacked
        nxt = params_base.replace(b=b_values[k + 1])
        try:
            V, _ = project_onto(grid, U, (1.0, nxt.omega), nxt.p, nxt.b, nxt.regime, nxt.alpha)
        except Exception:
            continue
        cross[k] = energy_from(coefficients(grid, V, (1.0, nxt.omega), nxt.p, nxt.b), nxt.p)
    ok = np.isfinite(levels)
    non_inc = bool(np.all(np.diff(levels[ok]) <= slack * np.abs(levels[ok][:-1]))) if ok.sum() > 1 else bool(ok.all())
    return LevelSweep(tuple(b_values), tuple(reports), levels, bool(ok.all() and np.all(levels > 0)), non_inc,
                      float(np.nanmin(levels)) if ok.any() else float("nan"), cross, tuple(failures))
