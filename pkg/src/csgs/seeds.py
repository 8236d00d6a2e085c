"""Initial data for the descent solvers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .grid import RadialGrid, StatePair

KINDS = ("gaussian_pair", "extremal_pair", "scalar_seeded", "custom")

# widths tried by the pre-scan when none is given
PRESCAN_WIDTHS = np.geomspace(0.25, 4.0, 9)


@dataclass(frozen=True)
class InitialGuess:
    """Recipe for a starting pair.

    Gaussian seeds are ``A exp(-r^2/sigma^2)``; extremal seeds are
    ``A u_l`` with ``l = 1/sigma``.  Missing widths are drawn at random when
    ``rng_seed`` is set and chosen by an energy pre-scan otherwise.
    ``scalar_seeded`` starts from the two scalar ground states at
    ``omega = 1`` and at the problem's omega.
    """

    kind: str = "gaussian_pair"
    amplitude_u: float | None = None
    amplitude_v: float | None = None
    width_u: float | None = None
    width_v: float | None = None
    rng_seed: int | None = None
    custom: StatePair | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown seed kind {self.kind!r}; expected one of {KINDS}")
        for name in ("width_u", "width_v"):
            val = getattr(self, name)
            if val is not None and not val > 0:
                raise ParameterError(f"{name} must be positive, got {val}")
        if self.kind == "custom" and self.custom is None:
            raise ParameterError("custom seed needs a StatePair")

    def resolved(self) -> "InitialGuess":
        """Fill unset amplitudes and widths from ``rng_seed`` (widths stay None without one)."""
        if self.rng_seed is None:
            return self
        rng = np.random.default_rng(self.rng_seed)
        draws = rng.uniform([0.5, 0.5, 0.5, 0.5], [3.0, 3.0, 3.0, 3.0])
        pick = lambda given, drawn: float(drawn) if given is None else given
        return InitialGuess(self.kind, pick(self.amplitude_u, draws[0]), pick(self.amplitude_v, draws[1]),
                            pick(self.width_u, draws[2]), pick(self.width_v, draws[3]), None, self.custom)

    def profile(self, grid: RadialGrid, amplitude: float, width: float) -> np.ndarray:
        r = grid.nodes
        if self.kind == "extremal_pair":
            lam = 1.0 / width
            vals = amplitude * np.sqrt(8.0) * lam / (1.0 + (lam * r) ** 2)
        else:
            vals = amplitude * np.exp(-(r / width) ** 2)
        vals = np.array(vals)
        vals[-1] = 0.0
        return vals
