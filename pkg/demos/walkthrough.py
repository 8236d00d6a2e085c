"""Scalar ground state, thresholds, and a coupled state above the threshold.

    python3 demos/walkthrough.py
"""

from csgs import ProblemParams, RadialGrid
from csgs.single_eq import solve_scalar, thresholds
from csgs.solver import InitialGuess, solve_coupled

grid = RadialGrid(40.0, 4096)

# scalar ground state at p = 4, omega = 1
gs = solve_scalar(4.0, 1.0, grid)
print(f"E_1 = {gs.level:.8f}  status={gs.status}  Pohozaev/M = {gs.relative_pohozaev:.2e}")

# coupling thresholds from the scalar levels and L^{2p} norms
th = thresholds(4.0, 1.0, gs, gs)
print(f"b1={th.b1:.4g} b3={th.b3:.4g} b_star={th.b_star:.4g} ({th.regime})")

# above b_star the coupled minimizer is a vector state strictly below min(E_1, E_w)
rep = solve_coupled(ProblemParams(p=4.0, omega=1.0, b=1.1 * th.b_star), grid)
print(f"{rep.classification}: I = {rep.energy.total:.8f}, margin {rep.comparisons.relative_margin:.3f}")

# p = 2.5: dilation-path constraint, seeded from the scalar pair
rep = solve_coupled(ProblemParams(p=2.5, b=0.1), grid, InitialGuess(kind="scalar_seeded"))
print(f"{rep.classification}: I = {rep.energy.total:.8f} below {rep.comparisons.bound:.8f} "
      f"({rep.comparisons.bound_kind})")
