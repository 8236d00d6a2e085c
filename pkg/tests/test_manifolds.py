import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from csgs.errors import ParameterError, ProjectionError
from csgs.functionals import energy, extremal_profile
from csgs.grid import RadialGrid, StatePair, integrate
from csgs.manifolds import (J_value, ProblemParams, alpha_window, default_alpha, fiber_maximum, mb_project,
                            nehari_project, nehari_value, path_energy, path_exponents, ray_exponents,
                            scaling_path)
from csgs.verify import random_bump


@pytest.fixture(scope="module")
def g():
    return RadialGrid(40.0, 4096)


def _gauss_pair(g, a=(1.5, 1.0), w=(1.4, 1.0)):
    return StatePair(g.sample(lambda r: a[0] * np.exp(-(r / w[0]) ** 2)),
                     g.sample(lambda r: a[1] * np.exp(-(r / w[1]) ** 2)))


def _energy_coeffs(s, par):
    e = energy(s, par)
    return e.kinetic, e.mass, e.gauge, e.coupling


# -- parameters -----------------------------------------------------------------

def test_default_alpha_and_window():
    assert default_alpha(2.5) == pytest.approx(1.5)
    assert default_alpha(3.0) == 2.0
    assert alpha_window(2.2) == pytest.approx((1.0, 1.25))
    par = ProblemParams(p=2.5)
    assert par.alpha == pytest.approx(1.5) and par.regime == "pohozaev"
    assert ProblemParams(p=4.0).alpha is None and ProblemParams(p=4.0).regime == "nehari"
    assert ProblemParams(p=1.5).regime == "trivial"


@pytest.mark.parametrize("p, alpha", [(2.5, 2.0), (2.5, 1.0), (2.5, 0.9), (2.2, 1.3), (3.0, 1.0)])
def test_alpha_outside_window_rejected(p, alpha):
    with pytest.raises(ParameterError):
        ProblemParams(p=p, alpha=alpha)


@pytest.mark.parametrize("kw", [dict(p=1.0), dict(p=3.0, omega=0.0), dict(p=3.0, b=-1.0)])
def test_params_validation(kw):
    with pytest.raises(ParameterError):
        ProblemParams(**kw)


# -- Nehari ------------------------------------------------------------------------

def test_nehari_value_zero(g):
    z = StatePair(g.zeros(), g.zeros())
    assert nehari_value(z, ProblemParams(p=4.0, b=1.0)) == 0.0
    assert J_value(z, ProblemParams(p=2.5, b=1.0)) == 0.0


@settings(max_examples=25, deadline=None)
@given(p=st.floats(3.05, 7.0), b=st.floats(0.0, 4.0), seed=st.integers(0, 2**32 - 1))
def test_nehari_ray_single_sign_change(p, b, seed):
    # the ray t -> nehari_value(t s), evaluated directly, crosses zero exactly once
    grid = RadialGrid(15.0, 256)
    rng = np.random.default_rng(seed)
    s = StatePair(random_bump(grid, rng), random_bump(grid, rng))
    par = ProblemParams(p=p, b=b)
    vals = np.array([nehari_value(s * t, par) for t in np.geomspace(1e-3, 1e3, 121)])
    signs = np.sign(vals[vals != 0])
    assert np.count_nonzero(signs[1:] != signs[:-1]) == 1


def test_fiber_maximum_pure_power():
    # without the gauge term t_bar = ((K+M)/F)^(1/(2p-2))
    K, M, F, p = 3.0, 2.0, 7.0, 4.0
    t, *_ = fiber_maximum((K, M, 0.0, F), p, ray_exponents(p))
    assert t == pytest.approx(((K + M) / F) ** (1 / (2 * p - 2)), rel=1e-10)


def test_fiber_maximum_no_coupling():
    with pytest.raises(ProjectionError, match="never crosses"):
        fiber_maximum((1.0, 1.0, 1.0, 0.0), 4.0, ray_exponents(4.0))


def test_nehari_project_matches_dense_scan():
    grid = RadialGrid(120.0, 20_001)
    u1 = extremal_profile(grid, 1.0)
    s = StatePair(u1, u1)
    par = ProblemParams(p=4.0, omega=1.0, b=1.0)
    proj, diag = nehari_project(s, par)
    coeffs = _energy_coeffs(s, par)
    ts = np.linspace(1e-3, 2.0, 100_000)
    scan = path_energy(coeffs, par.p, ray_exponents(par.p), ts)
    assert diag.t_star == pytest.approx(ts[np.argmax(scan)], abs=2 * (ts[1] - ts[0]))
    assert diag.sign_changes == 1
    K, M, _, _ = _energy_coeffs(proj, par)
    assert abs(nehari_value(proj, par)) <= par.tol_manifold * (K + M)
    assert energy(proj, par).total >= scan.max() - 1e-12 * abs(scan.max())


def test_nehari_project_idempotent(g):
    par = ProblemParams(p=4.5, omega=2.0, b=0.5)
    once, _ = nehari_project(_gauss_pair(g), par)
    _, diag = nehari_project(once, par)
    assert diag.t_star == pytest.approx(1.0, abs=1e-8)


def test_nehari_project_regime_and_zero(g):
    with pytest.raises(ParameterError):
        nehari_project(_gauss_pair(g), ProblemParams(p=3.0))
    with pytest.raises(ParameterError):
        nehari_project(StatePair(g.zeros(), g.zeros()), ProblemParams(p=4.0))


# -- dilation path -----------------------------------------------------------------

def test_scaling_path_identity_and_errors(g):
    s = _gauss_pair(g)
    same = scaling_path(s, 1.0, 1.5)
    assert np.array_equal(same.u.values, s.u.values) and np.array_equal(same.v.values, s.v.values)
    for bad in (0.0, -1.0):
        with pytest.raises(ParameterError):
            scaling_path(s, bad, 1.5)


@pytest.mark.parametrize("t", [0.5, 0.8, 1.3, 2.0])
def test_scaling_path_power_laws(g, t):
    from csgs.functionals import B_functional
    s = _gauss_pair(g)
    a = 1.5
    out = scaling_path(s, t, a)
    assert integrate(out.u.values**2, g) == pytest.approx(t ** (2 * a - 2) * integrate(s.u.values**2, g), rel=1e-3)
    assert B_functional(out.u) == pytest.approx(t ** (6 * a - 4) * B_functional(s.u), rel=1e-3)


def test_J_is_path_derivative(g):
    par = ProblemParams(p=2.5, omega=1.3, b=0.4)
    s = _gauss_pair(g)
    dt = 1e-3
    d = (energy(scaling_path(s, 1 + dt, par.alpha), par).total
         - energy(scaling_path(s, 1 - dt, par.alpha), par).total) / (2 * dt)
    assert J_value(s, par) == pytest.approx(d, rel=1e-4)


def test_J_requires_alpha(g):
    with pytest.raises(ParameterError):
        J_value(_gauss_pair(g), ProblemParams(p=4.0))


def test_path_coefficients_match_direct_energy(g):
    par = ProblemParams(p=2.5, omega=1.0, b=0.3)
    s = _gauss_pair(g)
    coeffs = _energy_coeffs(s, par)
    e = path_exponents(par.p, par.alpha)
    for t in np.geomspace(0.5, 2.0, 10):
        direct = energy(scaling_path(s, t, par.alpha), par).total
        assert float(path_energy(coeffs, par.p, e, t)) == pytest.approx(direct, rel=1e-3)


def test_mb_project_matches_direct_scan(g):
    # argmax of I(gamma(t)) evaluated by resampling at each t, independent of the coefficient form
    par = ProblemParams(p=2.5, omega=1.0, b=0.2)
    s = _gauss_pair(g, a=(2.0, 2.0), w=(2.0, 2.0))
    proj, diag = mb_project(s, par)
    ts = np.geomspace(0.3, 3.0, 301)
    direct = np.array([energy(scaling_path(s, t, par.alpha), par).total for t in ts])
    i = int(np.argmax(direct))
    assert ts[i - 1] <= diag.t_star <= ts[i + 1]
    assert diag.sign_changes == 1
    K, M, _, _ = _energy_coeffs(proj, par)
    assert abs(J_value(proj, par)) <= par.tol_manifold * (K + M)
    assert diag.ray_correction == pytest.approx(1.0, abs=1e-4)


@pytest.mark.parametrize("lam", [0.5, 1.7])
def test_mb_project_coefficient_scaling(g, lam):
    par = ProblemParams(p=2.5, omega=1.2, b=0.3)
    s = _gauss_pair(g)
    K, M, Bg, F = _energy_coeffs(s, par)
    scaled = (lam**2 * K, lam**2 * M, lam**6 * Bg, lam ** (2 * par.p) * F)
    direct = _energy_coeffs(s * lam, par)
    np.testing.assert_allclose(direct, scaled, rtol=1e-12)
    t_pred, *_ = fiber_maximum(scaled, par.p, path_exponents(par.p, par.alpha))
    _, diag = mb_project(s * lam, par)
    assert diag.t_star == pytest.approx(t_pred, rel=1e-12)


def test_p3_exponents_single_root(g):
    par = ProblemParams(p=3.0, b=0.5)
    np.testing.assert_allclose(path_exponents(3.0, par.alpha), [4.0, 2.0, 8.0, 10.0])
    _, diag = mb_project(_gauss_pair(g), par)
    assert diag.sign_changes == 1


def test_projection_is_scan_maximum(g):
    par = ProblemParams(p=2.8, omega=0.8, b=1.0)
    s = _gauss_pair(g)
    coeffs = _energy_coeffs(s, par)
    e = path_exponents(par.p, par.alpha)
    t, f, changes, ts, f_scan = fiber_maximum(coeffs, par.p, e)
    assert changes == 1
    assert f >= f_scan.max()
    assert ts[np.argmax(f_scan) - 1] <= t <= ts[np.argmax(f_scan) + 1]


def test_mb_project_regime(g):
    with pytest.raises(ParameterError):
        mb_project(_gauss_pair(g), ProblemParams(p=4.0))


@pytest.mark.parametrize("p, coeffs", [
    (2.108199709266614, (1743.338, 4484.423, 9110246.0, 1023711.7)),   # gauge-dominated, near-equal exponents
    (2.9860116448348286, (573.50, 1004.87, 83425.56, 274906.07)),       # path exponents ~ 200
])
def test_fiber_maximum_far_or_steep(p, coeffs):
    e = path_exponents(p, default_alpha(p))
    t, f, changes, *_ = fiber_maximum(coeffs, p, e)
    assert changes == 1 and np.isfinite(f)
    # t f'(t) / t^{e_F} changes sign at t: positive just below, negative just above
    K, M, Bg, F = coeffs
    slope = lambda s: 0.5 * (e[0] * K * s ** (e[0] - e[3]) + e[1] * M * s ** (e[1] - e[3])
                             + e[2] * Bg * s ** (e[2] - e[3])) - e[3] * F / (2 * p)
    assert slope(t * (1 - 1e-9)) > 0 > slope(t * (1 + 1e-9))
