"""Profile ODE, planar portrait machinery, and the series hierarchy."""
import math

import numpy as np
import pytest

from curvegas.numerics import EigenClass, Grid1D, Grid2D, fd_derivative
from curvegas.thermo import DomainError, GasParams, VirialCoefficient
from curvegas.virial_flow import (
    DegenerateScaling,
    ExpansionOrders,
    OffTrajectory,
    OnBreakingParabola,
    ReducedParams,
    SingularLeadingCoefficient,
    StopReason,
    ZerothTerm,
    as_planar_system,
    default_portrait_window,
    first_order_residual,
    first_order_rhs,
    fixed_points,
    flow_temperature_rhs,
    integrate_first_order,
    integrate_trajectory,
    portrait,
    rescale_to_reduced,
    zeroth_residual,
)

GAS = GasParams()  # R = k = 1, omega = 1


def _zterm(tol=1e-10):
    return ZerothTerm.solve(2.0, 1.0, 3.0, 1.0, 1.0, (1.0, 3.0), 0.5,
                            tol=tol)


# -------------------------------------------------------------- graph ODE

def test_graph_slope_examples():
    p = ReducedParams(0.0, 0.0)
    assert flow_temperature_rhs(p, 1.0, 0.0) == pytest.approx(1.0)
    assert flow_temperature_rhs(p, 4.0, 1.0) == pytest.approx(4.0 / 3.0)


def test_graph_slope_breaks_on_parabola():
    p = ReducedParams(2.0, -3.0)
    with pytest.raises(OnBreakingParabola):
        flow_temperature_rhs(p, 1.0, 1.0)
    with pytest.raises(OnBreakingParabola):
        flow_temperature_rhs(p, 1.0 + 1e-14, 1.0)


def test_planar_system_carries_the_graph_slope():
    p = ReducedParams(2.0, -3.0)
    field = as_planar_system(p)
    rng = np.random.default_rng(2)
    checked = 0
    while checked < 20:
        y = -1.0 + 4.0 * rng.random()
        n0 = -2.0 + 4.0 * rng.random()
        if abs(y - n0 * n0) < 0.1:
            continue
        fy, fn = field(0.0, np.array([y, n0]))
        slope = flow_temperature_rhs(p, y, n0)
        assert fn / fy == pytest.approx(slope, rel=1e-12)
        checked += 1


def test_reduced_params_must_be_finite():
    with pytest.raises(ValueError):
        ReducedParams(math.inf, 0.0)
    with pytest.raises(ValueError):
        ReducedParams(0.0, math.nan)


# ------------------------------------------------------------ equilibria

INVENTORY = {
    (-2.0, 1.0): [
        ((0.0, 0.0), EigenClass.UNSTABLE_NODE),
        ((0.25, -0.5), EigenClass.SADDLE),
        ((1.0, 1.0), EigenClass.SADDLE),
    ],
    (1.0, 2.0): [((0.0, 0.0), EigenClass.UNSTABLE_NODE)],
    (2.0, -3.0): [
        ((0.0, 0.0), EigenClass.SADDLE),
        ((1.0, 1.0), EigenClass.CENTRE),
        ((2.25, -1.5), EigenClass.UNSTABLE_SPIRAL),
    ],
    (-2.0, -1.0): [((0.0, 0.0), EigenClass.SADDLE)],
}


@pytest.mark.parametrize("ab", sorted(INVENTORY))
def test_fixed_point_inventory(ab):
    expected = INVENTORY[ab]
    pts = fixed_points(ReducedParams(*ab))
    assert len(pts) == len(expected)
    for fp, ((ey, en), klass) in zip(pts, expected):
        assert abs(fp.y - ey) <= 1e-12
        assert abs(fp.n0 - en) <= 1e-12
        assert fp.klass is klass


def test_double_root_collapses_to_one_entry():
    pts = fixed_points(ReducedParams(0.0, 0.0))
    assert len(pts) == 1
    assert (pts[0].y, pts[0].n0) == (0.0, 0.0)
    assert math.copysign(1.0, pts[0].n0) > 0  # never -0.0
    assert pts[0].klass is EigenClass.DEGENERATE


def test_equilibria_sit_on_the_parabola():
    for ab in INVENTORY:
        for fp in fixed_points(ReducedParams(*ab)):
            assert fp.y == pytest.approx(fp.n0 ** 2, abs=1e-12)


def test_jacobian_matches_field_derivatives():
    p = ReducedParams(2.0, -3.0)
    field = as_planar_system(p)
    for fp in fixed_points(p):
        jac = fp.jacobian
        for i in range(2):
            approx_y = fd_derivative(
                lambda v: field(0.0, np.array([v, fp.n0]))[i], fp.y)
            approx_n = fd_derivative(
                lambda v: field(0.0, np.array([fp.y, v]))[i], fp.n0)
            assert jac[i][0] == pytest.approx(approx_y, abs=1e-7)
            assert jac[i][1] == pytest.approx(approx_n, abs=1e-7)
        assert fp.trace == jac[0][0] + jac[1][1]
        assert fp.det == pytest.approx(
            jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0])


# ----------------------------------------------------------- trajectories

def test_trajectory_runs_to_time_budget():
    p = ReducedParams(2.0, -3.0)
    traj = integrate_trajectory(p, (1.05, 1.05), 5.0)
    assert traj.reason is StopReason.REACHED_S_MAX
    assert traj.ss[-1] == pytest.approx(5.0)
    assert traj.seed == (1.05, 1.05)
    assert traj.states.shape[1] == 2


def test_trajectory_stops_at_window_edge():
    p = ReducedParams(2.0, -3.0)
    traj = integrate_trajectory(p, (2.5, 0.1), 30.0)
    assert traj.reason is StopReason.LEFT_WINDOW
    y_end, n_end = traj.states[-1]
    dist = min(abs(y_end + 1.0), abs(3.0 - y_end),
               abs(n_end + 2.0), abs(2.0 - n_end))
    assert dist <= 1e-6


def test_trajectory_captured_by_attractor():
    # A = -0.1, B = -1.6 plants a stable spiral at (4, 2)
    p = ReducedParams(-0.1, -1.6)
    spiral = [fp for fp in fixed_points(p)
              if fp.klass is EigenClass.STABLE_SPIRAL]
    assert [(s.y, s.n0) for s in spiral] == [(4.0, 2.0)]
    traj = integrate_trajectory(p, (4.3, 2.1), 60.0,
                                window=((0.0, 8.0), (-1.0, 4.0)),
                                fp_radius=1e-3)
    assert traj.reason is StopReason.NEAR_FIXED_POINT
    y_end, n_end = traj.states[-1]
    assert math.hypot(y_end - 4.0, n_end - 2.0) <= 2e-3
    # the spiral centre lies on the parabola, so the orbit crosses it
    assert len(traj.crossings) >= 2
    for _s, yc, nc in traj.crossings:
        assert yc == pytest.approx(nc * nc, abs=1e-9)


def test_trajectory_seed_validation():
    p = ReducedParams(2.0, -3.0)
    with pytest.raises(ValueError, match="s_max"):
        integrate_trajectory(p, (0.5, 0.5), 0.0)
    with pytest.raises(ValueError, match="coincides"):
        integrate_trajectory(p, (0.0, 0.0), 1.0)
    with pytest.raises(ValueError, match="outside the window"):
        integrate_trajectory(p, (10.0, 10.0), 1.0)
    with pytest.raises(ValueError, match="outside the window"):
        integrate_trajectory(p, (1.0 + 1e-8, 1.0), 1.0, fp_radius=1e-6)


def test_centre_orbit_stays_in_annulus():
    p = ReducedParams(2.0, -3.0)
    traj = integrate_trajectory(p, (1.05, 1.05), 50.0, tol=1e-10)
    assert traj.reason is StopReason.REACHED_S_MAX
    d = np.hypot(traj.states[:, 0] - 1.0, traj.states[:, 1] - 1.0)
    assert 0.001 <= d.min() and d.max() <= 0.5


# --------------------------------------------------------------- portrait

def test_default_window_covers_the_inventory():
    win = default_portrait_window()
    assert (win.x.lo, win.x.hi, win.x.count) == (-1.0, 3.0, 25)
    assert (win.y.lo, win.y.hi, win.y.count) == (-2.0, 2.0, 21)


def test_portrait_bundle():
    p = ReducedParams(2.0, -3.0)
    win = default_portrait_window()
    seeds = [(1.05, 1.05), (2.5, 0.1), (0.0, 0.0), (5.0, 5.0)]
    port = portrait(p, win, seeds, s_max=5.0)
    assert port.field.shape == (25 * 21, 4)
    norms = np.hypot(port.field[:, 2], port.field[:, 3])
    zero = norms == 0.0
    assert np.all(np.abs(norms[~zero] - 1.0) <= 1e-12)
    # grid nodes landing exactly on an equilibrium get a zero direction:
    # (0, 0) and (1, 1) are nodes of this window, (2.25, -1.5) is not
    assert int(zero.sum()) == 2
    assert len(port.trajectories) == 2
    assert port.skipped_seeds == ((0.0, 0.0), (5.0, 5.0))
    assert port.parabola.shape == (401, 2)
    assert np.allclose(port.parabola[:, 0], port.parabola[:, 1] ** 2)
    assert port.fixed_points == tuple(fixed_points(p))


def test_portrait_accepts_custom_grid():
    p = ReducedParams(0.0, 0.0)
    win = Grid2D(Grid1D(0.5, 1.5, 3), Grid1D(-0.5, 0.5, 3))
    port = portrait(p, win, [], s_max=1.0)
    assert port.field.shape == (9, 4)
    assert port.trajectories == ()


# ------------------------------------------------------------ zeroth term

def test_zeroth_profile_covers_requested_span():
    term = _zterm()
    assert term.y_lo == 1.0 and term.y_hi == 3.0
    assert term.m0 == 2.0
    assert math.isfinite(term.n0(2.0))
    assert math.isfinite(term.k0(1.5)) and math.isfinite(term.l0(2.5))


def test_zeroth_profile_stops_before_breaking_set():
    # these constants drive N0 into the parabola partway across
    term = ZerothTerm.solve(1.0, 2.0, 1.0, 1.0, 1.0, (1.0, 3.0), 0.5)
    assert 1.0 < term.y_hi < 1.5


def test_zeroth_solve_rejects_bad_starts():
    with pytest.raises(DomainError):
        ZerothTerm.solve(0.0, 1.0, 3.0, 1.0, 1.0, (1.0, 3.0), 0.5)
    with pytest.raises(DomainError):
        ZerothTerm.solve(2.0, 1.0, 3.0, 0.0, 1.0, (1.0, 3.0), 0.5)
    with pytest.raises(DomainError):
        ZerothTerm.solve(2.0, 1.0, 3.0, 1.0, 1.0, (1.0, 1.0), 0.5)
    with pytest.raises(DomainError):  # starts on the parabola
        ZerothTerm.solve(1.0, 2.0, 1.0, 1.0, 1.0, (1.0, 3.0), 1.0)
    with pytest.raises(DomainError):  # starts on the zero collar
        ZerothTerm.solve(2.0, 1.0, 3.0, 1.0, 1.0, (1.0, 3.0), 0.0)


def test_profile_rejects_queries_off_span():
    term = _zterm()
    with pytest.raises(OffTrajectory):
        term.n0(0.9)
    with pytest.raises(OffTrajectory):
        term.n0(3.1)


def test_zeroth_residuals_vanish_along_profile():
    term = _zterm()
    ys = np.linspace(1.0, 3.0, 40)
    worst = max(
        max(abs(e) for e in zeroth_residual(term, 1.0, 1.0, float(y)))
        for y in ys
    )
    assert worst <= 1e-10


def test_companions_telescope_to_the_integration_constant():
    term = _zterm()
    for y in np.linspace(1.0, 3.0, 25):
        combo = term.l0(float(y)) * term.n0(float(y)) + term.m0 * term.k0(
            float(y))
        assert abs(combo - term.c2) <= 1e-12


# -------------------------------------------------------------- rescaling

def test_rescaling_identity_case():
    params, to_red, to_phys = rescale_to_reduced(1.0, 1.0, 0.0, 1.0, 1.0)
    assert (params.A, params.B) == (1.0, 0.0)
    assert to_red((0.3, 0.7)) == (0.3, 0.7)
    assert to_phys((0.3, 0.7)) == (0.3, 0.7)


def test_rescaling_round_trip_and_params():
    params, to_red, to_phys = rescale_to_reduced(2.0, 1.0, 3.0, 1.0, 1.0)
    assert params.A == pytest.approx(4.0)
    assert params.B == pytest.approx(-0.75)
    pt = (1.7, -0.4)
    back = to_phys(to_red(pt))
    assert back[0] == pytest.approx(pt[0], rel=1e-14)
    assert back[1] == pytest.approx(pt[1], rel=1e-14)


def test_rescaling_degenerate_constants():
    with pytest.raises(DegenerateScaling):
        rescale_to_reduced(0.0, 1.0, 0.0, 1.0, 1.0)
    with pytest.raises(DegenerateScaling):
        rescale_to_reduced(1.0, 0.0, 0.0, 1.0, 1.0)
    with pytest.raises(DegenerateScaling):
        rescale_to_reduced(1.0, 1.0, 0.0, -2.0, 1.0)


def test_rescaling_transports_the_slope():
    """The reduced ODE must reproduce the physical profile slope."""
    term = _zterm()
    params, to_red, _ = rescale_to_reduced(2.0, 1.0, 3.0, 1.0, 1.0)
    for y in (1.3, 2.1, 2.9):
        yr, nr = to_red((y, term.n0(y)))
        reduced_slope = flow_temperature_rhs(params, yr, nr)
        # d(reduced n)/d(reduced y) = (c1/c2) dN0/dy, and dN0/dy = K0
        assert reduced_slope == pytest.approx(2.0 * term.k0(y), rel=1e-8)


# ------------------------------------------------------------ first order

def test_expansion_orders_default():
    assert ExpansionOrders() == ExpansionOrders(0, 1, 0, 0)


def test_first_order_rhs_is_affine_in_the_state():
    term = _zterm()
    a1 = VirialCoefficient((0.0, 1.0))
    rng = np.random.default_rng(4)
    for _ in range(6):
        y = 1.0 + 2.0 * rng.random()
        s1 = rng.standard_normal(4)
        s2 = rng.standard_normal(4)
        r0 = np.array(first_order_rhs(term, GAS, a1, y, np.zeros(4)))
        r1 = np.array(first_order_rhs(term, GAS, a1, y, s1))
        r2 = np.array(first_order_rhs(term, GAS, a1, y, s2))
        r12 = np.array(first_order_rhs(term, GAS, a1, y, s1 + s2))
        gap = np.abs(r12 - r1 - r2 + r0).max()
        scale = max(1.0, np.abs(r12).max())
        assert gap <= 1e-9 * scale


def test_first_order_system_is_inhomogeneous():
    # the zeroth term sources the correction even with A1 = 0
    term = _zterm()
    r0 = first_order_rhs(term, GAS, VirialCoefficient(()), 2.0, (0, 0, 0, 0))
    assert max(abs(v) for v in r0) > 1e-3


def test_singular_pivot_reports_name_and_location():
    err = SingularLeadingCoefficient("L0*N0 + M0*K0", 1.75)
    assert err.name == "L0*N0 + M0*K0"
    assert err.y == 1.75
    assert "1.75" in str(err)


def test_rhs_and_residual_are_consistent():
    term = _zterm()
    a1 = VirialCoefficient((0.5, 0.25))
    state = (0.3, -0.2, 0.1, 0.4)
    prime = first_order_rhs(term, GAS, a1, 1.8, state)
    res = first_order_residual(term, GAS, a1, 1.8, state, prime)
    assert max(abs(v) for v in res) <= 1e-10


def _richardson(fn, x, h):
    return (8.0 * (fn(x + h) - fn(x - h)) - (fn(x + 2 * h) - fn(x - 2 * h))
            ) / (12.0 * h)


@pytest.mark.parametrize("coeffs", [(), (1.0,), (0.0, 1.0)])
def test_first_order_integration_satisfies_the_equations(coeffs):
    """Residuals measured with derivatives independent of the rhs."""
    term = _zterm()
    a1 = VirialCoefficient(coeffs)
    res = integrate_first_order(term, GAS, a1, (1.2, 2.8), (0.0,) * 4,
                                tol=1e-10)
    lo, hi = 1.2, 2.8
    cells = 80
    width = (hi - lo) / cells
    h = 0.2 * width  # midpoint stencil y +- 2h stays inside the span
    worst = 0.0
    for i in range(cells):
        y = lo + (i + 0.5) * width
        state = res.at(y)
        prime = [
            _richardson(lambda v, j=j: float(res.at(v)[j]), y, h)
            for j in range(4)
        ]
        vals = first_order_residual(term, GAS, a1, y, state, prime)
        worst = max(worst, max(abs(v) for v in vals))
    assert worst <= 1e-6


def test_first_order_init_must_have_four_components():
    term = _zterm()
    with pytest.raises(ValueError):
        integrate_first_order(term, GAS, VirialCoefficient(()), (1.2, 2.8),
                              (0.0, 0.0))
