"""Sasaki bundle: metric, connection, lifts, geodesic flow, reduced system."""
import numpy as np
import pytest

import h3bundle.bundle as bd
import h3bundle.heisenberg as hb
from h3bundle.integrate import IntegratorConfig
from h3bundle.verify import sample_circle_curve

RNG_SEED = 20260809


def lift_h(i):
    h = np.zeros(3)
    h[i] = 1.0
    return bd.BundleVector.from_arrays(h, np.zeros(3))


def lift_v(i):
    v = np.zeros(3)
    v[i] = 1.0
    return bd.BundleVector.from_arrays(np.zeros(3), v)


def origin_with_fiber(y):
    return bd.BundlePoint(hb.BasePoint(0, 0, 0), hb.CoordVector.from_array(y))


def random_bundle_point(rng):
    base = hb.BasePoint.from_array(rng.uniform(-2, 2, size=3))
    fiber = hb.CoordVector.from_array(rng.uniform(-2, 2, size=3))
    return bd.BundlePoint(base, fiber)


# ---------------------------------------------------------------------------
# Sasaki metric
# ---------------------------------------------------------------------------

def test_sasaki_metric_block_structure():
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(10):
        at = random_bundle_point(rng)
        assert bd.sasaki_metric(at, lift_h(0), lift_v(0)) == 0.0
        assert bd.sasaki_metric(at, lift_h(1), lift_h(1)) == 1.0
        assert bd.sasaki_metric(at, lift_v(2), lift_v(2)) == 1.0


def test_sasaki_metric_coordinate_cross_check():
    # expand the quadratic form g_ij dx^i dx^j + g_ij Dy^i Dy^j directly and
    # compare with the frame-coefficient computation
    rng = np.random.default_rng(RNG_SEED + 1)
    for _ in range(50):
        at = random_bundle_point(rng)
        x = at.base.as_array()
        y = at.fiber.as_array()
        dx1, dy1 = rng.uniform(-2, 2, size=(2, 3))
        dx2, dy2 = rng.uniform(-2, 2, size=(2, 3))
        u_vec = bd.vector_from_coordinates(
            at, hb.CoordVector.from_array(dx1), hb.CoordVector.from_array(dy1)
        )
        v_vec = bd.vector_from_coordinates(
            at, hb.CoordVector.from_array(dx2), hb.CoordVector.from_array(dy2)
        )
        got = bd.sasaki_metric(at, u_vec, v_vec)

        g = hb.metric_at(at.base)
        dcov1 = dy1 + np.einsum("hij,i,j->h", hb.christoffel_coord(at.base), y, dx1)
        dcov2 = dy2 + np.einsum("hij,i,j->h", hb.christoffel_coord(at.base), y, dx2)
        oracle = dx1 @ g @ dx2 + dcov1 @ g @ dcov2
        assert abs(got - oracle) < 1e-10


# ---------------------------------------------------------------------------
# Sasaki connection on frame lifts
# ---------------------------------------------------------------------------

def test_connection_vertical_vertical_vanishes():
    rng = np.random.default_rng(RNG_SEED + 2)
    at = random_bundle_point(rng)
    out = bd.sasaki_connection(lift_v(0), lift_v(1), at)
    assert np.abs(out.as_array()).max() == 0.0


def test_connection_mixed_case_curvature_term():
    # nabla_{E1^H} E1^V at (origin, E3) has horizontal part +1/2 E3^H
    at = origin_with_fiber([0, 0, 1])
    out = bd.sasaki_connection(lift_h(0), lift_v(0), at)
    assert np.abs(out.horizontal.as_array() - [0, 0, 0.5]).max() < 1e-15
    assert np.abs(out.vertical.as_array()).max() == 0.0


def test_connection_horizontal_horizontal():
    rng = np.random.default_rng(RNG_SEED + 3)
    for _ in range(10):
        y = rng.uniform(-2, 2, size=3)
        at = origin_with_fiber(y)
        out = bd.sasaki_connection(lift_h(0), lift_h(1), at)
        # horizontal part (nabla_{E1}E2)^H = E3^H
        assert np.abs(out.horizontal.as_array() - [0, 0, 1]).max() < 1e-15
        # vertical part -1/2 R(E1, E2) y
        yf = at.fiber_frame()
        expected = -0.5 * hb.curvature_apply_arr(np.eye(3)[0], np.eye(3)[1], yf)
        assert np.abs(out.vertical.as_array() - expected).max() < 1e-14


def test_connection_metric_compatibility_on_frame_lifts():
    # coefficients of frame lifts are constant, so g^s(V, W) is constant and
    # compatibility reads g^s(nabla_U V, W) + g^s(V, nabla_U W) = 0
    rng = np.random.default_rng(RNG_SEED + 4)
    for _ in range(25):
        at = random_bundle_point(rng)
        u = bd.BundleVector.from_arrays(rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3))
        v = bd.BundleVector.from_arrays(rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3))
        w = bd.BundleVector.from_arrays(rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3))
        lhs = bd.sasaki_metric(at, bd.sasaki_connection(u, v, at), w)
        rhs = bd.sasaki_metric(at, v, bd.sasaki_connection(u, w, at))
        assert abs(lhs + rhs) < 1e-12


# ---------------------------------------------------------------------------
# bundle geodesic flow
# ---------------------------------------------------------------------------

def test_rhs_pure_fiber_motion():
    state = bd.BundleState(
        x=hb.BasePoint(0, 0, 0),
        v=hb.CoordVector(0, 0, 0),
        y=hb.CoordVector(0, 0, 0),
        yp=hb.CoordVector(1.0, 2.0, 3.0),
    )
    d = bd.bundle_geodesic_rhs(state)
    assert np.abs(d.dv.as_array()).max() == 0.0
    assert d.dy.as_array().tolist() == [1.0, 2.0, 3.0]
    assert np.abs(d.dyp.as_array()).max() == 0.0


def test_rhs_reduces_to_base_when_fiber_velocity_vanishes():
    rng = np.random.default_rng(RNG_SEED + 5)
    for _ in range(10):
        x = hb.BasePoint.from_array(rng.uniform(-2, 2, 3))
        v = hb.CoordVector.from_array(rng.uniform(-2, 2, 3))
        y = hb.CoordVector.from_array(rng.uniform(-2, 2, 3))
        state = bd.BundleState(x=x, v=v, y=y, yp=hb.CoordVector(0, 0, 0))
        d = bd.bundle_geodesic_rhs(state)
        base_acc = hb.base_geodesic_rhs(x, v)[1].as_array()
        assert np.abs(d.dv.as_array() - base_acc).max() < 1e-13
        assert np.abs(d.dyp.as_array()).max() == 0.0


def test_fiber_family_solves_system_exactly():
    ts = np.linspace(0, 2, 101)
    states, rates = bd.fiber_geodesic_arrays(1.0, 2.0, 3.0, ts)
    worst = max(
        float(np.abs(r - bd.bundle_rhs_array(0.0, s)).max()) for s, r in zip(states, rates)
    )
    assert worst < 1e-12


def test_straight_line_candidate_family_residual_structure():
    # the family solves the system iff l*v = 0; otherwise the covariant
    # fiber acceleration has first component -l v^2 t (certified ground truth)
    u, v, l = 1.0, 2.0, 3.0
    for t in (0.5, 1.0, 2.0):
        states, rates = bd.special_geodesic_arrays(u, v, l, np.array([t]))
        resid = rates[0] - bd.bundle_rhs_array(0.0, states[0])
        assert abs(resid[9] - (-l * v * v * t)) < 1e-12
    # and the l*v = 0 member is an exact solution
    states, rates = bd.special_geodesic_arrays(1.3, 0.0, 0.9, np.linspace(0, 2, 21))
    worst = max(
        float(np.abs(r - bd.bundle_rhs_array(0.0, s)).max()) for s, r in zip(states, rates)
    )
    assert worst < 1e-14


def test_point_examples_of_families():
    s = bd.special_geodesic(1.0, 2.0, 3.0, 1.0)
    assert s.x.as_array().tolist() == [1.0, 2.0, 0.0]
    assert s.y.as_array().tolist() == [3.0, 0.0, -6.0]
    f = bd.fiber_geodesic(1.0, 2.0, 3.0, 2.0)
    assert f.y.as_array().tolist() == [2.0, 4.0, 6.0]
    assert f.x.as_array().tolist() == [0.0, 0.0, 0.0]


def test_integrated_geodesic_first_integrals_zero_fiber_velocity():
    init = bd.LiftInitialData(1.0, 2.0, 0.5, 0.0, 0.0, 0.0)
    traj = bd.integrate_bundle_geodesic(init, IntegratorConfig(h=1e-3, t_max=5.0))
    res = bd.euler_lagrange_residuals(traj, init)
    assert res.max_abs.max() < 1e-7


def test_zero_fiber_velocity_projects_to_base_closed_form():
    params = hb.BaseGeodesicParams(1.0, 2.0, 0.5)
    init = bd.LiftInitialData(1.0, 2.0, 0.5, 0.0, 0.0, 0.0)
    traj = bd.integrate_bundle_geodesic(init, IntegratorConfig(h=1e-3, t_max=3.0))
    xs, _, _ = hb._closed_form_xva(params, traj.times)
    assert np.abs(traj.states[:, 0:3] - xs).max() < 1e-6


def test_fiber_geodesic_residuals_tiny():
    init = bd.LiftInitialData(0.0, 0.0, 0.0, 1.0, 2.0, 3.0)
    traj = bd.integrate_bundle_geodesic(init, IntegratorConfig(h=1e-3, t_max=2.0))
    res = bd.euler_lagrange_residuals(traj, init)
    assert res.max_abs.max() < 1e-12


def test_zero_section_launch_keeps_base_integral_exact():
    # launches from y(0) = 0 transport y = t * Dy/dt, so the curvature
    # coupling cancels and the base projects to an exact geodesic
    init = bd.LiftInitialData(1.0, -1.0, 0.5, 0.5, 0.2, 0.3)
    traj = bd.integrate_bundle_geodesic(init, IntegratorConfig(h=1e-3, t_max=2.0))
    res = bd.euler_lagrange_residuals(traj, init)
    assert res.max_abs[:3].max() < 1e-11  # base residuals at integrator accuracy
    ys = traj.states[:, 6:9]
    zs = traj.states[:, 9:12]
    gap = np.abs(ys - traj.times[:, None] * zs).max()
    assert gap < 1e-10


def test_fiber_first_integrals_genuinely_drift_for_nonzero_fiber_velocity():
    # theta^3(Dy/dt) is not conserved once Dy/dt != 0: the flow rotates the
    # covariant fiber velocity inside the frame
    init = bd.LiftInitialData(1.0, -1.0, 0.5, 0.5, 0.2, 0.3)
    traj = bd.integrate_bundle_geodesic(init, IntegratorConfig(h=1e-3, t_max=2.0))
    res = bd.euler_lagrange_residuals(traj, init)
    assert res.max_abs[3:].max() > 0.1


def test_lagrangian_values_and_conservation():
    zero = bd.BundleState(
        hb.BasePoint(1, 2, 3), hb.CoordVector(0, 0, 0),
        hb.CoordVector(1, 1, 1), hb.CoordVector(0, 0, 0),
    )
    assert bd.lagrangian(zero) == 0.0
    at_origin = bd.BundleState(
        hb.BasePoint(0, 0, 0), hb.CoordVector(1, 2, 3),
        hb.CoordVector(0, 0, 0), hb.CoordVector(4, 5, 6),
    )
    assert bd.lagrangian(at_origin) == 1 + 4 + 9 + 16 + 25 + 36

    init = bd.LiftInitialData(1.0, -1.0, 0.5, 0.5, 0.2, 0.3)
    traj = bd.integrate_bundle_geodesic(init, IntegratorConfig(h=1e-3, t_max=10.0))
    ls = bd.lagrangian_series(traj)
    assert np.abs(ls - ls[0]).max() / ls[0] < 1e-6


def test_momentum_p3_conserved():
    init = bd.LiftInitialData(0.8, -0.6, 0.7, 0.4, -0.9, 0.5)
    traj = bd.integrate_bundle_geodesic(init, IntegratorConfig(h=1e-3, t_max=5.0))
    p3 = bd.momentum_p3_series(traj)
    assert np.abs(p3 - p3[0]).max() < 1e-10


def test_residuals_require_origin_anchor():
    init = bd.LiftInitialData(1.0, 0, 0, 0, 0, 0)
    states = np.zeros((5, 12))
    states[:, 0] = 1.0  # base starts away from the origin
    traj = bd.BundleTrajectory(t0=0, h=0.1, states=states)
    with pytest.raises(ValueError, match="anchored"):
        bd.euler_lagrange_residuals(traj, init)


# ---------------------------------------------------------------------------
# lifts
# ---------------------------------------------------------------------------

def test_horizontal_lift_constant_curve():
    n = 11
    base = hb.BaseTrajectory(t0=0, h=0.1, xs=np.zeros((n, 3)), vs=np.zeros((n, 3)))
    traj = bd.horizontal_lift_curve(base, hb.CoordVector(1, 2, 3))
    assert np.abs(traj.states[:, 6:9] - [1, 2, 3]).max() == 0.0


def test_horizontal_lift_preserves_norm():
    params = hb.BaseGeodesicParams(1.0, 0.0, 0.0)
    base = hb.sample_base_geodesic(params, t_max=3.0, h=1e-3)
    traj = bd.horizontal_lift_curve(base, hb.CoordVector(0, 1, 0))
    ys = traj.states[:, 6:9]
    yf = hb.frame_components(base.xs, ys)
    norms = np.sqrt(np.einsum("ni,ni->n", yf, yf))
    assert np.abs(norms - 1.0).max() < 1e-8


def test_horizontal_lift_of_velocity_is_velocity_field():
    params = hb.BaseGeodesicParams(1.0, 2.0, 0.5)
    base = hb.sample_base_geodesic(params, t_max=2.0, h=1e-4)
    traj = bd.horizontal_lift_curve(base, hb.CoordVector(1.0, 2.0, 0.5))
    assert np.abs(traj.states[:, 6:9] - base.vs).max() < 1e-10
    # agreement with the natural lift: 1e-8 away from the ends, where the
    # one-sided difference stencils lose accuracy
    nat = bd.natural_lift_curve(base)
    gap = np.abs(traj.states[:, 6:9] - nat.states[:, 6:9])
    assert gap[2:-2].max() < 1e-8
    assert gap.max() < 1e-7


def test_horizontal_lift_step_too_large():
    base = sample_circle_curve(t_max=6.0, h=0.75)
    with pytest.raises(ValueError, match="residual"):
        bd.horizontal_lift_curve(base, hb.CoordVector(1.0, 0.0, 0.0), residual_tol=1e-6)


def test_natural_lift_straight_line():
    params = hb.BaseGeodesicParams(0.7, -0.4, 0.0)
    base = hb.sample_base_geodesic(params, t_max=2.0, h=1e-3)
    traj = bd.natural_lift_curve(base)
    assert np.abs(traj.states[:, 6:9] - [0.7, -0.4, 0.0]).max() < 1e-10
    # second differences amplify position roundoff by 1/h^2
    assert np.abs(traj.states[:, 9:12]).max() < 5e-9


def test_natural_lift_of_geodesic_has_vanishing_covariant_velocity():
    params = hb.BaseGeodesicParams(1.0, 2.0, 0.5)
    base = hb.sample_base_geodesic(params, t_max=3.0, h=2e-4)
    traj = bd.natural_lift_curve(base)
    assert np.abs(traj.states[:, 9:12]).max() < 1e-6


def test_natural_lift_of_circle_is_not_parallel():
    circle = sample_circle_curve(t_max=2 * np.pi, h=1e-3)
    traj = bd.natural_lift_curve(circle)
    assert np.abs(traj.states[:, 9:12]).max() > 1e-2


def test_lifts_of_nongeodesic_fail_base_residuals():
    circle = sample_circle_curve(t_max=2 * np.pi, h=1e-3)
    init = bd.LiftInitialData(0.0, 1.0, 0.0, 0.0, 0.0, 0.0)
    hor = bd.horizontal_lift_curve(circle, hb.CoordVector(1, 0, 0))
    res = bd.euler_lagrange_residuals(hor, init)
    assert res.max_abs[:3].max() > 1e-2


# ---------------------------------------------------------------------------
# reduced fiber system
# ---------------------------------------------------------------------------

def test_sist_requires_straight_base():
    with pytest.raises(ValueError, match="w = 0"):
        bd.sist_rhs(hb.CoordVector(0, 0, 0), 0.0, bd.LiftInitialData(1, 0, 0.5, 0, 0, 0))


def test_sist_particular_solution_pure_fiber():
    init = bd.LiftInitialData(0.0, 0.0, 0.0, 0.7, -0.4, 1.1)
    for t in np.linspace(0, 3, 13):
        y = hb.CoordVector(init.l * t, init.m * t, init.n * t)
        rate = np.array([init.l, init.m, init.n])
        assert np.abs(rate - bd.sist_rhs(y, float(t), init).as_array()).max() < 1e-14


def test_sist_particular_solution_straight_line():
    init = bd.LiftInitialData(1.3, -0.8, 0.0, 0.9, 0.0, 0.0)
    for t in np.linspace(0, 2, 21):
        y = hb.CoordVector(init.l * t, 0.0, -init.l * init.v * t * t)
        rate = np.array([init.l, 0.0, -2.0 * init.l * init.v * t])
        assert np.abs(rate - bd.sist_rhs(y, float(t), init).as_array()).max() < 1e-14


def test_sist_agrees_with_bundle_flow_when_fiber_velocity_stays_axial():
    # with v = 0 and m = n = 0 the reduced system and the full flow coincide
    init = bd.LiftInitialData(1.3, 0.0, 0.0, 0.9, 0.0, 0.0)
    cfg = IntegratorConfig(h=1e-3, t_max=2.0)
    fiber = bd.integrate_sist(init, cfg)
    traj = bd.integrate_bundle_geodesic(init, cfg)
    assert np.abs(fiber - traj.states[:, 6:9]).max() < 1e-10


def test_sist_deviates_from_bundle_flow_generically():
    # the reduced system's third equation is not the Levi-Civita transport;
    # for generic data the two flows separate by O(1) over a few time units
    init = bd.LiftInitialData(1.0, -1.0, 0.0, 0.5, 0.2, 0.3)
    cfg = IntegratorConfig(h=1e-3, t_max=2.0)
    fiber = bd.integrate_sist(init, cfg)
    traj = bd.integrate_bundle_geodesic(init, cfg)
    assert np.abs(fiber - traj.states[:, 6:9]).max() > 1e-2


def test_trajectory_validation():
    with pytest.raises(ValueError, match="shape"):
        bd.BundleTrajectory(t0=0, h=0.1, states=np.zeros((3, 7)))
    with pytest.raises(ValueError, match="positive"):
        bd.BundleTrajectory(t0=0, h=0.0, states=np.zeros((3, 12)))
