"""The reproduction suite: every headline property as a named, tolerance-pinned check.

Each check returns a CheckOutcome with a verdict and the measured numbers;
``run_all`` aggregates them into a report whose exit code is 0 iff every
check passed.  Outcomes are honest: two pinned reference results (the straight-line
bundle family and the reduced fiber system's agreement with the full flow)
and the pinned witness magnitudes of the kernel/plane distribution checks
contradict the Levi-Civita geometry of the stated metric, so those checks
report their measured values and fail; the detail strings say exactly what
was measured.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import bundle as bd
from . import distributions as dist
from . import heisenberg as hb
from .integrate import IntegratorConfig, rk4

__all__ = [
    "CheckOutcome",
    "VerificationReport",
    "run_all",
    "koszul_christoffel_fd",
    "curvature_from_connection",
    "sample_circle_curve",
    "flipped_curvature",
    "CHECK_NAMES",
]

CHECK_NAMES = (
    "curvature-constants",
    "curvature-bianchi",
    "christoffel-koszul",
    "base-closed-form",
    "base-first-integral",
    "lagrangian-conservation",
    "thm-lifts",
    "thm-fiber",
    "thm-special",
    "sist-particular",
    "sist-cross-check",
    "prop3",
    "prop4",
    "prop5",
    "rk4-order",
)


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    passed: bool
    detail: str
    data: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


@dataclass(frozen=True)
class VerificationReport:
    checks: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    @property
    def failures(self) -> list[str]:
        return [name for name, c in self.checks.items() if not c.passed]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "exit_code": self.exit_code,
            "failures": self.failures,
            "checks": {
                name: {"verdict": c.verdict, "detail": c.detail, "data": c.data}
                for name, c in self.checks.items()
            },
        }


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------

def koszul_christoffel_fd(p: hb.BasePoint, step: float = 1e-5) -> np.ndarray:
    """Christoffel symbols by central finite differences of the metric.

    Gamma^h_ij = 1/2 g^{hk} (d_i g_jk + d_j g_ik - d_k g_ij); independent of
    the closed-form polynomial table.
    """
    x = p.as_array()
    dg = np.empty((3, 3, 3))
    for k in range(3):
        shift = np.zeros(3)
        shift[k] = step
        g_plus = hb.metric_at(hb.BasePoint.from_array(x + shift))
        g_minus = hb.metric_at(hb.BasePoint.from_array(x - shift))
        dg[k] = (g_plus - g_minus) / (2.0 * step)
    ginv = np.linalg.inv(hb.metric_at(p))
    gam = 0.5 * (
        np.einsum("hk,ijk->hij", ginv, dg)
        + np.einsum("hk,jik->hij", ginv, dg)
        - np.einsum("hk,kij->hij", ginv, dg)
    )
    return gam


def curvature_from_connection() -> np.ndarray:
    """Expand R(E_i,E_j)E_k from the constant connection and bracket tables.

    R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z with
    [E_1,E_2] = 2 E_3 the only nonvanishing bracket.  Returns the same layout
    as CurvatureTable.r_up: out[l, k, i, j] is the E_l coefficient of
    R(E_i, E_j)E_k.
    """
    c = hb.frame_connection().table
    f = np.zeros((3, 3, 3))
    f[2, 0, 1] = 2.0
    f[2, 1, 0] = -2.0
    term1 = np.einsum("mjk,lim->lkij", c, c)
    term2 = np.einsum("mik,ljm->lkij", c, c)
    term3 = np.einsum("mij,lmk->lkij", f, c)
    return term1 - term2 - term3


def sample_circle_curve(t_max: float, h: float) -> hb.BaseTrajectory:
    """The non-geodesic test circle (cos t - 1, sin t, 0) with exact velocities."""
    n = int(round(t_max / h)) + 1
    ts = h * np.arange(n)
    xs = np.stack([np.cos(ts) - 1.0, np.sin(ts), np.zeros(n)], axis=1)
    vs = np.stack([-np.sin(ts), np.cos(ts), np.zeros(n)], axis=1)
    return hb.BaseTrajectory(t0=0.0, h=h, xs=xs, vs=vs)


def flipped_curvature() -> hb.CurvatureTable:
    """Test hook: the curvature table with one component's sign flipped."""
    r_up = np.array(hb.curvature_frame().r_up, copy=True)
    r_up[0, 1, 0, 1] *= -1.0  # breaks antisymmetry, Bianchi and the expansion match
    r_down = np.einsum("cdab->abcd", r_up)
    return hb.CurvatureTable(r_up=r_up, r_down=r_down)


# ---------------------------------------------------------------------------
# individual checks
# ---------------------------------------------------------------------------

_PINNED_R_UP = {
    (1, 0, 0, 1): 3.0,
    (2, 0, 0, 2): -1.0,
    (0, 1, 0, 1): -3.0,
    (0, 2, 0, 2): 1.0,
    (2, 1, 1, 2): -1.0,
    (1, 2, 1, 2): 1.0,
}
_PINNED_R_DOWN = {
    (0, 1, 0, 1): -3.0,
    (0, 2, 0, 2): 1.0,
    (1, 2, 1, 2): 1.0,
}


def check_curvature_constants(table: hb.CurvatureTable) -> CheckOutcome:
    pin_err = max(abs(table.r_up[idx] - val) for idx, val in _PINNED_R_UP.items())
    pin_err = max(
        pin_err, max(abs(table.r_down[idx] - val) for idx, val in _PINNED_R_DOWN.items())
    )
    expansion_err = float(np.abs(curvature_from_connection() - table.r_up).max())
    passed = pin_err == 0.0 and expansion_err == 0.0
    return CheckOutcome(
        "curvature-constants",
        passed,
        f"pinned-entry error {pin_err:g}, connection-expansion error {expansion_err:g}",
        {"pin_err": pin_err, "expansion_err": expansion_err},
    )


def check_curvature_bianchi(table: hb.CurvatureTable) -> CheckOutcome:
    r_up, r_down = table.r_up, table.r_down
    antisym_ab = float(np.abs(r_down + np.einsum("abcd->bacd", r_down)).max())
    antisym_cd = float(np.abs(r_down + np.einsum("abcd->abdc", r_down)).max())
    pair_sym = float(np.abs(r_down - np.einsum("abcd->cdab", r_down)).max())
    # first Bianchi: R(Ei,Ej)Ek + R(Ej,Ek)Ei + R(Ek,Ei)Ej = 0
    b = np.zeros((3, 3, 3, 3))
    for i in range(3):
        for j in range(3):
            for k in range(3):
                b[:, i, j, k] = r_up[:, k, i, j] + r_up[:, i, j, k] + r_up[:, j, k, i]
    bianchi = float(np.abs(b).max())
    worst = max(antisym_ab, antisym_cd, pair_sym, bianchi)
    return CheckOutcome(
        "curvature-bianchi",
        worst == 0.0,
        f"antisymmetry {max(antisym_ab, antisym_cd):g}, pair symmetry {pair_sym:g}, "
        f"first Bianchi {bianchi:g}",
        {
            "antisym_ab": antisym_ab,
            "antisym_cd": antisym_cd,
            "pair_sym": pair_sym,
            "bianchi": bianchi,
        },
    )


def check_christoffel_koszul(seed: int = dist.DEFAULT_SEED) -> CheckOutcome:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(20):
        p = hb.BasePoint.from_array(rng.uniform(-2.0, 2.0, size=3))
        err = float(np.abs(koszul_christoffel_fd(p) - hb.christoffel_coord(p)).max())
        worst = max(worst, err)
    return CheckOutcome(
        "christoffel-koszul",
        worst < 1e-6,
        f"max |closed form - FD Koszul| = {worst:.3e} over 20 seeded points",
        {"max_err": worst},
    )


def _closed_form_el_residuals(params: hb.BaseGeodesicParams, ts: np.ndarray) -> float:
    xs, vs, _ = hb._closed_form_xva(params, ts)
    r1 = hb.theta3(xs, vs) - params.w
    r2 = vs[:, 0] + 2.0 * params.w * xs[:, 1] - params.u
    r3 = vs[:, 1] - 2.0 * params.w * xs[:, 0] - params.v
    return float(max(np.abs(r1).max(), np.abs(r2).max(), np.abs(r3).max()))


def check_base_closed_form() -> CheckOutcome:
    params = hb.BaseGeodesicParams(1.0, 2.0, 0.5)
    ts = np.linspace(0.0, 4.0 * math.pi, 12567)
    el_res = _closed_form_el_residuals(params, ts)

    # closed form against the geodesic ODE, several frequencies
    ode_res = 0.0
    for w in (0.1, 0.5, 1.0, 5.0):
        pw = hb.BaseGeodesicParams(1.0, 2.0, w)
        for t in np.linspace(0.0, 4.0, 17):
            x = hb.base_geodesic_closed_form(pw, float(t))
            v = hb.base_geodesic_velocity(pw, float(t))
            acc = hb.base_geodesic_acceleration(pw, float(t)).as_array()
            rhs_acc = hb.base_geodesic_rhs(x, v)[1].as_array()
            ode_res = max(ode_res, float(np.abs(acc - rhs_acc).max()))

    # RK4 cross-check at t = 1
    sol = rk4(hb.base_rhs_array, np.array([0, 0, 0, 1.0, 2.0, 0.5]),
              IntegratorConfig(h=1e-3, t_max=1.0))
    gap = float(
        np.abs(sol.states[-1, :3] - hb.base_geodesic_closed_form(params, 1.0).as_array()).max()
    )

    # negative control: the nearby wrong integration constants violate the
    # initial conditions.  The wrong x2 constant (v/2w instead of u/2w) shows
    # whenever u != v; the wrong x3 sine coefficient ((u^2+v^2)/2w instead of
    # (u^2+v^2)/4w^2) cancels exactly at 2w = 1, so probe it at w = 0.8 too.
    u, v, w = 1.0, 2.0, 0.5
    x2_bad0 = (v - u) / (2.0 * w)
    w2 = 0.8
    q2 = (u * u + v * v) / (2.0 * w2)
    dx3_bad0 = q2 * (1.0 - 2.0 * w2)  # velocity excess of the wrong x3 at t = 0
    neg_margin = min(abs(x2_bad0), abs(dx3_bad0))

    passed = el_res < 1e-8 and gap < 1e-6 and ode_res < 1e-8 and neg_margin > 1e-3
    return CheckOutcome(
        "base-closed-form",
        passed,
        f"EL residual {el_res:.2e}, RK4 gap at t=1 {gap:.2e}, ODE residual {ode_res:.2e}, "
        f"wrong-constant margin {neg_margin:.2f}",
        {"el_residual": el_res, "rk4_gap": gap, "ode_residual": ode_res,
         "wrong_constant_margin": neg_margin},
    )


def check_base_first_integral() -> CheckOutcome:
    sol = rk4(hb.base_rhs_array, np.array([0, 0, 0, 1.0, 2.0, 0.5]),
              IntegratorConfig(h=1e-3, t_max=10.0))
    xs, vs = sol.states[:, :3], sol.states[:, 3:]
    drift = float(np.abs(hb.theta3(xs, vs) - 0.5).max())
    return CheckOutcome(
        "base-first-integral",
        drift < 1e-8,
        f"max |theta^3(dx/dt) - w| = {drift:.2e} (h=1e-3, t<=10)",
        {"drift": drift},
    )


def check_lagrangian_conservation(seed: int = dist.DEFAULT_SEED) -> CheckOutcome:
    rng = np.random.default_rng(seed + 1)
    worst = 0.0
    for _ in range(5):
        init = bd.LiftInitialData(*rng.uniform(-1.0, 1.0, size=6))
        traj = bd.integrate_bundle_geodesic(init, IntegratorConfig(h=1e-3, t_max=10.0))
        ls = bd.lagrangian_series(traj)
        worst = max(worst, float(np.abs(ls - ls[0]).max() / ls[0]))
    return CheckOutcome(
        "lagrangian-conservation",
        worst < 1e-6,
        f"max relative drift {worst:.2e} over 5 seeded launches (h=1e-3, t<=10)",
        {"max_rel_drift": worst},
    )


def check_thm_lifts() -> CheckOutcome:
    params = hb.BaseGeodesicParams(1.0, 2.0, 0.5)
    init = bd.LiftInitialData(1.0, 2.0, 0.5, 0.0, 0.0, 0.0)

    # h = 2e-4 balances the O(h^2) difference truncation against the
    # second-difference roundoff floor (~eps |x| / h^2); measured residuals
    # sit near 4e-7 there, comfortably under the 1e-6 requirement
    base_fine = hb.sample_base_geodesic(params, t_max=3.0, h=2e-4)
    nat = bd.natural_lift_curve(base_fine)
    nat_res = float(bd.euler_lagrange_residuals(nat, init).max_abs.max())

    base = hb.sample_base_geodesic(params, t_max=3.0, h=1e-3)
    hor = bd.horizontal_lift_curve(base, hb.CoordVector(0.3, -0.2, 0.4))
    hor_res = float(bd.euler_lagrange_residuals(hor, init).max_abs.max())

    circle = sample_circle_curve(t_max=2.0 * math.pi, h=1e-3)
    nat_circle = bd.natural_lift_curve(circle)
    circle_init = bd.LiftInitialData(0.0, 1.0, 0.0, -1.0, 0.0, 0.0)
    circle_res = float(
        bd.euler_lagrange_residuals(nat_circle, circle_init).max_abs[:3].max()
    )

    passed = nat_res < 1e-6 and hor_res < 1e-6 and circle_res > 1e-2
    return CheckOutcome(
        "thm-lifts",
        passed,
        f"natural-lift residual {nat_res:.2e}, horizontal-lift residual {hor_res:.2e}, "
        f"non-geodesic circle residual {circle_res:.2f}",
        {"natural": nat_res, "horizontal": hor_res, "circle": circle_res},
    )


def _system_residual(states: np.ndarray, rates: np.ndarray) -> float:
    worst = 0.0
    for s, r in zip(states, rates):
        worst = max(worst, float(np.abs(r - bd.bundle_rhs_array(0.0, s)).max()))
    return worst


def check_thm_fiber() -> CheckOutcome:
    ts = np.linspace(0.0, 2.0, 201)
    states, rates = bd.fiber_geodesic_arrays(1.0, 2.0, 3.0, ts)
    res = _system_residual(states, rates)
    return CheckOutcome(
        "thm-fiber",
        res < 1e-12,
        f"in-fiber family residual {res:.2e} ((l,m,n)=(1,2,3), t in [0,2])",
        {"residual": res},
    )


def check_thm_special() -> CheckOutcome:
    u, v, l = 1.0, 2.0, 3.0
    ts = np.linspace(0.0, 2.0, 201)
    states, rates = bd.special_geodesic_arrays(u, v, l, ts)
    res = _system_residual(states, rates)

    traj = bd.integrate_bundle_geodesic(
        bd.LiftInitialData(u, v, 0.0, l, 0.0, 0.0), IntegratorConfig(h=1e-3, t_max=2.0)
    )
    fam_states, _ = bd.special_geodesic_arrays(u, v, l, traj.times)
    gap = float(
        np.abs(traj.states[:, [0, 1, 2, 6, 7, 8]] - fam_states[:, [0, 1, 2, 6, 7, 8]]).max()
    )
    passed = res < 1e-10 and gap < 1e-6
    return CheckOutcome(
        "thm-special",
        passed,
        f"candidate family system residual {res:.3g} (required < 1e-10), RK4 gap {gap:.3g} "
        "(required < 1e-6); the family solves the system only when l*v = 0, so both "
        "measurements reflect the family's genuine deviation",
        {"residual": res, "rk4_gap": gap},
    )


def check_sist_particular() -> CheckOutcome:
    ts = np.linspace(0.0, 2.0, 41)
    worst = 0.0
    init1 = bd.LiftInitialData(0.0, 0.0, 0.0, 0.7, -0.4, 1.1)
    for t in ts:
        y = hb.CoordVector(init1.l * t, init1.m * t, init1.n * t)
        rate = np.array([init1.l, init1.m, init1.n])
        worst = max(
            worst,
            float(np.abs(rate - bd.sist_rhs(y, float(t), init1).as_array()).max()),
        )
    init2 = bd.LiftInitialData(1.3, -0.8, 0.0, 0.9, 0.0, 0.0)
    for t in ts:
        y = hb.CoordVector(init2.l * t, 0.0, -init2.l * init2.v * t * t)
        rate = np.array([init2.l, 0.0, -2.0 * init2.l * init2.v * t])
        worst = max(
            worst,
            float(np.abs(rate - bd.sist_rhs(y, float(t), init2).as_array()).max()),
        )
    return CheckOutcome(
        "sist-particular",
        worst < 1e-14,
        f"both polynomial families satisfy the reduced system to {worst:.2e}",
        {"residual": worst},
    )


def check_sist_cross_check() -> CheckOutcome:
    init = bd.LiftInitialData(1.0, -1.0, 0.0, 0.5, 0.2, 0.3)
    cfg = IntegratorConfig(h=1e-3, t_max=2.0)
    fiber_sist = bd.integrate_sist(init, cfg)
    traj = bd.integrate_bundle_geodesic(init, cfg)
    gap = float(np.abs(fiber_sist - traj.states[:, 6:9]).max())
    return CheckOutcome(
        "sist-cross-check",
        gap < 1e-6,
        f"reduced-system fiber vs full bundle fiber gap {gap:.3g} over t in [0,2] "
        "(required < 1e-6); the reduced system's third equation differs from the "
        "Levi-Civita fiber transport, so the gap is genuine",
        {"gap": gap},
    )


def check_prop3(seed: int = dist.DEFAULT_SEED) -> CheckOutcome:
    worst = 0.0
    verdicts = {}
    for name in ("htm", "vtm"):
        out = dist.check_distribution(name, n_samples=100, seed=seed, tol=1e-10)
        verdicts[name] = (out.totally_geodesic.verdict, out.isocline.verdict if out.isocline else "skipped")
        worst = max(worst, out.totally_geodesic.global_max)
        if out.isocline is not None:
            worst = max(worst, out.isocline.global_max)
    passed = all(v == ("pass", "pass") for v in verdicts.values())
    return CheckOutcome(
        "prop3",
        passed,
        f"htm/vtm criteria verdicts {verdicts}, worst residual {worst:.2e}",
        {"worst_residual": worst, "verdicts": {k: list(v) for k, v in verdicts.items()}},
    )


def _witness_at_e3(name: str, criterion: str, seed: int) -> float:
    """Residual of the named check at the deterministic sample (origin, E_3)."""
    d = dist.builtin_distribution(name)
    samples = dist.sample_bundle_points(100, seed=seed)
    report = dist._run_criterion(d, samples, 1e-10, criterion)
    return float(report.per_sample[2])  # witnesses (origin, E_1/E_2/E_3) lead the list


def check_prop4(seed: int = dist.DEFAULT_SEED) -> CheckOutcome:
    out_h = dist.check_distribution("ker-omega-h", n_samples=100, seed=seed, tol=1e-10)
    out_v = dist.check_distribution("ker-omega-v", n_samples=100, seed=seed, tol=1e-10)
    wit_h = _witness_at_e3("ker-omega-h", "totally_geodesic", seed)
    wit_v = out_v.totally_geodesic.witness_residual
    qualitative = (
        out_h.totally_geodesic.verdict == "fail" and out_v.totally_geodesic.verdict == "fail"
    )
    pinned = abs(wit_h - 0.5) < 1e-10 and abs(wit_v - 1.0) < 1e-10
    return CheckOutcome(
        "prop4",
        qualitative and pinned,
        f"neither kernel distribution is totally geodesic (reproduced: {qualitative}); "
        f"witness at (origin, E3) measured {wit_h:.10f} against pinned 0.5 for the "
        f"horizontal kernel and {wit_v:.10f} against pinned 1.0 for the vertical one",
        {"witness_ker_h": wit_h, "witness_ker_v": float(wit_v),
         "qualitative_reproduced": qualitative},
    )


def check_prop5(seed: int = dist.DEFAULT_SEED) -> CheckOutcome:
    out_fh = dist.check_distribution("f-h", n_samples=100, seed=seed, tol=1e-10)
    out_fv = dist.check_distribution("f-v", n_samples=100, seed=seed, tol=1e-10)
    tg_pass = (
        out_fh.totally_geodesic.verdict == "pass" and out_fv.totally_geodesic.verdict == "pass"
    )
    iso_fail = (
        out_fh.isocline is not None
        and out_fv.isocline is not None
        and out_fh.isocline.verdict == "fail"
        and out_fv.isocline.verdict == "fail"
    )
    wit_fh = _witness_at_e3("f-h", "isocline", seed)
    wit_fv = _witness_at_e3("f-v", "isocline", seed)
    pinned = abs(wit_fh - 0.5) < 1e-10 and abs(wit_fv - 0.5) < 1e-10
    return CheckOutcome(
        "prop5",
        tg_pass and iso_fail and pinned,
        f"totally geodesic: {tg_pass}, isocline failure: {iso_fail} (both reproduced); "
        f"witnesses at (origin, E3) measured {wit_fh:.10f} / {wit_fv:.10f} against pinned 0.5",
        {"witness_f_h": wit_fh, "witness_f_v": wit_fv,
         "tg_reproduced": tg_pass, "isocline_failure_reproduced": iso_fail},
    )


def check_rk4_order() -> CheckOutcome:
    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        return y

    errors = []
    for h in (1e-1, 5e-2, 2.5e-2):
        sol = rk4(rhs, np.array([1.0]), IntegratorConfig(h=h, t_max=1.0))
        errors.append(abs(float(sol.states[-1, 0]) - math.e))
    orders = [math.log2(errors[i] / errors[i + 1]) for i in range(2)]
    passed = min(orders) >= 3.8
    return CheckOutcome(
        "rk4-order",
        passed,
        f"observed convergence orders {orders[0]:.2f}, {orders[1]:.2f} on y' = y",
        {"orders": orders, "errors": errors},
    )


# ---------------------------------------------------------------------------
# suite
# ---------------------------------------------------------------------------

def run_all(
    seed: int = dist.DEFAULT_SEED, curvature_table: hb.CurvatureTable | None = None
) -> VerificationReport:
    """Run every named check; ``curvature_table`` lets tests inject a broken table."""
    table = curvature_table if curvature_table is not None else hb.curvature_frame()
    checks = [
        check_curvature_constants(table),
        check_curvature_bianchi(table),
        check_christoffel_koszul(seed),
        check_base_closed_form(),
        check_base_first_integral(),
        check_lagrangian_conservation(seed),
        check_thm_lifts(),
        check_thm_fiber(),
        check_thm_special(),
        check_sist_particular(),
        check_sist_cross_check(),
        check_prop3(seed),
        check_prop4(seed),
        check_prop5(seed),
        check_rk4_order(),
    ]
    return VerificationReport(checks={c.name: c for c in checks})
