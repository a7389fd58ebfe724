"""FastAPI service exposing the geometry operations to multiple clients."""
from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..bundle import (
    LiftInitialData,
    euler_lagrange_residuals,
    horizontal_lift_curve,
    integrate_bundle_geodesic,
    lagrangian_series,
    momentum_p3_series,
    natural_lift_curve,
)
from ..distributions import BUILTIN_NAMES, check_distribution
from ..heisenberg import (
    BaseGeodesicParams,
    CoordVector,
    base_rhs_array,
    sample_base_geodesic,
    theta3,
)
from ..integrate import IntegratorConfig, rk4
from ..serialize import (
    base_solution_payload,
    distribution_outcome_dict,
    trajectory_payload,
)
from ..verify import run_all
from . import schemas


def _el_max_dict(traj, init: LiftInitialData) -> dict[str, float]:
    res = euler_lagrange_residuals(traj, init)
    return {name: float(v) for name, v in zip(res.names, res.max_abs)}


def create_app() -> FastAPI:
    app = FastAPI(
        title="h3bundle service",
        description=(
            "Geodesics on the Heisenberg group and its Sasaki tangent bundle, "
            "curve lifts, distribution certification, and the verification suite."
        ),
        version=__version__,
    )

    @app.get("/healthz", response_model=schemas.HealthResponse)
    def healthz() -> schemas.HealthResponse:
        return schemas.HealthResponse(version=__version__)

    @app.post("/geodesic/base", response_model=schemas.BaseGeodesicResponse)
    def base_geodesic(req: schemas.BaseGeodesicRequest) -> schemas.BaseGeodesicResponse:
        params = BaseGeodesicParams(req.u, req.v, req.w)
        cfg = IntegratorConfig(h=req.step, t_max=req.t_max)
        closed = sample_base_geodesic(params, t_max=req.t_max, h=req.step)
        sol = rk4(base_rhs_array, np.array([0, 0, 0, req.u, req.v, req.w]), cfg)
        xs, vs = sol.states[:, :3], sol.states[:, 3:]
        max_gap = float(np.abs(closed.xs - xs).max())
        residuals = {
            "r1": float(np.abs(theta3(xs, vs) - req.w).max()),
            "r2": float(np.abs(vs[:, 0] + 2.0 * req.w * xs[:, 1] - req.u).max()),
            "r3": float(np.abs(vs[:, 1] - 2.0 * req.w * xs[:, 0] - req.v).max()),
        }
        return schemas.BaseGeodesicResponse(
            u=req.u,
            v=req.v,
            w=req.w,
            max_gap=max_gap,
            residual_max=residuals,
            closed_form=schemas.TrajectoryPayload(
                **base_solution_payload(closed.times, closed.xs, closed.vs)
            ),
            rk4=schemas.TrajectoryPayload(**base_solution_payload(sol.times, xs, vs)),
        )

    @app.post("/geodesic/bundle", response_model=schemas.BundleGeodesicResponse)
    def bundle_geodesic(req: schemas.BundleGeodesicRequest) -> schemas.BundleGeodesicResponse:
        init = LiftInitialData(req.u, req.v, req.w, req.l, req.m, req.n)
        traj = integrate_bundle_geodesic(init, IntegratorConfig(h=req.step, t_max=req.t_max))
        ls = lagrangian_series(traj)
        scale = ls[0] if ls[0] > 0 else 1.0
        p3 = momentum_p3_series(traj)
        return schemas.BundleGeodesicResponse(
            residual_max=_el_max_dict(traj, init),
            lagrangian_rel_drift=float(np.abs(ls - ls[0]).max() / scale),
            momentum_p3_drift=float(np.abs(p3 - p3[0]).max()),
            trajectory=schemas.TrajectoryPayload(**trajectory_payload(traj)),
        )

    @app.post("/lift", response_model=schemas.LiftResponse)
    def lift(req: schemas.LiftRequest) -> schemas.LiftResponse:
        params = BaseGeodesicParams(req.u, req.v, req.w)
        base = sample_base_geodesic(params, t_max=req.t_max, h=req.step)
        if req.kind == "horizontal":
            traj = horizontal_lift_curve(base, CoordVector(*req.y0))
        else:
            traj = natural_lift_curve(base)
        init = LiftInitialData(req.u, req.v, req.w, 0.0, 0.0, 0.0)
        residuals = _el_max_dict(traj, init)
        return schemas.LiftResponse(
            kind=req.kind,
            residual_max=residuals,
            is_geodesic=max(residuals.values()) < req.tol,
            trajectory=schemas.TrajectoryPayload(**trajectory_payload(traj)),
        )

    @app.post("/distributions/check", response_model=schemas.DistributionCheckResponse)
    def distributions_check(
        req: schemas.DistributionCheckRequest,
    ) -> schemas.DistributionCheckResponse:
        if req.name not in BUILTIN_NAMES:
            raise HTTPException(
                status_code=404,
                detail=f"unknown distribution {req.name!r}; expected one of {list(BUILTIN_NAMES)}",
            )
        outcome = check_distribution(
            req.name, n_samples=req.samples, seed=req.seed, tol=req.tol
        )
        return schemas.DistributionCheckResponse(**distribution_outcome_dict(outcome))

    @app.post("/verify", response_model=schemas.VerifyResponse)
    def verify(req: schemas.VerifyRequest) -> schemas.VerifyResponse:
        report = run_all(seed=req.seed)
        return schemas.VerifyResponse(**report.to_dict())

    return app
