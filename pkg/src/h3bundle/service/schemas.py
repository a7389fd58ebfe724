"""Pydantic request/response models for the HTTP service."""
from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from ..distributions import DEFAULT_SEED

FiniteFloat = Field(allow_inf_nan=False)


class HealthResponse(BaseModel):
    status: str = "ok"
    version: str


class TrajectoryPayload(BaseModel):
    columns: list[str]
    rows: list[list[float]]


class BaseGeodesicRequest(BaseModel):
    u: float = Field(0.0, allow_inf_nan=False)
    v: float = Field(0.0, allow_inf_nan=False)
    w: float = Field(0.0, allow_inf_nan=False)
    t_max: float = Field(10.0, gt=0, allow_inf_nan=False)
    step: float = Field(1e-3, gt=0, allow_inf_nan=False)


class BaseGeodesicResponse(BaseModel):
    u: float
    v: float
    w: float
    max_gap: float
    residual_max: dict[str, float]
    closed_form: TrajectoryPayload
    rk4: TrajectoryPayload


class BundleGeodesicRequest(BaseModel):
    u: float = Field(0.0, allow_inf_nan=False)
    v: float = Field(0.0, allow_inf_nan=False)
    w: float = Field(0.0, allow_inf_nan=False)
    l: float = Field(0.0, allow_inf_nan=False)
    m: float = Field(0.0, allow_inf_nan=False)
    n: float = Field(0.0, allow_inf_nan=False)
    t_max: float = Field(10.0, gt=0, allow_inf_nan=False)
    step: float = Field(1e-3, gt=0, allow_inf_nan=False)


class BundleGeodesicResponse(BaseModel):
    residual_max: dict[str, float]
    lagrangian_rel_drift: float
    momentum_p3_drift: float
    trajectory: TrajectoryPayload


class LiftRequest(BaseModel):
    kind: Literal["horizontal", "natural"]
    u: float = Field(0.0, allow_inf_nan=False)
    v: float = Field(0.0, allow_inf_nan=False)
    w: float = Field(0.0, allow_inf_nan=False)
    y0: tuple[float, float, float] = (0.0, 0.0, 0.0)
    t_max: float = Field(10.0, gt=0, allow_inf_nan=False)
    step: float = Field(1e-3, gt=0, allow_inf_nan=False)
    tol: float = Field(1e-6, gt=0, allow_inf_nan=False)


class LiftResponse(BaseModel):
    kind: str
    residual_max: dict[str, float]
    is_geodesic: bool
    trajectory: TrajectoryPayload


class DistributionCheckRequest(BaseModel):
    name: str
    samples: int = Field(100, ge=1)
    seed: int = DEFAULT_SEED
    tol: float = Field(1e-10, gt=0, allow_inf_nan=False)


class WitnessModel(BaseModel):
    point: dict[str, list[float]]
    residual: float


class CheckReportModel(BaseModel):
    name: str
    criterion: str
    tolerance: float
    global_max: float
    verdict: str
    witness: WitnessModel


class DistributionCheckResponse(BaseModel):
    name: str
    totally_geodesic: CheckReportModel
    isocline: Optional[CheckReportModel] = None
    isocline_skipped: Optional[str] = None


class VerifyRequest(BaseModel):
    seed: int = DEFAULT_SEED


class CheckOutcomeModel(BaseModel):
    verdict: str
    detail: str
    data: dict


class VerifyResponse(BaseModel):
    passed: bool
    exit_code: int
    failures: list[str]
    checks: dict[str, CheckOutcomeModel]
