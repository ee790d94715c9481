"""Pydantic request/response models for the delaykern service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

Format = Literal["csv", "json", "svg"]


class ArtifactResponse(BaseModel):
    files: dict[str, str]
    report: dict


class RegionsRequest(BaseModel):
    a_min: float = -6.0
    a_max: float = 0.9
    n_points: int = Field(default=60, ge=2, le=2000)
    T: float = Field(default=1.0, ge=0.0)
    formats: Optional[list[Format]] = None


class ScalarSweepRequest(BaseModel):
    a_min: float = -6.0
    a_max: float = 0.9
    n_points: int = Field(default=60, ge=2, le=2000)
    T_list: list[float] = Field(default=[0.0, 1.0, 2.0, 3.0])
    r: float = Field(default=1.0, gt=0.0)
    formats: Optional[list[Format]] = None


class RdKernelsRequest(BaseModel):
    c: float = Field(default=1.0, gt=0.0)
    d: float = Field(default=10.0, gt=0.0)
    T: float = Field(default=1.0, ge=0.0)
    r: float = Field(default=10.0, gt=0.0)
    dx: float = Field(default=0.1, gt=0.0)
    L: float = Field(default=20.0, gt=0.0)
    alpha: float = Field(default=1.0, gt=0.0, le=1.0)
    beta: float = Field(default=1.0, gt=0.0)
    kappa: float = Field(default=2.0, gt=0.0)
    gamma: float = Field(default=1.0, ge=1.0)
    n_lambda: Optional[int] = Field(default=None, ge=64)
    lambda_max: Optional[float] = Field(default=None, gt=0.0)
    formats: Optional[list[Format]] = None


class CirculantRequest(BaseModel):
    n: int = Field(ge=2)
    a_row: list[float]
    T: float = Field(default=0.01, ge=0.0)
    r: float = Field(default=1.0, gt=0.0)
    method: Literal["numerical_opt", "small_delay", "delay_free"] = "small_delay"
    formats: Optional[list[Format]] = None


class CirculantDesignResponse(BaseModel):
    k_row: list[float]
    k_modes: list[float]
    self_gain: float
    cost: Optional[float]
    stable: bool


class VerifyRequest(BaseModel):
    a_values: Optional[list[float]] = None
    T_values: Optional[list[float]] = None
    k_per_cell: int = Field(default=6, ge=3, le=32)
    seed: int = 0
    h: float = Field(default=0.01, gt=0.0)
    formats: Optional[list[Format]] = None


class ScalarGainRequest(BaseModel):
    a: float
    T: float = Field(default=0.0, ge=0.0)
    r: float = Field(default=1.0, gt=0.0)


class ScalarGainResponse(BaseModel):
    k_opt: float
    j_opt: float
    interval_lower: float
    interval_upper: Optional[float] = Field(
        default=None, description="null when the interval is unbounded (T = 0)")


class ScalarCostRequest(BaseModel):
    a: float
    T: float = Field(default=0.0, ge=0.0)
    r: float = Field(default=1.0, gt=0.0)
    k: float


class ScalarCostResponse(BaseModel):
    f_value: float
    j_value: float
    branch: Literal["below", "equal", "above"]


class ErrorBody(BaseModel):
    error: str
    message: str
    exit_code: int
