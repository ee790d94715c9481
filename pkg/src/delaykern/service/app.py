"""FastAPI service wrapping the delaykern core.

Artifact endpoints return the produced files inline ({filename: content})
so a thin client can write them wherever it likes; design endpoints return
plain JSON records.  Domain errors map to HTTP 400 (client configuration,
CLI exit code 2) and numerical failures to HTTP 409 (exit code 3).
"""

from __future__ import annotations

import math

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import workbench
from ..circulant import CirculantSystem, design_gains, h2_cost, verify_closed_loop
from ..errors import (DelaykernError, DivergenceError, DomainError,
                      InstabilityError, UnstabilizableError)
from ..scalar import ScalarPlant, optimal_gain, variance_integral, stability_interval
from . import models

app = FastAPI(title="delaykern", version="0.1.0")

_NUMERICAL = (DivergenceError, InstabilityError, UnstabilizableError)


@app.exception_handler(DelaykernError)
async def _delaykern_error(request: Request, exc: DelaykernError):
    numerical = isinstance(exc, _NUMERICAL)
    body = models.ErrorBody(error=type(exc).__name__, message=str(exc),
                            exit_code=3 if numerical else 2)
    return JSONResponse(status_code=409 if numerical else 400,
                        content=body.model_dump())


@app.get("/health")
def health():
    return {"status": "ok"}


@app.post("/api/regions", response_model=models.ArtifactResponse)
def regions(req: models.RegionsRequest):
    files, report = workbench.cmd_regions(req.a_min, req.a_max, req.n_points,
                                          req.T, req.formats)
    return models.ArtifactResponse(files=files, report=report)


@app.post("/api/scalar-sweep", response_model=models.ArtifactResponse)
def scalar_sweep(req: models.ScalarSweepRequest):
    files, report = workbench.cmd_scalar_sweep(req.a_min, req.a_max,
                                               req.n_points, req.T_list,
                                               req.r, req.formats)
    return models.ArtifactResponse(files=files, report=report)


@app.post("/api/rd-kernels", response_model=models.ArtifactResponse)
def rd_kernels(req: models.RdKernelsRequest):
    files, report = workbench.cmd_rd_kernels(
        req.c, req.d, req.T, req.r, req.dx, req.L,
        alpha=req.alpha, beta=req.beta, kappa=req.kappa, gamma=req.gamma,
        formats=req.formats, n_lambda=req.n_lambda, lambda_max=req.lambda_max)
    return models.ArtifactResponse(files=files, report=report)


@app.post("/api/circulant", response_model=models.ArtifactResponse)
def circulant(req: models.CirculantRequest):
    files, report = workbench.cmd_circulant(req.n, req.a_row, req.T, req.r,
                                            req.method, req.formats)
    return models.ArtifactResponse(files=files, report=report)


@app.post("/api/verify", response_model=models.ArtifactResponse)
def verify(req: models.VerifyRequest):
    files, report = workbench.cmd_verify(req.a_values, req.T_values,
                                         req.k_per_cell, req.seed, req.h,
                                         req.formats)
    return models.ArtifactResponse(files=files, report=report)


@app.post("/api/design/circulant", response_model=models.CirculantDesignResponse)
def design_circulant(req: models.CirculantRequest):
    """Pure JSON design interface: {n, a_row, T, r, method} in,
    {k_row, k_modes, self_gain, cost, stable} out."""
    sys_ = CirculantSystem(n=req.n, a_row=req.a_row)
    gains = design_gains(sys_, req.T, req.r, req.method)
    stable = verify_closed_loop(sys_, gains, req.T)
    cost = h2_cost(sys_, gains, req.T, req.r) if stable else None
    return models.CirculantDesignResponse(
        k_row=list(map(float, gains.k_row)),
        k_modes=list(map(float, gains.k_modes)),
        self_gain=gains.self_gain, cost=cost, stable=stable)


@app.post("/api/scalar/gain", response_model=models.ScalarGainResponse)
def scalar_gain(req: models.ScalarGainRequest):
    plant = ScalarPlant(a=req.a, T=req.T, r=req.r)
    k, j = optimal_gain(plant)
    interval = stability_interval(plant)
    upper = interval.upper if math.isfinite(interval.upper) else None
    return models.ScalarGainResponse(k_opt=k, j_opt=j,
                                     interval_lower=interval.lower,
                                     interval_upper=upper)


@app.post("/api/scalar/cost", response_model=models.ScalarCostResponse)
def scalar_cost(req: models.ScalarCostRequest):
    plant = ScalarPlant(a=req.a, T=req.T, r=req.r)
    cb = variance_integral(plant, req.k)
    return models.ScalarCostResponse(f_value=cb.f_value, j_value=cb.j_value,
                                     branch=cb.branch.value)
