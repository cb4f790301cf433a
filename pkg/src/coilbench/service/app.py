"""FastAPI service wrapping the core package.

Endpoint handlers are plain synchronous functions, so the CLI can call them
in-process through the same request/response models that HTTP clients use.
Domain errors are mapped to 400 responses by exception handlers.
"""

from __future__ import annotations

import os
import sys
from dataclasses import replace
from datetime import datetime, timezone

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import __version__
from ..benchmark import (
    OutOfBounds,
    decode_design,
    line_profile,
    make_evaluator,
)
from ..field import CornerSingularity, EvalPoint, br_turn, bz_turn, field_coil
from ..nsga2 import EvaluatorFailure, fast_nondominated_sort, nsga2_run
from ..oracle import (
    oracle_br_turn,
    oracle_bz_axis,
    oracle_bz_turn,
    sample_validation_cases,
)
from ..runio import make_run_record
from .schemas import (
    ArchiveMemberModel,
    FieldRequest,
    FieldResponse,
    HealthResponse,
    OptimizeRequest,
    OptimizeResponse,
    ProfilePoint,
    ProfileRequest,
    ProfileResponse,
    RunRecordModel,
    ValidateCase,
    ValidateRequest,
    ValidateResponse,
)

app = FastAPI(
    title="coilbench",
    version=__version__,
    description=(
        "Field evaluation, solver-vs-oracle validation, line profiles and "
        "NSGA-II layout optimization for the uniform-field coil benchmark."
    ),
)


@app.exception_handler(OutOfBounds)
@app.exception_handler(CornerSingularity)
@app.exception_handler(ValueError)
async def _domain_error(request, exc):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.exception_handler(EvaluatorFailure)
async def _evaluator_error(request, exc):
    return JSONResponse(status_code=500, content={"detail": str(exc)})


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(version=__version__)


@app.post("/field", response_model=FieldResponse)
def compute_field(req: FieldRequest) -> FieldResponse:
    cfg = req.config.to_core()
    layout = decode_design(req.effective_radii(), cfg)
    sample = field_coil(layout, EvalPoint(r=req.r, z=req.z), cfg.quad)
    return FieldResponse(r=req.r, z=req.z, br_tesla=sample.b_r, bz_tesla=sample.b_z)


@app.post("/profile", response_model=ProfileResponse)
def compute_profile(req: ProfileRequest) -> ProfileResponse:
    cfg = req.config.to_core()
    layout = decode_design(req.effective_radii(), cfg)
    samples = line_profile(
        layout, req.r_line, -cfg.roi_half_height, cfg.roi_half_height, req.n, cfg.quad
    )
    return ProfileResponse(
        samples=[
            ProfilePoint(r_m=s.point.r, z_m=s.point.z, br_tesla=s.b_r, bz_tesla=s.b_z)
            for s in samples
        ]
    )


@app.post("/validate", response_model=ValidateResponse)
def run_validation(req: ValidateRequest) -> ValidateResponse:
    cfg = req.config.to_core()
    cases = []
    worst = 0.0
    for turn, point in sample_validation_cases(req.samples, req.seed):
        br_s = float(br_turn(turn, point, cfg.quad))
        bz_s = float(bz_turn(turn, point, cfg.quad))
        br_o = float(oracle_br_turn(turn, point))
        if point.r == 0.0:
            bz_o = float(oracle_bz_axis(turn, point.z))
        else:
            bz_o = float(oracle_bz_turn(turn, point))
        rel = max(
            abs(br_s - br_o) / max(abs(br_o), 1e-12),
            abs(bz_s - bz_o) / max(abs(bz_o), 1e-12),
        )
        worst = max(worst, rel)
        cases.append(
            ValidateCase(
                point_r=point.r,
                point_z=point.z,
                br_solver=br_s,
                br_oracle=br_o,
                bz_solver=bz_s,
                bz_oracle=bz_o,
                rel_deviation=rel,
            )
        )
    return ValidateResponse(
        samples=req.samples,
        max_rel_deviation=worst,
        tolerance=req.tolerance,
        passed=worst < req.tolerance,
        cases=cases,
    )


def _deterministic_timestamp():
    """ISO timestamp from SOURCE_DATE_EPOCH, or None.

    Run records must be byte-identical for identical config and seed, so wall
    clock never enters them; the standard reproducible-build variable is the
    opt-in way to stamp them.
    """
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is None:
        return None
    return datetime.fromtimestamp(int(epoch), tz=timezone.utc).isoformat()


@app.post("/optimize", response_model=OptimizeResponse)
def run_optimization(req: OptimizeRequest) -> OptimizeResponse:
    bench = req.benchmark.to_core()
    nsga = req.nsga.to_core()
    if req.seed is not None:
        nsga = replace(nsga, seed=req.seed)

    def progress(generation, best_f1, best_f2, archive_size, hypervolume):
        print(
            f"gen {generation:4d}  best_f1={best_f1:.6e}  best_f2={best_f2:.6e}  "
            f"archive={archive_size}  hv={hypervolume:.6e}",
            file=sys.stderr,
        )

    stamp = _deterministic_timestamp()
    population, archive, history = nsga2_run(nsga, make_evaluator(bench), progress)
    record = make_run_record(
        bench, nsga, history, archive, started_at=stamp, finished_at=stamp
    )
    front = fast_nondominated_sort(population)[0]
    last_generation = [
        ArchiveMemberModel(
            genes=[float(g) for g in ind.genes],
            objectives=[float(o) for o in ind.objectives],
        )
        for ind in front
    ]
    return OptimizeResponse(
        record=RunRecordModel.from_core(record), last_generation=last_generation
    )
