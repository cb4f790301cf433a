"""Pydantic request/response models for the HTTP API.

These mirror the core dataclasses; to_core()/from_core() convert between the
wire shape and the library types.
"""

from __future__ import annotations

from typing import List, Optional

from pydantic import BaseModel, Field

from ..benchmark import N_RADII, REFERENCE_RADII, BenchmarkConfig
from ..field import QuadratureSpec
from ..nsga2 import NsgaConfig
from ..runio import DESIGN_BOUNDS, RunRecord, SCHEMA_VERSION, TOOL_NAME


class QuadratureModel(BaseModel):
    nodes_per_subinterval: int = 32
    subintervals: int = 4

    def to_core(self) -> QuadratureSpec:
        return QuadratureSpec(
            nodes_per_subinterval=self.nodes_per_subinterval,
            subintervals=self.subintervals,
        )


class BenchmarkConfigModel(BaseModel):
    turn_width: float = 0.001
    turn_height: float = 0.0015
    current_density: float = 2e6
    b0_target: float = 0.002
    roi_half_width: float = 0.005
    roi_half_height: float = 0.005
    roi_grid_nr: int = 5
    roi_grid_nz: int = 5
    quad: QuadratureModel = Field(default_factory=QuadratureModel)

    def to_core(self) -> BenchmarkConfig:
        return BenchmarkConfig(
            turn_width=self.turn_width,
            turn_height=self.turn_height,
            current_density=self.current_density,
            b0_target=self.b0_target,
            roi_half_width=self.roi_half_width,
            roi_half_height=self.roi_half_height,
            roi_grid=(self.roi_grid_nr, self.roi_grid_nz),
            quad=self.quad.to_core(),
        )

    @classmethod
    def from_core(cls, cfg: BenchmarkConfig) -> "BenchmarkConfigModel":
        return cls(
            turn_width=cfg.turn_width,
            turn_height=cfg.turn_height,
            current_density=cfg.current_density,
            b0_target=cfg.b0_target,
            roi_half_width=cfg.roi_half_width,
            roi_half_height=cfg.roi_half_height,
            roi_grid_nr=cfg.roi_grid[0],
            roi_grid_nz=cfg.roi_grid[1],
            quad=QuadratureModel(
                nodes_per_subinterval=cfg.quad.nodes_per_subinterval,
                subintervals=cfg.quad.subintervals,
            ),
        )


class NsgaConfigModel(BaseModel):
    population: int = 100
    generations: int = 100
    crossover_prob: float = 0.9
    crossover_eta: float = 15.0
    mutation_prob: Optional[float] = None  # None -> 1/n_genes
    mutation_eta: float = 20.0
    seed: int = 42
    bounds: Optional[List[List[float]]] = None  # None -> benchmark design bounds

    def to_core(self) -> NsgaConfig:
        bounds = (
            DESIGN_BOUNDS
            if self.bounds is None
            else tuple((b[0], b[1]) for b in self.bounds)
        )
        mut = self.mutation_prob if self.mutation_prob is not None else 1.0 / len(bounds)
        return NsgaConfig(
            bounds=bounds,
            population=self.population,
            generations=self.generations,
            crossover_prob=self.crossover_prob,
            crossover_eta=self.crossover_eta,
            mutation_prob=mut,
            mutation_eta=self.mutation_eta,
            seed=self.seed,
        )

    @classmethod
    def from_core(cls, cfg: NsgaConfig) -> "NsgaConfigModel":
        return cls(
            population=cfg.population,
            generations=cfg.generations,
            crossover_prob=cfg.crossover_prob,
            crossover_eta=cfg.crossover_eta,
            mutation_prob=cfg.mutation_prob,
            mutation_eta=cfg.mutation_eta,
            seed=cfg.seed,
            bounds=[list(b) for b in cfg.bounds],
        )


class HealthResponse(BaseModel):
    status: str = "ok"
    tool: str = TOOL_NAME
    version: str


class FieldRequest(BaseModel):
    r: float = Field(ge=0.0)
    z: float
    radii: Optional[List[float]] = Field(default=None, min_length=N_RADII, max_length=N_RADII)
    config: BenchmarkConfigModel = Field(default_factory=BenchmarkConfigModel)

    def effective_radii(self) -> tuple:
        return tuple(self.radii) if self.radii is not None else REFERENCE_RADII


class FieldResponse(BaseModel):
    r: float
    z: float
    br_tesla: float
    bz_tesla: float


class ProfileRequest(BaseModel):
    radii: Optional[List[float]] = Field(default=None, min_length=N_RADII, max_length=N_RADII)
    r_line: float = Field(default=0.003, ge=0.0)
    n: int = Field(default=20, ge=2)
    config: BenchmarkConfigModel = Field(default_factory=BenchmarkConfigModel)

    def effective_radii(self) -> tuple:
        return tuple(self.radii) if self.radii is not None else REFERENCE_RADII


class ProfilePoint(BaseModel):
    r_m: float
    z_m: float
    br_tesla: float
    bz_tesla: float


class ProfileResponse(BaseModel):
    samples: List[ProfilePoint]


class ValidateRequest(BaseModel):
    samples: int = Field(default=20, ge=1)
    seed: int = 7
    tolerance: float = Field(default=1e-6, ge=0.0)
    config: BenchmarkConfigModel = Field(default_factory=BenchmarkConfigModel)


class ValidateCase(BaseModel):
    point_r: float
    point_z: float
    br_solver: float
    br_oracle: float
    bz_solver: float
    bz_oracle: float
    rel_deviation: float


class ValidateResponse(BaseModel):
    samples: int
    max_rel_deviation: float
    tolerance: float
    passed: bool
    cases: List[ValidateCase]


class OptimizeRequest(BaseModel):
    benchmark: BenchmarkConfigModel = Field(default_factory=BenchmarkConfigModel)
    nsga: NsgaConfigModel = Field(default_factory=NsgaConfigModel)
    seed: Optional[int] = None  # overrides nsga.seed when given


class HistoryRowModel(BaseModel):
    generation: int
    evaluations: int
    best_f1: float
    best_f2: float
    archive_size: int
    hypervolume: float


class ArchiveMemberModel(BaseModel):
    genes: List[float]
    objectives: List[float]


class RunRecordModel(BaseModel):
    schema_version: int = SCHEMA_VERSION
    tool_name: str = TOOL_NAME
    tool_version: str
    rng_algorithm: str
    started_at: Optional[str] = None
    finished_at: Optional[str] = None
    benchmark: BenchmarkConfigModel
    nsga: NsgaConfigModel
    history: List[HistoryRowModel]
    archive: List[ArchiveMemberModel]

    @classmethod
    def from_core(cls, record: RunRecord) -> "RunRecordModel":
        return cls(
            tool_version=record.tool_version,
            rng_algorithm=record.rng_algorithm,
            started_at=record.started_at,
            finished_at=record.finished_at,
            benchmark=BenchmarkConfigModel.from_core(record.benchmark),
            nsga=NsgaConfigModel.from_core(record.nsga),
            history=[HistoryRowModel(**row._asdict()) for row in record.history],
            archive=[
                ArchiveMemberModel(genes=list(g), objectives=list(o))
                for g, o in zip(record.archive_genes, record.archive_objectives)
            ],
        )

    def to_core(self) -> RunRecord:
        from ..nsga2 import HistoryRow

        return RunRecord(
            benchmark=self.benchmark.to_core(),
            nsga=self.nsga.to_core(),
            tool_version=self.tool_version,
            rng_algorithm=self.rng_algorithm,
            started_at=self.started_at,
            finished_at=self.finished_at,
            history=tuple(
                HistoryRow(
                    r.generation, r.evaluations, r.best_f1, r.best_f2,
                    r.archive_size, r.hypervolume,
                )
                for r in self.history
            ),
            archive_genes=tuple(tuple(m.genes) for m in self.archive),
            archive_objectives=tuple(tuple(m.objectives) for m in self.archive),
        )


class OptimizeResponse(BaseModel):
    record: RunRecordModel
    last_generation: List[ArchiveMemberModel]
