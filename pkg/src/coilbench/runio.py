"""Persistence and exchange formats: config files, result CSVs, run records.

Everything is diff-able text.  Floats are written with 17 significant digits
so every 64-bit value round-trips exactly, and writers are pure functions of
their inputs, so identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from . import __version__
from .benchmark import N_RADII, RADIUS_MAX, RADIUS_MIN, BenchmarkConfig
from .field import FieldSample, QuadratureSpec
from .nsga2 import RNG_ALGORITHM, HistoryRow, NsgaConfig, ParetoArchive

SCHEMA_VERSION = 1
TOOL_NAME = "coilbench"


class IoFailure(OSError):
    """Underlying file operation failed."""


class ParseFailure(ValueError):
    """A config line could not be parsed; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class UnknownKey(ParseFailure):
    """A config key is not part of the documented schema."""


class SchemaMismatch(ValueError):
    """A run record was written with an incompatible schema version."""


def format_float(x: float) -> str:
    """17 significant digits: lossless for every binary64 value."""
    return f"{x:.17g}"


# config keys -> (section, attribute, parser)
_CONFIG_KEYS = {
    "turn_width": ("benchmark", "turn_width", float),
    "turn_height": ("benchmark", "turn_height", float),
    "current_density": ("benchmark", "current_density", float),
    "b0_target": ("benchmark", "b0_target", float),
    "roi_half_width": ("benchmark", "roi_half_width", float),
    "roi_half_height": ("benchmark", "roi_half_height", float),
    "roi_grid_nr": ("benchmark", "roi_grid_nr", int),
    "roi_grid_nz": ("benchmark", "roi_grid_nz", int),
    "quad_nodes": ("benchmark", "quad_nodes", int),
    "quad_subintervals": ("benchmark", "quad_subintervals", int),
    "population": ("nsga", "population", int),
    "generations": ("nsga", "generations", int),
    "crossover_prob": ("nsga", "crossover_prob", float),
    "crossover_eta": ("nsga", "crossover_eta", float),
    "mutation_prob": ("nsga", "mutation_prob", float),
    "mutation_eta": ("nsga", "mutation_eta", float),
    "seed": ("nsga", "seed", int),
}

DESIGN_BOUNDS = tuple((RADIUS_MIN, RADIUS_MAX) for _ in range(N_RADII))


def default_nsga_config() -> NsgaConfig:
    return NsgaConfig(bounds=DESIGN_BOUNDS, mutation_prob=1.0 / N_RADII)


def read_config(path) -> Tuple[BenchmarkConfig, NsgaConfig]:
    """Parse a flat key=value file; missing keys take the documented defaults."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise IoFailure(f"cannot read config {path}: {exc}") from exc

    values = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParseFailure(lineno, f"expected key=value, got {line!r}")
        key, _, text = line.partition("=")
        key = key.strip()
        text = text.strip()
        if key not in _CONFIG_KEYS:
            raise UnknownKey(lineno, f"unknown key {key!r}")
        section, attr, parser = _CONFIG_KEYS[key]
        try:
            values[(section, attr)] = parser(text)
        except ValueError as exc:
            raise ParseFailure(lineno, f"bad value for {key}: {text!r}") from exc

    bench_kwargs = {
        attr: values[("benchmark", attr)]
        for (section, attr) in values
        if section == "benchmark" and not attr.startswith(("roi_grid", "quad"))
    }
    grid = (
        values.get(("benchmark", "roi_grid_nr"), 5),
        values.get(("benchmark", "roi_grid_nz"), 5),
    )
    quad = QuadratureSpec(
        nodes_per_subinterval=values.get(("benchmark", "quad_nodes"), 32),
        subintervals=values.get(("benchmark", "quad_subintervals"), 4),
    )
    benchmark = BenchmarkConfig(roi_grid=grid, quad=quad, **bench_kwargs)

    nsga_kwargs = {
        attr: values[("nsga", attr)] for (section, attr) in values if section == "nsga"
    }
    nsga_kwargs.setdefault("mutation_prob", 1.0 / N_RADII)
    nsga = NsgaConfig(bounds=DESIGN_BOUNDS, **nsga_kwargs)
    return benchmark, nsga


def write_pareto_csv(archive: ParetoArchive, path) -> None:
    """Archive members as CSV, ascending in f1; ties broken by f2 then genes."""
    members = archive.members
    n_genes = len(members[0].genes) if members else N_RADII
    header = "f1_tesla,f2_meters," + ",".join(f"r{i}" for i in range(1, n_genes + 1))
    rows = sorted(
        (
            (float(m.objectives[0]), float(m.objectives[1]), tuple(float(g) for g in m.genes))
            for m in members
        ),
    )
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(header + "\n")
            for f1, f2, genes in rows:
                fields = [format_float(f1), format_float(f2)]
                fields.extend(format_float(g) for g in genes)
                fh.write(",".join(fields) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_pareto_csv(path):
    """Inverse of write_pareto_csv; returns (objectives, genes) row tuples."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    rows = []
    for line in lines[1:]:
        parts = [float(tok) for tok in line.split(",")]
        rows.append(((parts[0], parts[1]), tuple(parts[2:])))
    return rows


def write_profile_csv(samples: Sequence[FieldSample], path) -> None:
    """Field samples along a line, in sample order."""
    if not samples:
        raise ValueError("need at least one sample")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("r_m,z_m,br_tesla,bz_tesla\n")
            for s in samples:
                fh.write(
                    ",".join(
                        format_float(v) for v in (s.point.r, s.point.z, s.b_r, s.b_z)
                    )
                    + "\n"
                )
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


@dataclass(frozen=True)
class RunRecord:
    """Everything needed to reproduce and post-process one optimization run."""

    benchmark: BenchmarkConfig
    nsga: NsgaConfig
    tool_version: str
    rng_algorithm: str
    history: tuple
    archive_genes: tuple
    archive_objectives: tuple
    started_at: Optional[str] = None
    finished_at: Optional[str] = None


def make_run_record(benchmark, nsga, history, archive, started_at=None, finished_at=None):
    members = archive.members
    return RunRecord(
        benchmark=benchmark,
        nsga=nsga,
        tool_version=__version__,
        rng_algorithm=RNG_ALGORITHM,
        history=tuple(HistoryRow(*row) for row in history),
        archive_genes=tuple(tuple(float(g) for g in m.genes) for m in members),
        archive_objectives=tuple(
            tuple(float(o) for o in m.objectives) for m in members
        ),
        started_at=started_at,
        finished_at=finished_at,
    )


def _benchmark_to_dict(cfg: BenchmarkConfig) -> dict:
    return {
        "turn_width": cfg.turn_width,
        "turn_height": cfg.turn_height,
        "current_density": cfg.current_density,
        "b0_target": cfg.b0_target,
        "roi_half_width": cfg.roi_half_width,
        "roi_half_height": cfg.roi_half_height,
        "roi_grid": list(cfg.roi_grid),
        "quad": {
            "nodes_per_subinterval": cfg.quad.nodes_per_subinterval,
            "subintervals": cfg.quad.subintervals,
        },
    }


def _nsga_to_dict(cfg: NsgaConfig) -> dict:
    return {
        "bounds": [list(b) for b in cfg.bounds],
        "population": cfg.population,
        "generations": cfg.generations,
        "crossover_prob": cfg.crossover_prob,
        "crossover_eta": cfg.crossover_eta,
        "mutation_prob": cfg.mutation_prob,
        "mutation_eta": cfg.mutation_eta,
        "seed": cfg.seed,
    }


def write_run_record(record: RunRecord, path) -> None:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": TOOL_NAME, "version": record.tool_version},
        "rng_algorithm": record.rng_algorithm,
        "started_at": record.started_at,
        "finished_at": record.finished_at,
        "benchmark": _benchmark_to_dict(record.benchmark),
        "nsga": _nsga_to_dict(record.nsga),
        "history": [list(row) for row in record.history],
        "archive": [
            {"genes": list(g), "objectives": list(o)}
            for g, o in zip(record.archive_genes, record.archive_objectives)
        ],
    }
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_run_record(path) -> RunRecord:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaMismatch(
            f"expected schema_version {SCHEMA_VERSION}, got {doc.get('schema_version')}"
        )
    b = doc["benchmark"]
    benchmark = BenchmarkConfig(
        turn_width=b["turn_width"],
        turn_height=b["turn_height"],
        current_density=b["current_density"],
        b0_target=b["b0_target"],
        roi_half_width=b["roi_half_width"],
        roi_half_height=b["roi_half_height"],
        roi_grid=tuple(b["roi_grid"]),
        quad=QuadratureSpec(
            nodes_per_subinterval=b["quad"]["nodes_per_subinterval"],
            subintervals=b["quad"]["subintervals"],
        ),
    )
    n = doc["nsga"]
    nsga = NsgaConfig(
        bounds=tuple(tuple(x) for x in n["bounds"]),
        population=n["population"],
        generations=n["generations"],
        crossover_prob=n["crossover_prob"],
        crossover_eta=n["crossover_eta"],
        mutation_prob=n["mutation_prob"],
        mutation_eta=n["mutation_eta"],
        seed=n["seed"],
    )
    return RunRecord(
        benchmark=benchmark,
        nsga=nsga,
        tool_version=doc["tool"]["version"],
        rng_algorithm=doc["rng_algorithm"],
        history=tuple(
            HistoryRow(int(r[0]), int(r[1]), float(r[2]), float(r[3]), int(r[4]), float(r[5]))
            for r in doc["history"]
        ),
        archive_genes=tuple(tuple(float(g) for g in m["genes"]) for m in doc["archive"]),
        archive_objectives=tuple(
            tuple(float(o) for o in m["objectives"]) for m in doc["archive"]
        ),
        started_at=doc["started_at"],
        finished_at=doc["finished_at"],
    )
