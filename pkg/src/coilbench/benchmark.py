"""Uniform-field coil layout benchmark: design encoding, region sampling, objectives.

A design is 10 inner radii; decoding stacks 10 turns of fixed cross section
upward from the midplane and mirrors them below it, so the coil is always
symmetric.  Objective F1 is the worst-case deviation of the flux density from
a purely axial target over sampled points of the controlled region; objective
F2 is the sum of the radii, a mass surrogate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .field import (
    CoilLayout,
    EvalPoint,
    FieldSample,
    QuadratureSpec,
    TurnGeometry,
    coil_field_arrays,
    field_coil,
)

RADIUS_MIN = 0.005
RADIUS_MAX = 0.050
N_RADII = 10

# Fixed layout used for cross-validation runs and as the CLI default coil.
REFERENCE_RADII = (
    0.00808, 0.0149, 0.00674, 0.0167, 0.00545,
    0.0106, 0.0117, 0.0111, 0.01369, 0.00619,
)


class OutOfBounds(ValueError):
    """A design radius left the admissible range."""

    def __init__(self, index: int, value: float):
        self.index = index
        self.value = value
        super().__init__(
            f"radius {index} = {value} outside [{RADIUS_MIN}, {RADIUS_MAX}]"
        )


@dataclass(frozen=True)
class BenchmarkConfig:
    """Problem constants: conductor cross section, drive, target, controlled region."""

    turn_width: float = 0.001        # radial extent of one conductor, m
    turn_height: float = 0.0015      # axial extent of one conductor, m
    current_density: float = 2e6     # A/m^2
    b0_target: float = 0.002         # aimed axial flux density, T
    roi_half_width: float = 0.005    # radial extent of the controlled region, m
    roi_half_height: float = 0.005   # half of the axial extent, m
    roi_grid: tuple = (5, 5)         # (n_r, n_z) sample counts
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)

    def __post_init__(self):
        for name in ("turn_width", "turn_height", "b0_target",
                     "roi_half_width", "roi_half_height"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        object.__setattr__(self, "roi_grid", tuple(int(n) for n in self.roi_grid))
        if len(self.roi_grid) != 2 or min(self.roi_grid) < 2:
            raise ValueError("roi_grid must be two counts >= 2")

    @property
    def turn_current(self) -> float:
        """Total current of one conductor, ampere-turns of a uniform density."""
        return self.current_density * self.turn_width * self.turn_height


class ObjectivePair(NamedTuple):
    f1: float  # worst-case field deviation, T
    f2: float  # sum of radii, m


def check_design(x: Sequence[float]) -> np.ndarray:
    """Validate and return the 10 design radii as an array."""
    radii = np.asarray(x, dtype=float)
    if radii.shape != (N_RADII,):
        raise ValueError(f"design vector needs exactly {N_RADII} radii, got {radii.size}")
    for i, v in enumerate(radii):
        if not (RADIUS_MIN <= v <= RADIUS_MAX):
            raise OutOfBounds(i, float(v))
    return radii


def decode_design(x: Sequence[float], cfg: BenchmarkConfig) -> CoilLayout:
    """Decode radii into the symmetric 20-turn layout.

    Upper turn k (1-based) sits at z in [(k-1)*h, k*h]; the lower half mirrors
    it with the same radius and current, so the midplane field is purely axial.
    """
    radii = check_design(x)
    h = cfg.turn_height
    w = cfg.turn_width
    cur = cfg.turn_current
    upper = [
        TurnGeometry(float(r), float(r) + w, (k - 1) * h, k * h, cur)
        for k, r in enumerate(radii, start=1)
    ]
    lower = [
        TurnGeometry(float(r), float(r) + w, -k * h, -(k - 1) * h, cur)
        for k, r in enumerate(radii, start=1)
    ]
    return CoilLayout(turns=tuple(upper + lower))


def sample_roi(cfg: BenchmarkConfig) -> list:
    """Uniform grid over the controlled region, boundaries included."""
    n_r, n_z = cfg.roi_grid
    rs = np.linspace(0.0, cfg.roi_half_width, n_r)
    zs = np.linspace(-cfg.roi_half_height, cfg.roi_half_height, n_z)
    return [EvalPoint(r=float(r), z=float(z)) for r in rs for z in zs]


def deviation_norm(b_r: float, b_z: float, b0: float) -> float:
    """Euclidean distance of (Br, Bz) from the purely axial target (0, b0)."""
    return math.hypot(b_r, b_z - b0)


def objective_f1(layout: CoilLayout, points: Sequence[EvalPoint], cfg: BenchmarkConfig) -> float:
    """Worst-case deviation from the target field over the sampled points, tesla."""
    if not points:
        raise ValueError("need at least one sample point")
    r = np.array([p.r for p in points])
    z = np.array([p.z for p in points])
    br, bz = coil_field_arrays(layout, r, z, cfg.quad)
    return float(np.max(np.hypot(br, bz - cfg.b0_target)))


def objective_f2(x: Sequence[float]) -> float:
    """Mass surrogate: sum of the design radii, meters."""
    return float(np.sum(check_design(x)))


def evaluate(x: Sequence[float], cfg: BenchmarkConfig) -> ObjectivePair:
    """Both objectives of one design; deterministic for a fixed config."""
    layout = decode_design(x, cfg)
    return ObjectivePair(
        f1=objective_f1(layout, sample_roi(cfg), cfg),
        f2=objective_f2(x),
    )


def make_evaluator(cfg: BenchmarkConfig):
    """Closure mapping a design vector to (f1, f2) with the grid prebuilt.

    Produces exactly the same floats as evaluate(); used on the optimization
    hot path where rebuilding the sample grid per call would be wasted work.
    """
    points = sample_roi(cfg)
    r = np.array([p.r for p in points])
    z = np.array([p.z for p in points])

    def evaluator(x):
        layout = decode_design(x, cfg)
        br, bz = coil_field_arrays(layout, r, z, cfg.quad)
        f1 = float(np.max(np.hypot(br, bz - cfg.b0_target)))
        return (f1, objective_f2(x))

    return evaluator


def line_profile(
    layout: CoilLayout,
    r_fixed: float,
    z_min: float,
    z_max: float,
    n: int,
    quad: QuadratureSpec,
) -> list:
    """n equally spaced field samples along a vertical line at r_fixed."""
    if n < 2:
        raise ValueError("need n >= 2 samples")
    return [
        field_coil(layout, EvalPoint(r=r_fixed, z=float(z)), quad)
        for z in np.linspace(z_min, z_max, n)
    ]
