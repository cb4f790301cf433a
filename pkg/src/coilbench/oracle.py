"""Brute-force flux-density references for validating the semi-analytical solver.

The raw volume integrals for Br and Bz are evaluated as tensor-product
Gauss-Legendre triple integrals over (r, z, phi) with doubling refinement,
yielding a convergence certificate instead of trusting a fixed rule.  Also
provides the textbook ideal-loop field and an on-axis reduction.  This module
is a test instrument: correctness over speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .field import MU_0, EvalPoint, TurnGeometry, field_prefactor

# Keep per-chunk integrand arrays below ~4M doubles at high refinement levels.
_CHUNK_ELEMENTS = 4_000_000


class NoConvergence(RuntimeError):
    """Doubling refinement hit its limit before successive estimates agreed."""


class AxisPoint(ValueError):
    """The off-axis integrand is used at r = 0 where its 1/r prefactor fails."""


@dataclass(frozen=True)
class OracleSpec:
    """Initial tensor-rule sizes and how many doublings are allowed."""

    nodes_r: int = 16
    nodes_z: int = 16
    nodes_phi: int = 64
    refinement_limit: int = 5

    def __post_init__(self):
        if min(self.nodes_r, self.nodes_z, self.nodes_phi) < 2:
            raise ValueError("all node counts must be >= 2")
        if self.refinement_limit < 1:
            raise ValueError("refinement_limit must be >= 1")


DEFAULT_ORACLE = OracleSpec()


def loop_field_onaxis(a: float, current: float, z: float) -> float:
    """On-axis Bz of an ideal filament loop of radius a at axial distance z."""
    if a <= 0.0:
        raise ValueError("loop radius must be positive")
    return MU_0 * current * a * a / (2.0 * (a * a + z * z) ** 1.5)


def _gauss(a: float, b: float, n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


def _require_exterior(turn: TurnGeometry, p: EvalPoint):
    inside_r = turn.r_inner <= p.r <= turn.r_outer
    inside_z = turn.z_lower <= p.z <= turn.z_upper
    if inside_r and inside_z:
        raise ValueError(
            "oracle requires the evaluation point strictly outside the conductor"
        )


def _triple_estimate(turn, p, nr, nz, nphi, component):
    """One tensor-rule estimate of the raw triple integral for Br or Bz."""
    r, wr = _gauss(turn.r_inner, turn.r_outer, nr)
    z, wz = _gauss(turn.z_lower, turn.z_upper, nz)
    phi, wp = _gauss(0.0, 2.0 * math.pi, nphi)

    rz_w = wr[:, None] * wz[None, :]
    rg = r[:, None]
    dz = p.z - z[None, :]
    dz2 = dz * dz

    chunk = max(1, _CHUNK_ELEMENTS // (nr * nz))
    total = 0.0
    for start in range(0, nphi, chunk):
        cosp = np.cos(phi[start : start + chunk])[:, None, None]
        l2 = rg * rg + p.r * p.r - 2.0 * rg * p.r * cosp + dz2
        inv_l3 = l2 ** -1.5
        if component == "br":
            integrand = dz * cosp * inv_l3
        else:
            integrand = (rg * (rg - p.r * cosp) + dz2) * cosp * inv_l3
        total += float(np.dot(wp[start : start + chunk], integrand.reshape(len(cosp), -1) @ rz_w.ravel()))
    return total


def _refine(turn, p, spec, target_rel, component, scale):
    """Double all node counts until two successive estimates agree."""
    nr, nz, nphi = spec.nodes_r, spec.nodes_z, spec.nodes_phi
    prev = None
    for _ in range(spec.refinement_limit + 1):
        est = scale * _triple_estimate(turn, p, nr, nz, nphi, component)
        if prev is not None and abs(est - prev) <= max(target_rel * abs(est), 1e-15):
            return est
        prev = est
        nr, nz, nphi = 2 * nr, 2 * nz, 2 * nphi
    raise NoConvergence(
        f"{component} oracle did not converge to {target_rel:g} within "
        f"{spec.refinement_limit} doublings at point ({p.r}, {p.z})"
    )


def oracle_br_turn(
    turn: TurnGeometry,
    p: EvalPoint,
    spec: OracleSpec = DEFAULT_ORACLE,
    target_rel: float = 1e-9,
) -> float:
    """Br from the raw triple integral, refined to a stated relative agreement."""
    _require_exterior(turn, p)
    if p.r == 0.0:
        # the integrand is proportional to cos(phi); its azimuthal integral is
        # exactly zero, while the tensor sum would only reach roundoff scale
        return 0.0
    return _refine(turn, p, spec, target_rel, "br", field_prefactor(turn))


def oracle_bz_turn(
    turn: TurnGeometry,
    p: EvalPoint,
    spec: OracleSpec = DEFAULT_ORACLE,
    target_rel: float = 1e-9,
) -> float:
    """Bz from the raw triple integral; use oracle_bz_axis for r = 0."""
    if p.r == 0.0:
        raise AxisPoint("Bz integrand carries a 1/r prefactor; use oracle_bz_axis")
    _require_exterior(turn, p)
    return _refine(turn, p, spec, target_rel, "bz", field_prefactor(turn) / p.r)


def _axis_estimate(turn, z_eval, nr, nz):
    r, wr = _gauss(turn.r_inner, turn.r_outer, nr)
    z, wz = _gauss(turn.z_lower, turn.z_upper, nz)
    u = z_eval - z[None, :]
    kernel = r[:, None] / (r[:, None] ** 2 + u * u) ** 1.5
    return float(wr @ kernel @ wz)


def oracle_bz_axis(
    turn: TurnGeometry,
    z: float,
    spec: OracleSpec = DEFAULT_ORACLE,
    target_rel: float = 1e-9,
) -> float:
    """On-axis Bz: 2-D integral of the loop-on-axis kernel over the cross section.

    The 1/r density cancels one radius factor of the loop kernel, leaving
    2*pi*C * integral of r / (r^2 + (Z-z)^2)^(3/2).
    """
    if not math.isfinite(z):
        raise ValueError("z must be finite")
    scale = 2.0 * math.pi * field_prefactor(turn)
    nr, nz = spec.nodes_r, spec.nodes_z
    prev = None
    for _ in range(spec.refinement_limit + 1):
        est = scale * _axis_estimate(turn, z, nr, nz)
        if prev is not None and abs(est - prev) <= max(target_rel * abs(est), 1e-15):
            return est
        prev = est
        nr, nz = 2 * nr, 2 * nz
    raise NoConvergence(
        f"axis oracle did not converge to {target_rel:g} within "
        f"{spec.refinement_limit} doublings at z = {z}"
    )


def oracle_field_coil(
    layout,
    p: EvalPoint,
    spec: OracleSpec = DEFAULT_ORACLE,
    target_rel: float = 1e-9,
):
    """Superposed (Br, Bz) of a whole layout from the per-turn oracles."""
    br = 0.0
    bz = 0.0
    for turn in layout.turns:
        br += oracle_br_turn(turn, p, spec, target_rel)
        if p.r == 0.0:
            bz += oracle_bz_axis(turn, p.z, spec, target_rel)
        else:
            bz += oracle_bz_turn(turn, p, spec, target_rel)
    return br, bz


def sample_validation_cases(n: int, seed: int, clearance: float = 0.001):
    """Randomized (turn, exterior point) pairs for solver-vs-oracle sweeps.

    Points keep at least max(clearance, r_outer/8) distance from the conductor
    rectangle: the azimuthal kernel peak sharpens with turn radius, and that
    envelope is where the default quadrature resolves it to well below 1e-9
    (worth a larger rule if a caller ever needs to go closer).
    """
    if n < 1:
        raise ValueError("need n >= 1 cases")
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(n):
        r_in = rng.uniform(0.004, 0.04)
        width = rng.uniform(0.0005, 0.002)
        height = rng.uniform(0.0005, 0.003)
        z_lo = rng.uniform(-0.01, 0.01)
        current = rng.uniform(0.5, 5.0) * rng.choice((-1.0, 1.0))
        turn = TurnGeometry(r_in, r_in + width, z_lo, z_lo + height, current)
        gap = max(clearance, turn.r_outer / 8.0)

        region = rng.integers(0, 3)
        if region == 0:  # inside the bore
            r = rng.uniform(0.0, r_in - gap)
            z = rng.uniform(z_lo - 4 * gap, z_lo + height + 4 * gap)
        elif region == 1:  # radially outside
            r = rng.uniform(turn.r_outer + gap, turn.r_outer + 5 * gap)
            z = rng.uniform(z_lo - 4 * gap, z_lo + height + 4 * gap)
        else:  # above or below, any radius up to the conductor's
            r = rng.uniform(0.0, turn.r_outer)
            off = rng.uniform(gap, 6 * gap)
            z = z_lo - off if rng.random() < 0.5 else z_lo + height + off
        cases.append((turn, EvalPoint(r=float(r), z=float(z))))
    return cases
