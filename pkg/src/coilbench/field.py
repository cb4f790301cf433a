"""Semi-analytical magnetostatics for coaxial circular turns of rectangular cross section.

A single turn carries azimuthal current with a 1/r density profile across its
cross section.  Integrating the volume integrals for Br and Bz in closed form
over the cross section leaves one azimuthal integral of a logarithmic kernel
per conductor corner; those integrals are evaluated with composite
Gauss-Legendre quadrature.  Fields of several turns superpose linearly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

MU_0 = 4.0e-7 * math.pi  # T*m/A, exact by convention here

# Smallest admissible logarithm argument (meters).  Below this the evaluation
# point is effectively touching a conductor corner and the kernel blows up.
EPS_LOG = 1e-14


class CornerSingularity(ValueError):
    """Evaluation point touches a conductor corner (log kernel diverges)."""


@dataclass(frozen=True)
class TurnGeometry:
    """One massive circular turn: radial extent, axial extent, total current."""

    r_inner: float
    r_outer: float
    z_lower: float
    z_upper: float
    current: float

    def __post_init__(self):
        if not (0.0 < self.r_inner < self.r_outer):
            raise ValueError(
                f"need 0 < r_inner < r_outer, got [{self.r_inner}, {self.r_outer}]"
            )
        if not self.z_lower < self.z_upper:
            raise ValueError(
                f"need z_lower < z_upper, got [{self.z_lower}, {self.z_upper}]"
            )
        if not math.isfinite(self.current):
            raise ValueError("current must be finite")


@dataclass(frozen=True)
class EvalPoint:
    """Field evaluation point in the (r, z) half plane."""

    r: float
    z: float

    def __post_init__(self):
        if not (math.isfinite(self.r) and math.isfinite(self.z)):
            raise ValueError("evaluation point must be finite")
        if self.r < 0.0:
            raise ValueError(f"radial coordinate must be >= 0, got {self.r}")


@dataclass(frozen=True)
class FieldSample:
    """Computed flux density components at one point, in tesla."""

    point: EvalPoint
    b_r: float
    b_z: float


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite Gauss-Legendre rule on [0, 2*pi) for the azimuthal integrals."""

    nodes_per_subinterval: int = 32
    subintervals: int = 4

    def __post_init__(self):
        if self.nodes_per_subinterval < 2:
            raise ValueError("nodes_per_subinterval must be >= 2")
        if self.subintervals < 1:
            raise ValueError("subintervals must be >= 1")


DEFAULT_QUADRATURE = QuadratureSpec()


@dataclass(frozen=True)
class CoilLayout:
    """Ordered collection of turns whose fields superpose."""

    turns: tuple

    def __post_init__(self):
        object.__setattr__(self, "turns", tuple(self.turns))
        if not self.turns:
            raise ValueError("layout needs at least one turn")
        for t in self.turns:
            if not isinstance(t, TurnGeometry):
                raise TypeError(f"expected TurnGeometry, got {type(t).__name__}")


@lru_cache(maxsize=32)
def _phi_rule(nodes: int, subintervals: int):
    """Nodes/weights of the composite rule, plus cached cos(phi).  Read-only."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(0.0, 2.0 * math.pi, subintervals + 1)
    phi = np.concatenate(
        [0.5 * (b - a) * x + 0.5 * (a + b) for a, b in zip(edges[:-1], edges[1:])]
    )
    wgt = np.concatenate([0.5 * (b - a) * w for a, b in zip(edges[:-1], edges[1:])])
    cos = np.cos(phi)
    for arr in (phi, wgt, cos):
        arr.setflags(write=False)
    return phi, wgt, cos


def field_prefactor(turn: TurnGeometry) -> float:
    """Common prefactor of both field components.

    mu0*I / (4*pi*(Z2-Z1)*ln(R2/R1)); linear in the current, singular for a
    degenerate cross section (which TurnGeometry already rejects).
    """
    return MU_0 * turn.current / (
        4.0 * math.pi * (turn.z_upper - turn.z_lower) * math.log(turn.r_outer / turn.r_inner)
    )


def distance_kernel(r_a: float, r_eval: float, dz: float, phi) -> float:
    """Distance from the field point to a corner ring point at azimuth phi.

    sqrt(r_a^2 + r_eval^2 - 2*r_a*r_eval*cos(phi) + dz^2); accepts arrays.
    """
    return np.sqrt(
        r_a * r_a + r_eval * r_eval - 2.0 * r_a * r_eval * np.cos(phi) + dz * dz
    )


def _radial_log_args(r_a, r_eval, dz, cos, sin2, d):
    """ln-kernel argument r_a - r_eval*cos(phi) + d, rewritten to avoid
    cancellation when the linear part is negative."""
    t = r_a - r_eval * cos
    args = t + d
    # for t < 0:  t + d = (r_eval^2 sin^2 + dz^2) / (d - t), exact algebra
    neg = t < 0.0
    if np.any(neg):
        np.divide(r_eval * r_eval * sin2 + dz * dz, d - t, out=args, where=neg)
    return args


def _axial_log_args(r_a, r_eval, dz, cos, d):
    """ln-kernel argument dz + d with the same stable rewrite for dz < 0."""
    if np.ndim(dz) == 0 and dz >= 0.0:
        return dz + d
    rho2 = r_a * r_a + r_eval * r_eval - 2.0 * r_a * r_eval * cos
    # discarded lanes of the rewrite may hit 0/0; the select drops them
    with np.errstate(divide="ignore", invalid="ignore"):
        alt = rho2 / (d - dz)
    return np.where(dz < 0.0, alt, dz + d)


def _check_args(args, context: str):
    if not np.all(args > EPS_LOG):
        raise CornerSingularity(
            f"{context}: log argument <= {EPS_LOG} at a quadrature node "
            "(evaluation point touches a conductor corner)"
        )


def radial_log_integral(
    r_a: float, r_eval: float, dz_signed: float, quad: QuadratureSpec = DEFAULT_QUADRATURE
) -> float:
    """Azimuthal integral of ln[r_a - r_eval*cos(phi) + d]*cos(phi).

    One corner's contribution to Br.  The axial offset enters only squared,
    so its sign is immaterial here.  Exactly zero on the axis, where the
    integrand reduces to a constant times cos(phi).
    """
    if r_eval == 0.0:
        return 0.0
    phi, w, cos = _phi_rule(quad.nodes_per_subinterval, quad.subintervals)
    d = distance_kernel(r_a, r_eval, dz_signed, phi)
    args = _radial_log_args(r_a, r_eval, dz_signed, cos, np.sin(phi) ** 2, d)
    _check_args(args, "radial_log_integral")
    return float(np.dot(w, np.log(args) * cos))


def axial_log_integral(
    r_a: float, r_eval: float, z_corner_minus_z: float, quad: QuadratureSpec = DEFAULT_QUADRATURE
) -> float:
    """Minus the azimuthal integral of ln[(z_corner - z) + d].

    One corner's contribution to Bz; the axial offset keeps its sign in the
    logarithm.  Flipping the sign convention of all four corner offsets leaves
    the assembled Bz unchanged, which the oracle tests pin down.
    """
    phi, w, cos = _phi_rule(quad.nodes_per_subinterval, quad.subintervals)
    d = distance_kernel(r_a, r_eval, z_corner_minus_z, phi)
    args = _axial_log_args(r_a, r_eval, z_corner_minus_z, cos, d)
    _check_args(args, "axial_log_integral")
    return -float(np.dot(w, np.log(args)))


def br_turn(turn: TurnGeometry, p: EvalPoint, quad: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Radial flux density of one turn, tesla.

    Four-corner combination of the radial log integrals, scaled by the turn
    prefactor.  Antisymmetric about the turn midplane; identically zero on
    the axis.
    """
    c = field_prefactor(turn)
    g = radial_log_integral
    return c * (
        g(turn.r_outer, p.r, turn.z_upper - p.z, quad)
        - g(turn.r_outer, p.r, turn.z_lower - p.z, quad)
        - g(turn.r_inner, p.r, turn.z_upper - p.z, quad)
        + g(turn.r_inner, p.r, turn.z_lower - p.z, quad)
    )


def bz_turn(turn: TurnGeometry, p: EvalPoint, quad: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Axial flux density of one turn, tesla.  Well defined on the axis."""
    c = field_prefactor(turn)
    h = axial_log_integral
    return c * (
        h(turn.r_outer, p.r, turn.z_upper - p.z, quad)
        - h(turn.r_outer, p.r, turn.z_lower - p.z, quad)
        - h(turn.r_inner, p.r, turn.z_upper - p.z, quad)
        + h(turn.r_inner, p.r, turn.z_lower - p.z, quad)
    )


def field_coil(layout: CoilLayout, p: EvalPoint, quad: QuadratureSpec = DEFAULT_QUADRATURE) -> FieldSample:
    """Superposed field of all turns at one point."""
    br = 0.0
    bz = 0.0
    for i, turn in enumerate(layout.turns):
        try:
            br += br_turn(turn, p, quad)
            bz += bz_turn(turn, p, quad)
        except CornerSingularity as exc:
            raise CornerSingularity(f"turn {i}: {exc}") from exc
    return FieldSample(point=p, b_r=br, b_z=bz)


def coil_field_arrays(
    layout: CoilLayout,
    r_eval: Sequence[float],
    z_eval: Sequence[float],
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
):
    """Vectorized superposed field at many points; returns (br, bz) arrays.

    Same formulas as field_coil, broadcast over (turn, point, node) so that a
    whole coil/grid combination is one numpy pass.  This is the hot path for
    objective evaluation; field_coil remains the scalar reference.
    """
    r = np.asarray(r_eval, dtype=float)
    z = np.asarray(z_eval, dtype=float)
    if r.shape != z.shape or r.ndim != 1:
        raise ValueError("r_eval and z_eval must be 1-D arrays of equal length")
    if np.any(r < 0.0):
        raise ValueError("radial coordinates must be >= 0")

    phi, w, cos = _phi_rule(quad.nodes_per_subinterval, quad.subintervals)
    sin2 = np.sin(phi) ** 2

    turns = layout.turns
    r_in = np.array([t.r_inner for t in turns])[:, None, None]
    r_out = np.array([t.r_outer for t in turns])[:, None, None]
    z_lo = np.array([t.z_lower for t in turns])[:, None, None]
    z_hi = np.array([t.z_upper for t in turns])[:, None, None]
    c = np.array([field_prefactor(t) for t in turns])

    rp = r[None, :, None]
    zp = z[None, :, None]
    cosn = cos[None, None, :]
    sin2n = sin2[None, None, :]

    g_sum = np.zeros((len(turns), r.size))
    h_sum = np.zeros((len(turns), r.size))
    def check(args):
        bad = args <= EPS_LOG
        if np.any(bad):
            t_idx = int(np.argwhere(np.any(bad, axis=(1, 2)))[0, 0])
            raise CornerSingularity(
                f"turn {t_idx}: log argument <= {EPS_LOG} "
                "(evaluation point touches a conductor corner)"
            )
        return args

    for r_c, dz, sign in (
        (r_out, z_hi - zp, 1.0),
        (r_out, z_lo - zp, -1.0),
        (r_in, z_hi - zp, -1.0),
        (r_in, z_lo - zp, 1.0),
    ):
        d = np.sqrt(r_c * r_c + rp * rp - 2.0 * r_c * rp * cosn + dz * dz)
        g_args = check(_radial_log_args(r_c, rp, dz, cosn, sin2n, d))
        h_args = check(_axial_log_args(r_c, rp, dz, cosn, d))
        g_sum += sign * (np.log(g_args) * cosn) @ w
        h_sum -= sign * np.log(h_args) @ w

    br = c @ np.where(r == 0.0, 0.0, g_sum)
    bz = c @ h_sum
    return br, bz
