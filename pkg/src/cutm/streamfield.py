"""Laplace stream-function solve on a single floor.

Skyroads are streamlines of an ideal-flow stream function psi. On each floor
psi is harmonic; the external boundary carries a linear ramp between psi_min
and psi_max across the floor's normal direction, and each keep-out zone is
held at the constant level psi_o sampled from that ramp at the zone's center.
Level sets of the solved field then wrap the keep-out zones and run along the
floor's nominal direction everywhere else.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateBoundaryError,
    GeometryError,
    NonConvergenceError,
    ObstacleNotOnFloorError,
    ValidationError,
)
from .geometry import polygon_area_centroid
from .landscape import FloorSlice, ObstaclePrism

log = logging.getLogger(__name__)

RESIDUAL_CHECK_EVERY = 20


@dataclass
class SolverConfig:
    """Successive over-relaxation parameters for the grid Laplace solve."""

    tolerance: float = 1e-6
    max_iterations: int = 100_000
    relaxation_omega: float = 1.8

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValidationError("solver.tolerance must be positive")
        if self.max_iterations <= 0:
            raise ValidationError("solver.max_iterations must be positive")
        if not 0 < self.relaxation_omega < 2:
            raise ValidationError("solver.relaxation_omega must lie in (0, 2)")


@dataclass
class BoundaryValues:
    """Dirichlet assignment on the external boundary ring."""

    mask: np.ndarray  # (n_x, n_y) bool, true on the ring
    values: np.ndarray  # (n_x, n_y), meaningful where mask


@dataclass
class StreamField:
    """Converged stream-function grid for one floor."""

    floor_index: int
    psi: np.ndarray  # (n_x, n_y)
    dirichlet_mask: np.ndarray  # (n_x, n_y) bool
    obstacle_levels: dict[str, float]
    residual: float
    iterations: int
    tolerance: float
    psi_min: float
    psi_max: float
    keepout_mask: np.ndarray = field(repr=False, default=None)

    @property
    def converged(self) -> bool:
        return self.residual <= self.tolerance


def _ramp_fraction(floor: FloorSlice, point: np.ndarray, anchor: np.ndarray, far: np.ndarray) -> float:
    denom = float((far - anchor) @ floor.normal_dir)
    if denom == 0:
        raise DegenerateBoundaryError(
            f"floor {floor.floor_index}: boundary anchors coincide along the normal direction"
        )
    return float((np.asarray(point) - anchor) @ floor.normal_dir) / denom


def boundary_value_at(floor: FloorSlice, point: np.ndarray, anchor: np.ndarray, far: np.ndarray) -> float:
    frac = _ramp_fraction(floor, point, anchor, far)
    return floor.psi_min + frac * (floor.psi_max - floor.psi_min)


def external_boundary_values(floor: FloorSlice) -> BoundaryValues:
    """Assign stream values on the floor's outer boundary ring.

    The two edges parallel to the nominal direction are held at psi_min and
    psi_max; the entry and exit edges ramp linearly between them, so the
    values are continuous at all four corners.
    """
    gx, gy = floor.node_coords()
    mask = np.zeros((floor.n_x, floor.n_y), dtype=bool)
    mask[0, :] = mask[-1, :] = True
    mask[:, 0] = mask[:, -1] = True
    values = np.full((floor.n_x, floor.n_y), np.nan)

    n1, n2 = floor.nominal_dir, floor.normal_dir
    s1 = gx * n1[0] + gy * n1[1]
    s2 = gx * n2[0] + gy * n2[1]
    s1_lo, s1_hi = s1.min(), s1.max()
    s2_lo, s2_hi = s2.min(), s2.max()

    # constant edges first, then the ramped entry/exit edges (corners agree)
    tol = 1e-9
    values[mask & (s2 <= s2_lo + tol)] = floor.psi_min
    values[mask & (s2 >= s2_hi - tol)] = floor.psi_max

    entry = mask & (s1 <= s1_lo + tol)
    exit_ = mask & (s1 >= s1_hi - tol)
    for edge_mask, anchor, far in ((entry, floor.corner_a, floor.corner_b), (exit_, floor.corner_c, floor.corner_d)):
        idx = np.argwhere(edge_mask)
        for ix, iy in idx:
            values[ix, iy] = boundary_value_at(floor, np.array([gx[ix, iy], gy[ix, iy]]), anchor, far)

    if np.isnan(values[mask]).any():
        raise GeometryError(f"floor {floor.floor_index}: boundary ring not fully classified")
    return BoundaryValues(mask=mask, values=values)


def obstacle_level(floor: FloorSlice, obstacle: ObstaclePrism | str, bvals: BoundaryValues | None = None) -> float:
    """Constant stream value for a keep-out zone on this floor.

    The value is the entry-edge ramp evaluated where the line through the
    zone's centroid, parallel to the nominal direction, meets that edge. The
    exit edge must give the same value; a mismatch means the boundary frame
    is inconsistent.
    """
    if isinstance(obstacle, str):
        matches = [ob for ob in floor.obstacles if ob.id == obstacle]
        if not matches:
            raise ObstacleNotOnFloorError(
                f"obstacle '{obstacle}' does not intersect floor {floor.floor_index}"
            )
        obstacle = matches[0]
    elif obstacle not in floor.obstacles and obstacle.id not in {o.id for o in floor.obstacles}:
        raise ObstacleNotOnFloorError(
            f"obstacle '{obstacle.id}' does not intersect floor {floor.floor_index}"
        )

    _, centroid = polygon_area_centroid(obstacle.footprint)
    # The ramp depends only on the normal-direction coordinate, so evaluating
    # it at the centroid equals evaluating it at the entry-edge crossing.
    value_entry = boundary_value_at(floor, centroid, floor.corner_a, floor.corner_b)
    value_exit = boundary_value_at(floor, centroid, floor.corner_c, floor.corner_d)
    if abs(value_entry - value_exit) > 1e-9:
        raise GeometryError(
            f"obstacle '{obstacle.id}': entry/exit boundary crossings disagree "
            f"({value_entry!r} vs {value_exit!r}); boundary frame violates the parallel-edge assumption"
        )
    return value_entry


def floor_obstacle_levels(floor: FloorSlice, bvals: BoundaryValues | None = None) -> dict[str, float]:
    """Stream level for every keep-out zone intersecting the floor."""
    levels = {ob.id: obstacle_level(floor, ob, bvals) for ob in floor.obstacles}
    ids = sorted(levels)
    for i, a in enumerate(ids):
        for b in ids[i + 1 :]:
            if abs(levels[a] - levels[b]) < (floor.psi_max - floor.psi_min) * 1e-6:
                log.warning(
                    "floor %d: obstacles '%s' and '%s' share nearly the same stream level",
                    floor.floor_index,
                    a,
                    b,
                )
    return levels


def _stencil_residual(psi: np.ndarray, free: np.ndarray, span: float) -> float:
    lap = np.zeros_like(psi)
    lap[1:-1, 1:-1] = (
        psi[:-2, 1:-1] + psi[2:, 1:-1] + psi[1:-1, :-2] + psi[1:-1, 2:] - 4.0 * psi[1:-1, 1:-1]
    )
    if not free.any():
        return 0.0
    return float(np.abs(lap[free]).max()) / span


def solve_laplace(
    floor: FloorSlice,
    bvals: BoundaryValues,
    obstacle_levels: dict[str, float],
    config: SolverConfig | None = None,
) -> StreamField:
    """Red-black SOR solve of the 5-point Laplace stencil on one floor.

    Keep-out nodes are Dirichlet throughout their interior (not only at their
    boundary), which removes the zone from the harmonic domain and forces the
    zone level set to wrap it.
    """
    config = config or SolverConfig()
    n_x, n_y = floor.n_x, floor.n_y
    span = floor.psi_max - floor.psi_min

    dirichlet = bvals.mask.copy()
    psi = np.where(bvals.mask, bvals.values, 0.0)
    for oid, cells in floor.obstacle_cells.items():
        if oid not in obstacle_levels:
            raise ValidationError(f"floor {floor.floor_index}: no stream level for obstacle '{oid}'")
        if (cells & bvals.mask).any():
            raise ValidationError(
                f"obstacle '{oid}' touches the external boundary on floor {floor.floor_index}"
            )
        psi[cells] = obstacle_levels[oid]
        dirichlet |= cells

    # warm start: the obstacle-free solution is the plain normal-direction ramp
    gx, gy = floor.node_coords()
    s2 = gx * floor.normal_dir[0] + gy * floor.normal_dir[1]
    s2_lo, s2_hi = s2.min(), s2.max()
    ramp = floor.psi_min + (s2 - s2_lo) / (s2_hi - s2_lo) * span
    psi[~dirichlet] = ramp[~dirichlet]

    free = ~dirichlet
    ix, iy = np.meshgrid(np.arange(n_x), np.arange(n_y), indexing="ij")
    colors = ((ix + iy) % 2 == 0) & free, ((ix + iy) % 2 == 1) & free
    omega = config.relaxation_omega

    iterations = 0
    res = _stencil_residual(psi, free, span)
    while res > config.tolerance and iterations < config.max_iterations:
        for mask in colors:
            lap = np.zeros_like(psi)
            lap[1:-1, 1:-1] = (
                psi[:-2, 1:-1] + psi[2:, 1:-1] + psi[1:-1, :-2] + psi[1:-1, 2:] - 4.0 * psi[1:-1, 1:-1]
            )
            psi[mask] += (omega / 4.0) * lap[mask]
        iterations += 1
        if iterations % RESIDUAL_CHECK_EVERY == 0:
            res = _stencil_residual(psi, free, span)
    res = _stencil_residual(psi, free, span)

    fld = StreamField(
        floor_index=floor.floor_index,
        psi=psi,
        dirichlet_mask=dirichlet,
        obstacle_levels=dict(obstacle_levels),
        residual=res,
        iterations=iterations,
        tolerance=config.tolerance,
        psi_min=floor.psi_min,
        psi_max=floor.psi_max,
        keepout_mask=floor.keepout_mask.copy(),
    )
    if res > config.tolerance:
        raise NonConvergenceError(res, iterations, config.tolerance)
    return fld


def residual(fld: StreamField) -> float:
    """Max 5-point stencil defect over non-Dirichlet nodes, span-normalized."""
    return _stencil_residual(fld.psi, ~fld.dirichlet_mask, fld.psi_max - fld.psi_min)


def solve_floor(floor: FloorSlice, config: SolverConfig | None = None) -> StreamField:
    """Convenience pipeline: boundary values, obstacle levels, solve."""
    bvals = external_boundary_values(floor)
    levels = floor_obstacle_levels(floor, bvals)
    return solve_laplace(floor, bvals, levels, config)


def dump_field_csv(fld: StreamField, path, header_lines: list[str] | None = None) -> None:
    """Write the psi grid as row-major CSV (one row per x index)."""
    with open(path, "w") as fh:
        for line in header_lines or []:
            fh.write(f"# {line}\n")
        for row in fld.psi:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
