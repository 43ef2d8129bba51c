"""Urban landscape ingestion and per-floor slicing.

The world is a rectangular block of airspace cut into horizontal floors at
elevations z_h = h * delta_z (h = 1..n_z). Buildings are extruded prisms; a
floor's keep-out mask marks every grid node whose position falls inside a
prism taller than the floor elevation.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .geometry import points_in_polygon, polygon_area_centroid, polygon_is_simple, rot90_ccw

log = logging.getLogger(__name__)


@dataclass
class ObstaclePrism:
    """Extruded building/no-fly footprint. Immutable after construction."""

    id: str
    footprint: np.ndarray  # (n, 2) vertices, meters
    height: float  # meters


@dataclass
class LandscapeSpec:
    """The 3D urban world: bounds, grid resolution, floors, obstacles."""

    x_extent: float
    y_extent: float
    n_x: int
    n_y: int
    n_z: int
    delta_z: float
    psi_min: float
    psi_max: float
    obstacles: list[ObstaclePrism] = field(default_factory=list)

    @property
    def dx(self) -> float:
        return self.x_extent / (self.n_x - 1)

    @property
    def dy(self) -> float:
        return self.y_extent / (self.n_y - 1)

    def node_coords(self) -> tuple[np.ndarray, np.ndarray]:
        """Meshgrid (ij indexing) of node positions, shape (n_x, n_y)."""
        x = np.linspace(0.0, self.x_extent, self.n_x)
        y = np.linspace(0.0, self.y_extent, self.n_y)
        return np.meshgrid(x, y, indexing="ij")

    def floor_elevation(self, h: int) -> float:
        return h * self.delta_z


@dataclass
class FloorSlice:
    """One horizontal floor: keep-out raster, orientation, boundary corners."""

    floor_index: int
    elevation: float
    keepout_mask: np.ndarray  # (n_x, n_y) bool
    obstacle_cells: dict[str, np.ndarray]  # per-obstacle masks on this floor
    obstacles: list[ObstaclePrism]  # prisms intersecting this floor
    nominal_dir: np.ndarray  # n1: desired travel direction of skyroads
    normal_dir: np.ndarray  # n2: n1 rotated +90 degrees ccw
    corner_a: np.ndarray
    corner_b: np.ndarray
    corner_c: np.ndarray
    corner_d: np.ndarray
    psi_min: float
    psi_max: float
    n_x: int
    n_y: int
    dx: float
    dy: float

    def node_coords(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.linspace(0.0, (self.n_x - 1) * self.dx, self.n_x)
        y = np.linspace(0.0, (self.n_y - 1) * self.dy, self.n_y)
        return np.meshgrid(x, y, indexing="ij")


def _require(doc: dict, key: str, kind, where: str):
    if key not in doc:
        raise ParseError(f"{where}: missing field '{key}'")
    value = doc[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ParseError(f"{where}: field '{key}' must be a number")
        return float(value)
    if kind is int:
        if not isinstance(value, int) or isinstance(value, bool):
            raise ParseError(f"{where}: field '{key}' must be an integer")
        return value
    if not isinstance(value, kind):
        raise ParseError(f"{where}: field '{key}' has wrong type")
    return value


def landscape_from_dict(doc: dict) -> LandscapeSpec:
    """Build and validate a LandscapeSpec from a parsed landscape document."""
    if not isinstance(doc, dict):
        raise ParseError("landscape: top level must be an object")
    extent = _require(doc, "extent", list, "landscape")
    grid = _require(doc, "grid", list, "landscape")
    floors = _require(doc, "floors", dict, "landscape")
    psi = _require(doc, "psi", dict, "landscape")
    obstacles_doc = _require(doc, "obstacles", list, "landscape")
    if len(extent) != 2 or len(grid) != 2:
        raise ParseError("landscape: 'extent' and 'grid' must have two entries")

    spec = LandscapeSpec(
        x_extent=float(extent[0]),
        y_extent=float(extent[1]),
        n_x=_require({"n_x": grid[0]}, "n_x", int, "grid"),
        n_y=_require({"n_y": grid[1]}, "n_y", int, "grid"),
        n_z=_require(floors, "count", int, "floors"),
        delta_z=_require(floors, "spacing_m", float, "floors"),
        psi_min=_require(psi, "min", float, "psi"),
        psi_max=_require(psi, "max", float, "psi"),
    )

    for i, ob in enumerate(obstacles_doc):
        if not isinstance(ob, dict):
            raise ParseError(f"obstacles[{i}]: must be an object")
        oid = ob.get("id", f"obstacle-{i}")
        footprint = _require(ob, "footprint", list, f"obstacles[{i}]")
        height = _require(ob, "height_m", float, f"obstacles[{i}]")
        try:
            pts = np.array(footprint, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"obstacles[{i}]: footprint is not a list of points") from exc
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ParseError(f"obstacles[{i}]: footprint must be a list of [x, y] pairs")
        spec.obstacles.append(ObstaclePrism(id=str(oid), footprint=pts, height=height))

    validate_landscape(spec)
    return spec


def validate_landscape(spec: LandscapeSpec) -> None:
    if spec.n_x < 2 or spec.n_y < 2:
        raise ValidationError("grid: n_x and n_y must both be at least 2")
    if spec.n_z < 1:
        raise ValidationError("floors.count: must be at least 1")
    if spec.delta_z <= 0:
        raise ValidationError("floors.spacing_m: must be positive")
    if spec.x_extent <= 0 or spec.y_extent <= 0:
        raise ValidationError("extent: extents must be positive")
    if not spec.psi_min < spec.psi_max:
        raise ValidationError("psi: min must be strictly less than max")
    seen: set[str] = set()
    for ob in spec.obstacles:
        if ob.id in seen:
            raise ValidationError(f"obstacles: duplicate id '{ob.id}'")
        seen.add(ob.id)
        if len(ob.footprint) < 3:
            raise ValidationError(f"obstacle '{ob.id}': footprint needs at least 3 vertices")
        if ob.height <= 0:
            raise ValidationError(f"obstacle '{ob.id}': height_m must be positive")
        if not polygon_is_simple(ob.footprint):
            raise ValidationError(f"obstacle '{ob.id}': footprint is self-intersecting")
        xs, ys = ob.footprint[:, 0], ob.footprint[:, 1]
        if xs.min() < 0 or ys.min() < 0 or xs.max() > spec.x_extent or ys.max() > spec.y_extent:
            raise ValidationError(f"obstacle '{ob.id}': footprint outside the airspace extent")
        polygon_area_centroid(ob.footprint)  # rejects zero-area footprints


def load_landscape(path: str | Path) -> LandscapeSpec:
    """Load and validate a landscape JSON file."""
    path = Path(path)
    try:
        raw = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read landscape file {path}: {exc}") from exc
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"landscape file {path} is not valid JSON: {exc}") from exc
    return landscape_from_dict(doc)


def floor_orientation(h: int) -> np.ndarray:
    """Nominal travel direction for floor h: odd floors +x, even floors +y.

    Adjacent floors end up perpendicular, which is what makes the whole
    airspace reachable through vertical transitions.
    """
    return np.array([1.0, 0.0]) if h % 2 == 1 else np.array([0.0, 1.0])


def _boundary_corners(spec: LandscapeSpec, n1: np.ndarray, n2: np.ndarray):
    corners = [
        np.array([0.0, 0.0]),
        np.array([spec.x_extent, 0.0]),
        np.array([0.0, spec.y_extent]),
        np.array([spec.x_extent, spec.y_extent]),
    ]

    def key(p, s1, s2):
        return (round(s1 * float(n1 @ p), 9), round(s2 * float(n2 @ p), 9))

    # A: entry corner at the low-stream side; B: entry at the high-stream side;
    # C and D are their exits along the nominal direction.
    a = min(corners, key=lambda p: key(p, 1, 1))
    b = min(corners, key=lambda p: key(p, 1, -1))
    c = min(corners, key=lambda p: key(p, -1, 1))
    d = min(corners, key=lambda p: key(p, -1, -1))
    return a, b, c, d


def slice_floor(spec: LandscapeSpec, h: int) -> FloorSlice:
    """Rasterize keep-out zones and fix the orientation frame for floor h."""
    if not 1 <= h <= spec.n_z:
        raise IndexError(f"floor index {h} outside 1..{spec.n_z}")
    z_h = spec.floor_elevation(h)
    gx, gy = spec.node_coords()
    keepout = np.zeros((spec.n_x, spec.n_y), dtype=bool)
    obstacle_cells: dict[str, np.ndarray] = {}
    active: list[ObstaclePrism] = []
    for ob in spec.obstacles:
        if ob.height > z_h:
            mask = points_in_polygon(gx, gy, ob.footprint)
            obstacle_cells[ob.id] = mask
            if (keepout & mask).any():
                log.warning("floor %d: obstacle '%s' overlaps an earlier obstacle", h, ob.id)
            keepout |= mask
            active.append(ob)

    n1 = floor_orientation(h)
    n2 = rot90_ccw(n1)
    a, b, c, d = _boundary_corners(spec, n1, n2)
    return FloorSlice(
        floor_index=h,
        elevation=z_h,
        keepout_mask=keepout,
        obstacle_cells=obstacle_cells,
        obstacles=active,
        nominal_dir=n1,
        normal_dir=n2,
        corner_a=a,
        corner_b=b,
        corner_c=c,
        corner_d=d,
        psi_min=spec.psi_min,
        psi_max=spec.psi_max,
        n_x=spec.n_x,
        n_y=spec.n_y,
        dx=spec.dx,
        dy=spec.dy,
    )


def slice_all_floors(spec: LandscapeSpec) -> list[FloorSlice]:
    return [slice_floor(spec, h) for h in range(1, spec.n_z + 1)]
