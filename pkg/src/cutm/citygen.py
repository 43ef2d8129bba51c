"""Seeded generator of demo urban landscapes.

Produces a square block of airspace with randomly placed, non-overlapping
building prisms of varying footprint and height. Footprint coordinates are
kept off the grid lattice so rasterization is unambiguous, and buildings
keep clear of the external boundary (a keep-out zone touching the boundary
ring is rejected by the solver).
"""

from __future__ import annotations

import random

from .landscape import LandscapeSpec, landscape_from_dict


def demo_city_dict(
    seed: int = 7,
    extent: float = 90.0,
    n_x: int = 91,
    n_y: int = 91,
    n_z: int = 8,
    delta_z: float = 12.5,
    n_buildings: int = 12,
    margin: float = 12.0,
    min_gap: float = 6.0,
) -> dict:
    """Landscape document (the JSON schema) for a random demo city."""
    rng = random.Random(seed)
    placed: list[tuple[float, float, float, float]] = []  # x0, y0, x1, y1
    obstacles = []
    attempts = 0
    while len(placed) < n_buildings and attempts < 400:
        attempts += 1
        w = rng.uniform(4.0, 12.0)
        d = rng.uniform(4.0, 12.0)
        x0 = rng.uniform(margin, extent - margin - w)
        y0 = rng.uniform(margin, extent - margin - d)
        x0, y0 = round(x0, 2) + 0.003, round(y0, 2) + 0.003
        box = (x0 - min_gap, y0 - min_gap, x0 + w + min_gap, y0 + d + min_gap)
        if any(not (box[2] < px0 or px1 < box[0] or box[3] < py0 or py1 < box[1]) for px0, py0, px1, py1 in placed):
            continue
        placed.append((x0, y0, x0 + w, y0 + d))
        height = round(rng.uniform(1.5, 6.5) * delta_z, 1)
        idx = len(placed)
        if idx % 4 == 0:
            # notch one corner to vary the footprint shapes
            nx_, ny_ = w * 0.4, d * 0.4
            footprint = [
                [x0, y0],
                [x0 + w, y0],
                [x0 + w, y0 + d - ny_],
                [x0 + w - nx_, y0 + d - ny_],
                [x0 + w - nx_, y0 + d],
                [x0, y0 + d],
            ]
        else:
            footprint = [[x0, y0], [x0 + w, y0], [x0 + w, y0 + d], [x0, y0 + d]]
        obstacles.append(
            {
                "id": f"bldg-{idx:02d}",
                "footprint": [[round(x, 3), round(y, 3)] for x, y in footprint],
                "height_m": height,
            }
        )
    return {
        "extent": [extent, extent],
        "grid": [n_x, n_y],
        "floors": {"count": n_z, "spacing_m": delta_z},
        "psi": {"min": 0.0, "max": 1.0},
        "obstacles": obstacles,
    }


def demo_city(seed: int = 7, **kwargs) -> LandscapeSpec:
    return landscape_from_dict(demo_city_dict(seed=seed, **kwargs))
