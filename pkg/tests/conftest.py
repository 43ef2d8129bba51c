"""Shared fixtures: the demo-scale city pipeline is built once per session."""

from __future__ import annotations

import numpy as np
import pytest

from cutm.citygen import demo_city
from cutm.config import RunConfig
from cutm.landscape import LandscapeSpec, slice_all_floors
from cutm.skyroads import build_edges, extract_streamlines, prune_dead_ends, segment_skyroads
from cutm.streamfield import solve_floor


@pytest.fixture(scope="session")
def demo_landscape() -> LandscapeSpec:
    return demo_city()


@pytest.fixture(scope="session")
def demo_config(demo_landscape) -> RunConfig:
    return RunConfig().resolved(demo_landscape)


@pytest.fixture(scope="session")
def demo_floors(demo_landscape):
    return slice_all_floors(demo_landscape)


@pytest.fixture(scope="session")
def demo_fields(demo_floors, demo_config):
    return [solve_floor(floor, demo_config.solver) for floor in demo_floors]


@pytest.fixture(scope="session")
def demo_roads(demo_floors, demo_fields, demo_config):
    roads = []
    for floor, fld in zip(demo_floors, demo_fields):
        roads.extend(extract_streamlines(fld, floor, demo_config.n_s, demo_config.delta_min_m))
    return roads


@pytest.fixture(scope="session")
def demo_graph(demo_roads, demo_floors, demo_config):
    segments = segment_skyroads(demo_roads, demo_config.seg_length_m)
    graph = build_edges(segments, demo_floors, demo_config.r_v_m)
    return prune_dead_ends(graph)


def empty_landscape(n_x=21, n_y=21, extent=20.0, n_z=2) -> LandscapeSpec:
    """Obstacle-free world for analytic checks."""
    return LandscapeSpec(
        x_extent=extent,
        y_extent=extent,
        n_x=n_x,
        n_y=n_y,
        n_z=n_z,
        delta_z=10.0,
        psi_min=0.0,
        psi_max=1.0,
        obstacles=[],
    )


def cell_of(point: np.ndarray, dx: float, dy: float, n_x: int, n_y: int) -> tuple[int, int]:
    """Grid cell (nearest node) containing a planar point."""
    ix = int(np.clip(round(point[0] / dx), 0, n_x - 1))
    iy = int(np.clip(round(point[1] / dy), 0, n_y - 1))
    return ix, iy
