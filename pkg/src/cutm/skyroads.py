"""Skyroad extraction and the directed segment graph.

Streamlines are traced from the solved stream field by marching squares,
thinned to honor the minimum corridor bandwidth, directed so that adjacent
skyroads on a floor run in opposite senses, cut into fixed-length segments,
and linked into the global directed graph: successor edges along each
skyroad plus bidirectional vertical edges wherever segments of adjacent
floors pass within the vertical-transition radius.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .errors import NoStreamlinesError, UnconvergedFieldError, ValidationError
from .geometry import min_polyline_distance, point_along_polyline, polyline_arclength
from .landscape import FloorSlice
from .streamfield import StreamField

log = logging.getLogger(__name__)

# keep nudged contour vertices clearly inside the free half of a grid edge
FREE_HALF_MARGIN = 0.55


@dataclass
class Skyroad:
    """One directed corridor: a level-set polyline of the floor's stream field."""

    floor_index: int
    iso_value: float
    polyline: np.ndarray  # (n, 2) meters, ordered in travel direction
    direction: int  # +1 along the floor's nominal direction, -1 against
    index_on_floor: int  # rank by iso_value (ties by lateral position)
    elevation: float
    wraps: str | None = None  # obstacle id if this road hugs a keep-out zone


@dataclass
class Segment:
    """A fixed-length arc of a skyroad; the node unit of the global graph."""

    id: int
    floor_index: int
    skyroad_index: int
    arc_index: int
    midpoint: np.ndarray  # (3,) x, y, z meters
    length: float


@dataclass
class SkyroadGraph:
    """Directed graph of skyroad segments and authorized transitions."""

    segments: dict[int, Segment]
    edges: set[tuple[int, int]]
    succ: dict[int, tuple[int, ...]]
    pred: dict[int, tuple[int, ...]]
    r_v: float
    meta: dict = field(default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return len(self.segments)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def node_ids(self) -> list[int]:
        return sorted(self.segments)

    def validate(self) -> None:
        """Assert the transition rules on every edge."""
        for i, j in self.edges:
            if i not in self.segments or j not in self.segments:
                raise ValidationError(f"dangling edge ({i}, {j})")
            a, b = self.segments[i], self.segments[j]
            if a.floor_index == b.floor_index:
                if a.skyroad_index != b.skyroad_index:
                    raise ValidationError(
                        f"edge ({i}, {j}) crosses skyroads on floor {a.floor_index}"
                    )
                if b.arc_index != a.arc_index + 1:
                    raise ValidationError(
                        f"edge ({i}, {j}) skips along skyroad {a.skyroad_index}"
                    )
            else:
                if abs(a.floor_index - b.floor_index) != 1:
                    raise ValidationError(f"edge ({i}, {j}) spans more than one floor")
                lateral = float(np.linalg.norm(a.midpoint[:2] - b.midpoint[:2]))
                if lateral > self.r_v + 1e-9:
                    raise ValidationError(
                        f"edge ({i}, {j}) lateral distance {lateral:.3f} exceeds r_v {self.r_v}"
                    )


@dataclass
class ReachabilityReport:
    strongly_connected: bool
    node_count: int
    component_count: int
    witness_pairs: list[tuple[int, int]]


# ---------------------------------------------------------------------------
# marching squares


# per case: list of crossing-edge pairs; cell edges are 0=ab, 1=bc, 2=cd, 3=da
# with corners a=(ix,iy), b=(ix+1,iy), c=(ix+1,iy+1), d=(ix,iy+1)
_CASES: dict[int, list[tuple[int, int]]] = {
    0: [],
    1: [(0, 3)],
    2: [(0, 1)],
    3: [(3, 1)],
    4: [(1, 2)],
    6: [(0, 2)],
    7: [(3, 2)],
    8: [(2, 3)],
    9: [(0, 2)],
    11: [(1, 2)],
    12: [(1, 3)],
    13: [(0, 1)],
    14: [(0, 3)],
    15: [],
}


def _safe_level(values: np.ndarray, level: float, span: float) -> float:
    # exact node/level collisions make the crossing parameter degenerate
    shift = span * 1e-9
    for _ in range(32):
        if not np.any(values == level):
            return level
        level += shift
    raise ValidationError("could not find a contour level clear of grid values")


def _contour_chains(values: np.ndarray, level: float):
    """March the grid at one level.

    Returns (chains, closed_flags, vertex_info) where each chain is a list of
    edge keys, and vertex_info maps an edge key to (node_p, node_q, t) with
    the crossing at p + t*(q - p).
    """
    n_x, n_y = values.shape
    above = values > level

    vertex_info: dict[tuple, tuple] = {}
    adjacency: dict[tuple, list[tuple]] = {}

    def edge_key(p, q):
        return (p, q) if p <= q else (q, p)

    def crossing(p, q):
        key = edge_key(p, q)
        if key not in vertex_info:
            vp = float(values[key[0]])
            vq = float(values[key[1]])
            t = (level - vp) / (vq - vp)
            vertex_info[key] = (key[0], key[1], t)
        return key

    for ix in range(n_x - 1):
        for iy in range(n_y - 1):
            a = (ix, iy)
            b = (ix + 1, iy)
            c = (ix + 1, iy + 1)
            d = (ix, iy + 1)
            code = (
                (1 if above[a] else 0)
                | (2 if above[b] else 0)
                | (4 if above[c] else 0)
                | (8 if above[d] else 0)
            )
            if code in (0, 15):
                continue
            if code in (5, 10):
                center_above = (values[a] + values[b] + values[c] + values[d]) / 4.0 > level
                if code == 5:
                    pairs = [(0, 1), (2, 3)] if center_above else [(0, 3), (1, 2)]
                else:
                    pairs = [(0, 3), (1, 2)] if center_above else [(0, 1), (2, 3)]
            else:
                pairs = _CASES[code]
            cell_edges = [(a, b), (b, c), (d, c), (a, d)]
            for e1, e2 in pairs:
                k1 = crossing(*cell_edges[e1])
                k2 = crossing(*cell_edges[e2])
                adjacency.setdefault(k1, []).append(k2)
                adjacency.setdefault(k2, []).append(k1)

    chains: list[list[tuple]] = []
    closed: list[bool] = []
    visited: set[tuple] = set()

    def walk(start):
        chain = [start]
        visited.add(start)
        prev = None
        current = start
        while True:
            nxt = None
            for cand in adjacency[current]:
                if cand != prev and cand not in visited:
                    nxt = cand
                    break
            if nxt is None:
                # either an open end, or we closed back onto the start
                is_closed = len(chain) > 2 and start in adjacency[current]
                return chain, is_closed
            chain.append(nxt)
            visited.add(nxt)
            prev, current = current, nxt

    for key in sorted(adjacency):
        if key in visited or len(adjacency[key]) != 1:
            continue
        chain, is_closed = walk(key)
        chains.append(chain)
        closed.append(is_closed)
    for key in sorted(adjacency):
        if key in visited:
            continue
        chain, is_closed = walk(key)
        chains.append(chain)
        closed.append(True)
    return chains, closed, vertex_info


def _materialize(
    chain: list[tuple],
    vertex_info: dict,
    keepout: np.ndarray,
    dx: float,
    dy: float,
) -> list[np.ndarray]:
    """Turn an edge-key chain into polylines, nudging vertices off keep-out cells.

    A vertex on an edge with exactly one keep-out endpoint is pushed into the
    free node's half of the edge. A vertex squeezed between two keep-out
    nodes has no free cell to sit in; the chain is cut there.
    """
    pieces: list[list[np.ndarray]] = [[]]
    for key in chain:
        p, q, t = vertex_info[key]
        ko_p, ko_q = bool(keepout[p]), bool(keepout[q])
        if ko_p and ko_q:
            if pieces[-1]:
                pieces.append([])
            continue
        if ko_p:
            t = max(t, FREE_HALF_MARGIN)
        elif ko_q:
            t = min(t, 1.0 - FREE_HALF_MARGIN)
        point = np.array(
            [
                (p[0] + t * (q[0] - p[0])) * dx,
                (p[1] + t * (q[1] - p[1])) * dy,
            ]
        )
        pieces[-1].append(point)
    return [np.array(piece) for piece in pieces if len(piece) >= 2]


def _split_loop(points: np.ndarray, nominal_dir: np.ndarray) -> list[np.ndarray]:
    """Split a closed contour at its extreme points along the nominal direction.

    A closed loop has no global travel direction; its two halves become two
    open branches that sandwich whatever the loop encircles.
    """
    s = points @ nominal_dir
    imin, imax = int(np.argmin(s)), int(np.argmax(s))
    if imin == imax:
        return []
    lo, hi = min(imin, imax), max(imin, imax)
    branch_1 = points[lo : hi + 1]
    branch_2 = np.concatenate([points[hi:], points[: lo + 1]])
    return [b for b in (branch_1, branch_2) if len(b) >= 2]


@dataclass
class _Traced:
    level: float
    wraps: str | None
    polylines: list[np.ndarray]


def _trace_level(
    fld: StreamField, floor: FloorSlice, level: float, wraps: str | None
) -> _Traced:
    safe = _safe_level(fld.psi, level, fld.psi_max - fld.psi_min)
    chains, closed_flags, vertex_info = _contour_chains(fld.psi, safe)
    polylines: list[np.ndarray] = []
    for chain, is_closed in zip(chains, closed_flags):
        for piece in _materialize(chain, vertex_info, floor.keepout_mask, floor.dx, floor.dy):
            if is_closed and len(piece) == len(chain):
                polylines.extend(_split_loop(piece, floor.nominal_dir))
            else:
                polylines.append(piece)
    return _Traced(level=level, wraps=wraps, polylines=polylines)


# ---------------------------------------------------------------------------
# extraction pipeline


def _traced_distance(a: _Traced, b: _Traced) -> float:
    return min(
        (min_polyline_distance(pa, pb) for pa in a.polylines for pb in b.polylines),
        default=float("inf"),
    )


def extract_streamlines(
    fld: StreamField,
    floor: FloorSlice,
    n_s: int,
    delta_min: float,
    stats: dict | None = None,
) -> list[Skyroad]:
    """Trace, thin, and direct the skyroads of one floor.

    Candidate levels are n_s uniform levels plus a pair of wrap levels per
    keep-out zone offset half a level spacing to each side of the zone's
    constant value, so the zone ends up sandwiched between two opposite
    corridors. Candidates closer than delta_min to the previously retained
    level are dropped, except that a wrap level displaces its uniform
    neighbor instead of yielding to it.
    """
    if not fld.converged:
        raise UnconvergedFieldError(
            f"floor {floor.floor_index}: residual {fld.residual:.3e} > {fld.tolerance:.3e}"
        )
    if n_s < 2:
        raise ValidationError("streamline level count must be at least 2")
    if delta_min <= 0:
        raise ValidationError("delta_min must be positive")

    span = fld.psi_max - fld.psi_min
    spacing = span / (n_s + 1)
    wrap_delta = spacing / 2.0

    candidates: list[tuple[float, str | None]] = [
        (fld.psi_min + m * spacing, None) for m in range(1, n_s + 1)
    ]
    for oid in sorted(fld.obstacle_levels):
        base = fld.obstacle_levels[oid]
        for lvl in (base - wrap_delta, base + wrap_delta):
            if fld.psi_min < lvl < fld.psi_max:
                candidates.append((lvl, oid))
    candidates.sort(key=lambda c: c[0])

    traced = [
        t
        for t in (_trace_level(fld, floor, lvl, oid) for lvl, oid in candidates)
        if t.polylines
    ]

    retained: list[_Traced] = []
    dropped = 0
    for cand in traced:
        keep = True
        while retained:
            if _traced_distance(cand, retained[-1]) >= delta_min:
                break
            if cand.wraps is not None and retained[-1].wraps is None:
                retained.pop()  # wrap roads are mandatory; displace the uniform level
                dropped += 1
                continue
            keep = False
            dropped += 1
            break
        if keep:
            retained.append(cand)
    if dropped:
        log.info(
            "floor %d: dropped %d streamline level(s) violating delta_min=%.3g",
            floor.floor_index,
            dropped,
            delta_min,
        )
    if stats is not None:
        stats["dropped_levels"] = dropped
        stats["retained_levels"] = len(retained)

    roads = [
        Skyroad(
            floor_index=floor.floor_index,
            iso_value=t.level,
            polyline=poly,
            direction=0,
            index_on_floor=-1,
            elevation=floor.elevation,
            wraps=t.wraps,
        )
        for t in retained
        for poly in t.polylines
    ]
    if len(roads) < 2:
        raise NoStreamlinesError(
            f"floor {floor.floor_index}: only {len(roads)} skyroad(s) survive "
            f"delta_min={delta_min}"
        )
    return assign_directions(roads, floor)


def _monotone_filter(points: np.ndarray, travel: np.ndarray) -> np.ndarray:
    """Drop vertices that backtrack along the travel direction."""
    coords = points @ travel
    keep = [0]
    best = coords[0]
    for i in range(1, len(points)):
        if coords[i] >= best - 1e-9:
            keep.append(i)
            best = max(best, coords[i])
    return points[keep]


def assign_directions(skyroads: list[Skyroad], floor: FloorSlice) -> list[Skyroad]:
    """Order skyroads by level and alternate their travel directions.

    Even-indexed roads travel along the floor's nominal direction, odd ones
    against it; each polyline is reordered (and cleaned of backtracking
    vertices) so traversal follows its travel sign.
    """
    n1, n2 = floor.nominal_dir, floor.normal_dir

    def sort_key(road: Skyroad):
        return (
            round(float(road.iso_value), 12),
            round(float(np.mean(road.polyline @ n2)), 9),
            round(float(np.mean(road.polyline @ n1)), 9),
        )

    out = []
    for idx, road in enumerate(sorted(skyroads, key=sort_key)):
        direction = 1 if idx % 2 == 0 else -1
        travel = n1 * direction
        pts = road.polyline
        if len(pts) >= 2 and float((pts[-1] - pts[0]) @ travel) < 0:
            pts = pts[::-1].copy()
        pts = _monotone_filter(pts, travel)
        out.append(
            replace(road, polyline=pts, direction=direction, index_on_floor=idx)
        )
    return out


def segment_skyroads(skyroads: list[Skyroad], seg_length: float) -> list[Segment]:
    """Cut skyroad polylines into arcs of seg_length.

    The final arc keeps at least half a segment length: a shorter remainder
    is merged into the previous arc. Segment ids are unique across floors.
    """
    if seg_length <= 0:
        raise ValidationError("seg_length must be positive")
    segments: list[Segment] = []
    next_id = 0
    for road in sorted(skyroads, key=lambda r: (r.floor_index, r.index_on_floor)):
        pts = road.polyline
        cum = polyline_arclength(pts)
        total = float(cum[-1]) if len(cum) else 0.0
        if len(pts) < 2 or total <= 0:
            log.warning(
                "dropping degenerate skyroad (floor %d, index %d): no usable length",
                road.floor_index,
                road.index_on_floor,
            )
            continue
        n_full = int(total // seg_length)
        rem = total - n_full * seg_length
        if n_full == 0:
            cuts = [0.0, total]
        elif rem < seg_length / 2.0:
            cuts = [i * seg_length for i in range(n_full)] + [total]
        else:
            cuts = [i * seg_length for i in range(n_full + 1)] + [total]
        for arc, (a, b) in enumerate(zip(cuts[:-1], cuts[1:])):
            mid = point_along_polyline(pts, cum, (a + b) / 2.0)
            segments.append(
                Segment(
                    id=next_id,
                    floor_index=road.floor_index,
                    skyroad_index=road.index_on_floor,
                    arc_index=arc,
                    midpoint=np.array([mid[0], mid[1], road.elevation]),
                    length=b - a,
                )
            )
            next_id += 1
    return segments


def _edges_from_segments(segments: list[Segment], r_v: float) -> set[tuple[int, int]]:
    edges: set[tuple[int, int]] = set()
    chains: dict[tuple[int, int], list[Segment]] = {}
    for seg in segments:
        chains.setdefault((seg.floor_index, seg.skyroad_index), []).append(seg)
    for chain in chains.values():
        chain.sort(key=lambda s: s.arc_index)
        for a, b in zip(chain[:-1], chain[1:]):
            edges.add((a.id, b.id))

    if r_v > 0:
        by_floor: dict[int, list[Segment]] = {}
        for seg in segments:
            by_floor.setdefault(seg.floor_index, []).append(seg)
        floors_present = sorted(by_floor)
        for h in floors_present:
            if h + 1 not in by_floor:
                continue
            lower = sorted(by_floor[h], key=lambda s: s.id)
            upper = sorted(by_floor[h + 1], key=lambda s: s.id)
            tree = cKDTree(np.array([s.midpoint[:2] for s in upper]))
            lower_pts = np.array([s.midpoint[:2] for s in lower])
            for li, hits in enumerate(tree.query_ball_point(lower_pts, r_v)):
                for ui in hits:
                    edges.add((lower[li].id, upper[ui].id))
                    edges.add((upper[ui].id, lower[li].id))
    return edges


def _adjacency(segments: dict[int, Segment], edges: set[tuple[int, int]]):
    succ: dict[int, list[int]] = {i: [] for i in segments}
    pred: dict[int, list[int]] = {i: [] for i in segments}
    for i, j in edges:
        succ[i].append(j)
        pred[j].append(i)
    return (
        {i: tuple(sorted(v)) for i, v in succ.items()},
        {i: tuple(sorted(v)) for i, v in pred.items()},
    )


def build_edges(segments: list[Segment], floors: list[FloorSlice], r_v: float, meta: dict | None = None) -> SkyroadGraph:
    """Assemble the global graph: successor chains plus vertical transitions."""
    valid_floors = {f.floor_index for f in floors} if floors else None
    seg_map: dict[int, Segment] = {}
    for seg in segments:
        if seg.id in seg_map:
            raise ValidationError(f"duplicate segment id {seg.id}")
        if valid_floors is not None and seg.floor_index not in valid_floors:
            raise ValidationError(f"segment {seg.id} references unknown floor {seg.floor_index}")
        seg_map[seg.id] = seg
    edges = _edges_from_segments(list(seg_map.values()), r_v)
    succ, pred = _adjacency(seg_map, edges)
    graph = SkyroadGraph(
        segments=seg_map, edges=edges, succ=succ, pred=pred, r_v=r_v, meta=dict(meta or {})
    )
    graph.validate()
    return graph


def prune_dead_ends(graph: SkyroadGraph) -> SkyroadGraph:
    """Trim skyroad head/tail arcs that have no vertical transition.

    A leading arc with no vertical link can never be entered and a trailing
    one can never be left, so they are unusable dead ends; trimming them is
    what makes full reachability attainable. Roads with no vertical link at
    all are dropped entirely. Graphs with no vertical edges anywhere (single
    floor, or r_v = 0) are returned unchanged.
    """
    has_vertical: set[int] = set()
    for i, j in graph.edges:
        if graph.segments[i].floor_index != graph.segments[j].floor_index:
            has_vertical.add(i)
            has_vertical.add(j)
    if not has_vertical:
        return graph

    chains: dict[tuple[int, int], list[Segment]] = {}
    for seg in graph.segments.values():
        chains.setdefault((seg.floor_index, seg.skyroad_index), []).append(seg)

    kept: list[Segment] = []
    trimmed = 0
    dropped_roads = 0
    for key in sorted(chains):
        chain = sorted(chains[key], key=lambda s: s.arc_index)
        linked = [k for k, seg in enumerate(chain) if seg.id in has_vertical]
        if not linked:
            dropped_roads += 1
            trimmed += len(chain)
            continue
        lo, hi = linked[0], linked[-1]
        trimmed += lo + (len(chain) - 1 - hi)
        for new_arc, seg in enumerate(chain[lo : hi + 1]):
            kept.append(replace(seg, arc_index=new_arc))
    if trimmed:
        log.info(
            "pruned %d dead-end segment(s), dropped %d unlinked road(s)",
            trimmed,
            dropped_roads,
        )

    seg_map = {seg.id: seg for seg in kept}
    edges = _edges_from_segments(kept, graph.r_v)
    succ, pred = _adjacency(seg_map, edges)
    meta = dict(graph.meta)
    meta["pruned_segments"] = trimmed
    meta["dropped_roads"] = dropped_roads
    out = SkyroadGraph(
        segments=seg_map, edges=edges, succ=succ, pred=pred, r_v=graph.r_v, meta=meta
    )
    out.validate()
    return out


# ---------------------------------------------------------------------------
# reachability


def _strongly_connected_components(graph: SkyroadGraph) -> tuple[list[list[int]], dict[int, int]]:
    nodes = graph.node_ids()
    order: list[int] = []
    visited: set[int] = set()
    for start in nodes:
        if start in visited:
            continue
        visited.add(start)
        stack = [(start, iter(graph.succ[start]))]
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if nxt not in visited:
                    visited.add(nxt)
                    stack.append((nxt, iter(graph.succ[nxt])))
                    advanced = True
                    break
            if not advanced:
                order.append(node)
                stack.pop()

    comp_of: dict[int, int] = {}
    components: list[list[int]] = []
    for start in reversed(order):
        if start in comp_of:
            continue
        cid = len(components)
        components.append([])
        frontier = [start]
        comp_of[start] = cid
        while frontier:
            node = frontier.pop()
            components[cid].append(node)
            for prev in graph.pred[node]:
                if prev not in comp_of:
                    comp_of[prev] = cid
                    frontier.append(prev)
    return components, comp_of


def check_reachability(graph: SkyroadGraph, max_witnesses: int = 10) -> ReachabilityReport:
    """Report whether every segment can reach every other segment."""
    if not graph.segments:
        return ReachabilityReport(True, 0, 0, [])
    components, comp_of = _strongly_connected_components(graph)
    if len(components) == 1:
        return ReachabilityReport(True, graph.n_nodes, 1, [])

    # nothing outside a sink component is reachable from inside it
    has_out = [False] * len(components)
    for i, j in graph.edges:
        if comp_of[i] != comp_of[j]:
            has_out[comp_of[i]] = True
    sink = next(c for c in range(len(components)) if not has_out[c])
    witnesses: list[tuple[int, int]] = []
    for u in sorted(components[sink]):
        for v in sorted(graph.segments):
            if comp_of[v] != sink:
                witnesses.append((u, v))
                if len(witnesses) >= max_witnesses:
                    return ReachabilityReport(False, graph.n_nodes, len(components), witnesses)
    return ReachabilityReport(False, graph.n_nodes, len(components), witnesses)


# ---------------------------------------------------------------------------
# serialization


def graph_to_dict(graph: SkyroadGraph) -> dict:
    return {
        "meta": {**graph.meta, "r_v": graph.r_v},
        "segments": [
            {
                "id": seg.id,
                "floor": seg.floor_index,
                "skyroad": seg.skyroad_index,
                "arc": seg.arc_index,
                "midpoint": [float(c) for c in seg.midpoint],
                "length": float(seg.length),
            }
            for seg in (graph.segments[i] for i in graph.node_ids())
        ],
        "edges": sorted([list(e) for e in graph.edges]),
    }


def graph_from_dict(doc: dict) -> SkyroadGraph:
    if not isinstance(doc, dict) or "segments" not in doc or "edges" not in doc:
        raise ValidationError("graph document must contain 'segments' and 'edges'")
    meta = dict(doc.get("meta", {}))
    r_v = float(meta.pop("r_v", 0.0))
    seg_map: dict[int, Segment] = {}
    for rec in doc["segments"]:
        seg = Segment(
            id=int(rec["id"]),
            floor_index=int(rec["floor"]),
            skyroad_index=int(rec["skyroad"]),
            arc_index=int(rec["arc"]),
            midpoint=np.array([float(c) for c in rec["midpoint"]]),
            length=float(rec["length"]),
        )
        if seg.id in seg_map:
            raise ValidationError(f"duplicate segment id {seg.id}")
        seg_map[seg.id] = seg
    edges: set[tuple[int, int]] = set()
    for pair in doc["edges"]:
        i, j = int(pair[0]), int(pair[1])
        if i not in seg_map or j not in seg_map:
            raise ValidationError(f"dangling edge ({i}, {j})")
        edges.add((i, j))
    succ, pred = _adjacency(seg_map, edges)
    graph = SkyroadGraph(
        segments=seg_map, edges=edges, succ=succ, pred=pred, r_v=r_v, meta=meta
    )
    graph.validate()
    return graph


def save_graph(graph: SkyroadGraph, path: str | Path) -> None:
    Path(path).write_text(json.dumps(graph_to_dict(graph), sort_keys=True) + "\n")


def load_graph(path: str | Path) -> SkyroadGraph:
    from .errors import ParseError

    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read graph file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"graph file {path} is not valid JSON: {exc}") from exc
    return graph_from_dict(doc)


def streamlines_to_csv(skyroads: list[Skyroad], path: str | Path, header_lines: list[str] | None = None) -> None:
    """Per-floor polyline dump for external plotting."""
    with open(path, "w") as fh:
        for line in header_lines or []:
            fh.write(f"# {line}\n")
        fh.write("skyroad,iso_value,direction,vertex,x,y\n")
        for road in sorted(skyroads, key=lambda r: r.index_on_floor):
            for k, (x, y) in enumerate(road.polyline):
                fh.write(
                    f"{road.index_on_floor},{road.iso_value!r},{road.direction},{k},{x!r},{y!r}\n"
                )
