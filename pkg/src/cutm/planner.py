"""A* shortest-path search over the live accessible graph.

The live graph is the global segment graph restricted to the accessible set
maintained by the supervisor. Transition costs and the heuristic are both
3D Euclidean distances between segment midpoints, so the heuristic is
consistent and A* returns true shortest paths.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .errors import EdgeNotLiveError, StartOrGoalAllocatedError
from .skyroads import Segment, SkyroadGraph


@dataclass(frozen=True)
class PathQuery:
    start: int
    goal: int
    issued_at: int = 0


@dataclass
class Path:
    segment_ids: list[int]
    total_cost: float

    @property
    def hop_count(self) -> int:
        """Number of segments on the path (transitions = hop_count - 1)."""
        return len(self.segment_ids)


class LiveGraph:
    """Read-only view of the segment graph restricted to live nodes and edges."""

    def __init__(self, graph: SkyroadGraph, accessible: set[int], live_edges: set[tuple[int, int]]):
        self.graph = graph
        self.accessible = accessible
        self.live_edges = live_edges

    def segment(self, i: int) -> Segment:
        return self.graph.segments[i]

    def in_accessible(self, i: int) -> bool:
        return i in self.accessible

    def neighbors(self, i: int) -> list[int]:
        return [j for j in self.graph.succ[i] if (i, j) in self.live_edges]


def heuristic(seg: Segment, goal: Segment) -> float:
    """Straight-line 3D distance between segment midpoints."""
    dx = seg.midpoint[0] - goal.midpoint[0]
    dy = seg.midpoint[1] - goal.midpoint[1]
    dz = seg.midpoint[2] - goal.midpoint[2]
    return math.sqrt(dx * dx + dy * dy + dz * dz)


def transition_cost(live: LiveGraph, i: int, j: int) -> float:
    if (i, j) not in live.live_edges:
        raise EdgeNotLiveError(f"edge ({i}, {j}) is not in the live transition set")
    return heuristic(live.segment(i), live.segment(j))


def astar(live: LiveGraph, query: PathQuery) -> Path | None:
    """Minimum-cost path over the live graph, or None when unreachable.

    Ties on f are broken toward larger g, then smaller segment id, which
    makes traces reproducible.
    """
    if not live.in_accessible(query.start) or not live.in_accessible(query.goal):
        raise StartOrGoalAllocatedError(
            f"query endpoints ({query.start}, {query.goal}) are not both accessible"
        )
    if query.start == query.goal:
        return Path(segment_ids=[query.start], total_cost=0.0)

    goal_seg = live.segment(query.goal)
    g_score: dict[int, float] = {query.start: 0.0}
    parent: dict[int, int] = {}
    closed: set[int] = set()
    h0 = heuristic(live.segment(query.start), goal_seg)
    frontier: list[tuple[float, float, int]] = [(h0, 0.0, query.start)]

    while frontier:
        f, neg_g, node = heapq.heappop(frontier)
        if node in closed:
            continue
        if node == query.goal:
            ids = [node]
            while ids[-1] != query.start:
                ids.append(parent[ids[-1]])
            ids.reverse()
            return Path(segment_ids=ids, total_cost=-neg_g)
        closed.add(node)
        g = -neg_g
        for nxt in live.neighbors(node):
            if nxt in closed:
                continue
            cand = g + heuristic(live.segment(node), live.segment(nxt))
            if cand < g_score.get(nxt, math.inf):
                g_score[nxt] = cand
                parent[nxt] = node
                heapq.heappush(
                    frontier, (cand + heuristic(live.segment(nxt), goal_seg), -cand, nxt)
                )
    return None
