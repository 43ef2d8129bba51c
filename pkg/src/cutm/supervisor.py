"""Supervisory control loop: FCFS corridor allocation and airspace clearing.

The supervisor partitions the segment set into accessible and allocated
subsets, keeps the live transition set consistent with that partition, and
steps a discrete clock. Each step runs, in order: collect completed
segments; release them if a scheduled clearing or a due check fires; serve
queued requests first-come-first-served; advance every en-route vehicle one
segment; apply anomaly updates.
"""

from __future__ import annotations

import logging
from collections import Counter, deque
from dataclasses import dataclass, field

from .errors import StartOrGoalAllocatedError, ValidationError
from .planner import LiveGraph, Path, PathQuery, astar
from .skyroads import SkyroadGraph

log = logging.getLogger(__name__)

DEFAULT_CLEAR_PERIOD = 50


@dataclass(frozen=True)
class RequestEvent:
    uas_id: str
    start: int
    goal: int
    submit_time: int


@dataclass
class Reservation:
    uas_id: str
    path: Path
    t_request: int  # step the corridor was granted
    t_max: int  # time budget: transitions on the path (at least 1)
    t_due: int  # t_request + t_max
    submit_time: int
    progress: int = 0  # index of the current segment on the path
    released_upto: int = 0  # segments below this index are back in the pool
    arrived: bool = False
    disrupted: bool = False
    overdue_warned: bool = False

    @property
    def hop_count(self) -> int:
        return self.path.hop_count

    def current_segment(self) -> int:
        return self.path.segment_ids[self.progress]

    def unreleased_segments(self) -> list[int]:
        return self.path.segment_ids[self.released_upto :]

    def completed_segments(self) -> list[int]:
        """Segments already passed (all of them once the goal is reached)."""
        upto = self.hop_count if self.arrived else self.progress
        return self.path.segment_ids[self.released_upto : upto]


@dataclass
class StepRecord:
    k: int
    events: list[dict]
    positions: dict[str, int]
    accessible_count: int
    allocated_count: int


@dataclass
class Supervisor:
    graph: SkyroadGraph
    n_t: int = DEFAULT_CLEAR_PERIOD
    debug: bool = False
    k: int = 0
    finish: bool = False
    nodes: set[int] = field(default_factory=set)  # V, mutable via anomalies
    edges: set[tuple[int, int]] = field(default_factory=set)  # E
    accessible: set[int] = field(default_factory=set)  # W
    allocated: set[int] = field(default_factory=set)  # W_bar
    live_edges: set[tuple[int, int]] = field(default_factory=set)  # X
    t_check: Counter = field(default_factory=Counter)  # multiset of due steps
    queue: deque = field(default_factory=deque)
    reservations: dict[str, Reservation] = field(default_factory=dict)
    retired: list[Reservation] = field(default_factory=list)
    _events: list[dict] = field(default_factory=list)
    _released_this_step: bool = False

    @classmethod
    def init(cls, graph: SkyroadGraph, n_t: int = DEFAULT_CLEAR_PERIOD, debug: bool = False) -> "Supervisor":
        if n_t <= 1:
            raise ValidationError("clear period n_t must be greater than 1")
        sup = cls(graph=graph, n_t=n_t, debug=debug)
        sup.nodes = set(graph.segments)
        sup.edges = set(graph.edges)
        sup.accessible = set(sup.nodes)
        sup.allocated = set()
        sup.live_edges = set(sup.edges)
        return sup

    # -- views ---------------------------------------------------------------

    def live_view(self) -> LiveGraph:
        return LiveGraph(self.graph, self.accessible, self.live_edges)

    def _rebuild_live_edges(self) -> None:
        acc = self.accessible
        self.live_edges = {(i, j) for (i, j) in self.edges if i in acc and j in acc}

    # -- step phases ----------------------------------------------------------

    def completed_segments(self) -> set[int]:
        """Set F: allocated segments their vehicles have already passed."""
        done: set[int] = set()
        for res in self.reservations.values():
            done.update(res.completed_segments())
        return done

    def _release(self) -> int:
        done = self.completed_segments()
        self.allocated -= done
        self.accessible = self.nodes - self.allocated
        self._rebuild_live_edges()
        finished: list[str] = []
        for uid, res in self.reservations.items():
            res.released_upto = res.hop_count if res.arrived else res.progress
            if res.released_upto >= res.hop_count:
                finished.append(uid)
        for uid in finished:
            self.retired.append(self.reservations.pop(uid))
        self._released_this_step = True
        return len(done)

    def begin_step(self) -> None:
        """Phases: completed-segment collection and scheduled release."""
        if self.finish:
            raise ValidationError("supervisor is finished; no further steps")
        self._events = []
        self._released_this_step = False
        clear_due = self.k % self.n_t == 0
        check_due = self.t_check[self.k] > 0
        if clear_due or check_due:
            released = self._release()
            if clear_due:
                self._events.append({"type": "clear", "k": self.k, "released": released})
            if check_due:
                self._events.append(
                    {"type": "check", "k": self.k, "due": self.t_check[self.k], "released": released}
                )

    def _try_allocate(self, req: RequestEvent) -> bool:
        live = self.live_view()
        try:
            path = astar(live, PathQuery(req.start, req.goal, issued_at=self.k))
        except StartOrGoalAllocatedError:
            path = None
        if path is None:
            return False
        t_max = max(1, path.hop_count - 1)
        res = Reservation(
            uas_id=req.uas_id,
            path=path,
            t_request=self.k,
            t_max=t_max,
            t_due=self.k + t_max,
            submit_time=req.submit_time,
        )
        self.reservations[req.uas_id] = res
        self.t_check[self.k + t_max] += 1
        self.allocated.update(path.segment_ids)
        self.accessible = self.nodes - self.allocated
        self._rebuild_live_edges()
        self._events.append(
            {
                "type": "allocate",
                "k": self.k,
                "uas": req.uas_id,
                "submit": req.submit_time,
                "path": list(path.segment_ids),
                "cost": path.total_cost,
                "t_max": t_max,
                "t_check": self.k + t_max,
            }
        )
        return True

    def process_requests(self, new_requests: list[RequestEvent] = ()) -> None:
        """FCFS service: a blocked head request holds its place in line."""
        arrivals = sorted(new_requests, key=lambda r: (r.submit_time, r.uas_id))
        for req in arrivals:
            if req.submit_time > self.k:
                raise ValidationError(
                    f"request '{req.uas_id}' submitted at {req.submit_time} handed to step {self.k}"
                )
            if req.start not in self.nodes or req.goal not in self.nodes:
                raise ValidationError(
                    f"request '{req.uas_id}' references segments outside the graph"
                )
            self._events.append(
                {
                    "type": "request",
                    "k": self.k,
                    "uas": req.uas_id,
                    "start": req.start,
                    "goal": req.goal,
                    "submit": req.submit_time,
                }
            )
            self.queue.append(req)
        # retry the queue only when something changed this step
        if not self.queue or not (arrivals or self._released_this_step):
            return
        while self.queue:
            head = self.queue[0]
            if self._try_allocate(head):
                self.queue.popleft()
            else:
                self._events.append(
                    {"type": "defer", "k": self.k, "uas": head.uas_id, "submit": head.submit_time}
                )
                break

    def advance(self) -> None:
        """Move every en-route vehicle one segment along its reservation.

        Vehicles granted a corridor at the current step hold their start
        segment and begin moving next step, so a vehicle with budget t_max
        arrives exactly at t_request + t_max.
        """
        for uid in sorted(self.reservations):
            res = self.reservations[uid]
            if res.arrived or res.t_request >= self.k:
                continue
            if res.progress < res.hop_count - 1:
                res.progress += 1
            if res.progress >= res.hop_count - 1:
                res.arrived = True
                self._events.append({"type": "arrive", "k": self.k, "uas": uid})
            elif not res.overdue_warned and self.k >= res.t_due:
                res.overdue_warned = True
                log.warning("uas '%s' overdue: step %d past due %d", uid, self.k, res.t_due)

    def apply_anomaly(self, removed_nodes: set[int] = frozenset(), removed_edges: set[tuple[int, int]] = frozenset()) -> None:
        """Shrink the usable airspace; disrupted reservations are flagged only."""
        removed_nodes = set(removed_nodes) & self.nodes
        removed_edges = set(removed_edges) & self.edges
        if not removed_nodes and not removed_edges:
            return
        self.nodes -= removed_nodes
        self.edges = {
            (i, j)
            for (i, j) in self.edges - removed_edges
            if i not in removed_nodes and j not in removed_nodes
        }
        self.allocated &= self.nodes
        self.accessible = self.nodes - self.allocated
        self._rebuild_live_edges()
        disrupted = []
        for uid in sorted(self.reservations):
            res = self.reservations[uid]
            if removed_nodes.intersection(res.unreleased_segments()) and not res.disrupted:
                res.disrupted = True
                disrupted.append(uid)
        self._events.append(
            {
                "type": "anomaly",
                "k": self.k,
                "removed_nodes": len(removed_nodes),
                "removed_edges": len(removed_edges),
                "disrupted": disrupted,
            }
        )

    def close_step(self) -> StepRecord:
        positions = {
            uid: res.current_segment()
            for uid, res in sorted(self.reservations.items())
            if not res.arrived or any(e.get("uas") == uid and e["type"] == "arrive" for e in self._events)
        }
        record = StepRecord(
            k=self.k,
            events=list(self._events),
            positions=positions,
            accessible_count=len(self.accessible),
            allocated_count=len(self.allocated),
        )
        if self.debug:
            self.check_invariants()
        self.k += 1
        return record

    def step(
        self,
        requests: list[RequestEvent] = (),
        anomalies: tuple[set[int], set[tuple[int, int]]] | None = None,
    ) -> StepRecord:
        """One full supervisor step; see the module docstring for the order."""
        self.begin_step()
        self.process_requests(list(requests))
        self.advance()
        if anomalies is not None:
            self.apply_anomaly(*anomalies)
        return self.close_step()

    def stop(self) -> None:
        self.finish = True

    # -- invariants ------------------------------------------------------------

    def check_invariants(self) -> None:
        """Exhaustive consistency checks; raises ValidationError on violation."""
        if self.accessible & self.allocated:
            raise ValidationError("accessible and allocated sets overlap")
        if self.accessible | self.allocated != self.nodes:
            raise ValidationError("accessible and allocated sets do not cover the node set")
        induced = {(i, j) for (i, j) in self.edges if i in self.accessible and j in self.accessible}
        if induced != self.live_edges:
            raise ValidationError("live edge set out of sync with the accessible partition")
        held: set[int] = set()
        for res in self.reservations.values():
            # anomaly-removed segments no longer exist; the suffix invariants
            # apply to the surviving ones
            suffix = set(res.unreleased_segments()) & self.nodes
            if held & suffix:
                raise ValidationError("two reservations hold the same segment")
            held |= suffix
            if not suffix <= self.allocated:
                raise ValidationError("reservation holds a segment outside the allocated set")
        if held != self.allocated:
            raise ValidationError("allocated set does not equal the union of unreleased suffixes")
