"""Decompose a semantic route into per-room geometric subproblems.

A route through n doorways becomes n + 1 independent subproblems: within each
room, plan from the previous waypoint (query start or entry doorway center)
to the next one (exit doorway center or query goal). Each subproblem is
restricted to its own room plus the openings of its entry and exit doorways,
receives an equal share of the total budget, and gets its own seed, so the
set can run concurrently with deterministic results.

Joining solved segments relies on exact waypoint identity: subproblem k's
goal point and subproblem k+1's start point are the same doorway center, the
planner roots its tree at the exact start and appends the exact goal, so the
joints line up bit for bit.

``replan`` handles a doorway turning out to be blocked: it rebuilds the map,
recomputes the route from the robot's current position, and re-solves only
the subproblems whose (start, goal, room) key has no previously solved
segment that still checks out against the new map.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace

from .errors import EmptyInput, InvalidGoal, InvalidStart, SubproblemInfeasible
from .geometry import Point2
from .map_builder import (DEFAULT_ATTACH_THRESHOLD, DEFAULT_OPENING_DEPTH,
                          DEFAULT_RESOLUTION, DEFAULT_WALL_HALF_WIDTH,
                          GlobalMap, build_global_map)
from .geometric_planner import (DEFAULT_GOAL_TOLERANCE, DEFAULT_ROBOT_RADIUS,
                                DEFAULT_VALIDITY_MARGIN, GeometricPath,
                                GeometricProblem, PlannerConfig, PlannerStats,
                                _Region, path_from_dict, path_to_dict, plan)
from .scene_graph import SceneGraph, set_doorway_blocked
from .semantic_planner import (DEFAULT_DOORWAY_PENALTY, SQUARED, SemanticRoute,
                               build_topology, semantic_route)

# second-round seed salt for the redistribute extension
_RETRY_SALT = 0x9E3779B97F4A7C15


@dataclass(frozen=True)
class Subproblem:
    """One per-room planning task cut out of a semantic route.

    ``index`` is the 1-based position along the route; ``entry``/``exit`` are
    the doorway ids bounding the room traversal (None at the route ends).
    """

    index: int
    start: Point2
    goal: Point2
    room: str
    entry: str | None
    exit: str | None

    def to_problem(self,
                   goal_tolerance: float = DEFAULT_GOAL_TOLERANCE,
                   robot_radius: float = DEFAULT_ROBOT_RADIUS,
                   validity_margin: float = DEFAULT_VALIDITY_MARGIN) -> GeometricProblem:
        doors = frozenset(d for d in (self.entry, self.exit) if d is not None)
        return GeometricProblem(start=self.start, goal=self.goal,
                                allowed_rooms=frozenset((self.room,)),
                                allowed_doorways=doors,
                                goal_tolerance=goal_tolerance,
                                robot_radius=robot_radius,
                                validity_margin=validity_margin)


@dataclass(frozen=True)
class GlobalPath:
    """Joined subproblem solutions: one geometric segment per room."""

    segments: tuple[GeometricPath, ...]
    total_length: float
    stats: tuple[PlannerStats, ...]


def decompose(route: SemanticRoute, scene: SceneGraph) -> tuple[Subproblem, ...]:
    """Cut a semantic route into n + 1 per-room subproblems.

    Waypoints are the query start, the route's doorway centers in order, and
    the query goal; subproblem i runs between waypoints i-1 and i inside
    route.rooms[i-1].
    """
    centers = [scene.doorway(d).center for d in route.doorways]
    waypoints = [route.start, *centers, route.goal]
    subs = []
    n = len(route.doorways)
    for i in range(1, n + 2):
        subs.append(Subproblem(
            index=i,
            start=waypoints[i - 1],
            goal=waypoints[i],
            room=route.rooms[i - 1],
            entry=route.doorways[i - 2] if i >= 2 else None,
            exit=route.doorways[i - 1] if i <= n else None,
        ))
    return tuple(subs)


def _sub_config(config: PlannerConfig, n: int, index: int,
                salt: int = 0, timeout: float | None = None) -> PlannerConfig:
    """Equal budget share and a distinct seed for one subproblem."""
    if timeout is None:
        timeout = config.timeout / n if config.timeout is not None else None
    max_iter = config.max_iterations
    if max_iter is not None:
        max_iter = max(1, max_iter // n)
    return replace(config, timeout=timeout, max_iterations=max_iter,
                   seed=(config.seed ^ index ^ salt) & 0xFFFFFFFFFFFFFFFF)


def _solve_one(gmap: GlobalMap, sub: Subproblem, config: PlannerConfig,
               problem_kwargs: dict):
    """Run one subproblem; exceptions are returned, not raised, so the caller
    can surface the lowest-index failure deterministically."""
    problem = sub.to_problem(**problem_kwargs)
    try:
        path, stats = plan(gmap, problem, config)
    except (InvalidStart, InvalidGoal) as exc:
        return ("infeasible", str(exc), None)
    return ("ok", path, stats)


def solve_all(subs: tuple[Subproblem, ...] | list[Subproblem], gmap: GlobalMap,
              config: PlannerConfig, *, workers: int | None = None,
              redistribute: bool = False,
              goal_tolerance: float = DEFAULT_GOAL_TOLERANCE,
              robot_radius: float = DEFAULT_ROBOT_RADIUS,
              validity_margin: float = DEFAULT_VALIDITY_MARGIN,
              ) -> tuple[GlobalPath | None, list[PlannerStats]]:
    """Solve every subproblem and join the segments into a global path.

    The total budget is split evenly: with a timeout of T and n subproblems
    each planner run gets T/n (iteration caps divide the same way), and
    subproblem i plans with seed ``config.seed ^ i``. Runs execute on a
    thread pool of ``min(n, workers)``; results are gathered by index, so the
    outcome does not depend on scheduling.

    Returns (path, stats). ``path`` is None when any subproblem stays
    unsolved; ``stats`` always has one entry per subproblem. A subproblem
    whose endpoints cannot be valid states (for example a doorway too narrow
    for the robot) raises SubproblemInfeasible carrying its 1-based index.

    ``redistribute=True`` adds a second pass: budget left over by the first
    pass is split evenly among the unsolved subproblems, which are retried
    with a re-salted seed. Off by default to keep the baseline split exact.
    """
    subs = tuple(subs)
    if not subs:
        raise EmptyInput("no subproblems to solve")
    n = len(subs)
    pk = {"goal_tolerance": goal_tolerance, "robot_radius": robot_radius,
          "validity_margin": validity_margin}
    pool_size = min(n, workers if workers is not None else (os.cpu_count() or 1))
    pool_size = max(1, pool_size)

    def run_pass(tasks: list[tuple[Subproblem, PlannerConfig]]):
        with ThreadPoolExecutor(max_workers=min(pool_size, len(tasks))) as pool:
            futures = [pool.submit(_solve_one, gmap, s, c, pk) for s, c in tasks]
            return [f.result() for f in futures]

    results = run_pass([(s, _sub_config(config, n, s.index)) for s in subs])
    for sub, (kind, payload, _) in zip(subs, results):
        if kind == "infeasible":
            raise SubproblemInfeasible(sub.index, payload)

    paths: list[GeometricPath | None] = [r[1] for r in results]
    stats: list[PlannerStats] = [r[2] for r in results]

    if redistribute and config.timeout is not None and any(p is None for p in paths):
        allotted = config.timeout / n
        leftover = sum(max(0.0, allotted - st.planning_time) for st in stats)
        retry_idx = [i for i, p in enumerate(paths) if p is None]
        if leftover > 0.0 and retry_idx:
            extra = leftover / len(retry_idx)
            tasks = [(subs[i], _sub_config(config, n, subs[i].index,
                                           salt=_RETRY_SALT,
                                           timeout=allotted + extra))
                     for i in retry_idx]
            retry = run_pass(tasks)
            for i, (kind, payload, st) in zip(retry_idx, retry):
                if kind == "infeasible":
                    raise SubproblemInfeasible(subs[i].index, payload)
                first = stats[i]
                st.samples_created += first.samples_created
                st.samples_valid += first.samples_valid
                st.samples_rejected += first.samples_rejected
                st.iterations += first.iterations
                st.planning_time += first.planning_time
                stats[i] = st
                if payload is not None:
                    paths[i] = payload

    if any(p is None for p in paths):
        return None, stats
    joined = join_segments([p for p in paths if p is not None], stats)
    return joined, stats


def join_segments(segments: list[GeometricPath],
                  stats: list[PlannerStats] | None = None) -> GlobalPath:
    """Concatenate per-room segments, enforcing exact joint continuity."""
    if not segments:
        raise EmptyInput("no segments to join")
    for a, b in zip(segments, segments[1:]):
        if a.waypoints[-1] != b.waypoints[0]:
            raise ValueError("segment joints do not line up: "
                             f"{tuple(a.waypoints[-1])} vs {tuple(b.waypoints[0])}")
    total = sum(s.length for s in segments)
    return GlobalPath(segments=tuple(segments), total_length=total,
                      stats=tuple(stats) if stats is not None else ())


@dataclass(frozen=True)
class ReplanOutcome:
    """What a replan produced: the updated world plus reuse accounting.

    ``solved_indices`` are the 1-based subproblem indices planned fresh and
    solved; ``reused_indices`` kept a previous segment that re-validated
    against the rebuilt map. Indices refer to the NEW route's decomposition.
    """

    scene: SceneGraph
    gmap: GlobalMap
    route: SemanticRoute
    path: GlobalPath | None
    stats: tuple[PlannerStats, ...]
    solved_indices: tuple[int, ...]
    reused_indices: tuple[int, ...]


def _segment_ok(gmap: GlobalMap, problem: GeometricProblem,
                segment: GeometricPath) -> bool:
    region = _Region(gmap, problem)
    pts = segment.waypoints
    if len(pts) == 1:
        return region.valid(pts[0])
    return all(region.motion_valid(a, b) for a, b in zip(pts, pts[1:]))


def replan(scene: SceneGraph, prev_route: SemanticRoute,
           prev_path: GlobalPath | None, blocked_id: str,
           current_position: Point2, config: PlannerConfig, *,
           penalty: float = DEFAULT_DOORWAY_PENALTY, metric: str = SQUARED,
           resolution: float = DEFAULT_RESOLUTION,
           wall_half_width: float = DEFAULT_WALL_HALF_WIDTH,
           opening_depth: float = DEFAULT_OPENING_DEPTH,
           attach_threshold: float = DEFAULT_ATTACH_THRESHOLD,
           workers: int | None = None,
           goal_tolerance: float = DEFAULT_GOAL_TOLERANCE,
           robot_radius: float = DEFAULT_ROBOT_RADIUS,
           validity_margin: float = DEFAULT_VALIDITY_MARGIN) -> ReplanOutcome:
    """React to a doorway reported blocked while following a route.

    Marks the doorway blocked, rebuilds the map (the doorway's wall gap
    closes), routes again from ``current_position`` to the original goal, and
    solves the new decomposition. Segments of ``prev_path`` whose
    (start, goal, room) key matches a new subproblem are reused when they
    still pass motion checks on the rebuilt map; everything else is planned
    fresh with the usual equal budget split. Raises NoRoute when blocking the
    doorway disconnects the goal.
    """
    new_scene = set_doorway_blocked(scene, blocked_id, True)
    gmap = build_global_map(new_scene, resolution=resolution,
                            wall_half_width=wall_half_width,
                            opening_depth=opening_depth,
                            attach_threshold=attach_threshold)
    topo = build_topology(new_scene, penalty, metric)
    route = semantic_route(topo, new_scene, current_position, prev_route.goal)
    subs = decompose(route, new_scene)
    pk = {"goal_tolerance": goal_tolerance, "robot_radius": robot_radius,
          "validity_margin": validity_margin}

    previous: dict[tuple[Point2, Point2, str], tuple[GeometricPath, PlannerStats]] = {}
    if prev_path is not None:
        prev_subs = decompose(prev_route, scene)
        prev_stats = prev_path.stats or tuple(PlannerStats(solved=True)
                                              for _ in prev_path.segments)
        for ps, seg, st in zip(prev_subs, prev_path.segments, prev_stats):
            previous[(ps.start, ps.goal, ps.room)] = (seg, st)

    n = len(subs)
    segments: list[GeometricPath | None] = [None] * n
    stats: list[PlannerStats | None] = [None] * n
    reused: list[int] = []
    to_plan: list[Subproblem] = []
    for i, sub in enumerate(subs):
        hit = previous.get((sub.start, sub.goal, sub.room))
        if hit is not None and _segment_ok(gmap, sub.to_problem(**pk), hit[0]):
            segments[i], stats[i] = hit
            reused.append(sub.index)
        else:
            to_plan.append(sub)

    solved: list[int] = []
    if to_plan:
        pool_size = min(len(to_plan),
                        workers if workers is not None else (os.cpu_count() or 1))
        pool_size = max(1, pool_size)
        with ThreadPoolExecutor(max_workers=pool_size) as pool:
            futures = [pool.submit(_solve_one, gmap, s,
                                   _sub_config(config, n, s.index), pk)
                       for s in to_plan]
            results = [f.result() for f in futures]
        for sub, (kind, payload, st) in zip(to_plan, results):
            if kind == "infeasible":
                raise SubproblemInfeasible(sub.index, payload)
            i = sub.index - 1
            stats[i] = st
            if payload is not None:
                segments[i] = payload
                solved.append(sub.index)

    filled = [st if st is not None else PlannerStats() for st in stats]
    if any(s is None for s in segments):
        path = None
    else:
        path = join_segments([s for s in segments if s is not None], filled)
    return ReplanOutcome(scene=new_scene, gmap=gmap, route=route, path=path,
                         stats=tuple(filled), solved_indices=tuple(solved),
                         reused_indices=tuple(reused))


def global_path_to_dict(path: GlobalPath) -> dict:
    """JSON-ready representation of a joined path."""
    return {
        "segments": [path_to_dict(s) for s in path.segments],
        "total_length_m": path.total_length,
        "stats": [asdict(s) for s in path.stats],
    }


def global_path_from_dict(data: dict) -> GlobalPath:
    segments = tuple(path_from_dict(s) for s in data["segments"])
    stats = tuple(PlannerStats(**s) for s in data.get("stats", []))
    return GlobalPath(segments=segments, total_length=data["total_length_m"],
                      stats=stats)
