"""Benchmark harness comparing three planning modes on one map.

Modes:

* ``irrt``          Informed RRT* over the whole map.
* ``irrt_sg``       Informed RRT* restricted to the rooms and doorway
                    openings of the semantic route.
* ``irrt_sg_sps``   The semantic route decomposed into per-room subproblems,
                    each solved with an equal share of the budget.

Every query id gets one (start, goal, seed) triple, shared by all modes, so
the rows are directly comparable. Queries run in parallel across processes;
the modes of one query always run sequentially inside the same worker. With
the default virtual planning clock the full record set is a pure function of
the configuration, so CSV exports are byte-identical across repeat runs and
across worker counts.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .errors import EmptyInput
from .geometry import Point2
from .map_builder import build_global_map
from .geometric_planner import (CLOCK_VIRTUAL, DEFAULT_GOAL_TOLERANCE,
                                DEFAULT_OPS_PER_SECOND, DEFAULT_ROBOT_RADIUS,
                                DEFAULT_VALIDITY_MARGIN, INFORMED_RRT_STAR,
                                GeometricProblem, PlannerConfig, _Region, plan)
from .rng import make_stream, mix
from .scene_graph import load_map, locate_room
from .semantic_planner import (DEFAULT_DOORWAY_PENALTY, SQUARED,
                               build_topology, semantic_route)
from .subproblem_solver import decompose, solve_all

MODE_IRRT = "irrt"
MODE_IRRT_SG = "irrt_sg"
MODE_IRRT_SG_SPS = "irrt_sg_sps"
MODES = (MODE_IRRT, MODE_IRRT_SG, MODE_IRRT_SG_SPS)

PAIRS_RANDOM = "random"
PAIRS_FIXED = "fixed"

CSV_HEADER = ("query_id", "mode", "seed", "solved", "samples",
              "path_length_m", "time_s")

_PAIR_SALT = 0xA5
_PLAN_SALT = 0x13


@dataclass(frozen=True)
class BenchConfig:
    """One benchmark campaign.

    ``pairs="random"`` draws, per query id, a start and a goal that are valid
    states in two different rooms; ``pairs="fixed"`` uses the given start and
    goal for every query (queries then differ only by planner seed).
    """

    map_path: str
    modes: tuple[str, ...] = MODES
    n_queries: int = 1
    timeout: float = 0.1
    seed: int = 0
    pairs: str = PAIRS_RANDOM
    start: Point2 | None = None
    goal: Point2 | None = None
    penalty: float = DEFAULT_DOORWAY_PENALTY
    metric: str = SQUARED
    goal_tolerance: float = DEFAULT_GOAL_TOLERANCE
    robot_radius: float = DEFAULT_ROBOT_RADIUS
    validity_margin: float = DEFAULT_VALIDITY_MARGIN
    clock: str = CLOCK_VIRTUAL
    ops_per_second: float = DEFAULT_OPS_PER_SECOND

    def validate(self) -> None:
        if not self.modes:
            raise ValueError("no benchmark modes selected")
        for m in self.modes:
            if m not in MODES:
                raise ValueError(f"unknown benchmark mode '{m}'")
        if self.n_queries < 1:
            raise ValueError("n_queries must be at least 1")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.pairs not in (PAIRS_RANDOM, PAIRS_FIXED):
            raise ValueError(f"unknown pair policy '{self.pairs}'")
        if self.pairs == PAIRS_FIXED and (self.start is None or self.goal is None):
            raise ValueError("fixed pairs need an explicit start and goal")


@dataclass(frozen=True)
class BenchRecord:
    query_id: int
    mode: str
    seed: int
    solved: bool
    samples: int
    path_length: float | None
    time_s: float


# per-process cache: rebuilding the map once per worker process instead of
# once per query keeps the process pool worthwhile
_WORLD_CACHE: dict = {}


def _world(config: BenchConfig):
    key = (config.map_path, config.penalty, config.metric)
    world = _WORLD_CACHE.get(key)
    if world is None:
        scene = load_map(config.map_path)
        gmap = build_global_map(scene)
        topo = build_topology(scene, config.penalty, config.metric)
        world = (scene, gmap, topo)
        _WORLD_CACHE[key] = world
    return world


def generate_pairs(config: BenchConfig) -> list[tuple[Point2, Point2]]:
    """The (start, goal) pair of every query id, in order.

    Random pairs are valid states (full robot clearance) in two different
    rooms, drawn from a per-query stream, so the list only depends on the
    configuration.
    """
    config.validate()
    if config.pairs == PAIRS_FIXED:
        assert config.start is not None and config.goal is not None
        return [(config.start, config.goal)] * config.n_queries

    scene, gmap, _ = _world(config)
    probe = GeometricProblem(start=Point2(0.0, 0.0), goal=Point2(0.0, 0.0),
                             robot_radius=config.robot_radius,
                             validity_margin=config.validity_margin)
    region = _Region(gmap, probe)
    lo, hi = scene.bbox
    pairs = []
    for qid in range(config.n_queries):
        rng = make_stream(mix(config.seed, qid, _PAIR_SALT))

        def draw(exclude_room: str | None) -> tuple[Point2, str]:
            for _ in range(100_000):
                p = Point2(rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y))
                if not region.valid(p):
                    continue
                room = locate_room(scene, p)
                if room is None or room == exclude_room:
                    continue
                return p, room
            raise RuntimeError("could not draw a valid benchmark query point")

        start, start_room = draw(None)
        goal, _ = draw(start_room)
        pairs.append((start, goal))
    return pairs


def _run_query(config: BenchConfig, qid: int,
               pair: tuple[Point2, Point2]) -> list[BenchRecord]:
    """All requested modes for one query id, sequentially."""
    scene, gmap, topo = _world(config)
    start, goal = pair
    plan_seed = mix(config.seed, qid, _PLAN_SALT)
    base = PlannerConfig(algorithm=INFORMED_RRT_STAR, timeout=config.timeout,
                         seed=plan_seed, clock=config.clock,
                         ops_per_second=config.ops_per_second)
    records = []
    route = None
    for mode in config.modes:
        if mode == MODE_IRRT:
            problem = GeometricProblem(
                start=start, goal=goal,
                goal_tolerance=config.goal_tolerance,
                robot_radius=config.robot_radius,
                validity_margin=config.validity_margin)
            path, stats = plan(gmap, problem, base)
            samples = stats.samples_created
            time_s = stats.planning_time
            length = path.length if path is not None else None
        elif mode == MODE_IRRT_SG:
            if route is None:
                route = semantic_route(topo, scene, start, goal)
            problem = GeometricProblem(
                start=start, goal=goal,
                allowed_rooms=route.free_space,
                allowed_doorways=frozenset(route.doorways),
                goal_tolerance=config.goal_tolerance,
                robot_radius=config.robot_radius,
                validity_margin=config.validity_margin)
            path, stats = plan(gmap, problem, base)
            samples = stats.samples_created
            time_s = stats.planning_time
            length = path.length if path is not None else None
        else:
            if route is None:
                route = semantic_route(topo, scene, start, goal)
            subs = decompose(route, scene)
            gpath, sub_stats = solve_all(
                subs, gmap, base, workers=1,
                goal_tolerance=config.goal_tolerance,
                robot_radius=config.robot_radius,
                validity_margin=config.validity_margin)
            samples = sum(s.samples_created for s in sub_stats)
            time_s = sum(s.planning_time for s in sub_stats)
            length = gpath.total_length if gpath is not None else None
        records.append(BenchRecord(query_id=qid, mode=mode, seed=plan_seed,
                                   solved=length is not None, samples=samples,
                                   path_length=length, time_s=time_s))
    return records


def run_bench(config: BenchConfig, *, workers: int | None = None,
              progress=None) -> list[BenchRecord]:
    """Run the campaign and return records sorted by (query_id, mode).

    ``workers`` > 1 distributes query ids over a process pool; the result is
    identical for any worker count. ``progress(done, total)`` is called after
    each finished query when given.
    """
    config.validate()
    pairs = generate_pairs(config)
    total = len(pairs)
    records: list[BenchRecord] = []
    if workers is None or workers <= 1:
        for qid, pair in enumerate(pairs):
            records.extend(_run_query(config, qid, pair))
            if progress is not None:
                progress(qid + 1, total)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_query, config, qid, pair)
                       for qid, pair in enumerate(pairs)]
            for done, f in enumerate(futures):
                records.extend(f.result())
                if progress is not None:
                    progress(done + 1, total)
    records.sort(key=lambda r: (r.query_id, MODES.index(r.mode)))
    return records


def _nearest_rank(sorted_values: list, fraction: float):
    """Quantile by the nearest-rank rule on an already sorted list."""
    n = len(sorted_values)
    rank = max(1, math.ceil(fraction * n))
    return sorted_values[rank - 1]


def _five_numbers(values: list) -> dict:
    if not values:
        return {"min": None, "q1": None, "median": None, "q3": None, "max": None}
    vals = sorted(values)
    return {
        "min": vals[0],
        "q1": _nearest_rank(vals, 0.25),
        "median": _nearest_rank(vals, 0.5),
        "q3": _nearest_rank(vals, 0.75),
        "max": vals[-1],
    }


def summarize(records: list[BenchRecord]) -> dict:
    """Per-mode solve rate and five-number summaries.

    Sample counts and times cover all records of the mode; path lengths only
    the solved ones. Quantiles use the nearest-rank rule, so every reported
    number is an actual observation.
    """
    if not records:
        raise EmptyInput("no benchmark records to summarize")
    summary: dict = {}
    for mode in MODES:
        rows = [r for r in records if r.mode == mode]
        if not rows:
            continue
        solved = [r for r in rows if r.solved]
        summary[mode] = {
            "n": len(rows),
            "solve_rate": len(solved) / len(rows),
            "samples": _five_numbers([r.samples for r in rows]),
            "path_length_m": _five_numbers([r.path_length for r in solved
                                            if r.path_length is not None]),
            "time_s": _five_numbers([r.time_s for r in rows]),
        }
    return summary


def export_csv(records: list[BenchRecord], path: str) -> None:
    """Write records as CSV; floats use repr so values round-trip exactly."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow([
                r.query_id,
                r.mode,
                r.seed,
                "true" if r.solved else "false",
                r.samples,
                "" if r.path_length is None else repr(r.path_length),
                repr(r.time_s),
            ])


def read_csv(path: str) -> list[BenchRecord]:
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header: {header}")
        records = []
        for row in reader:
            qid, mode, seed, solved, samples, length, time_s = row
            records.append(BenchRecord(
                query_id=int(qid), mode=mode, seed=int(seed),
                solved=solved == "true", samples=int(samples),
                path_length=float(length) if length else None,
                time_s=float(time_s)))
    return records


def export_summary_json(summary: dict, path: str) -> None:
    with open(path, "w") as f:
        json.dump(summary, f, indent=2)
        f.write("\n")
