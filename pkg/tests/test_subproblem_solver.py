"""Route decomposition, concurrent solving, joining and replanning."""

from __future__ import annotations

import math

import pytest

from semnav import (EmptyInput, GeometricPath, NoRoute, PlannerConfig,
                    PlannerStats, Point2, SceneGraph, Doorway,
                    SubproblemInfeasible, build_global_map, build_topology,
                    decompose, global_path_from_dict, global_path_to_dict,
                    join_segments, motion_valid, replan, semantic_route,
                    solve_all)
from semnav.geometric_planner import GeometricProblem

from conftest import rect_room
from oracles import dense_path_clear


def _route(scene, start, goal, p_d=1.0):
    return semantic_route(build_topology(scene, p_d=p_d), scene, start, goal)


# --------------------------------------------------------------- decompose


def test_decompose_three_rooms(threeroom_scene):
    route = _route(threeroom_scene, Point2(1.0, 1.0), Point2(11.0, 3.0))
    subs = decompose(route, threeroom_scene)
    assert len(subs) == len(route.doorways) + 1 == 3
    assert [s.index for s in subs] == [1, 2, 3]
    assert subs[0].start == Point2(1.0, 1.0)
    assert subs[0].goal == Point2(4.0, 2.0)
    assert (subs[0].room, subs[0].entry, subs[0].exit) == ("r1", None, "d1")
    assert subs[1].start == Point2(4.0, 2.0)
    assert subs[1].goal == Point2(8.0, 2.0)
    assert (subs[1].room, subs[1].entry, subs[1].exit) == ("r2", "d1", "d2")
    assert subs[2].goal == Point2(11.0, 3.0)
    assert (subs[2].room, subs[2].entry, subs[2].exit) == ("r3", "d2", None)
    # consecutive subproblems share their joint waypoint exactly
    assert subs[0].goal == subs[1].start
    assert subs[1].goal == subs[2].start


def test_decompose_same_room(threeroom_scene):
    route = _route(threeroom_scene, Point2(1.0, 1.0), Point2(3.0, 3.0))
    subs = decompose(route, threeroom_scene)
    assert len(subs) == 1
    assert (subs[0].entry, subs[0].exit) == (None, None)
    assert subs[0].room == "r1"


def test_to_problem_fields(threeroom_scene):
    route = _route(threeroom_scene, Point2(1.0, 1.0), Point2(11.0, 3.0))
    sub = decompose(route, threeroom_scene)[1]
    problem = sub.to_problem(goal_tolerance=0.2, robot_radius=0.25,
                             validity_margin=0.01)
    assert problem.allowed_rooms == frozenset({"r2"})
    assert problem.allowed_doorways == frozenset({"d1", "d2"})
    assert problem.goal_tolerance == 0.2
    assert problem.robot_radius == 0.25
    assert problem.validity_margin == 0.01
    first = decompose(route, threeroom_scene)[0].to_problem()
    assert first.allowed_doorways == frozenset({"d1"})


# ---------------------------------------------------------------- solving


def test_solve_all_joins_exactly(threeroom_map, threeroom_scene):
    route = _route(threeroom_scene, Point2(2.0, 2.0), Point2(10.0, 2.0))
    subs = decompose(route, threeroom_scene)
    cfg = PlannerConfig(timeout=0.15, seed=3)
    gpath, stats = solve_all(subs, threeroom_map, cfg)
    assert gpath is not None
    assert len(gpath.segments) == 3
    assert len(stats) == 3
    assert all(st.solved for st in stats)
    assert gpath.stats == tuple(stats)
    for a, b in zip(gpath.segments, gpath.segments[1:]):
        assert a.waypoints[-1] == b.waypoints[0]
    assert gpath.total_length == sum(s.length for s in gpath.segments)
    # every subproblem gets an equal share of the budget
    for st in stats:
        assert st.planning_time <= 0.15 / 3 + 0.01
    # the joined path holds up under dense collision re-checking
    waypoints = [w for seg in gpath.segments for w in seg.waypoints]
    assert dense_path_clear(threeroom_map.walls.segments, waypoints, 0.3)


def test_solve_all_deterministic_across_workers(threeroom_map, threeroom_scene):
    route = _route(threeroom_scene, Point2(2.0, 2.0), Point2(10.0, 2.0))
    subs = decompose(route, threeroom_scene)
    cfg = PlannerConfig(timeout=0.09, seed=8)
    runs = [solve_all(subs, threeroom_map, cfg, workers=w) for w in (1, 2, 4)]
    first_path, first_stats = runs[0]
    for path, stats in runs[1:]:
        assert path.total_length == first_path.total_length
        assert [s.waypoints for s in path.segments] == [s.waypoints
                                                        for s in first_path.segments]
        assert stats == first_stats


def test_solve_all_seed_changes_result(threeroom_map, threeroom_scene):
    route = _route(threeroom_scene, Point2(2.0, 2.0), Point2(10.0, 2.0))
    subs = decompose(route, threeroom_scene)
    p1, _ = solve_all(subs, threeroom_map, PlannerConfig(timeout=0.06, seed=0))
    p2, _ = solve_all(subs, threeroom_map, PlannerConfig(timeout=0.06, seed=1))
    assert p1 is not None and p2 is not None
    assert p1.total_length != p2.total_length


def test_solve_all_unsolved_returns_none(threeroom_map, threeroom_scene):
    route = _route(threeroom_scene, Point2(2.0, 2.0), Point2(10.0, 2.0))
    subs = decompose(route, threeroom_scene)
    gpath, stats = solve_all(subs, threeroom_map, PlannerConfig(timeout=1e-6, seed=0))
    assert gpath is None
    assert len(stats) == 3
    assert not any(st.solved for st in stats)


def test_solve_all_empty_input(threeroom_map):
    with pytest.raises(EmptyInput):
        solve_all([], threeroom_map, PlannerConfig(timeout=0.01))


def test_solve_all_narrow_doorway_infeasible():
    # doorway of width 0.4 cannot pass a robot of diameter 0.64
    rooms = [rect_room("r1", 0.0, 0.0, 2.0, 2.0), rect_room("r2", 2.0, 0.0, 4.0, 2.0)]
    d = Doorway(id="d", center=Point2(2.0, 1.0), width=0.4, rooms=("r1", "r2"))
    scene = SceneGraph(frame="map", bbox=(Point2(0.0, 0.0), Point2(4.0, 2.0)),
                       rooms=tuple(rooms), doorways=(d,))
    gmap = build_global_map(scene)
    route = _route(scene, Point2(1.0, 1.0), Point2(3.0, 1.0))
    subs = decompose(route, scene)
    with pytest.raises(SubproblemInfeasible) as exc_info:
        solve_all(subs, gmap, PlannerConfig(timeout=0.02, seed=0))
    assert exc_info.value.index == 1


def test_solve_all_redistribute_flips_unsolved(threeroom_map, threeroom_scene):
    # starting exactly on the first doorway center makes subproblem 1 trivial,
    # so its unused budget can be redistributed to the hard middle room
    route = _route(threeroom_scene, Point2(4.0, 2.0), Point2(10.0, 2.0))
    subs = decompose(route, threeroom_scene)
    cfg = PlannerConfig(timeout=0.006, seed=2)
    base, base_stats = solve_all(subs, threeroom_map, cfg, workers=1)
    redo, redo_stats = solve_all(subs, threeroom_map, cfg, workers=1,
                                 redistribute=True)
    assert base is None
    assert redo is not None
    # the retried subproblems accumulated both passes
    retried = [i for i, st in enumerate(base_stats) if not st.solved]
    assert retried
    for i in retried:
        assert redo_stats[i].planning_time > base_stats[i].planning_time
        assert redo_stats[i].samples_created >= base_stats[i].samples_created
    # redistribution is still deterministic
    again, again_stats = solve_all(subs, threeroom_map, cfg, workers=1,
                                   redistribute=True)
    assert again.total_length == redo.total_length
    assert again_stats == redo_stats


# ----------------------------------------------------------------- joining


def test_join_segments_validates():
    a = GeometricPath.from_waypoints((Point2(0.0, 0.0), Point2(1.0, 0.0)))
    b = GeometricPath.from_waypoints((Point2(1.0, 0.0), Point2(2.0, 0.0)))
    c = GeometricPath.from_waypoints((Point2(5.0, 5.0), Point2(6.0, 5.0)))
    joined = join_segments([a, b])
    assert joined.total_length == 2.0
    assert joined.stats == ()
    with pytest.raises(ValueError, match="joints"):
        join_segments([a, c])
    with pytest.raises(EmptyInput):
        join_segments([])
    stats = [PlannerStats(solved=True), PlannerStats(solved=True)]
    assert join_segments([a, b], stats).stats == tuple(stats)


def test_global_path_dict_round_trip(threeroom_map, threeroom_scene):
    route = _route(threeroom_scene, Point2(2.0, 2.0), Point2(10.0, 2.0))
    subs = decompose(route, threeroom_scene)
    gpath, _ = solve_all(subs, threeroom_map, PlannerConfig(timeout=0.09, seed=1))
    again = global_path_from_dict(global_path_to_dict(gpath))
    assert again.total_length == gpath.total_length
    assert [s.waypoints for s in again.segments] == [s.waypoints
                                                     for s in gpath.segments]
    assert again.stats == gpath.stats


def test_single_room_solution_near_straight_line():
    scene = SceneGraph(frame="map", bbox=(Point2(0.0, 0.0), Point2(10.0, 10.0)),
                       rooms=(rect_room("a", 0.0, 0.0, 10.0, 10.0),), doorways=())
    gmap = build_global_map(scene)
    route = _route(scene, Point2(1.0, 1.0), Point2(9.0, 9.0))
    subs = decompose(route, scene)
    assert len(subs) == 1
    gpath, stats = solve_all(subs, gmap, PlannerConfig(timeout=0.6, seed=12))
    assert gpath is not None
    assert gpath.total_length <= 1.05 * math.sqrt(128.0)
    assert stats[0].samples_valid + stats[0].samples_rejected == stats[0].samples_created


# -------------------------------------------------------------- replanning


def _solved_ring4(ring4_scene, ring4_map, goal=Point2(6.0, 6.0), seed=4):
    route = _route(ring4_scene, Point2(2.0, 2.0), goal)
    subs = decompose(route, ring4_scene)
    gpath, _ = solve_all(subs, ring4_map, PlannerConfig(timeout=0.3, seed=seed))
    assert gpath is not None
    return route, gpath


def test_replan_block_ahead_reroutes(ring4_scene, ring4_map):
    route, gpath = _solved_ring4(ring4_scene, ring4_map)
    assert route.doorways == ("d12", "d23")
    outcome = replan(ring4_scene, route, gpath, "d12", Point2(2.0, 2.0),
                     PlannerConfig(timeout=0.3, seed=9))
    assert "d12" not in outcome.route.doorways
    assert outcome.route.doorways == ("d41", "d34")
    assert outcome.scene.doorway("d12").blocked
    assert outcome.path is not None
    # the old segments ran through other rooms, so nothing could be reused
    assert outcome.reused_indices == ()
    assert outcome.solved_indices == (1, 2, 3)
    assert len(outcome.stats) == 3


def test_replan_block_off_route_reuses_everything(ring4_scene, ring4_map):
    route, gpath = _solved_ring4(ring4_scene, ring4_map, goal=Point2(6.0, 2.0))
    assert route.doorways == ("d12",)
    outcome = replan(ring4_scene, route, gpath, "d34", Point2(2.0, 2.0),
                     PlannerConfig(timeout=0.3, seed=9))
    assert outcome.route.doorways == ("d12",)
    assert outcome.reused_indices == (1, 2)
    assert outcome.solved_indices == ()
    assert outcome.path is not None
    assert outcome.path.total_length == gpath.total_length


def test_replan_partial_reuse_on_invalidated_segment(ring4_scene, ring4_map):
    # hand-build the previous path: segment 2 detours under d23's wall gap,
    # which only stays collision-free while that gap is open
    route = _route(ring4_scene, Point2(2.0, 2.0), Point2(6.0, 2.0))
    seg1 = GeometricPath.from_waypoints((Point2(2.0, 2.0), Point2(4.0, 2.0)))
    seg2 = GeometricPath.from_waypoints((Point2(4.0, 2.0), Point2(6.0, 3.75),
                                         Point2(6.0, 2.0)))
    problem2 = GeometricProblem(start=seg2.waypoints[0], goal=seg2.waypoints[-1],
                                allowed_rooms=frozenset({"r2"}),
                                allowed_doorways=frozenset({"d12"}))
    for a, b in zip(seg2.waypoints, seg2.waypoints[1:]):
        assert motion_valid(ring4_map, problem2, a, b)
    prev = join_segments([seg1, seg2])

    outcome = replan(ring4_scene, route, prev, "d23", Point2(2.0, 2.0),
                     PlannerConfig(timeout=0.3, seed=11))
    assert outcome.route.doorways == ("d12",)
    assert outcome.reused_indices == (1,)
    assert outcome.solved_indices == (2,)
    assert outcome.path is not None
    assert outcome.path.segments[0].waypoints == seg1.waypoints
    assert outcome.path.segments[1].waypoints != seg2.waypoints


def test_replan_disconnection_raises(threeroom_scene, threeroom_map):
    route = _route(threeroom_scene, Point2(2.0, 2.0), Point2(10.0, 2.0))
    subs = decompose(route, threeroom_scene)
    gpath, _ = solve_all(subs, threeroom_map, PlannerConfig(timeout=0.2, seed=5))
    with pytest.raises(NoRoute):
        replan(threeroom_scene, route, gpath, "d1", Point2(2.0, 2.0),
               PlannerConfig(timeout=0.2, seed=5))


def test_replan_deterministic(ring4_scene, ring4_map):
    route, gpath = _solved_ring4(ring4_scene, ring4_map)
    kwargs = dict(penalty=1.0, workers=2)
    o1 = replan(ring4_scene, route, gpath, "d12", Point2(2.0, 2.0),
                PlannerConfig(timeout=0.2, seed=13), **kwargs)
    o2 = replan(ring4_scene, route, gpath, "d12", Point2(2.0, 2.0),
                PlannerConfig(timeout=0.2, seed=13), **kwargs)
    assert o1.route == o2.route
    assert o1.solved_indices == o2.solved_indices
    assert o1.reused_indices == o2.reused_indices
    assert (o1.path is None) == (o2.path is None)
    if o1.path is not None:
        assert o1.path.total_length == o2.path.total_length
        assert [s.waypoints for s in o1.path.segments] == \
            [s.waypoints for s in o2.path.segments]
    assert o1.stats == o2.stats
