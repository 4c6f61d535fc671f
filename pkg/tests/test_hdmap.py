import json
import math

import numpy as np
import pytest

from scenariomine import geom
from scenariomine.hdmap import (
    HDMap,
    LaneSegment,
    PedestrianCrossing,
    assign_lane,
    distance_to_layer,
    lane_direction,
    lane_direction_at_point,
    map_from_dict,
    map_to_dict,
    nearest_lane_within,
    resample_polyline,
    same_or_successor,
    save_map,
    load_map,
)
from scenariomine.synthgen.templates import build_template, straight_road_map


@pytest.fixture(scope="module")
def straight():
    return straight_road_map()


@pytest.fixture(scope="module")
def crossing_map():
    return build_template("intersection")


class TestLaneSegment:
    def test_centerline_of_straight_lane(self, straight):
        lane = straight.lanes["st.f1"]
        assert np.allclose(lane.centerline[:, 1], 1.85)

    def test_boundaries_need_two_points(self):
        with pytest.raises(ValueError, match=">= 2"):
            LaneSegment("x", "VEHICLE", [[0, 0]], [[0, 1], [1, 1]])

    def test_bad_lane_type(self):
        with pytest.raises(ValueError, match="lane_type"):
            LaneSegment("x", "TRAM", [[0, 0], [1, 0]], [[0, 1], [1, 1]])

    def test_unresolved_neighbor(self):
        lane = LaneSegment("x", "VEHICLE", [[0, 1], [9, 1]], [[0, 0], [9, 0]], left_neighbor="ghost")
        with pytest.raises(ValueError, match="ghost"):
            HDMap([lane])


class TestAssignLane:
    def test_point_in_lane(self, straight):
        assert assign_lane([10.0, 2.0], straight) == "st.f1"

    def test_far_off_road(self, straight):
        assert assign_lane([0.0, 50.0], straight) is None

    def test_shared_boundary_tie_breaks_lexicographically(self, straight):
        # y = 3.7 lies on the st.f1 / st.f2 shared boundary, equidistant from
        # both centerlines
        assert assign_lane([10.0, 3.7], straight) == "st.f1"

    def test_brute_force_cross_check(self, straight):
        rng = np.random.default_rng(5)
        pts = np.column_stack([rng.uniform(-10, 210, 200), rng.uniform(-6, 12, 200)])
        for pt in pts:
            containing = [
                lane.lane_id
                for lane in sorted(straight.lanes.values(), key=lambda l: l.lane_id)
                if geom.points_to_polygon_distance(pt.reshape(1, 2), lane.polygon)[0] == 0.0
            ]
            got = assign_lane(pt, straight)
            if len(containing) == 0:
                assert got is None
            elif len(containing) == 1:
                assert got == containing[0]
            else:
                assert got in containing


class TestDistanceToLayer:
    def test_interior_zero(self, crossing_map):
        polys = crossing_map.crossing_polygons()
        assert distance_to_layer([-5.5, 0.0], polys) == 0.0

    def test_known_distance(self, crossing_map):
        polys = crossing_map.crossing_polygons()
        # 3 m west of the west crosswalk edge, inside its y span
        assert distance_to_layer([-9.7, -1.85], polys) == pytest.approx(3.0, abs=1e-6)

    def test_empty_layer_infinite(self):
        assert distance_to_layer([0.0, 0.0], []) == math.inf

    def test_zero_iff_inside_or_on_boundary(self, straight):
        poly = straight.lanes["st.f1"].polygon
        assert distance_to_layer([10.0, 3.7 + 5e-10], [poly]) == 0.0
        assert distance_to_layer([10.0, 3.71], [poly]) > 0.0


class TestLaneDirection:
    def test_straight_lane_tangent(self, straight):
        assert np.allclose(lane_direction(straight, "st.f1", 15.0), [1.0, 0.0])

    def test_same_tangent_at_both_ends(self, straight):
        a = lane_direction(straight, "st.f1", 0.0)
        b = lane_direction(straight, "st.f1", 1e9)
        assert np.allclose(a, b)

    def test_unknown_lane(self, straight):
        with pytest.raises(KeyError):
            lane_direction(straight, "ghost", 0.0)

    def test_quarter_arc_midpoint_tangent(self):
        # 90 degree arc lane, radius 20 (left boundary 22, right 18)
        theta = np.linspace(-np.pi / 2, 0.0, 200)
        left = np.column_stack([22 * np.cos(theta), 22 * np.sin(theta) + 22])
        right = np.column_stack([18 * np.cos(theta), 18 * np.sin(theta) + 22])
        arc = LaneSegment("arc", "VEHICLE", left, right)
        hd = HDMap([arc])
        total = arc.arclengths[-1]
        mid = lane_direction(hd, "arc", total / 2.0)
        assert mid[0] == pytest.approx(math.sqrt(2) / 2, abs=1e-3)
        assert mid[1] == pytest.approx(math.sqrt(2) / 2, abs=1e-3)

    def test_tangent_at_point_matches_arclength_form(self, straight):
        lane = straight.lanes["st.o1"]
        assert np.allclose(lane_direction_at_point(lane, [50.0, -1.8]), [-1.0, 0.0])


class TestResample:
    def test_preserves_endpoints(self):
        line = np.array([[0.0, 0.0], [3.0, 4.0], [6.0, 4.0]])
        out = resample_polyline(line, 7)
        assert np.allclose(out[0], line[0])
        assert np.allclose(out[-1], line[-1])

    def test_uniform_spacing(self):
        line = np.array([[0.0, 0.0], [10.0, 0.0]])
        out = resample_polyline(line, 21)
        gaps = np.sqrt(((out[1:] - out[:-1]) ** 2).sum(axis=1))
        assert np.allclose(gaps, 0.5)


class TestConnectivity:
    def test_same_or_successor(self, crossing_map):
        assert same_or_successor(crossing_map, "ix.e.app", "ix.e.app")
        assert same_or_successor(crossing_map, "ix.e.app", "ix.e.mid")
        assert same_or_successor(crossing_map, "ix.e.mid", "ix.e.app")
        assert not same_or_successor(crossing_map, "ix.e.app", "ix.e.out")
        assert not same_or_successor(crossing_map, None, "ix.e.app")

    def test_nearest_lane_within(self, straight):
        lane = nearest_lane_within([10.0, -5.0], straight, 10.0)
        assert lane is not None and lane.lane_id == "st.o1"
        assert nearest_lane_within([10.0, 50.0], straight, 10.0) is None


class TestSerialization:
    def test_round_trip(self, crossing_map, tmp_path):
        path = tmp_path / "map.json"
        save_map(crossing_map, path)
        loaded = load_map(path)
        assert map_to_dict(loaded) == map_to_dict(crossing_map)
        # file is valid JSON with the documented top-level keys
        data = json.loads(path.read_text())
        assert set(data) == {"lanes", "crossings", "stop_signs", "drivable"}

    def test_from_dict_minimal(self):
        data = {
            "lanes": [
                {
                    "id": "l1",
                    "lane_type": "VEHICLE",
                    "left_boundary": [[0, 1], [9, 1]],
                    "right_boundary": [[0, 0], [9, 0]],
                }
            ]
        }
        hd = map_from_dict(data)
        assert assign_lane([5, 0.5], hd) == "l1"
