import math

import numpy as np
import pytest

from scenariomine.core import ScenarioEntry, ScenarioSet, Track
from scenariomine.io import (
    EGO_OFFSET,
    EGO_SIZE,
    EgoPose,
    LoadStats,
    inject_ego_track,
    load_log_bundle,
    load_poses,
    load_tracks,
    read_scenario_csv,
    read_scenario_output,
    save_poses,
    save_tracks,
    to_city_frame,
    to_ego_frame,
    write_scenario_output,
)
from scenariomine.synthgen import s1_script, save_scene

NS = 1_000_000_000


def write_csv(path, rows, header):
    lines = [",".join(header)]
    lines += [",".join(str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


TRACK_HEADER = [
    "timestamp_ns",
    "track_id",
    "confidence",
    "class_name",
    "tx_m",
    "ty_m",
    "tz_m",
    "length_m",
    "width_m",
    "height_m",
    "yaw_rad",
]


class TestLoadTracks:
    def test_groups_rows_by_id(self, tmp_path):
        path = tmp_path / "tracks.csv"
        rows = [
            [NS, "t1", 0.9, "BUS", 0, 0, 0, 10, 3, 3, 0],
            [2 * NS, "t1", 0.8, "BUS", 1, 0, 0, 10, 3, 3, 0],
            [3 * NS, "t1", 0.7, "BUS", 2, 0, 0, 10, 3, 3, 0],
        ]
        write_csv(path, rows, TRACK_HEADER)
        tracks = load_tracks(path)
        assert len(tracks) == 1
        assert len(tracks[0]) == 3
        assert tracks[0].category == "BUS"

    def test_empty_file(self, tmp_path):
        path = tmp_path / "tracks.csv"
        write_csv(path, [], TRACK_HEADER)
        assert load_tracks(path) == []

    def test_unknown_class_rejected_and_counted(self, tmp_path):
        path = tmp_path / "tracks.csv"
        rows = [
            [NS, "t1", 0.9, "UNICORN", 0, 0, 0, 1, 1, 1, 0],
            [NS, "t2", 0.9, "BUS", 0, 0, 0, 10, 3, 3, 0],
        ]
        write_csv(path, rows, TRACK_HEADER)
        stats = LoadStats()
        tracks = load_tracks(path, stats)
        assert [t.track_id for t in tracks] == ["t2"]
        assert stats.rejected_rows == 1

    def test_out_of_order_rows_sorted(self, tmp_path):
        path = tmp_path / "tracks.csv"
        rows = [
            [2 * NS, "t1", 0.9, "BUS", 1, 0, 0, 10, 3, 3, 0],
            [NS, "t1", 0.9, "BUS", 0, 0, 0, 10, 3, 3, 0],
        ]
        write_csv(path, rows, TRACK_HEADER)
        stats = LoadStats()
        tracks = load_tracks(path, stats)
        assert tracks[0].timestamps.tolist() == [NS, 2 * NS]
        assert stats.sorted_tracks == 1

    def test_duplicate_keeps_higher_confidence(self, tmp_path):
        path = tmp_path / "tracks.csv"
        rows = [
            [NS, "t1", 0.3, "BUS", 0, 0, 0, 10, 3, 3, 0],
            [NS, "t1", 0.9, "BUS", 5, 0, 0, 10, 3, 3, 0],
        ]
        write_csv(path, rows, TRACK_HEADER)
        tracks = load_tracks(path)
        assert tracks[0].confidences[0] == 0.9
        assert tracks[0].translations[0, 0] == 5.0


def yaw_pose(ts, x, y, z, yaw):
    return EgoPose(ts, [x, y, z], [math.cos(yaw / 2), 0.0, 0.0, math.sin(yaw / 2)])


class TestFrames:
    def test_identity_pose_unchanged(self):
        track = Track("t", "BUS", [NS], [[1, 2, 3]], [0.4], [[10, 3, 3]], [1])
        out = to_city_frame([track], [yaw_pose(NS, 0, 0, 0, 0.0)])
        assert np.allclose(out[0].translations[0], [1, 2, 3])
        assert out[0].yaws[0] == pytest.approx(0.4)

    def test_pure_translation(self):
        track = Track("t", "BUS", [NS], [[1, 0, 0]], [0], [[10, 3, 3]], [1])
        out = to_city_frame([track], [yaw_pose(NS, 10, 0, 0, 0.0)])
        assert np.allclose(out[0].translations[0], [11, 0, 0])

    def test_quarter_turn(self):
        track = Track("t", "BUS", [NS], [[1, 0, 0]], [0], [[10, 3, 3]], [1])
        out = to_city_frame([track], [yaw_pose(NS, 5, 7, 0, math.pi / 2)])
        assert np.allclose(out[0].translations[0], [5, 8, 0], atol=1e-12)
        assert out[0].yaws[0] == pytest.approx(math.pi / 2)

    def test_missing_pose_names_timestamp(self):
        track = Track("t", "BUS", [2 * NS], [[0, 0, 0]], [0], [[10, 3, 3]], [1])
        with pytest.raises(ValueError, match=str(2 * NS)):
            to_city_frame([track], [yaw_pose(NS, 0, 0, 0, 0)])

    def test_round_trip_recovers_ego_frame(self):
        rng = np.random.default_rng(0)
        n = 25
        ts = [int((i + 1) * NS) for i in range(n)]
        poses = [
            yaw_pose(ts[i], *rng.uniform(-50, 50, 2), rng.uniform(-2, 2), rng.uniform(-3, 3))
            for i in range(n)
        ]
        track = Track(
            "t",
            "BUS",
            ts,
            rng.uniform(-20, 20, (n, 3)),
            rng.uniform(-3, 3, n),
            np.tile([10, 3, 3], (n, 1)),
            np.ones(n),
        )
        back = to_ego_frame(to_city_frame([track], poses), poses)[0]
        assert np.allclose(back.translations, track.translations, atol=1e-9)


class TestEgoInjection:
    def test_constants(self):
        poses = [yaw_pose(NS, 1, 2, 3, 0.0), yaw_pose(2 * NS, 2, 2, 3, 0.0)]
        tracks = inject_ego_track([], poses)
        ego = tracks[-1]
        assert ego.category == "EGO_VEHICLE"
        assert tuple(ego.sizes[0]) == EGO_SIZE
        assert tuple(ego.translations[0]) == EGO_OFFSET
        assert np.all(ego.confidences == 1.0)
        assert len(ego) == len(poses)

    def test_second_injection_refused(self):
        poses = [yaw_pose(NS, 0, 0, 0, 0.0)]
        tracks = inject_ego_track([], poses)
        with pytest.raises(ValueError, match="already present"):
            inject_ego_track(tracks, poses)

    def test_requires_poses(self):
        with pytest.raises(ValueError):
            inject_ego_track([], [])


class TestPoseIO:
    def test_round_trip(self, tmp_path):
        poses = [yaw_pose(NS, 1.5, -2.25, 0.125, 0.5), yaw_pose(2 * NS, 2, 0, 0, -1.0)]
        save_poses(poses, tmp_path / "poses.csv")
        loaded = load_poses(tmp_path / "poses.csv")
        assert loaded[0].timestamp == NS
        assert np.array_equal(loaded[0].translation, poses[0].translation)
        assert np.array_equal(loaded[1].rotation, poses[1].rotation)

    def test_non_monotonic_rejected(self, tmp_path):
        path = tmp_path / "poses.csv"
        write_csv(
            path,
            [[2 * NS, 0, 0, 0, 1, 0, 0, 0], [NS, 0, 0, 0, 1, 0, 0, 0]],
            ["timestamp_ns", "tx_m", "ty_m", "tz_m", "qw", "qx", "qy", "qz"],
        )
        with pytest.raises(ValueError, match="increasing"):
            load_poses(path)

    def test_bad_quaternion(self):
        with pytest.raises(ValueError, match="norm"):
            EgoPose(NS, [0, 0, 0], [1.0, 1.0, 0, 0])


class TestScenarioOutput:
    SCENARIO = ScenarioSet(
        {
            "a": ScenarioEntry((NS, 2 * NS), {"b": (2 * NS,)}),
            "b": ScenarioEntry((NS,)),
        }
    )

    def test_empty_set_header_only(self, tmp_path):
        path = write_scenario_output(ScenarioSet(), "nothing here", "log0", tmp_path)
        assert path.read_text().strip() == "track_uuid,timestamp_ns,role,related_to"

    def test_referred_rows(self, tmp_path):
        simple = ScenarioSet({"a": ScenarioEntry((NS, 2 * NS))})
        path = write_scenario_output(simple, "d", "log0", tmp_path)
        lines = path.read_text().strip().splitlines()
        assert lines[1:] == [f"a,{NS},REFERRED,", f"a,{2 * NS},REFERRED,"]

    def test_related_rows_filled(self, tmp_path):
        path = write_scenario_output(self.SCENARIO, "d", "log0", tmp_path)
        lines = path.read_text().strip().splitlines()
        assert f"b,{2 * NS},RELATED,a" in lines

    def test_json_round_trip_bit_exact(self, tmp_path):
        csv_path = write_scenario_output(self.SCENARIO, "desc", "log7", tmp_path)
        scenario, description, log_id = read_scenario_output(csv_path.with_suffix(".json"))
        assert scenario == self.SCENARIO
        assert description == "desc"
        assert log_id == "log7"

    def test_csv_round_trip(self, tmp_path):
        csv_path = write_scenario_output(self.SCENARIO, "desc", "log7", tmp_path)
        assert read_scenario_csv(csv_path) == self.SCENARIO


class TestBundleRoundTrip:
    def test_scene_save_load(self, tmp_path):
        scene_dir = save_scene(s1_script(), tmp_path)
        bundle = load_log_bundle(scene_dir)
        assert bundle.log_id == "s1"
        ids = {t.track_id for t in bundle.tracks}
        assert {"T_A", "T_B", "T_C", "T_D", "ego"} == ids
        assert bundle.colors["T_A"] == "red"
        # every track timestamp has a pose (validated in the constructor) and
        # the convoy runs at ~10 m/s in city frame
        t_a = bundle.track_map()["T_A"]
        assert t_a.translations[-1, 0] - t_a.translations[0, 0] == pytest.approx(50.0, abs=1e-6)

    def test_save_tracks_deterministic(self, tmp_path):
        script = s1_script()
        d1 = save_scene(script, tmp_path / "one")
        d2 = save_scene(script, tmp_path / "two")
        assert (d1 / "tracks.csv").read_bytes() == (d2 / "tracks.csv").read_bytes()
        assert (d1 / "map.json").read_bytes() == (d2 / "map.json").read_bytes()
