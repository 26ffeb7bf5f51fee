"""Simulation loop, record log container, timeline, and replay."""

import numpy as np
import pytest

from gradeforge.geometry.pose import Pose
from gradeforge.robot.model import JointLimits
from gradeforge.robot.waypoints import WaypointScript
from gradeforge.scene import walking_human_track
from gradeforge.sim import (
    CHANNEL_ORDER,
    DEFAULT_RATES,
    ChannelSchedule,
    RobotSpec,
    SimConfig,
    Timeline,
    load_log,
    load_text_log,
    namespace_channels,
    replay,
    run,
    sample_timeline,
    save_log,
    save_text_log,
)
from gradeforge.sim.config import ConfigError
from gradeforge.sim.engine import run as engine_run
from gradeforge.sim.log import LogError, Record, base_channel, export_tum, log_bytes
from gradeforge.sim.replay import NewCamera, check_complete
from gradeforge.sim.scene import scene_from_parts
from gradeforge.sensors.camera import CameraIntrinsics

from conftest import thick_wall_room


@pytest.fixture(scope="module")
def scene():
    env = thick_wall_room(6.0, 5.0, height=2.2)
    rng = np.random.default_rng(11)
    track = walking_human_track(rng, instance_id=2, n_keyframes=5)
    pose = Pose(np.array([3.0, 2.5, 0.0]))
    return scene_from_parts(env, [(pose, track)], manifest_ref="mem:test-scene")


def short_config(record=0.5, seed=3):
    return SimConfig(record_duration=record, rng_seed=seed)


def default_robot(**kwargs):
    limits = JointLimits.for_box([0.5, 0.5, 0.4], [5.5, 4.5, 1.8], stabilized=True)
    return RobotSpec(limits=limits, **kwargs)


@pytest.fixture(scope="module")
def short_log(scene):
    return engine_run(short_config(), scene, [default_robot()])


# -- configuration -----------------------------------------------------------


def test_default_schedule_rates():
    sched = ChannelSchedule()
    assert sched.rates == DEFAULT_RATES
    sched.validate(1.0 / 240.0)


def test_rate_must_divide_physics_rate():
    sched = ChannelSchedule(rates={**DEFAULT_RATES, "rgb": 7})
    with pytest.raises(ConfigError, match="divide"):
        sched.validate(1.0 / 240.0)


def test_unknown_channel_rejected():
    with pytest.raises(ConfigError, match="unknown channel"):
        ChannelSchedule(rates={**DEFAULT_RATES, "lidar": 10}).validate(1 / 240)


def test_missing_channel_rejected():
    rates = dict(DEFAULT_RATES)
    del rates["depth"]
    with pytest.raises(ConfigError, match="missing rate"):
        ChannelSchedule(rates=rates).validate(1 / 240)


def test_config_validation():
    with pytest.raises(ConfigError):
        SimConfig(physics_dt=0.0).validate()
    with pytest.raises(ConfigError):
        SimConfig(record_duration=-1.0).validate()
    with pytest.raises(ConfigError, match="integral"):
        SimConfig(record_duration=0.1001).validate()
    SimConfig().validate()


def test_config_roundtrip_rejects_unknown_keys():
    doc = SimConfig().to_dict()
    assert SimConfig.from_dict(doc).to_dict() == doc
    doc["warp_factor"] = 9
    with pytest.raises(ConfigError, match="unknown simulation keys"):
        SimConfig.from_dict(doc)


def test_expected_counts_full_minute():
    counts = SimConfig(record_duration=60.0).expected_counts()
    assert counts["start_experiment"] == 1
    assert counts["clock"] == 14400
    assert counts["imu_body"] == 14400
    assert counts["imu_camera"] == 14400
    assert counts["tf"] == 7200
    assert counts["joint_state"] == 7200
    assert counts["camera_pose"] == 3600
    assert counts["odometry"] == 3600
    assert counts["rgb"] == 1800
    assert counts["depth"] == 1800


# -- engine ------------------------------------------------------------------


def test_short_run_counts_exact(short_log):
    counts = short_log.counts()
    expected = short_config().expected_counts()
    for name in CHANNEL_ORDER:
        assert counts[name] == expected[name], name


def test_log_starts_with_start_record(short_log):
    first = short_log.records[0]
    assert first.channel == "start_experiment"
    assert first.sim_time == short_log.start_offset
    assert sum(1 for r in short_log.records if r.channel == "start_experiment") == 1


def test_indices_gap_free_and_sorted(short_log):
    short_log.check_indices()
    short_log.check_sorted()


def test_stamps_on_index_grid(short_log):
    for name in CHANNEL_ORDER[1:]:
        rate = DEFAULT_RATES[name]
        for rec in short_log.channel_records(name)[:: max(1, rate // 10)]:
            assert rec.sim_time == short_log.start_offset + rec.index / rate


def test_shared_step_stamps_bitwise_equal(short_log):
    # every 240 Hz step that also lands on a 120 Hz step shares its stamp
    clock = short_log.channel_records("clock")
    tf = short_log.channel_records("tf")
    for k in range(len(tf)):
        assert tf[k].sim_time == clock[2 * k].sim_time


def test_determinism_same_seed(scene):
    a = engine_run(short_config(), scene, [default_robot()])
    b = engine_run(short_config(), scene, [default_robot()])
    assert log_bytes(a) == log_bytes(b)


def test_different_seed_differs(scene):
    a = engine_run(short_config(seed=3), scene, [default_robot()])
    b = engine_run(short_config(seed=4), scene, [default_robot()])
    assert log_bytes(a) != log_bytes(b)


def test_zero_duration_only_start(scene):
    log = engine_run(short_config(record=0.0), scene, [default_robot()])
    assert len(log.records) == 1
    assert log.records[0].channel == "start_experiment"


def test_no_robot_rejected(scene):
    with pytest.raises(ConfigError, match="at least one robot"):
        engine_run(short_config(), scene, [])


def test_waypoint_setpoints_move_robot(scene):
    script = WaypointScript(
        times=np.array([0.0, 0.4]),
        values=np.array(
            [[2.0, 2.0, 1.0, 0.0, 0.0, 1.0], [4.0, 3.0, 1.5, 0.0, 0.0, 2.0]]
        ),
    )
    log = engine_run(
        short_config(record=1.0), scene, [default_robot(setpoints=script)]
    )
    odo = log.channel_records("odometry")
    first = np.frombuffer(odo[0].payload, dtype="<f8")[:3]
    last = np.frombuffer(odo[-1].payload, dtype="<f8")[:3]
    assert np.linalg.norm(last - first) > 0.05


def test_spawn_inside_limits(short_log):
    lim = default_robot().limits
    for rec in short_log.channel_records("odometry"):
        pos = np.frombuffer(rec.payload, dtype="<f8")[:3]
        assert np.all(pos >= lim.pos_min[:3] - 1e-9)
        assert np.all(pos <= lim.pos_max[:3] + 1e-9)


def test_clock_fault_shifts_only_clock(scene):
    clean = engine_run(short_config(), scene, [default_robot()])
    faulted = engine_run(
        short_config(), scene, [default_robot()], clock_fault_steps=2
    )
    dt = 1.0 / 240.0
    clean_clock = clean.channel_records("clock")
    fault_clock = faulted.channel_records("clock")
    assert fault_clock[5].sim_time == pytest.approx(
        clean_clock[5].sim_time + 2 * dt
    )
    for name in CHANNEL_ORDER:
        if name == "clock":
            continue
        a = [r.sim_time for r in clean.channel_records(name)]
        b = [r.sim_time for r in faulted.channel_records(name)]
        assert a == b, name


# -- namespacing -------------------------------------------------------------


def test_namespace_channels_basic():
    assert namespace_channels(["imu_body"], "robot_0") == ["robot_0/imu_body"]


def test_namespace_rejects_bad_names():
    with pytest.raises(ConfigError):
        namespace_channels(["imu_body"], "a/b")
    with pytest.raises(ConfigError):
        namespace_channels(["imu_body"], "")


def test_two_robots_disjoint_channels(scene):
    robots = [
        default_robot(namespace="alpha"),
        default_robot(namespace="beta"),
    ]
    log = engine_run(short_config(record=0.25), scene, robots)
    counts = log.counts()
    expected = short_config(record=0.25).expected_counts()
    for name in CHANNEL_ORDER[2:]:
        assert counts[f"alpha/{name}"] == expected[name]
        assert counts[f"beta/{name}"] == expected[name]
        assert name not in counts
    assert counts["clock"] == expected["clock"]
    log.check_indices()
    log.check_sorted()


def test_duplicate_namespace_rejected(scene):
    robots = [default_robot(namespace="a"), default_robot(namespace="a")]
    with pytest.raises(ConfigError, match="duplicate"):
        engine_run(short_config(), scene, robots)


def test_multi_robot_requires_namespaces(scene):
    robots = [default_robot(), default_robot(namespace="b")]
    with pytest.raises(ConfigError, match="namespace"):
        engine_run(short_config(), scene, robots)


# -- log container -----------------------------------------------------------


def test_binary_roundtrip(short_log, tmp_path):
    path = tmp_path / "run.grlg"
    save_log(short_log, path)
    loaded = load_log(path)
    assert log_bytes(loaded) == log_bytes(short_log)
    assert loaded.config.to_dict() == short_log.config.to_dict()
    assert loaded.scene_manifest == short_log.scene_manifest


def test_text_mirror_lossless(short_log, tmp_path):
    path = tmp_path / "run.jsonl"
    save_text_log(short_log, path)
    loaded = load_text_log(path)
    assert log_bytes(loaded) == log_bytes(short_log)


def test_truncated_binary_rejected(short_log, tmp_path):
    path = tmp_path / "run.grlg"
    save_log(short_log, path)
    blob = path.read_bytes()
    path.write_bytes(blob[: len(blob) - 3])
    with pytest.raises(LogError, match="truncated"):
        load_log(path)


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "junk.grlg"
    path.write_bytes(b"NOPE" + bytes(64))
    with pytest.raises(LogError, match="magic"):
        load_log(path)


def test_gap_detection(short_log):
    broken = [r for r in short_log.records if not (r.channel == "tf" and r.index == 4)]
    log = type(short_log)(
        config=short_log.config,
        scene_manifest=short_log.scene_manifest,
        namespaces=short_log.namespaces,
        start_offset=short_log.start_offset,
        channel_names=short_log.channel_names,
        records=broken,
    )
    with pytest.raises(LogError, match="gap in channel tf at index 4"):
        log.check_indices()


def test_sort_records_restores_order(short_log):
    shuffled = list(short_log.records)
    np.random.default_rng(0).shuffle(shuffled)
    log = type(short_log)(
        config=short_log.config,
        scene_manifest=short_log.scene_manifest,
        namespaces=short_log.namespaces,
        start_offset=short_log.start_offset,
        channel_names=short_log.channel_names,
        records=shuffled,
    )
    log.sort_records()
    assert log_bytes(log) == log_bytes(short_log)


def test_base_channel():
    assert base_channel("robot_0/imu_body") == "imu_body"
    assert base_channel("clock") == "clock"


def test_export_tum(short_log, tmp_path):
    path = tmp_path / "gt.tum"
    n = export_tum(short_log, "camera_pose", path)
    assert n == short_log.counts()["camera_pose"]
    rows = [
        line.split()
        for line in path.read_text().splitlines()
        if not line.startswith("#")
    ]
    assert len(rows) == n
    assert all(len(row) == 8 for row in rows)
    stamps = [float(r[0]) for r in rows]
    assert stamps == [r.sim_time for r in short_log.channel_records("camera_pose")]


def test_export_tum_missing_channel(short_log, tmp_path):
    with pytest.raises(LogError, match="no records"):
        export_tum(short_log, "nonexistent", tmp_path / "x.tum")


# -- timeline ----------------------------------------------------------------


def test_timeline_pingpong_reflection():
    tl = Timeline(2.0)
    assert tl.phase(0.0) == 0.0
    assert tl.phase(1.5) == 1.5
    assert tl.phase(3.0) == 1.0
    assert tl.phase(4.0) == 0.0
    assert tl.phase(2.0) == 2.0


def test_timeline_periodicity():
    tl = Timeline(1.3)
    for t in np.linspace(0.0, 5.0, 40):
        assert tl.phase(t + 2 * 1.3) == pytest.approx(tl.phase(t))


def test_timeline_zero_duration():
    assert Timeline(0.0).phase(7.7) == 0.0


def test_sample_timeline_keyframe_identity():
    rng = np.random.default_rng(5)
    track = walking_human_track(rng, instance_id=3, n_keyframes=4)
    tl = Timeline(track.duration)
    direct = track.sample(track.times[2])
    via = sample_timeline(tl, track, track.times[2])
    np.testing.assert_allclose(via.vertices, direct.vertices)


def test_sample_timeline_reversed_pass():
    rng = np.random.default_rng(6)
    track = walking_human_track(rng, instance_id=3, n_keyframes=4)
    d = track.duration
    t_probe = 0.25 * d
    fwd = sample_timeline(Timeline(d), track, t_probe)
    rev = sample_timeline(Timeline(d), track, 2 * d - t_probe)
    np.testing.assert_allclose(fwd.vertices, rev.vertices, atol=1e-12)


def test_scene_timeline_is_mean_duration(scene):
    track = scene.assets[0][1]
    assert scene.timeline.track_duration == pytest.approx(track.duration)


# -- replay ------------------------------------------------------------------


def test_replay_roundtrip_byte_identical(short_log, scene):
    out = replay(short_log, scene)
    assert log_bytes(out) == log_bytes(short_log)


def test_replay_new_camera_counts(short_log, scene):
    cam = NewCamera("wide", CameraIntrinsics.from_fov(64, 48, name="wide"))
    out = replay(short_log, scene, [cam])
    counts = out.counts()
    expected = short_config().expected_counts()
    assert counts["wide/rgb"] == expected["rgb"]
    assert counts["wide/depth"] == expected["depth"]
    # original records untouched, byte for byte
    originals = [r for r in out.records if not r.channel.startswith("wide/")]
    assert len(originals) == len(short_log.records)
    for mine, theirs in zip(originals, short_log.records):
        assert mine.channel == theirs.channel
        assert mine.payload == theirs.payload
    out.check_indices()
    out.check_sorted()


def test_replay_manifest_mismatch(short_log, scene):
    other = scene_from_parts(scene.environment, scene.assets, manifest_ref="elsewhere")
    with pytest.raises(LogError, match="manifest"):
        replay(short_log, other)


def test_replay_truncated_log(short_log, scene):
    cut = type(short_log)(
        config=short_log.config,
        scene_manifest=short_log.scene_manifest,
        namespaces=short_log.namespaces,
        start_offset=short_log.start_offset,
        channel_names=short_log.channel_names,
        records=[r for r in short_log.records if not (r.channel == "tf" and r.index >= 50)],
    )
    with pytest.raises(LogError, match="missing channel records: tf has 50 of 60"):
        check_complete(cut)


def test_check_complete_passes(short_log):
    check_complete(short_log)
