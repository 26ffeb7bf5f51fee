"""Fixed-step flight and recording loop.

One run: a bootstrap window that randomizes and settles the robot without
recording anything, a single start marker, then a fixed number of physics
steps during which each channel publishes at its own divisor of the
physics rate. All randomness flows from one seeded generator in a fixed
draw order, so a run is reproducible down to the output bytes.

Collisions are not resolved; the robot flies through geometry and any
penetration is logged and counted instead.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..geometry.bvh import build_bvh, candidate_tri_pairs
from ..geometry.footprint import extract_footprint, polygon_contains
from ..geometry.intersect import tri_pairs_intersect
from ..geometry.mesh import TriMesh, box_mesh
from ..geometry.pose import Pose
from ..robot.model import JointLimits, RobotState, integrate_robot
from ..robot.pid import PidController, PidGains, Setpoint
from ..robot.waypoints import SetpointStream, WaypointScript, waypoint_setpoint
from ..sensors.boxes import bounding_boxes, save_boxes_jsonl
from ..sensors.camera import (
    FORWARD_MOUNT,
    CameraIntrinsics,
    best_view_yaw,
    raycast_camera,
)
from ..sensors.images import (
    proxy_rgb,
    save_depth_png,
    save_instance_png,
    save_pfm,
    save_rgb_png,
)
from ..sensors.imu import imu_ground_truth
from . import channels as codec
from .config import CHANNEL_ORDER, ConfigError, SimConfig
from .log import Record, RecordLog
from .scene import SceneBundle

log = logging.getLogger(__name__)

#: Robot body extent used for penetration logging, meters.
ROBOT_BODY_SIZE = (0.25, 0.25, 0.1)

_ROBOT_CHANNELS = CHANNEL_ORDER[2:]  # everything except the start marker and clock


def namespace_channels(names, namespace: str) -> list:
    """Prefix channel names with `namespace/`, rejecting unusable input."""
    if not namespace or "/" in namespace:
        raise ConfigError(f"bad namespace {namespace!r}")
    out = []
    for name in names:
        if not name:
            raise ConfigError("empty channel name")
        out.append(f"{namespace}/{name}")
    return out


@dataclass
class RobotSpec:
    """One robot's limits, controller, mission, and camera mount."""

    limits: JointLimits
    namespace: str = ""
    gains: PidGains | None = None
    setpoints: object | None = None
    intrinsics: CameraIntrinsics | None = None
    mount: Pose = field(default_factory=lambda: FORWARD_MOUNT)

    def prefix(self) -> str:
        return f"{self.namespace}/" if self.namespace else ""

    def channel(self, base: str) -> str:
        return self.prefix() + base


def _setpoint_at(source, t: float, hold: Setpoint) -> Setpoint:
    if source is None:
        return hold
    if isinstance(source, WaypointScript):
        return waypoint_setpoint(source, t)
    if isinstance(source, SetpointStream):
        return source.sample(t)
    if callable(source):
        return source(t)
    raise ConfigError(f"unsupported setpoint source {type(source).__name__}")


def _body_pose(state: RobotState) -> Pose:
    return Pose.from_xyz_rpy(*state.joint_pos)


class _RobotRuntime:
    """Book-keeping for one robot across the stepping loop."""

    def __init__(self, spec: RobotSpec, state: RobotState, hold: Setpoint):
        self.spec = spec
        self.state = state
        self.hold = hold
        self.controller = PidController(spec.gains, spec.limits)
        self.body_hist: deque = deque(maxlen=3)
        self.cam_hist: deque = deque(maxlen=3)
        self.push_history()

    def body_pose(self) -> Pose:
        return _body_pose(self.state)

    def camera_pose(self) -> Pose:
        return self.body_pose().compose(self.spec.mount)

    def push_history(self) -> None:
        body = self.body_pose()
        self.body_hist.append(body)
        self.cam_hist.append(body.compose(self.spec.mount))

    def history(self, which: deque) -> tuple[Pose, Pose, Pose]:
        h = list(which)
        while len(h) < 3:
            h.insert(0, h[0])
        return h[-3], h[-2], h[-1]

    def advance(self, sp: Setpoint, dt: float) -> None:
        cmd = self.controller.step(self.state, sp, dt)
        self.state = integrate_robot(self.state, cmd, self.spec.limits, dt)
        self.push_history()


def _spawn_robot(
    rng: np.random.Generator,
    spec: RobotSpec,
    snapshot0,
    footprint,
) -> RobotState:
    """Uniform position inside the footprint, yaw turned toward structure."""
    lim = spec.limits
    min_x, min_y, max_x, max_y = footprint.circumscribed_rect
    for _ in range(1000):
        xy = rng.uniform([min_x, min_y], [max_x, max_y])
        if polygon_contains(footprint.polygon, xy[None, :])[0]:
            break
    else:
        raise ConfigError("could not sample a start position inside the footprint")
    x = float(np.clip(xy[0], lim.pos_min[0], lim.pos_max[0]))
    y = float(np.clip(xy[1], lim.pos_min[1], lim.pos_max[1]))
    z = float(rng.uniform(lim.pos_min[2], lim.pos_max[2]))
    yaw = best_view_yaw(snapshot0, [x, y, z], mount=spec.mount)
    state = RobotState()
    state.joint_pos = np.array([x, y, z, 0.0, 0.0, yaw])
    return state


def _penetration_pairs(body: TriMesh, env_bvh) -> int:
    body_bvh = build_bvh(body)
    ia, ib = candidate_tri_pairs(body_bvh, env_bvh)
    if not len(ia):
        return 0
    return int(tri_pairs_intersect(body_bvh.tris[ia], env_bvh.tris[ib]).sum())


class _FrameWriter:
    """Renders and saves one camera frame per image-channel record."""

    def __init__(self, scene: SceneBundle, out_dir: Path):
        self.scene = scene
        self.out_dir = Path(out_dir)

    def render(self, runtime: _RobotRuntime, frame: int, sim_time: float) -> None:
        spec = runtime.spec
        intr = spec.intrinsics
        snapshot = self.scene.snapshot(sim_time)
        cam = runtime.camera_pose()
        depth, inst = raycast_camera(snapshot, cam, intr)
        rgb = proxy_rgb(depth, inst)
        base = self.out_dir / spec.namespace if spec.namespace else self.out_dir
        for sub in ("depth", "rgb", "instance"):
            (base / sub).mkdir(parents=True, exist_ok=True)
        stem = f"{frame:06d}"
        save_pfm(base / "depth" / f"{stem}.pfm", depth)
        save_depth_png(base / "depth" / f"{stem}.png", depth)
        save_rgb_png(base / "rgb" / f"{stem}.png", rgb)
        save_instance_png(base / "instance" / f"{stem}.png", inst)
        boxes = bounding_boxes(snapshot, depth, inst, cam, intr)
        save_boxes_jsonl(base / "boxes.jsonl", frame, boxes)


def run(
    config: SimConfig,
    scene: SceneBundle,
    robots: list,
    *,
    render: bool = False,
    out_dir=None,
    clock_fault_steps: int = 0,
    penetration_check_rate: int = 30,
) -> RecordLog:
    """Simulate and record one sequence, returning the in-memory log."""
    config.validate()
    if not robots:
        raise ConfigError("at least one robot is required")
    namespaces = [r.namespace for r in robots]
    if len(robots) > 1:
        if any(not ns for ns in namespaces):
            raise ConfigError("multi-robot runs need a namespace per robot")
    if len(set(namespaces)) != len(namespaces):
        raise ConfigError("duplicate robot namespace")
    if clock_fault_steps < 0:
        raise ConfigError("clock_fault_steps must be non-negative")
    if penetration_check_rate:
        steps_per = 1.0 / config.physics_dt / penetration_check_rate
        if abs(steps_per - round(steps_per)) > 1e-9:
            raise ConfigError("penetration_check_rate must divide the physics rate")
    if render and out_dir is None:
        raise ConfigError("rendering requires an output directory")
    for robot in robots:
        if robot.intrinsics is None:
            robot.intrinsics = CameraIntrinsics.from_fov(640, 480, name="low")

    dt = config.physics_dt
    t0 = config.bootstrap_duration
    rates = config.schedule.rates

    channel_names = ["start_experiment", "clock"]
    for robot in robots:
        channel_names += [robot.channel(base) for base in _ROBOT_CHANNELS]

    rec_log = RecordLog(
        config=config,
        scene_manifest=scene.manifest_ref,
        namespaces=tuple(namespaces),
        start_offset=t0,
        channel_names=tuple(channel_names),
    )

    # one generator, fixed draw order: per robot, position then altitude
    rng = np.random.default_rng(config.rng_seed)
    z_lo = scene.environment.bounds()[0][2]
    z_hi = scene.environment.bounds()[1][2]
    # wide slab: any wall tessellation drops vertices into the middle half
    footprint = extract_footprint(
        scene.environment,
        slice_height=0.5 * float(z_lo + z_hi),
        slab_half_width=max(0.25 * float(z_hi - z_lo), 0.1),
    )
    snapshot0 = scene.snapshot(0.0)
    runtimes = []
    for robot in robots:
        state = _spawn_robot(rng, robot, snapshot0, footprint)
        hold = Setpoint("position", state.joint_pos.copy())
        runtimes.append(_RobotRuntime(robot, state, hold))

    for _ in range(config.bootstrap_steps):
        for rt in runtimes:
            rt.advance(rt.hold, dt)

    rec_log.records.append(Record("start_experiment", 0, t0, b""))

    strides = {name: config.schedule.stride(name, dt) for name in rates}
    counters = {name: 0 for name in channel_names if name != "start_experiment"}
    writer = _FrameWriter(scene, out_dir) if render else None
    env_bvh = build_bvh(scene.environment)
    body_proto = box_mesh(ROBOT_BODY_SIZE)
    pen_stride = (
        round(1.0 / dt / penetration_check_rate) if penetration_check_rate else 0
    )
    penetration_events = 0

    def stamp(base: str, index: int) -> float:
        # index / rate keeps stamps on the exact grid the reindexer rebuilds
        return t0 + index / rates[base]

    def emit(name: str, base: str, payload: bytes) -> None:
        index = counters[name]
        rec_log.records.append(Record(name, index, stamp(base, index), payload))
        counters[name] = index + 1

    for step in range(config.record_steps):
        sim_time = t0 + step * dt
        if step % strides["clock"] == 0:
            emit("clock", "clock", b"")
        for base in _ROBOT_CHANNELS:
            if step % strides[base] != 0:
                continue
            for rt in runtimes:
                name = rt.spec.channel(base)
                if base == "imu_body":
                    sample = imu_ground_truth(*rt.history(rt.body_hist), dt)
                    emit(name, base, codec.pack_imu(sample))
                elif base == "imu_camera":
                    sample = imu_ground_truth(*rt.history(rt.cam_hist), dt)
                    emit(name, base, codec.pack_imu(sample))
                elif base == "tf":
                    emit(name, base, codec.pack_tf(rt.body_pose(), rt.camera_pose()))
                elif base == "joint_state":
                    emit(
                        name,
                        base,
                        codec.pack_joint_state(rt.state.joint_pos, rt.state.joint_vel),
                    )
                elif base == "camera_pose":
                    emit(name, base, codec.pack_pose(rt.camera_pose()))
                elif base == "odometry":
                    emit(
                        name,
                        base,
                        codec.pack_odometry(rt.body_pose(), rt.state.joint_vel),
                    )
                else:  # rgb, depth
                    frame = counters[name]
                    if writer is not None and base == "depth":
                        writer.render(rt, frame, sim_time)
                    emit(
                        name,
                        base,
                        codec.pack_frame_ref(
                            frame, rt.camera_pose(), writer is not None
                        ),
                    )
        if pen_stride and step % pen_stride == 0:
            for rt in runtimes:
                body = body_proto.transformed(rt.body_pose())
                pairs = _penetration_pairs(body, env_bvh)
                if pairs:
                    penetration_events += 1
                    log.warning(
                        "robot %s penetrates the environment at t=%.4f (%d pairs)",
                        rt.spec.namespace or "robot",
                        sim_time,
                        pairs,
                    )
        rec_time = step * dt
        for rt in runtimes:
            sp = _setpoint_at(rt.spec.setpoints, rec_time, rt.hold)
            rt.advance(sp, dt)

    if clock_fault_steps:
        # stamp-only fault: record order stays at emission order
        for rec in rec_log.records:
            if rec.channel == "clock":
                rec.sim_time += clock_fault_steps * dt

    rec_log.check_indices()
    if penetration_events:
        log.info("run logged %d penetration events", penetration_events)
    return rec_log
