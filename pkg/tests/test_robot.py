"""Joint model integration, PID tracking, and setpoint sources."""

import io

import numpy as np
import pytest

from gradeforge.robot import (
    JointLimits,
    PidController,
    PidGains,
    RobotState,
    Setpoint,
    SetpointStream,
    WaypointScript,
    integrate_robot,
    load_setpoint_stream,
    load_waypoints,
    pid_step,
    waypoint_setpoint,
    wrap_yaw,
)

DT = 1.0 / 240.0


def desk_limits(stabilized=False):
    return JointLimits.for_box([0.0, 0.0, 0.0], [8.0, 6.0, 2.5], stabilized=stabilized)


def run_closed_loop(ctrl, state, sp, limits, seconds, dt=DT):
    cmd = np.zeros(6)
    for _ in range(int(round(seconds / dt))):
        cmd = ctrl.step(state, sp, dt)
        state = integrate_robot(state, cmd, limits, dt)
    return state, cmd


# ------------------------------------------------------------ integration


class TestIntegrateRobot:
    def test_free_motion_euler_step(self):
        lim = desk_limits()
        st = RobotState(np.array([1.0, 1.0, 1.0, 0, 0, 0]))
        nxt = integrate_robot(st, np.array([0.4, 0, 0, 0, 0, 0]), lim, DT)
        assert nxt.joint_pos[0] == pytest.approx(1.0 + 0.4 / 240.0)
        assert nxt.joint_vel[0] == pytest.approx(0.4)
        assert nxt.time == pytest.approx(DT)

    def test_speed_clamp(self):
        lim = desk_limits()
        st = RobotState(np.array([4.0, 3.0, 1.0, 0, 0, 0]))
        nxt = integrate_robot(st, np.array([3.0, -3.0, 0, 0, 0, 2.0]), lim, DT)
        assert nxt.joint_vel[0] == pytest.approx(0.5)
        assert nxt.joint_vel[1] == pytest.approx(-0.5)
        assert nxt.joint_vel[5] == pytest.approx(np.deg2rad(30.0))

    def test_position_limit_zeroes_velocity(self):
        lim = desk_limits()
        st = RobotState(np.array([8.0, 3.0, 1.0, 0, 0, 0]))
        nxt = integrate_robot(st, np.array([0.5, 0, 0, 0, 0, 0]), lim, DT)
        assert nxt.joint_pos[0] == pytest.approx(8.0)
        assert nxt.joint_vel[0] == 0.0

    def test_stabilized_mode_pins_roll_pitch(self):
        lim = desk_limits(stabilized=True)
        st = RobotState(np.array([4.0, 3.0, 1.0, 0, 0, 0]))
        nxt = integrate_robot(st, np.array([0, 0, 0, 0.3, -0.3, 0]), lim, DT)
        assert nxt.joint_pos[3] == 0.0
        assert nxt.joint_pos[4] == 0.0
        assert nxt.joint_vel[3] == 0.0 and nxt.joint_vel[4] == 0.0

    def test_roll_pitch_range(self):
        lim = desk_limits()
        st = RobotState(np.array([4.0, 3.0, 1.0, np.deg2rad(25.0), 0, 0]))
        nxt = integrate_robot(st, np.array([0, 0, 0, 0.5, 0, 0]), lim, DT)
        assert nxt.joint_pos[3] == pytest.approx(np.deg2rad(25.0))
        assert nxt.joint_vel[3] == 0.0

    def test_yaw_wraps_not_clamps(self):
        lim = desk_limits()
        st = RobotState(np.array([4.0, 3.0, 1.0, 0, 0, 2.0 * np.pi - 1e-4]))
        cmd = np.zeros(6)
        cmd[5] = np.deg2rad(30.0)
        nxt = integrate_robot(st, cmd, lim, DT)
        expect = (2.0 * np.pi - 1e-4 + np.deg2rad(30.0) * DT) % (2.0 * np.pi)
        assert nxt.joint_pos[5] == pytest.approx(expect)
        assert nxt.joint_vel[5] == pytest.approx(np.deg2rad(30.0))

    def test_limits_invariant_random_commands(self, rng):
        lim = desk_limits()
        st = RobotState(np.array([4.0, 3.0, 1.0, 0, 0, 0]))
        for _ in range(500):
            cmd = rng.uniform(-3.0, 3.0, size=6)
            st = integrate_robot(st, cmd, lim, DT)
            assert np.all(np.abs(st.joint_vel) <= lim.vel_max + 1e-12)
            assert np.all(st.joint_pos[:5] >= lim.pos_min[:5] - 1e-12)
            assert np.all(st.joint_pos[:5] <= lim.pos_max[:5] + 1e-12)
            assert 0.0 <= st.joint_pos[5] < 2.0 * np.pi

    def test_bad_dt(self):
        with pytest.raises(ValueError, match="dt"):
            integrate_robot(RobotState(), np.zeros(6), desk_limits(), 0.0)


# -------------------------------------------------------------------- pid


class TestPidStep:
    def test_zero_error_zero_history_zero_command(self):
        lim = desk_limits()
        st = RobotState(np.array([4.0, 3.0, 1.0, 0, 0, 0]))
        sp = Setpoint("position", st.joint_pos.copy())
        np.testing.assert_allclose(pid_step(st, sp, PidGains(), lim, DT), np.zeros(6))
        spv = Setpoint("velocity", np.zeros(6))
        np.testing.assert_allclose(pid_step(st, spv, PidGains(), lim, DT), np.zeros(6))

    def test_large_position_error_clamps_to_speed_limit(self):
        lim = desk_limits()
        gains = PidGains(kp=1.0, ki=0.0, kd=0.0)
        st = RobotState(np.zeros(6))
        cmd = pid_step(st, Setpoint("position", [10.0, 0, 0, 0, 0, 0]), gains, lim, DT)
        assert cmd[0] == pytest.approx(0.5)

    def test_yaw_error_wraps_shortest_way(self):
        lim = desk_limits()
        gains = PidGains(kp=1.0, ki=0.0, kd=0.0)
        st = RobotState(np.array([0, 0, 0, 0, 0, np.deg2rad(350.0)]))
        sp = Setpoint("position", [0, 0, 0, 0, 0, np.deg2rad(10.0)])
        cmd = pid_step(st, sp, gains, lim, DT)
        # +20 degrees, not -340
        assert cmd[5] == pytest.approx(np.deg2rad(20.0))
        assert cmd[5] > 0

    def test_non_finite_rejected(self):
        lim = desk_limits()
        with pytest.raises(ValueError, match="finite"):
            Setpoint("position", [np.nan, 0, 0, 0, 0, 0])
        bad = RobotState()
        bad.joint_pos[0] = np.inf
        with pytest.raises(ValueError, match="finite"):
            pid_step(bad, Setpoint("position", np.zeros(6)), PidGains(), lim, DT)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="kind"):
            Setpoint("torque", np.zeros(6))


class TestPidController:
    def test_steady_state_velocity_tracking(self):
        # converged start: command must keep matching the clamped setpoint
        lim = desk_limits()
        sp = Setpoint("velocity", [0.3, 0.0, 0.1, 0, 0, 0.2])
        st = RobotState(np.array([1.0, 3.0, 1.0, 0, 0, 0]), lim.clamp_vel(np.asarray(sp.value)))
        ctrl = PidController(PidGains(), lim)
        st, cmd = run_closed_loop(ctrl, st, sp, lim, seconds=10.0)
        assert np.max(np.abs(cmd - lim.clamp_vel(np.asarray(sp.value)))) < 1e-3

    def test_steady_state_over_limit_setpoint(self):
        # sp beyond the speed limit: command saturates at the clamped value
        # while the integral accumulates against the unreachable error
        lim = desk_limits()
        sp = Setpoint("velocity", [2.0, 0, 0, 0, 0, 0])
        st = RobotState(np.array([0.5, 3.0, 1.0, 0, 0, 0]), lim.clamp_vel(np.asarray(sp.value)))
        ctrl = PidController(PidGains(), lim)
        for _ in range(int(round(10.0 / DT))):
            cmd = ctrl.step(st, sp, DT)
            vel = lim.clamp_vel(cmd)
            st = RobotState(st.joint_pos, vel, st.time + DT)  # hold position, track vel
        assert abs(cmd[0] - 0.5) < 1e-3
        assert ctrl.integral[0] == pytest.approx(1.0)  # wound up to the clamp

    def test_velocity_convergence_from_rest(self):
        # yaw wraps forever, so a constant rate never hits a range limit
        lim = desk_limits()
        sp = Setpoint("velocity", [0, 0, 0, 0, 0, 0.2])
        ctrl = PidController(PidGains(), lim)
        st = RobotState(np.array([4.0, 3.0, 1.0, 0, 0, 0]))
        st, cmd = run_closed_loop(ctrl, st, sp, lim, seconds=10.0)
        mid_err = abs(st.joint_vel[5] - 0.2)
        assert mid_err < 0.02  # integral tail still draining at 10 s
        st, cmd = run_closed_loop(ctrl, st, sp, lim, seconds=30.0)
        assert abs(st.joint_vel[5] - 0.2) < 1e-3

    def test_position_convergence(self):
        lim = desk_limits()
        ctrl = PidController(PidGains(), lim)
        st = RobotState(np.array([1.0, 1.0, 1.0, 0, 0, 0.2]))
        sp = Setpoint("position", [2.0, 1.5, 1.2, 0, 0, np.deg2rad(10.0)])
        st, _ = run_closed_loop(ctrl, st, sp, lim, seconds=40.0)
        err = sp.value - st.joint_pos
        assert np.max(np.abs(err)) < 5e-3

    def test_kind_change_resets_integral(self):
        lim = desk_limits()
        ctrl = PidController(PidGains(), lim)
        st = RobotState(np.array([1.0, 1.0, 1.0, 0, 0, 0]))
        for _ in range(200):
            ctrl.step(st, Setpoint("position", [3.0, 1.0, 1.0, 0, 0, 0]), DT)
        assert ctrl.integral[0] > 0.1
        ctrl.step(st, Setpoint("velocity", np.zeros(6)), DT)
        assert ctrl.integral[0] == pytest.approx(0.0)

    def test_integral_clamp(self):
        lim = desk_limits()
        ctrl = PidController(PidGains(), lim)
        st = RobotState(np.zeros(6))
        st.joint_pos[2] = 1.0
        for _ in range(2000):
            ctrl.step(st, Setpoint("position", [7.9, 0, 1.0, 0, 0, 0]), DT)
        assert ctrl.integral[0] == pytest.approx(1.0)

    def test_trajectory_determinism(self):
        lim = desk_limits()

        def run():
            ctrl = PidController(PidGains(), lim)
            st = RobotState(np.array([1.0, 1.0, 1.0, 0, 0, 0]))
            hist = []
            for k in range(1000):
                sp = Setpoint("position", [2.0 + 0.5 * np.sin(k * DT), 1.0, 1.0, 0, 0, 0])
                cmd = ctrl.step(st, sp, DT)
                st = integrate_robot(st, cmd, lim, DT)
                hist.append(st.joint_pos.copy())
            return np.asarray(hist)

        assert run().tobytes() == run().tobytes()

    def test_limits_hold_under_pid(self, rng):
        lim = desk_limits()
        ctrl = PidController(PidGains(), lim)
        st = RobotState(np.array([4.0, 3.0, 1.0, 0, 0, 0]))
        for k in range(2000):
            target = rng.uniform([-2, -2, -1, -1, -1, -4], [10, 8, 4, 1, 1, 10])
            cmd = ctrl.step(st, Setpoint("position", target), DT)
            st = integrate_robot(st, cmd, lim, DT)
            assert np.all(np.abs(st.joint_vel) <= lim.vel_max + 1e-12)
            assert np.all(st.joint_pos[:5] >= lim.pos_min[:5] - 1e-12)
            assert np.all(st.joint_pos[:5] <= lim.pos_max[:5] + 1e-12)


# -------------------------------------------------------------- waypoints


WAYPOINT_TEXT = """\
# t x y z roll pitch yaw
0   1 1 1 0 0 350
10  3 1 1 0 0 10
20  3 4 1 0 0 90
"""


class TestWaypoints:
    def test_exact_waypoint(self):
        script = WaypointScript.from_text(WAYPOINT_TEXT)
        sp = waypoint_setpoint(script, 10.0)
        assert sp.kind == "position"
        np.testing.assert_allclose(sp.value[:3], [3, 1, 1])
        assert sp.value[5] == pytest.approx(np.deg2rad(10.0))

    def test_midpoint_lerp(self):
        script = WaypointScript.from_text("0 0 0 1 0 0 0\n10 2 0 1 0 0 0\n")
        sp = waypoint_setpoint(script, 5.0)
        assert sp.value[0] == pytest.approx(1.0)

    def test_yaw_shortest_arc(self):
        script = WaypointScript.from_text(WAYPOINT_TEXT)
        sp = waypoint_setpoint(script, 5.0)
        # 350 -> 10 degrees passes through 0, not 180
        assert wrap_yaw(sp.value[5]) == pytest.approx(0.0, abs=1e-12)

    def test_holds_outside_range(self):
        script = WaypointScript.from_text(WAYPOINT_TEXT)
        before = waypoint_setpoint(script, -3.0)
        after = waypoint_setpoint(script, 99.0)
        np.testing.assert_allclose(before.value[:3], [1, 1, 1])
        np.testing.assert_allclose(after.value[:3], [3, 4, 1])
        assert after.value[5] == pytest.approx(np.deg2rad(90.0))

    def test_tuple_script_form(self):
        pairs = [(0.0, np.zeros(6)), (4.0, np.array([2.0, 0, 0, 0, 0, 0]))]
        sp = waypoint_setpoint(pairs, 1.0)
        assert sp.value[0] == pytest.approx(0.5)

    def test_parse_errors(self):
        with pytest.raises(ValueError, match="expected 7 fields"):
            WaypointScript.from_text("0 1 2 3\n")
        with pytest.raises(ValueError, match="strictly increasing"):
            WaypointScript.from_text("0 0 0 0 0 0 0\n0 1 1 1 0 0 0\n")
        with pytest.raises(ValueError, match="empty"):
            WaypointScript.from_text("# nothing\n")

    def test_text_round_trip(self):
        script = WaypointScript.from_text(WAYPOINT_TEXT)
        back = WaypointScript.from_text(script.to_text())
        np.testing.assert_array_equal(back.times, script.times)
        np.testing.assert_allclose(back.values, script.values, atol=1e-12)

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "wps.txt"
        path.write_text(WAYPOINT_TEXT)
        script = load_waypoints(path)
        assert script.duration == 20.0


class TestSetpointStream:
    TEXT = """\
0   1 1 1 0 0 0  position
2   0.3 0 0 0 0 0  velocity
5   2 2 1 0 0 90  position
"""

    def test_zero_order_hold(self):
        stream = SetpointStream.from_text(self.TEXT)
        assert stream.sample(0.0).kind == "position"
        assert stream.sample(1.99).kind == "position"
        assert stream.sample(2.0).kind == "velocity"
        sp = stream.sample(4.5)
        assert sp.kind == "velocity"
        assert sp.value[0] == pytest.approx(0.3)
        assert stream.sample(5.0).value[5] == pytest.approx(np.deg2rad(90.0))

    def test_before_first_holds_first(self):
        stream = SetpointStream.from_text(self.TEXT)
        sp = stream.sample(-1.0)
        assert sp.kind == "position"
        assert sp.value[0] == pytest.approx(1.0)

    def test_missing_kind_rejected(self):
        with pytest.raises(ValueError, match="kind"):
            SetpointStream.from_text("0 1 1 1 0 0 0\n")

    def test_bad_kind_rejected(self):
        with pytest.raises(ValueError, match="kind"):
            SetpointStream.from_text("0 1 1 1 0 0 0 thrust\n")

    def test_load_from_text_io(self):
        stream = load_setpoint_stream(io.StringIO(self.TEXT))
        assert len(stream.stamps) == 3
