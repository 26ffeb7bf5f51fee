from .model import JointLimits, RobotState, integrate_robot, wrap_yaw
from .pid import PidController, PidGains, Setpoint, pid_step
from .waypoints import SetpointStream, WaypointScript, load_setpoint_stream, load_waypoints, waypoint_setpoint

__all__ = [
    "JointLimits",
    "RobotState",
    "integrate_robot",
    "wrap_yaw",
    "PidController",
    "PidGains",
    "Setpoint",
    "pid_step",
    "SetpointStream",
    "WaypointScript",
    "load_setpoint_stream",
    "load_waypoints",
    "waypoint_setpoint",
]
