"""Rigid-body pose math shared across the simulator.

Quaternions are stored as ``(x, y, z, w)`` arrays, matching the scipy
convention and the plain-text trajectory format used by the evaluation
tools.  Euler angles follow the aerospace convention: ``R = Rz(yaw) @
Ry(pitch) @ Rx(roll)`` with angles in radians unless a function name
says otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

IDENTITY_QUAT = np.array([0.0, 0.0, 0.0, 1.0])


def quat_normalize(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    n = np.linalg.norm(q, axis=-1, keepdims=True)
    return q / n


def quat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product a*b for xyzw quaternions, broadcasting over leading axes."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ax, ay, az, aw = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bx, by, bz, bw = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
            aw * bw - ax * bx - ay * by - az * bz,
        ],
        axis=-1,
    )


def quat_conjugate(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    out = q.copy()
    out[..., :3] *= -1.0
    return out


def quat_rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate vectors v by quaternions q (both broadcastable)."""
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    u = q[..., :3]
    w = q[..., 3:4]
    uv = np.cross(u, v)
    return v + 2.0 * (w * uv + np.cross(u, uv))


def quat_from_euler(roll: float, pitch: float, yaw: float) -> np.ndarray:
    return Rotation.from_euler("xyz", [roll, pitch, yaw]).as_quat()


def euler_from_quat(q: np.ndarray) -> np.ndarray:
    """Return (roll, pitch, yaw) in radians."""
    return Rotation.from_quat(np.asarray(q, dtype=float)).as_euler("xyz")


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    return Rotation.from_quat(np.asarray(q, dtype=float)).as_matrix()


def matrix_to_quat(m: np.ndarray) -> np.ndarray:
    return Rotation.from_matrix(np.asarray(m, dtype=float)).as_quat()


def rotvec_between(q0: np.ndarray, q1: np.ndarray) -> np.ndarray:
    """Rotation vector taking q0 to q1, expressed in the q0 frame."""
    r0 = Rotation.from_quat(np.asarray(q0, dtype=float))
    r1 = Rotation.from_quat(np.asarray(q1, dtype=float))
    return (r0.inv() * r1).as_rotvec()


def quat_slerp(q0: np.ndarray, q1: np.ndarray, u: float | np.ndarray) -> np.ndarray:
    """Spherical interpolation; shortest arc, deterministic for repeated calls."""
    q0 = quat_normalize(q0)
    q1 = quat_normalize(q1)
    u = np.asarray(u, dtype=float)[..., None]
    dot = np.sum(q0 * q1, axis=-1, keepdims=True)
    q1 = np.where(dot < 0.0, -q1, q1)
    dot = np.abs(dot)
    # near-parallel quaternions fall back to a normalized lerp
    close = dot > 0.9995
    theta = np.arccos(np.clip(dot, -1.0, 1.0))
    sin_theta = np.sin(theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        w0 = np.where(close, 1.0 - u, np.sin((1.0 - u) * theta) / sin_theta)
        w1 = np.where(close, u, np.sin(u * theta) / sin_theta)
    return quat_normalize(w0 * q0 + w1 * q1)


@dataclass
class Pose:
    """Rigid transform world_T_local: rotation then translation."""

    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    quaternion: np.ndarray = field(default_factory=lambda: IDENTITY_QUAT.copy())

    def __post_init__(self) -> None:
        self.position = np.asarray(self.position, dtype=float).reshape(3)
        self.quaternion = quat_normalize(np.asarray(self.quaternion, dtype=float).reshape(4))

    @staticmethod
    def identity() -> "Pose":
        return Pose()

    @staticmethod
    def from_xyz_rpy(x: float, y: float, z: float, roll: float = 0.0, pitch: float = 0.0, yaw: float = 0.0) -> "Pose":
        return Pose(np.array([x, y, z], dtype=float), quat_from_euler(roll, pitch, yaw))

    @staticmethod
    def from_matrix(m: np.ndarray) -> "Pose":
        m = np.asarray(m, dtype=float)
        return Pose(m[:3, 3], matrix_to_quat(m[:3, :3]))

    def matrix(self) -> np.ndarray:
        out = np.eye(4)
        out[:3, :3] = quat_to_matrix(self.quaternion)
        out[:3, 3] = self.position
        return out

    def rotation(self) -> np.ndarray:
        return quat_to_matrix(self.quaternion)

    def compose(self, other: "Pose") -> "Pose":
        """self followed by other in self's local frame (matrix product self @ other)."""
        return Pose(
            self.position + quat_rotate(self.quaternion, other.position),
            quat_mul(self.quaternion, other.quaternion),
        )

    def inverse(self) -> "Pose":
        qinv = quat_conjugate(self.quaternion)
        return Pose(-quat_rotate(qinv, self.position), qinv)

    def transform_points(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return quat_rotate(self.quaternion, pts) + self.position

    def interpolate(self, other: "Pose", u: float) -> "Pose":
        return Pose(
            (1.0 - u) * self.position + u * other.position,
            quat_slerp(self.quaternion, other.quaternion, u),
        )
