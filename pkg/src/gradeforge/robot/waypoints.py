"""Setpoint sources: scripted waypoint lists and external streams.

File format, one record per line, blank lines and ``#`` comments
ignored:

    waypoints:  t x y z roll pitch yaw          (seconds, meters, degrees)
    streams:    t x y z roll pitch yaw kind     (kind: position|velocity)

Waypoint scripts produce position setpoints by linear interpolation
with yaw taken along the shortest arc; streams are sampled with a
zero-order hold on the record stamp.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .model import wrap_yaw, wrap_angle_error
from .pid import SETPOINT_KINDS, Setpoint

ANGLE_COLS = slice(3, 6)


def _parse_rows(text: str, n_fields: int, what: str):
    rows = []
    extras = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        tokens = body.split()
        if len(tokens) < n_fields:
            raise ValueError(f"{what} line {lineno}: expected {n_fields} fields, got {len(tokens)}")
        try:
            rows.append([float(tok) for tok in tokens[:n_fields]])
        except ValueError as exc:
            raise ValueError(f"{what} line {lineno}: {exc}") from None
        extras.append(tokens[n_fields:])
    return np.asarray(rows, dtype=float).reshape(-1, n_fields), extras


@dataclass
class WaypointScript:
    """Timed joint-space targets; angles stored in radians."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float).reshape(-1)
        self.values = np.asarray(self.values, dtype=float).reshape(-1, 6)
        if self.times.size == 0:
            raise ValueError("waypoint script is empty")
        if self.times.size != self.values.shape[0]:
            raise ValueError("times and values length mismatch")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("waypoint times must be strictly increasing")
        if not (np.all(np.isfinite(self.times)) and np.all(np.isfinite(self.values))):
            raise ValueError("waypoints must be finite")

    @property
    def duration(self) -> float:
        return float(self.times[-1])

    @staticmethod
    def from_text(text: str) -> "WaypointScript":
        rows, _ = _parse_rows(text, 7, "waypoint")
        values = rows[:, 1:7].copy()
        values[:, ANGLE_COLS] = np.deg2rad(values[:, ANGLE_COLS])
        return WaypointScript(rows[:, 0], values)

    def to_text(self) -> str:
        rows_deg = self.values.copy()
        rows_deg[:, ANGLE_COLS] = np.rad2deg(rows_deg[:, ANGLE_COLS])
        lines = ["# t x y z roll pitch yaw"]
        for t, row in zip(self.times, rows_deg):
            lines.append(" ".join(repr(float(v)) for v in (t, *row)))
        return "\n".join(lines) + "\n"


def waypoint_setpoint(script, t: float) -> Setpoint:
    """Position setpoint at time t: lerp between bracketing waypoints.

    Holds the first waypoint before the script starts and the last one
    after it ends.  Yaw moves along the shortest arc per segment.
    """
    if isinstance(script, WaypointScript):
        times, values = script.times, script.values
    else:
        pairs = list(script)
        if not pairs:
            raise ValueError("waypoint script is empty")
        times = np.asarray([p[0] for p in pairs], dtype=float)
        values = np.asarray([np.asarray(p[1], dtype=float).reshape(6) for p in pairs])
        if np.any(np.diff(times) <= 0):
            raise ValueError("waypoint times must be strictly increasing")

    if t <= times[0]:
        value = values[0].copy()
    elif t >= times[-1]:
        value = values[-1].copy()
    else:
        hi = int(np.searchsorted(times, t, side="right"))
        lo = hi - 1
        frac = (t - times[lo]) / (times[hi] - times[lo])
        value = values[lo] + frac * (values[hi] - values[lo])
        dyaw = wrap_angle_error(values[hi, 5] - values[lo, 5])
        value[5] = values[lo, 5] + frac * dyaw
    value[5] = wrap_yaw(value[5])
    return Setpoint("position", value, stamp=float(t))


@dataclass
class SetpointStream:
    """Stamped setpoint records sampled with a zero-order hold."""

    stamps: np.ndarray
    values: np.ndarray
    kinds: list

    def __post_init__(self) -> None:
        self.stamps = np.asarray(self.stamps, dtype=float).reshape(-1)
        self.values = np.asarray(self.values, dtype=float).reshape(-1, 6)
        if self.stamps.size == 0:
            raise ValueError("setpoint stream is empty")
        if self.stamps.size != self.values.shape[0] or self.stamps.size != len(self.kinds):
            raise ValueError("stream field lengths mismatch")
        if np.any(np.diff(self.stamps) < 0):
            raise ValueError("stream stamps must be non-decreasing")
        for kind in self.kinds:
            if kind not in SETPOINT_KINDS:
                raise ValueError(f"unknown setpoint kind {kind!r}")

    def sample(self, t: float) -> Setpoint:
        """Latest record with stamp <= t (first record before that)."""
        idx = int(np.searchsorted(self.stamps, t, side="right")) - 1
        idx = max(idx, 0)
        return Setpoint(self.kinds[idx], self.values[idx].copy(), stamp=float(self.stamps[idx]))

    @staticmethod
    def from_text(text: str) -> "SetpointStream":
        rows, extras = _parse_rows(text, 7, "setpoint")
        kinds = []
        for i, extra in enumerate(extras):
            if not extra:
                raise ValueError(f"setpoint record {i}: missing kind field")
            kinds.append(extra[0])
        values = rows[:, 1:7].copy()
        values[:, ANGLE_COLS] = np.deg2rad(values[:, ANGLE_COLS])
        return SetpointStream(rows[:, 0], values, kinds)


def load_waypoints(path) -> WaypointScript:
    if isinstance(path, io.TextIOBase):
        return WaypointScript.from_text(path.read())
    with open(path, "r", encoding="ascii") as fh:
        return WaypointScript.from_text(fh.read())


def load_setpoint_stream(path) -> SetpointStream:
    if isinstance(path, io.TextIOBase):
        return SetpointStream.from_text(path.read())
    with open(path, "r", encoding="ascii") as fh:
        return SetpointStream.from_text(fh.read())
