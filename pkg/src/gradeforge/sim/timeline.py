"""Shared animation clock with ping-pong looping.

Assets keep moving for the whole run by playing forward for one period and
then in reverse, so a track never jumps back to its first frame. All assets
in a scene share one period, taken from the average duration of their
tracks, which keeps the reversal synchronized across the scene.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class Timeline:
    #: Shared loop period in seconds; forward for one period, then reversed.
    track_duration: float

    def __post_init__(self) -> None:
        if self.track_duration < 0.0:
            raise ValueError("track_duration must be non-negative")

    def phase(self, t: float) -> float:
        """Map simulation time onto the forward-backward track phase."""
        d = self.track_duration
        if d <= 0.0:
            return 0.0
        u = t % (2.0 * d)
        return u if u <= d else 2.0 * d - u

    @staticmethod
    def from_tracks(tracks) -> "Timeline":
        durations = [float(t.duration) for t in tracks]
        if not durations:
            return Timeline(0.0)
        return Timeline(sum(durations) / len(durations))


def sample_timeline(timeline: Timeline, track, t: float):
    """Sample `track` at the ping-pong phase of simulation time `t`.

    Phases beyond the track's own range clamp to its last keyframe, so a
    short track holds still while longer ones finish the shared period.
    """
    return track.sample(timeline.phase(t))
