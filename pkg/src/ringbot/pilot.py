"""Scripted steering policy: follow a polyline using only gamma changes.

Stands in for the human operator in recorded steering demos. The policy
assumes the bundled demo curves' half-angle law (moving direction =
gamma/2 relative to the heading): each period it aims at a lookahead
point on the active leg and requests the gamma whose predicted moving
direction points there. Courses more than a half-turn clockwise are
unreachable in one hop, so the pilot commands the strongest
counterclockwise turn until the target comes around.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

TWO_PI = 2 * math.pi


@dataclass
class LinePilot:
    """Steers along a polyline of waypoints [(x, y), ...]."""

    waypoints: list[tuple[float, float]]
    lookahead: float = 0.15
    leg: int = field(default=0, init=False)

    def __post_init__(self):
        if len(self.waypoints) < 2:
            raise ValueError("need at least two waypoints")

    def _leg_vectors(self):
        a = self.waypoints[self.leg]
        b = self.waypoints[self.leg + 1]
        ux, uy = b[0] - a[0], b[1] - a[1]
        length = math.hypot(ux, uy)
        return a, b, (ux / length, uy / length), length

    def done(self) -> bool:
        return self.leg >= len(self.waypoints) - 1

    def cross_track(self, x: float, y: float) -> float:
        """Signed distance to the active leg line (positive to its left)."""
        a, _, u, _ = self._leg_vectors()
        return u[0] * (y - a[1]) - u[1] * (x - a[0])

    def gamma_for(self, x: float, y: float, heading: float) -> float | None:
        """Gamma (radians) to request for the next period; None when the
        final waypoint has been reached."""
        while not self.done():
            a, b, u, length = self._leg_vectors()
            s = (x - a[0]) * u[0] + (y - a[1]) * u[1]
            if s < length - 1e-9:
                break
            self.leg += 1
        if self.done():
            return None
        a, _, u, length = self._leg_vectors()
        s = (x - a[0]) * u[0] + (y - a[1]) * u[1]
        target_s = min(s + self.lookahead, length)
        tx = a[0] + target_s * u[0]
        ty = a[1] + target_s * u[1]
        course = math.atan2(ty - y, tx - x)
        offset = (course - heading) % TWO_PI
        if offset >= math.pi:
            # not reachable this period; swing counterclockwise hard
            return 1.5 * math.pi
        return 2.0 * offset
