"""Discrete periodic trajectory model.

One motion period is abstracted as a rigid-body hop: the center advances
by delta_x along a direction offset beta from the robot's reference
direction, and the reference direction itself turns by delta_phi. Repeated
hops place the center on a circle (the orbit); two radius estimators are
provided, the half-orbit sine-sum estimate and the exact chord
circumradius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import StraightLineMotion

# |delta_phi| below this is treated as straight-line motion (infinite radius).
STRAIGHT_EPS = 1e-6  # rad


def rotation_matrix(angle: float) -> tuple[float, float, float, float]:
    """Planar rotation matrix entries (c, -s, s, c) for a CCW angle."""
    c, s = math.cos(angle), math.sin(angle)
    return c, -s, s, c


def rotate(vec: tuple[float, float], angle: float) -> tuple[float, float]:
    """Rotate a 2-vector CCW by angle."""
    c, s = math.cos(angle), math.sin(angle)
    x, y = vec
    return (c * x - s * y, s * x + c * y)


@dataclass(frozen=True)
class MotionParams:
    """Descriptors of one locomotion period.

    delta_phi: signed turning angle per period, rad (sign = turn direction)
    delta_x:   travel distance per period, m (>= 0)
    period_T:  period duration, s (> 0)
    beta:      moving direction relative to the reference direction, rad
    """

    delta_phi: float
    delta_x: float
    period_T: float
    beta: float = 0.0

    def __post_init__(self):
        if self.delta_x < 0:
            raise ValueError("delta_x must be >= 0")
        if self.period_T <= 0:
            raise ValueError("period_T must be > 0")
        if not abs(self.delta_phi) < math.pi:
            raise ValueError("|delta_phi| must be < pi")

    @property
    def orbit_radius(self) -> float:
        """Exact circumradius of the periodic trajectory (inf if straight)."""
        try:
            return orbit_radius_exact(self)
        except StraightLineMotion:
            return math.inf


@dataclass(frozen=True)
class Pose:
    """Planar position plus the robot's reference direction (unit vector)."""

    x: float
    y: float
    ref_x: float = 1.0
    ref_y: float = 0.0

    def __post_init__(self):
        norm = math.hypot(self.ref_x, self.ref_y)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"reference_dir must be unit length, got {norm!r}")

    @classmethod
    def from_heading(cls, x: float, y: float, heading: float) -> "Pose":
        return cls(x, y, math.cos(heading), math.sin(heading))

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)

    @property
    def reference_dir(self) -> tuple[float, float]:
        return (self.ref_x, self.ref_y)

    @property
    def heading(self) -> float:
        """Angle of the reference direction, rad in (-pi, pi]."""
        return math.atan2(self.ref_y, self.ref_x)


@dataclass(frozen=True)
class TrajectorySample:
    k: int
    t: float
    pose: Pose


@dataclass
class Trajectory:
    """Ordered per-period samples; k contiguous from 0, t = k*period_T."""

    samples: list[TrajectorySample] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def __getitem__(self, i):
        return self.samples[i]

    def positions(self) -> list[tuple[float, float]]:
        return [s.pose.position for s in self.samples]

    def to_rows(self) -> list[tuple[int, float, float, float, float]]:
        """(k, t, x, y, heading) rows for CSV export."""
        return [
            (s.k, s.t, s.pose.x, s.pose.y, s.pose.heading) for s in self.samples
        ]

    def to_json_obj(self) -> list[dict]:
        return [
            {"k": s.k, "t": s.t, "x": s.pose.x, "y": s.pose.y,
             "heading": s.pose.heading}
            for s in self.samples
        ]


def step_displacement(params: MotionParams, ref_dir: tuple[float, float]) -> tuple[float, float]:
    """Intended center displacement for one period given the current
    reference direction: delta_x * R(beta) * ref_dir."""
    ux, uy = rotate(ref_dir, params.beta)
    return (params.delta_x * ux, params.delta_x * uy)


def advance_pose(pose: Pose, params: MotionParams) -> Pose:
    """One free-space period: move by the intended displacement, turn the
    reference direction by delta_phi."""
    dx, dy = step_displacement(params, pose.reference_dir)
    rx, ry = rotate(pose.reference_dir, params.delta_phi)
    # renormalize so round-off cannot drift the unit-length invariant
    n = math.hypot(rx, ry)
    return Pose(pose.x + dx, pose.y + dy, rx / n, ry / n)


def iterate_trajectory(params: MotionParams, start: Pose, num_periods: int) -> Trajectory:
    """Iterate the per-period recurrence

        p(k+1) = p(k) + delta_x * R(delta_phi)^k * R(beta) * e0

    where e0 is the reference direction at the start pose. The reference
    direction after k periods is R(delta_phi)^k * e0 and timestamps are
    k * period_T.
    """
    if num_periods < 0:
        raise ValueError("num_periods must be >= 0")
    samples = [TrajectorySample(0, 0.0, start)]
    pose = start
    for k in range(1, num_periods + 1):
        pose = advance_pose(pose, params)
        samples.append(TrajectorySample(k, k * params.period_T, pose))
    return Trajectory(samples)


def _require_turning(params: MotionParams) -> float:
    dphi = abs(params.delta_phi)
    if dphi < STRAIGHT_EPS:
        raise StraightLineMotion(
            f"|delta_phi| = {dphi!r} rad below {STRAIGHT_EPS}; orbit radius is infinite"
        )
    return dphi


def heading_after(start_heading: float, delta_phi: float, k: int) -> float:
    """Heading angle after k periods: the reference direction turns by
    delta_phi every period regardless of anything else."""
    return start_heading + k * delta_phi


def half_orbit_sine_sum(delta_phi: float) -> float:
    """sum_{k=1..floor(n/2)} sin(k*|delta_phi|) with n = 2*pi/|delta_phi|
    periods per orbit. Shared by the radius estimate and its inversion."""
    dphi = abs(delta_phi)
    if dphi < STRAIGHT_EPS:
        raise StraightLineMotion(
            f"|delta_phi| = {dphi!r} rad below {STRAIGHT_EPS}; orbit radius is infinite"
        )
    n = 2 * math.pi / dphi
    half = math.floor(n / 2)
    return sum(math.sin(k * dphi) for k in range(1, half + 1))


def orbit_radius_estimate(params: MotionParams) -> float:
    """Half-orbit sine-sum estimate of the orbit radius.

    With n = 2*pi/|delta_phi| periods per orbit,

        R_o ~= (1/2) * sum_{k=1..floor(n/2)} delta_x * sin(k*|delta_phi|)

    i.e. half the diameter accumulated by projecting the first half-orbit
    of steps onto the crossing direction. Underestimates the exact
    circumradius by a factor cos(|delta_phi|/2) for integer n.
    """
    return 0.5 * params.delta_x * half_orbit_sine_sum(params.delta_phi)


def orbit_radius_exact(params: MotionParams) -> float:
    """Exact circumradius of the periodic point set: the steps are chords
    of length delta_x subtending |delta_phi|, so R = delta_x/(2 sin(|delta_phi|/2))."""
    dphi = _require_turning(params)
    return params.delta_x / (2 * math.sin(dphi / 2))


def max_periods(total_time: float, period_T: float) -> int:
    """Number of whole periods that fit in a total motion time."""
    if period_T <= 0:
        raise ValueError("period_T must be > 0")
    return math.floor(total_time / period_T)


def params_from_accelerations(
    a0: float,
    alpha0: float,
    release_time: float,
    beta: float = 0.0,
    period_T: float | None = None,
) -> MotionParams:
    """Constant-acceleration heuristic mapping accelerations to per-period
    motion (experimental).

        delta_x = a0*release_time^2/2,  delta_phi = alpha0*release_time^2/2

    This mapping is NOT calibrated against the robot; canonical
    predictions come from curves fitted to observed tracks. Kept for
    what-if exploration only.
    """
    if release_time <= 0:
        raise ValueError("release_time must be > 0")
    return MotionParams(
        delta_phi=0.5 * alpha0 * release_time**2,
        delta_x=0.5 * a0 * release_time**2,
        period_T=period_T if period_T is not None else release_time,
        beta=beta,
    )
