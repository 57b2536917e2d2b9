"""Walled-arena simulation of the periodic motion model.

The robot is a rigid disc stepping once per period. On wall contact the
displacement component into the wall is removed (the perpendicular
velocity ceases) while the tangential component slides along the surface;
the body keeps rotating by delta_phi every period no matter what. Those
two rules alone reproduce the obstacle-avoidance and boundary-following
behaviors observed on the physical robot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .estimation import ParamCurves, predict_at_gamma
from .kinematics import MotionParams, Pose, advance_pose, rotate, step_displacement

PENETRATION_TOL = 1e-6   # m
BLOCKED_EPS = 1e-12      # m; applied displacement below this counts as blocked

# cyclic CCW order of the boundary walls, used by the lap verdict
BOUNDARY_ORDER = ("right", "top", "left", "bottom")


@dataclass(frozen=True)
class Wall:
    id: str
    p1: tuple[float, float]
    p2: tuple[float, float]

    def closest_point(self, p: tuple[float, float]) -> tuple[float, float]:
        ax, ay = self.p1
        bx, by = self.p2
        abx, aby = bx - ax, by - ay
        denom = abx * abx + aby * aby
        if denom == 0:
            return self.p1
        s = ((p[0] - ax) * abx + (p[1] - ay) * aby) / denom
        s = max(0.0, min(1.0, s))
        return (ax + s * abx, ay + s * aby)

    def distance(self, p: tuple[float, float]) -> float:
        cx, cy = self.closest_point(p)
        return math.hypot(p[0] - cx, p[1] - cy)

    def normal_toward(self, p: tuple[float, float]) -> tuple[float, float]:
        """Unit normal from the wall toward p (the side the disc is on)."""
        cx, cy = self.closest_point(p)
        nx, ny = p[0] - cx, p[1] - cy
        d = math.hypot(nx, ny)
        if d < 1e-15:
            # center exactly on the wall line; fall back to a segment normal
            abx, aby = self.p2[0] - self.p1[0], self.p2[1] - self.p1[1]
            ln = math.hypot(abx, aby) or 1.0
            return (-aby / ln, abx / ln)
        return (nx / d, ny / d)


def _segment_distance(a1, a2, b1, b2) -> float:
    """Distance between segments [a1,a2] and [b1,b2]."""
    def orient(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    d1, d2 = orient(b1, b2, a1), orient(b1, b2, a2)
    d3, d4 = orient(a1, a2, b1), orient(a1, a2, b2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
        return 0.0  # proper intersection
    seg_a = Wall("", a1, a2)
    seg_b = Wall("", b1, b2)
    return min(
        seg_b.distance(a1), seg_b.distance(a2),
        seg_a.distance(b1), seg_a.distance(b2),
    )


@dataclass(frozen=True)
class Arena:
    """Axis-aligned rectangular boundary plus optional interior wall segments."""

    boundary: tuple[float, float, float, float]  # xmin, ymin, xmax, ymax
    extra_walls: tuple[Wall, ...] = ()
    robot_radius: float = 0.133

    def __post_init__(self):
        xmin, ymin, xmax, ymax = self.boundary
        if not (xmax - xmin > 2 * self.robot_radius
                and ymax - ymin > 2 * self.robot_radius):
            raise ValueError("boundary must exceed the robot diameter")

    @property
    def walls(self) -> tuple[Wall, ...]:
        xmin, ymin, xmax, ymax = self.boundary
        return (
            Wall("left", (xmin, ymin), (xmin, ymax)),
            Wall("right", (xmax, ymin), (xmax, ymax)),
            Wall("bottom", (xmin, ymin), (xmax, ymin)),
            Wall("top", (xmin, ymax), (xmax, ymax)),
        ) + self.extra_walls

    def clearance(self, wall: Wall, p: tuple[float, float]) -> float:
        return wall.distance(p) - self.robot_radius


@dataclass(frozen=True)
class SimState:
    pose: Pose
    period_index: int = 0
    sim_time: float = 0.0
    gamma: float = 0.0
    contact: tuple[str, tuple[float, float]] | None = None  # wall id, normal
    contact_sequence: tuple[str, ...] = ()  # consecutive-distinct contact ids
    stall_count: int = 0
    stuck: bool = False


def set_gamma(state: SimState, gamma: float, curves: ParamCurves) -> SimState:
    """Change the mass-distribution angle. Takes effect from the next
    period: steppers resolve MotionParams from (curves, state.gamma) at
    each period start, so the in-flight period is never affected."""
    if curves is None:
        raise ValueError("set_gamma requires fitted curves")
    return replace(state, gamma=gamma % (2 * math.pi))


def params_for(
    state: SimState,
    curves: ParamCurves | None,
    fixed: MotionParams | None,
) -> MotionParams:
    """Motion parameters governing the next period of this state."""
    if curves is not None:
        return predict_at_gamma(curves, state.gamma)
    if fixed is None:
        raise ValueError("need either curves or fixed MotionParams")
    return fixed


def step_period(
    state: SimState,
    params: MotionParams,
    arena: Arena,
    substeps: int = 8,
    slide_efficiency: float = 1.0,
    penetration_tol: float = PENETRATION_TOL,
    stall_limit: int = 50,
) -> SimState:
    """Advance one period inside the arena.

    The intended free-space displacement is swept in substeps; whenever a
    substep would cross a wall, its component along the wall normal is
    removed and the tangential remainder is applied scaled by
    slide_efficiency. At a corner (two active walls) only displacement
    into the free cone survives. The heading always advances by delta_phi.
    """
    pose = state.pose
    intended = step_displacement(params, pose.reference_dir)
    start = (pose.x, pose.y)
    walls = arena.walls

    # fast path: the swept disc stays clear of every wall -> apply the
    # full displacement in one addition (bit-identical to free space).
    # Sliding can land anywhere within one step length of the sweep, so
    # the near filter is inflated by the step length.
    target = (start[0] + intended[0], start[1] + intended[1])
    reach = arena.robot_radius + params.delta_x + penetration_tol
    near = [
        w for w in walls
        if _segment_distance(start, target, w.p1, w.p2) <= reach
    ]
    if not near:
        new_pose = advance_pose(pose, params)
        pos = (new_pose.x, new_pose.y)
    else:
        pos = start
        sub = (intended[0] / substeps, intended[1] / substeps)
        for _ in range(substeps):
            pos = _resolve_substep(pos, sub, near, arena, slide_efficiency,
                                   penetration_tol)
        rx, ry = rotate(pose.reference_dir, params.delta_phi)
        n = math.hypot(rx, ry)
        new_pose = Pose(pos[0], pos[1], rx / n, ry / n)

    applied = math.hypot(pos[0] - start[0], pos[1] - start[1])
    blocked = params.delta_x > 0 and applied < BLOCKED_EPS
    stall_count = state.stall_count + 1 if blocked else 0

    contact = None
    best = math.inf
    for w in walls:
        c = arena.clearance(w, pos)
        if c <= penetration_tol and c < best:
            best = c
            contact = (w.id, w.normal_toward(pos))
    seq = state.contact_sequence
    if contact is not None and (not seq or seq[-1] != contact[0]):
        seq = seq + (contact[0],)

    return SimState(
        pose=new_pose,
        period_index=state.period_index + 1,
        sim_time=state.sim_time + params.period_T,
        gamma=state.gamma,
        contact=contact,
        contact_sequence=seq,
        stall_count=stall_count,
        stuck=state.stuck or stall_count >= stall_limit,
    )


def _resolve_substep(pos, sub, walls, arena, slide_efficiency, tol):
    """Apply one sub-displacement with wall projection and a positional
    clamp against residual penetration."""
    d = sub
    blocked_ids: set[int] = set()
    for _ in range(3):
        target = (pos[0] + d[0], pos[1] + d[1])
        hit = None
        for i, w in enumerate(walls):
            if i in blocked_ids:
                continue
            if arena.clearance(w, target) < -tol:
                n = w.normal_toward(pos)
                dn = d[0] * n[0] + d[1] * n[1]
                if dn < 0:
                    hit = (i, n, dn)
                    break
        if hit is None:
            break
        i, n, dn = hit
        # free approach up to the surface, then the perpendicular motion
        # ceases; the tangential remainder slides (scaled)
        gap = max(0.0, arena.clearance(walls[i], pos))
        approach = min(-dn, gap)
        d = ((d[0] - dn * n[0]) * slide_efficiency - approach * n[0],
             (d[1] - dn * n[1]) * slide_efficiency - approach * n[1])
        blocked_ids.add(i)
    pos = (pos[0] + d[0], pos[1] + d[1])
    # clamp any residual penetration back to the surface
    for w in walls:
        c = arena.clearance(w, pos)
        if c < 0:
            n = w.normal_toward(pos)
            pos = (pos[0] - c * n[0], pos[1] - c * n[1])
    return pos


# ---------------------------------------------------------------------------
# scenarios

FREE_EXTENT = 1e6  # half-size of the effectively unbounded arena

_SCENARIO_ALIASES = {
    "free": "free",
    "avoidance": "avoidance",
    "single_wall": "avoidance",
    "boundary_lap": "boundary_lap",
    "square": "boundary_lap",
}


def canonical_scenario(name: str) -> str:
    try:
        return _SCENARIO_ALIASES[name]
    except KeyError:
        raise ValueError(f"unknown scenario {name!r}") from None


def build_scenario(
    name: str,
    square_side: float = 0.6,
    wall_offset: float = 0.1,
    robot_radius: float = 0.133,
    gamma: float = 0.0,
    start: tuple[float, float, float] | None = None,  # x, y, heading rad
) -> tuple[Arena, SimState]:
    """Arena geometry and initial state for the named scenario.

    free:         unbounded flat surface, no walls in reach.
    avoidance:    one interior wall wall_offset ahead of the robot.
    boundary_lap: square arena of the given side, robot at the center.
    """
    if name == "free":
        arena = Arena(boundary=(-FREE_EXTENT, -FREE_EXTENT,
                                FREE_EXTENT, FREE_EXTENT),
                      robot_radius=robot_radius)
        default_start = (0.0, 0.0, 0.0)
    elif name in ("avoidance", "single_wall"):
        wall_x = wall_offset + robot_radius
        wall = Wall("obstacle", (wall_x, -2.0), (wall_x, 2.0))
        arena = Arena(boundary=(-50.0, -50.0, 50.0, 50.0),
                      extra_walls=(wall,), robot_radius=robot_radius)
        default_start = (0.0, 0.0, 0.0)
    elif name in ("boundary_lap", "square"):
        arena = Arena(boundary=(0.0, 0.0, square_side, square_side),
                      robot_radius=robot_radius)
        default_start = (square_side / 2, square_side / 2, 0.0)
    else:
        raise ValueError(f"unknown scenario {name!r}")
    x, y, heading = start if start is not None else default_start
    state = SimState(pose=Pose.from_heading(x, y, heading), gamma=gamma)
    return arena, state


@dataclass
class SimLog:
    scenario: str
    states: list[SimState] = field(default_factory=list)
    verdict: dict = field(default_factory=dict)

    def to_rows(self) -> list[tuple]:
        """(k, t, x, y, heading, gamma, contact_wall) rows."""
        return [
            (s.period_index, s.sim_time, s.pose.x, s.pose.y, s.pose.heading,
             s.gamma, s.contact[0] if s.contact else "")
            for s in self.states
        ]


def write_simlog_csv(path, log: SimLog, header_comments=None) -> None:
    lines = [f"# {c}" for c in (header_comments or [])]
    lines.append("k,t,x,y,heading,gamma,contact_wall")
    for k, t, x, y, heading, gamma, wall in log.to_rows():
        lines.append(f"{k},{t!r},{x!r},{y!r},{heading!r},{gamma!r},{wall}")
    Path(path).write_text("\n".join(lines) + "\n")


def walls_in_spatial_order(contact_sequence: tuple[str, ...]) -> bool:
    """True when four consecutive distinct boundary contacts cover all
    four walls walking consistently around the rectangle."""
    seq = [w for w in contact_sequence if w in BOUNDARY_ORDER]
    for i in range(len(seq) - 3):
        window = seq[i:i + 4]
        if set(window) != set(BOUNDARY_ORDER):
            continue
        steps = [
            (BOUNDARY_ORDER.index(window[j + 1])
             - BOUNDARY_ORDER.index(window[j])) % 4
            for j in range(3)
        ]
        if all(st == 1 for st in steps) or all(st == 3 for st in steps):
            return True
    return False


def lap_complete(
    first_contact: SimState | None, current: SimState, lap_tol: float
) -> dict | None:
    """Boundary-lap check: all four boundary walls contacted in spatial
    order, then back within lap_tol of the first contact point."""
    if first_contact is None:
        return None
    if not walls_in_spatial_order(current.contact_sequence):
        return None
    dist = math.hypot(current.pose.x - first_contact.pose.x,
                      current.pose.y - first_contact.pose.y)
    if dist <= lap_tol:
        return {
            "kind": "boundary_lap",
            "ok": True,
            "first_contact_k": first_contact.period_index,
            "lap_k": current.period_index,
            "closure_dist": dist,
        }
    return None


def run_scenario(
    name: str,
    arena: Arena,
    start: SimState,
    max_periods: int,
    params: MotionParams | None = None,
    curves: ParamCurves | None = None,
    substeps: int = 8,
    slide_efficiency: float = 1.0,
    penetration_tol: float = PENETRATION_TOL,
    stall_limit: int = 50,
    lap_tol: float = 0.05,
) -> SimLog:
    """Run a scenario to its verdict (or max_periods).

    Verdicts: "avoidance" succeeds when the robot detaches after its first
    wall contact; "boundary_lap" when all four walls were contacted in
    spatial order and the robot returned within lap_tol of the first
    contact point; "free" just runs out the clock. A stuck robot (fully
    blocked stall_limit periods in a row) is recorded, not fatal.
    """
    if max_periods < 1:
        raise ValueError("max_periods must be >= 1")
    log = SimLog(scenario=name, states=[start])
    state = start
    first_contact = None
    for _ in range(max_periods):
        p = params_for(state, curves, params)
        state = step_period(
            state, p, arena,
            substeps=substeps, slide_efficiency=slide_efficiency,
            penetration_tol=penetration_tol, stall_limit=stall_limit,
        )
        log.states.append(state)
        if first_contact is None and state.contact is not None:
            first_contact = state
        if name == "avoidance" and first_contact is not None \
                and state.contact is None:
            log.verdict = {
                "kind": "avoidance",
                "ok": True,
                "first_contact_k": first_contact.period_index,
                "detach_k": state.period_index,
            }
            return log
        if name == "boundary_lap":
            done = lap_complete(first_contact, state, lap_tol)
            if done is not None:
                log.verdict = done
                return log
    log.verdict = {
        "kind": name,
        "ok": name == "free",
        "stuck": state.stuck,
        "first_contact_k":
            first_contact.period_index if first_contact else None,
    }
    return log
