"""Static force/torque model of the everting ring robot.

The robot body is a helical loop spring meshed with a central hub. Two
concentrated masses ride on the sliding ring: the drive servo (m1) and the
steering module (m2). Their angular separation gamma is the single steering
input; it sets the direction and magnitude of the net radial friction force
that drives each motion period.

All functions here are pure and operate on value types; angles in radians,
SI units throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DegenerateForceCancellation

GRAVITY = 9.81  # m/s^2

# Resultant radial force below this magnitude counts as full cancellation.
FORCE_EPS = 1e-9  # N


@dataclass(frozen=True)
class RobotConfig:
    """Geometry, mass distribution and friction parameters of the robot.

    Defaults describe the 436 g desk prototype: a 266 mm loop of 37 coils
    (36 touching the ground), with the total mass split into a 0.336 kg
    base structure and two 50 g concentrated modules. The coil contact
    angles theta1/theta2 default to 0 (purely radial friction) and the
    inertia defaults to the hoop value (m_total * Rs^2).
    """

    m0: float = 0.336          # base structure mass, kg
    m1: float = 0.05           # drive-servo concentrated mass, kg
    m2: float = 0.05           # steering-module concentrated mass, kg
    contact_radius: float = 0.133   # center to ground-contact radius Rs, m
    coil_count: int = 37
    contact_coil_count: int = 36
    theta1: float = 0.0        # coil tangential-vs-radial angle at contact 1, rad
    theta2: float = 0.0        # same at contact 2, rad
    mu: float = 0.3            # sliding friction coefficient
    base_friction_torque: float = 0.0   # torque M0 from the uniform base, N*m
    inertia: float | None = None        # kg*m^2; None -> hoop approximation

    def __post_init__(self):
        if self.m0 <= 0 or self.m1 <= 0 or self.m2 <= 0:
            raise ValueError("masses must be strictly positive")
        if self.contact_radius <= 0:
            raise ValueError("contact_radius must be strictly positive")
        # mu == 0 is allowed: the frictionless case zeroes all contact forces.
        if self.mu < 0:
            raise ValueError("mu must be non-negative")
        if not (self.coil_count >= self.contact_coil_count >= 1):
            raise ValueError("need coil_count >= contact_coil_count >= 1")
        for th in (self.theta1, self.theta2):
            if not 0.0 <= th <= math.pi / 2:
                raise ValueError("theta1, theta2 must lie in [0, pi/2]")
        if self.inertia is None:
            object.__setattr__(
                self, "inertia", self.total_mass * self.contact_radius**2
            )
        if self.inertia <= 0:
            raise ValueError("inertia must be strictly positive")

    @property
    def total_mass(self) -> float:
        return self.m0 + self.m1 + self.m2


@dataclass(frozen=True)
class MassAngle:
    """Angle between the center-to-m1 and center-to-m2 lines, rad.

    Normalized into [0, 2*pi). Positive angles are measured
    counterclockwise from the reference (center-to-m1) direction.
    """

    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "gamma", self.gamma % (2 * math.pi))

    @classmethod
    def from_degrees(cls, deg: float) -> "MassAngle":
        return cls(math.radians(deg))

    @property
    def degrees(self) -> float:
        return math.degrees(self.gamma)


@dataclass(frozen=True)
class ForceState:
    """Sliding-friction increases under the two concentrated masses.

    f1, f2 are the force magnitudes; fIn/fIt are their radial and
    tangential components at the contact points (fIn = fI*cos thetaI,
    fIt = fI*sin thetaI).
    """

    f1: float
    f2: float
    f1n: float
    f2n: float
    f1t: float
    f2t: float

    def __post_init__(self):
        for name in ("f1", "f2", "f1n", "f2n", "f1t", "f2t"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @classmethod
    def from_radial(cls, f1n: float, f2n: float) -> "ForceState":
        """Purely radial forces (theta1 = theta2 = 0)."""
        return cls(f1=f1n, f2=f2n, f1n=f1n, f2n=f2n, f1t=0.0, f2t=0.0)


@dataclass(frozen=True)
class DynamicsOutput:
    """Per-period force/torque summary for one mass-angle setting."""

    delta_M: float   # friction torque increase, N*m
    F_d: float       # driving force magnitude, N
    beta: float      # moving direction relative to reference direction, rad
    a0: float        # initial linear acceleration, m/s^2
    alpha0: float    # initial angular acceleration, rad/s^2


def contact_forces(config: RobotConfig) -> ForceState:
    """Friction increases under the concentrated masses: f_i = mu*m_i*g.

    Each force decomposes at the contact point into a radial component
    f_i*cos(theta_i) and a tangential component f_i*sin(theta_i).
    """
    f1 = config.mu * config.m1 * GRAVITY
    f2 = config.mu * config.m2 * GRAVITY
    return ForceState(
        f1=f1,
        f2=f2,
        f1n=f1 * math.cos(config.theta1),
        f2n=f2 * math.cos(config.theta2),
        f1t=f1 * math.sin(config.theta1),
        f2t=f2 * math.sin(config.theta2),
    )


def friction_torque_increase(config: RobotConfig, forces: ForceState) -> float:
    """Torque increase from the tangential force components about the center:

        dM = Rs*f1*sin(theta1) + Rs*f2*sin(theta2)
    """
    return config.contact_radius * (forces.f1t + forces.f2t)


def moving_direction_beta(forces: ForceState, gamma: MassAngle) -> float:
    """Angle beta between the net radial force and the reference direction.

        cos(beta) = (f1n^2 + f1n*f2n*cos g)
                    / (f1n * sqrt(f1n^2 + f2n^2 + 2*f1n*f2n*cos g))

    The arccos argument is clamped to [-1, 1] against rounding. Returned
    beta lies in [0, pi], measured from the reference direction toward
    m2's side (the same rotational sense as gamma).

    Raises DegenerateForceCancellation when the resultant radial force
    vanishes (gamma = pi with f1n = f2n); the moving direction is then
    undefined and the caller must handle it.
    """
    if forces.f1n <= 0:
        raise ValueError("moving_direction_beta requires f1n > 0")
    f1n, f2n = forces.f1n, forces.f2n
    cg = math.cos(gamma.gamma)
    resultant_sq = f1n * f1n + f2n * f2n + 2 * f1n * f2n * cg
    if resultant_sq < FORCE_EPS * FORCE_EPS:
        raise DegenerateForceCancellation(
            f"radial forces cancel (f1n={f1n}, f2n={f2n}, "
            f"gamma={gamma.gamma} rad)"
        )
    arg = (f1n * f1n + f1n * f2n * cg) / (f1n * math.sqrt(resultant_sq))
    return math.acos(max(-1.0, min(1.0, arg)))


def driving_force(forces: ForceState, gamma: MassAngle, beta: float) -> float:
    """Driving force formed by the radial friction components:

        F_d = f1*cos(theta1)*cos(beta) + f2*cos(theta2)*cos(gamma - beta)

    With beta from moving_direction_beta this equals the Euclidean norm of
    the vector sum of the two radial force vectors. Both beta and gamma
    are unsigned separation angles measured toward m2's side; for
    gamma > pi the geometry is the mirror image, so gamma enters through
    its reflection 2*pi - gamma.
    """
    g = gamma.gamma
    if g > math.pi:
        g = 2 * math.pi - g
    return forces.f1n * math.cos(beta) + forces.f2n * math.cos(g - beta)


def initial_accelerations(
    config: RobotConfig, F_d: float, delta_M: float
) -> tuple[float, float]:
    """Initial linear and angular accelerations at the start of a period:

        a0 = F_d / (m0 + m1 + m2)
        alpha0 = (M0 + dM) / J
    """
    a0 = F_d / config.total_mass
    alpha0 = (config.base_friction_torque + delta_M) / config.inertia
    return a0, alpha0


def evaluate_dynamics(config: RobotConfig, gamma: MassAngle) -> DynamicsOutput:
    """Full force/torque evaluation for one mass-angle setting."""
    forces = contact_forces(config)
    delta_M = friction_torque_increase(config, forces)
    beta = moving_direction_beta(forces, gamma)
    F_d = driving_force(forces, gamma, beta)
    a0, alpha0 = initial_accelerations(config, F_d, delta_M)
    return DynamicsOutput(delta_M=delta_M, F_d=F_d, beta=beta, a0=a0, alpha0=alpha0)


def self_rotation_angle(drive_revolutions: float, coil_count: int) -> float:
    """Whole-body rotation geared to the everting drive.

    The loop spring and hub mesh like a worm-gear pair: one revolution of
    the driving coil advances the loop by one hub tooth, i.e. by
    2*pi/coil_count radians.
    """
    if coil_count < 1:
        raise ValueError("coil_count must be >= 1")
    return 2 * math.pi * drive_revolutions / coil_count
