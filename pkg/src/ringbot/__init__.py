"""Simulator and analysis toolkit for a friction-driven everting ring robot."""

__version__ = "0.1.0"

from .errors import (
    CollinearPoints,
    DegenerateForceCancellation,
    EmptyFile,
    InsufficientData,
    MalformedHeader,
    NonMonotonicTime,
    NoPeriodsFound,
    RingbotError,
    StraightLineMotion,
)
from .kinematics import MotionParams, Pose, Trajectory, iterate_trajectory
from .model import DynamicsOutput, ForceState, MassAngle, RobotConfig

__all__ = [
    "__version__",
    "CollinearPoints",
    "DegenerateForceCancellation",
    "DynamicsOutput",
    "EmptyFile",
    "ForceState",
    "InsufficientData",
    "MalformedHeader",
    "MassAngle",
    "MotionParams",
    "NonMonotonicTime",
    "NoPeriodsFound",
    "Pose",
    "RingbotError",
    "RobotConfig",
    "StraightLineMotion",
    "Trajectory",
    "iterate_trajectory",
]
