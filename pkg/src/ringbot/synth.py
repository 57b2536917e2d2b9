"""Synthetic track generation for tests, demos and pipeline dry runs.

TRUTH_CURVES is a hand-picked but physically plausible gamma-dependence:
turning flips sign and vanishes when the steering module sits opposite the
drive servo, travel per period shrinks as the masses separate, the period
peaks at the opposed position, and the moving direction follows the
equal-load half-angle law (beta = gamma/2). All four laws lie exactly
inside the default fit families, so noiseless pipelines round-trip.

All randomness flows through one caller-supplied numpy Generator.
"""

from __future__ import annotations

import math

import numpy as np

from .estimation import CurveFit1D, ParamCurves, predict_at_gamma
from .kinematics import MotionParams, Pose, Trajectory, iterate_trajectory
from .tracks import MarkerTrack, track_from_trajectory

TRUTH_CURVES = ParamCurves(
    delta_phi=CurveFit1D("sinusoid", (0.0, 0.45, math.pi), 0.0),
    delta_x=CurveFit1D("sinusoid", (0.045, 0.025, math.pi / 6), 0.0),
    period_T=CurveFit1D("sinusoid", (2.2, 0.5, -math.pi / 2), 0.0),
    beta=CurveFit1D("affine", (0.0, 0.5), 0.0),
)


def true_params(gamma: float) -> MotionParams:
    return predict_at_gamma(TRUTH_CURVES, gamma)


def make_track(
    gamma: float,
    num_periods: int = 12,
    rng: np.random.Generator | None = None,
    noise_std: float = 0.0,
    start: Pose | None = None,
) -> MarkerTrack:
    """Track of a simulated run at fixed gamma, sampled once per period,
    with optional Gaussian position noise (meters)."""
    params = true_params(gamma)
    traj = iterate_trajectory(params, start or Pose(0.0, 0.0), num_periods)
    track = track_from_trajectory(traj)
    if noise_std > 0:
        if rng is None:
            raise ValueError("noise requires an explicit rng")
        track.xy = track.xy + rng.normal(0.0, noise_std, size=track.xy.shape)
    return track


def make_stop_go_track(
    num_pauses: int = 5,
    move_time: float = 1.0,
    pause_time: float = 0.5,
    samples_per_s: float = 60.0,
    speed: float = 0.05,
) -> MarkerTrack:
    """Straight-line stop-and-go motion profile: alternating constant-speed
    and standstill phases, one pause per period boundary."""
    t_list: list[float] = []
    x_list: list[float] = []
    t = 0.0
    x = 0.0
    dt = 1.0 / samples_per_s
    for _ in range(num_pauses):
        steps = int(round(move_time * samples_per_s))
        for _ in range(steps):
            t_list.append(t)
            x_list.append(x)
            t += dt
            x += speed * dt
        steps = int(round(pause_time * samples_per_s))
        for _ in range(steps):
            t_list.append(t)
            x_list.append(x)
            t += dt
    t_arr = np.array(t_list)
    xy = np.column_stack([np.array(x_list), np.zeros(len(x_list))])
    return MarkerTrack(t=t_arr, xy=xy)


def gamma_sweep(
    start_deg: float = 60.0,
    stop_deg: float = 300.0,
    step_deg: float = 60.0,
    repeats: int = 1,
    num_periods: int = 12,
    rng: np.random.Generator | None = None,
    noise_std: float = 0.0,
) -> list[tuple[float, MarkerTrack]]:
    """(gamma_rad, track) pairs over a sweep of gamma settings."""
    out = []
    deg = start_deg
    while deg <= stop_deg + 1e-9:
        gamma = math.radians(deg)
        for _ in range(repeats):
            out.append((gamma, make_track(gamma, num_periods, rng, noise_std)))
        deg += step_deg
    return out
