"""Recover per-period motion parameters from observed tracks and fit their
dependence on the mass-distribution angle gamma.

Extraction follows the measurement procedure used on the physical robot:
per-period turning from the unwrapped heading change, the period from the
total time, the travel per period from period-boundary displacements, and
the moving direction from the angle between each period's displacement and
the reference direction at the period start. A least-squares circle fit
summarizes the orbit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    CollinearPoints,
    InsufficientData,
    NoPeriodsFound,
    StraightLineMotion,
)
from .kinematics import STRAIGHT_EPS, MotionParams, half_orbit_sine_sum
from .tracks import MarkerTrack

PARAM_NAMES = ("delta_phi", "delta_x", "period_T", "beta")

DEFAULT_FAMILIES = {
    "delta_phi": "sinusoid",
    "delta_x": "sinusoid",
    "period_T": "sinusoid",
    "beta": "affine",
}


def _wrap_pi(a):
    """Wrap angle(s) into (-pi, pi]."""
    return -((-np.asarray(a) + np.pi) % (2 * np.pi) - np.pi)


# ---------------------------------------------------------------------------
# circle fitting

@dataclass(frozen=True)
class CircleFit:
    center_x: float
    center_y: float
    radius: float
    radius_std: float   # standard deviation of the point radii

    @property
    def center(self) -> tuple[float, float]:
        return (self.center_x, self.center_y)


def fit_circle(points) -> CircleFit:
    """Algebraic least-squares circle through >= 3 non-collinear points.

    Solves the linear system  [x y 1] * w = x^2 + y^2  (minimizing the
    algebraic distance), then center = (w0/2, w1/2) and
    radius = sqrt(w2 + cx^2 + cy^2). No iteration involved.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise ValueError("need at least 3 (x, y) points")
    x, y = pts[:, 0], pts[:, 1]
    A = np.column_stack([x, y, np.ones(len(pts))])
    b = x * x + y * y
    w, _, _, sv = np.linalg.lstsq(A, b, rcond=None)
    if sv[-1] < 1e-10 * sv[0]:
        raise CollinearPoints("points are collinear; circle is undetermined")
    cx, cy = w[0] / 2, w[1] / 2
    r_sq = w[2] + cx * cx + cy * cy
    if r_sq <= 0:
        raise CollinearPoints("degenerate circle fit (non-positive radius)")
    radii = np.hypot(x - cx, y - cy)
    return CircleFit(
        center_x=float(cx),
        center_y=float(cy),
        radius=float(math.sqrt(r_sq)),
        radius_std=float(np.std(radii)),
    )


# ---------------------------------------------------------------------------
# motion-parameter extraction

@dataclass
class ExtractionDetails:
    """Diagnostics accompanying an extraction."""

    circle: CircleFit | None
    straight_line: bool                # chord fallback used, no orbit circle
    heading_from_marker: bool          # False -> turning inferred from motion
    delta_x_chord: float               # mean per-period displacement norm
    delta_x_from_radius: float | None  # half-orbit sine-sum inversion of R_fit
    per_period_beta: np.ndarray | None


def extract_motion_params(track: MarkerTrack, num_periods: int) -> MotionParams:
    """Per-period motion parameters of a track spanning num_periods periods."""
    params, _ = extract_motion_params_detailed(track, num_periods)
    return params


def extract_motion_params_detailed(
    track: MarkerTrack, num_periods: int
) -> tuple[MotionParams, ExtractionDetails]:
    """Extraction plus diagnostics.

    delta_phi: unwrapped total heading change / num_periods (from the
        heading marker when present, else from successive period
        displacement directions).
    period_T:  (t_end - t_start) / num_periods.
    delta_x:   mean norm of the period-boundary displacements. The
        sine-sum inversion of the fitted orbit radius
        (delta_x = 2 R_fit / sum sin(k |delta_phi|)) is reported in the
        details; it inherits the estimator's cos(|delta_phi|/2) bias, so
        the unbiased chord value populates the returned MotionParams.
    beta:      circular mean over periods of the angle between each
        period's displacement and the period-start reference direction
        (0.0 when no heading marker is available).
    """
    if num_periods < 1:
        raise ValueError("num_periods must be >= 1")
    if len(track) < 2:
        raise ValueError("track must contain at least 2 samples")

    t0, t_end = track.t[0], track.t[-1]
    period_T = (t_end - t0) / num_periods
    bounds_t = t0 + period_T * np.arange(num_periods + 1)
    bx = np.interp(bounds_t, track.t, track.xy[:, 0])
    by = np.interp(bounds_t, track.t, track.xy[:, 1])
    disp = np.column_stack([np.diff(bx), np.diff(by)])
    chord = np.hypot(disp[:, 0], disp[:, 1])
    delta_x = float(np.mean(chord))

    heading_from_marker = track.heading is not None
    per_period_beta = None
    if heading_from_marker:
        h = np.unwrap(track.heading)
        delta_phi = float((h[-1] - h[0]) / num_periods)
        h_bounds = np.interp(bounds_t, track.t, h)
        disp_angle = np.arctan2(disp[:, 1], disp[:, 0])
        per_period_beta = _wrap_pi(disp_angle - h_bounds[:-1])
        beta = float(
            math.atan2(np.sum(np.sin(per_period_beta)),
                       np.sum(np.cos(per_period_beta)))
        )
    else:
        if num_periods >= 2:
            disp_angle = np.unwrap(np.arctan2(disp[:, 1], disp[:, 0]))
            delta_phi = float((disp_angle[-1] - disp_angle[0]) / (num_periods - 1))
        else:
            delta_phi = 0.0
        beta = 0.0

    straight = abs(delta_phi) < STRAIGHT_EPS
    circle = None
    delta_x_from_radius = None
    if not straight and len(track) >= 3:
        circle = fit_circle(track.xy)
        delta_x_from_radius = 2 * circle.radius / half_orbit_sine_sum(delta_phi)

    params = MotionParams(
        delta_phi=delta_phi, delta_x=delta_x, period_T=float(period_T), beta=beta
    )
    details = ExtractionDetails(
        circle=circle,
        straight_line=straight,
        heading_from_marker=heading_from_marker,
        delta_x_chord=delta_x,
        delta_x_from_radius=delta_x_from_radius,
        per_period_beta=per_period_beta,
    )
    return params, details


def segment_periods(
    track: MarkerTrack, threshold_frac: float = 0.2, min_period: float = 0.0
) -> list[float]:
    """Period boundary times from speed minima.

    The robot pauses between energy accumulation and release, so period
    boundaries show up as speed dips. Boundaries are placed at the minimum
    of each contiguous run where speed < threshold_frac * median(speed),
    and runs closer than min_period to the previous boundary are merged.
    Raises NoPeriodsFound with fewer than 2 boundaries.
    """
    if len(track) < 3:
        raise NoPeriodsFound("track too short for speed estimation")
    t, xy = track.t, track.xy
    # central differences at interior samples
    dt = t[2:] - t[:-2]
    speed = np.hypot(xy[2:, 0] - xy[:-2, 0], xy[2:, 1] - xy[:-2, 1]) / dt
    ts = t[1:-1]
    threshold = threshold_frac * float(np.median(speed))

    below = speed < threshold
    boundaries: list[float] = []
    i = 0
    while i < len(below):
        if not below[i]:
            i += 1
            continue
        j = i
        while j < len(below) and below[j]:
            j += 1
        # local minimum inside the dip
        idx = i + int(np.argmin(speed[i:j]))
        t_min = float(ts[idx])
        if not boundaries or t_min - boundaries[-1] >= min_period:
            boundaries.append(t_min)
        i = j
    if len(boundaries) < 2:
        raise NoPeriodsFound(
            f"found {len(boundaries)} speed minima below the threshold"
        )
    return boundaries


# ---------------------------------------------------------------------------
# gamma-dependence curves

@dataclass(frozen=True)
class CurveFamily:
    name: str
    n_coeffs: int

    def design(self, g: np.ndarray) -> np.ndarray:
        if self.name == "constant":
            return np.ones((len(g), 1))
        if self.name == "affine":
            return np.column_stack([np.ones(len(g)), g])
        if self.name == "sinusoid":
            return np.column_stack([np.ones(len(g)), np.sin(g), np.cos(g)])
        raise ValueError(f"unknown curve family {self.name!r}")

    def to_coeffs(self, w: np.ndarray) -> list[float]:
        if self.name == "sinusoid":
            # c0 + a sin g + b cos g  ->  c0 + c1 sin(g + c2)
            c0, a, b = w
            return [float(c0), float(math.hypot(a, b)), float(math.atan2(b, a))]
        return [float(v) for v in w]

    def evaluate(self, coeffs, g):
        g = np.asarray(g, dtype=float)
        if self.name == "constant":
            return np.full_like(g, coeffs[0])
        if self.name == "affine":
            return coeffs[0] + coeffs[1] * g
        if self.name == "sinusoid":
            return coeffs[0] + coeffs[1] * np.sin(g + coeffs[2])
        raise ValueError(f"unknown curve family {self.name!r}")


CURVE_FAMILIES = {
    "constant": CurveFamily("constant", 1),
    "affine": CurveFamily("affine", 2),
    "sinusoid": CurveFamily("sinusoid", 3),
}


@dataclass(frozen=True)
class CurveFit1D:
    family: str
    coeffs: tuple[float, ...]
    residual: float      # L2 norm of the fit residuals

    def evaluate(self, gamma):
        return CURVE_FAMILIES[self.family].evaluate(self.coeffs, gamma)


@dataclass(frozen=True)
class ParamCurves:
    """Fitted gamma-dependence of each motion parameter (radians in, SI out)."""

    delta_phi: CurveFit1D
    delta_x: CurveFit1D
    period_T: CurveFit1D
    beta: CurveFit1D

    def curve(self, name: str) -> CurveFit1D:
        return getattr(self, name)

    def to_json_obj(self) -> dict:
        return {
            name: {
                "family": self.curve(name).family,
                "coeffs": list(self.curve(name).coeffs),
                "residual": self.curve(name).residual,
            }
            for name in PARAM_NAMES
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "ParamCurves":
        fits = {}
        for name in PARAM_NAMES:
            entry = obj[name]
            if entry["family"] not in CURVE_FAMILIES:
                raise ValueError(f"unknown curve family {entry['family']!r}")
            fits[name] = CurveFit1D(
                family=entry["family"],
                coeffs=tuple(float(c) for c in entry["coeffs"]),
                residual=float(entry.get("residual", 0.0)),
            )
        return cls(**fits)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_obj(), indent=2,
                                         sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "ParamCurves":
        return cls.from_json_obj(json.loads(Path(path).read_text()))


def fit_param_curves(
    observations: list[tuple[float, MotionParams]],
    families: dict[str, str] | None = None,
) -> ParamCurves:
    """Least-squares fit of each motion parameter over gamma.

    observations: (gamma_rad, MotionParams) pairs; repeated gamma values
    all enter the fit. Default families: single-harmonic sinusoid for
    delta_phi / delta_x / period_T and an affine law for beta.
    """
    families = {**DEFAULT_FAMILIES, **(families or {})}
    if not observations:
        raise InsufficientData("no observations")
    g = np.array([obs[0] for obs in observations], dtype=float)
    n_distinct = len(np.unique(np.round(g, 12)))

    fits = {}
    for name in PARAM_NAMES:
        family = CURVE_FAMILIES[families[name]]
        if n_distinct < max(3, family.n_coeffs):
            raise InsufficientData(
                f"{name}: {n_distinct} distinct gamma values, "
                f"need >= {max(3, family.n_coeffs)} for family {family.name!r}"
            )
        y = np.array([getattr(obs[1], name) for obs in observations])
        A = family.design(g)
        w, _, rank, _ = np.linalg.lstsq(A, y, rcond=None)
        if rank < family.n_coeffs:
            raise InsufficientData(
                f"{name}: gamma values do not constrain family {family.name!r}"
            )
        coeffs = family.to_coeffs(w)
        residual = float(np.linalg.norm(y - family.evaluate(coeffs, g)))
        fits[name] = CurveFit1D(family=family.name, coeffs=tuple(coeffs),
                                residual=residual)
    return ParamCurves(**fits)


# keep predictions inside MotionParams invariants
_MAX_TURN = math.pi - 1e-9
_MIN_PERIOD = 1e-6


def predict_at_gamma(curves: ParamCurves, gamma: float) -> MotionParams:
    """Evaluate the fitted curves at a gamma (radians) and compose the
    per-period motion parameters.

    Turning and moving-direction angles are wrapped to (-pi, pi]; the
    travel distance is clamped at 0 and the period at a small positive
    floor so that curve extrapolation cannot produce invalid parameters.
    """
    delta_phi = float(_wrap_pi(curves.delta_phi.evaluate(gamma)))
    delta_phi = max(-_MAX_TURN, min(_MAX_TURN, delta_phi))
    delta_x = max(0.0, float(curves.delta_x.evaluate(gamma)))
    period_T = max(_MIN_PERIOD, float(curves.period_T.evaluate(gamma)))
    beta = float(_wrap_pi(curves.beta.evaluate(gamma)))
    return MotionParams(delta_phi=delta_phi, delta_x=delta_x,
                        period_T=period_T, beta=beta)
