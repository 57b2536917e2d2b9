"""Marker-track data model and file IO.

Tracks come from video marker tracking exported as minimal CSV: a header
line ``t,x,y`` (comma or tab separated) followed by numeric rows, with
``#``-prefixed comment lines skipped. An optional ``heading`` column
(radians) carries the orientation marker; trajectory CSVs written by this
package (``k,t,x,y,heading``) parse back through the same reader.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyFile, MalformedHeader, NonMonotonicTime
from .kinematics import Trajectory

log = logging.getLogger(__name__)

UNIT_FACTORS = {"m": 1.0, "mm": 1e-3, "cm": 1e-2}


@dataclass(frozen=True)
class TrackFile:
    """A track export on disk plus the hints needed to normalize it."""

    path: str | Path
    unit: str = "m"              # unit of the x/y columns
    fps: float = 60.0            # frame rate, used when time_unit="frames"
    time_unit: str = "s"         # "s" or "frames"

    def __post_init__(self):
        if self.unit not in UNIT_FACTORS:
            raise ValueError(f"unknown unit {self.unit!r}, expected m/mm/cm")
        if self.time_unit not in ("s", "frames"):
            raise ValueError("time_unit must be 's' or 'frames'")
        if self.fps <= 0:
            raise ValueError("fps must be > 0")


@dataclass
class MarkerTrack:
    """Center-marker samples, SI units, plus optional heading angles.

    t:       (N,) strictly increasing times, s
    xy:      (N, 2) center positions, m
    heading: (N,) reference-direction angles in rad, or None when the
             track carries no orientation marker
    issues:  human-readable notes about rejected input rows
    """

    t: np.ndarray
    xy: np.ndarray
    heading: np.ndarray | None = None
    issues: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.xy = np.asarray(self.xy, dtype=float)
        if self.t.ndim != 1 or self.xy.shape != (len(self.t), 2):
            raise ValueError("need t of shape (N,) and xy of shape (N, 2)")
        if len(self.t) > 1 and not np.all(np.diff(self.t) > 0):
            raise NonMonotonicTime("timestamps must be strictly increasing")
        if self.heading is not None:
            self.heading = np.asarray(self.heading, dtype=float)
            if self.heading.shape != self.t.shape:
                raise ValueError("heading must match t in length")

    def __len__(self) -> int:
        return len(self.t)

    @classmethod
    def from_markers(
        cls, t, center_xy, heading_marker_xy
    ) -> "MarkerTrack":
        """Build a track from center + heading marker positions; the heading
        angle is the direction from the center marker to the heading marker."""
        center = np.asarray(center_xy, dtype=float)
        marker = np.asarray(heading_marker_xy, dtype=float)
        d = marker - center
        return cls(t=np.asarray(t, dtype=float), xy=center,
                   heading=np.arctan2(d[:, 1], d[:, 0]))


def track_from_trajectory(traj: Trajectory) -> MarkerTrack:
    """Synthetic track sampled exactly at the trajectory's period boundaries."""
    t = np.array([s.t for s in traj])
    xy = np.array([[s.pose.x, s.pose.y] for s in traj])
    heading = np.array([s.pose.heading for s in traj])
    return MarkerTrack(t=t, xy=xy, heading=heading)


def _split_row(line: str, delim: str) -> list[str]:
    return [cell.strip() for cell in line.split(delim)]


def parse_track(file: TrackFile) -> MarkerTrack:
    """Parse a track CSV into SI units.

    Rows with non-finite or unparsable values are rejected, each reported
    with its 1-based line number (logged and kept in ``track.issues``);
    nothing is dropped silently. Raises MalformedHeader, NonMonotonicTime
    or EmptyFile on structural problems.
    """
    path = Path(file.path)
    text = path.read_text()
    factor = UNIT_FACTORS[file.unit]

    header_cols: list[str] | None = None
    delim = ","
    cols: dict[str, int] = {}
    issues: list[str] = []
    rows: list[tuple[int, float, float, float, float | None]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header_cols is None:
            delim = "\t" if "\t" in line else ","
            header_cols = [c.strip().lower() for c in line.split(delim)]
            cols = {name: i for i, name in enumerate(header_cols)}
            if not {"t", "x", "y"} <= cols.keys():
                raise MalformedHeader(
                    f"{path}: header must name t, x and y columns, got {header_cols}"
                )
            continue
        cells = _split_row(line, delim)
        if len(cells) != len(header_cols):
            issues.append(
                f"line {lineno}: expected {len(header_cols)} fields, got {len(cells)}"
            )
            continue
        try:
            t = float(cells[cols["t"]])
            x = float(cells[cols["x"]])
            y = float(cells[cols["y"]])
            h = float(cells[cols["heading"]]) if "heading" in cols else None
        except ValueError:
            issues.append(f"line {lineno}: unparsable numeric value")
            continue
        values = [t, x, y] + ([h] if h is not None else [])
        if not all(math.isfinite(v) for v in values):
            issues.append(f"line {lineno}: non-finite value")
            continue
        rows.append((lineno, t, x, y, h))

    for issue in issues:
        log.warning("%s: rejected %s", path, issue)
    if header_cols is None:
        raise EmptyFile(f"{path}: no header line found")
    if not rows:
        raise EmptyFile(
            f"{path}: no usable data rows ({len(issues)} rejected)"
        )

    t = np.array([r[1] for r in rows])
    if file.time_unit == "frames":
        t = t / file.fps
    bad = np.nonzero(np.diff(t) <= 0)[0]
    if bad.size:
        raise NonMonotonicTime(
            f"{path}: time does not increase at line {rows[bad[0] + 1][0]}"
        )
    xy = np.array([[r[2], r[3]] for r in rows]) * factor
    heading = None
    if "heading" in cols:
        heading = np.array([r[4] for r in rows])
    return MarkerTrack(t=t, xy=xy, heading=heading, issues=issues)


def write_trajectory_csv(
    path: str | Path, traj: Trajectory, header_comments: list[str] | None = None
) -> None:
    """Write ``k,t,x,y,heading`` rows (SI units, radians). Floats use repr
    so that re-parsing reproduces the values exactly."""
    lines = [f"# {c}" for c in (header_comments or [])]
    lines.append("k,t,x,y,heading")
    for k, t, x, y, heading in traj.to_rows():
        lines.append(f"{k},{t!r},{x!r},{y!r},{heading!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_track_csv(
    path: str | Path, track: MarkerTrack, header_comments: list[str] | None = None,
    unit: str = "m",
) -> None:
    """Write a MarkerTrack in the minimal t,x,y[,heading] schema."""
    factor = 1.0 / UNIT_FACTORS[unit]
    lines = [f"# {c}" for c in (header_comments or [])]
    has_heading = track.heading is not None
    lines.append("t,x,y,heading" if has_heading else "t,x,y")
    for i in range(len(track)):
        x, y = (float(v) * factor for v in track.xy[i])
        row = f"{float(track.t[i])!r},{x!r},{y!r}"
        if has_heading:
            row += f",{float(track.heading[i])!r}"
        lines.append(row)
    Path(path).write_text("\n".join(lines) + "\n")
