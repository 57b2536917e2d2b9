"""Run configuration: one declarative TOML file plus flag overrides.

Every computation starts from a fully resolved RunConfig; its canonical
hash and the RNG seed go into the header of every output file so that
runs are reproducible byte for byte.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from . import __version__
from .estimation import CURVE_FAMILIES, DEFAULT_FAMILIES, PARAM_NAMES
from .model import RobotConfig


@dataclass(frozen=True)
class ScenarioConfig:
    name: str = "boundary_lap"
    square_side: float = 0.6
    wall_offset: float = 0.1          # start-to-wall gap in the avoidance scenario
    max_periods: int = 2000
    lap_tol: float = 0.05
    stall_limit: int = 50
    slide_efficiency: float = 1.0
    substeps: int = 8
    penetration_tol: float = 1e-6
    gamma_deg: float = 0.0
    start_x: float | None = None      # None -> scenario default start
    start_y: float | None = None
    start_heading_deg: float = 0.0


@dataclass(frozen=True)
class ServeConfig:
    host: str = "127.0.0.1"
    port: int = 8770
    speed_factor: float = 10.0        # sim periods per wall-clock second scale
    recording_dir: str = "recordings"


@dataclass(frozen=True)
class RunConfig:
    robot: RobotConfig = field(default_factory=RobotConfig)
    families: dict = field(default_factory=lambda: dict(DEFAULT_FAMILIES))
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    serve: ServeConfig = field(default_factory=ServeConfig)
    seed: int = 0

    def resolved(self) -> dict:
        out = {
            "robot": asdict(self.robot),
            "families": dict(self.families),
            "scenario": asdict(self.scenario),
            "serve": asdict(self.serve),
            "seed": self.seed,
        }
        return out

    @property
    def config_hash(self) -> str:
        canon = json.dumps(self.resolved(), sort_keys=True)
        return hashlib.sha256(canon.encode()).hexdigest()[:16]

    def header_lines(self) -> list[str]:
        return [
            f"ringbot {__version__}",
            f"config {self.config_hash}",
            f"seed {self.seed}",
        ]


_SECTION_TYPES = {
    "robot": RobotConfig,
    "scenario": ScenarioConfig,
    "serve": ServeConfig,
}


def _build_section(cls, table: dict, where: str):
    valid = {f.name for f in fields(cls)}
    unknown = set(table) - valid
    if unknown:
        raise ValueError(f"unknown key(s) in [{where}]: {sorted(unknown)}")
    return cls(**table)


def load_run_config(
    path: str | Path | None = None, overrides: dict | None = None
) -> RunConfig:
    """Build the resolved RunConfig: defaults <- config file <- overrides.

    overrides use dotted keys (e.g. "scenario.square_side"); flag values
    win over the file, which wins over defaults.
    """
    data: dict = {}
    if path is not None:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        target = data
        parts = key.split(".")
        for part in parts[:-1]:
            target = target.setdefault(part, {})
        target[parts[-1]] = value

    known = set(_SECTION_TYPES) | {"families", "seed"}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config section(s): {sorted(unknown)}")

    sections = {}
    for name, cls in _SECTION_TYPES.items():
        sections[name] = _build_section(cls, data.get(name, {}), name)
    families = dict(DEFAULT_FAMILIES)
    for param, family in data.get("families", {}).items():
        if param not in PARAM_NAMES:
            raise ValueError(f"unknown motion parameter {param!r} in [families]")
        if family not in CURVE_FAMILIES:
            raise ValueError(f"unknown curve family {family!r} in [families]")
        families[param] = family
    return RunConfig(
        robot=sections["robot"],
        families=families,
        scenario=sections["scenario"],
        serve=sections["serve"],
        seed=int(data.get("seed", 0)),
    )
