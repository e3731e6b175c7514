"""Scenario files: TOML documents describing one synthesis/evaluation run.

Angles are degrees in the file and radians everywhere after loading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ._toml import load_toml
from .errors import InvalidArgument, ScenarioValidationError
from .farfield import Cut
from .geometry import ArrayGeometry, Direction, PlaneWave, PointSource
from .synthesis import DEFAULT_OFFSETS
from .unitcell import UnitCellStateTable, load_table

_TOP_KEYS = {
    "name", "frequency_hz", "state_table", "output_dir",
    "geometry", "feed", "target", "offsets", "pattern", "enhance", "sweep",
}
_SECTION_KEYS = {
    "geometry": {"nx", "ny", "pitch_m"},
    "feed": {"type", "theta_deg", "phi_deg", "amplitude", "position_m", "taper_exponent", "spreading"},
    "target": {"theta_deg", "phi_deg"},
    "offsets": {"n_offsets"},
    "pattern": {"theta_min_deg", "theta_max_deg", "theta_step_deg", "phi_cut_deg", "element_factor"},
    "enhance": {"uniform_state"},
    "sweep": {"frequencies_hz", "freeze_map"},
}


@dataclass(frozen=True)
class PatternGrid:
    theta_min_deg: float = -90.0
    theta_max_deg: float = 90.0
    theta_step_deg: float = 0.25
    phi_cut_deg: float = 0.0
    element_factor: bool = False

    def cut(self) -> Cut:
        return Cut.degrees(self.theta_min_deg, self.theta_max_deg, self.theta_step_deg, self.phi_cut_deg)


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    geometry: ArrayGeometry
    feed: PointSource | PlaneWave
    target: Direction
    frequency: float
    table: UnitCellStateTable
    state_table_path: Path
    n_offsets: int = DEFAULT_OFFSETS
    pattern: PatternGrid = field(default_factory=PatternGrid)
    uniform_state: int | None = None
    sweep_frequencies: tuple[float, ...] = ()
    freeze_map: bool = False
    output_dir: Path | None = None
    source: Path | None = None

    def resolved(self) -> dict:
        """Fully resolved configuration as plain data (for run records)."""
        if isinstance(self.feed, PlaneWave):
            feed = {
                "type": "plane_wave",
                "theta_deg": math.degrees(self.feed.incidence.theta),
                "phi_deg": math.degrees(self.feed.incidence.phi),
                "amplitude": self.feed.amplitude,
            }
        else:
            feed = {
                "type": "point_source",
                "position_m": list(self.feed.position),
                "taper_exponent": self.feed.taper_exponent,
                "spreading": self.feed.spreading,
            }
        return {
            "name": self.name,
            "source": str(self.source) if self.source else None,
            "geometry": {"nx": self.geometry.nx, "ny": self.geometry.ny, "pitch_m": self.geometry.pitch},
            "feed": feed,
            "target": {"theta_deg": math.degrees(self.target.theta), "phi_deg": math.degrees(self.target.phi)},
            "frequency_hz": self.frequency,
            "state_table": str(self.state_table_path),
            "state_labels": self.table.labels,
            "n_offsets": self.n_offsets,
            "pattern": vars(self.pattern),
            "uniform_state": self.uniform_state,
            "sweep": {"frequencies_hz": list(self.sweep_frequencies), "freeze_map": self.freeze_map},
            "output_dir": str(self.output_dir) if self.output_dir else None,
        }


def builtin_path(name: str) -> Path | None:
    """Path of a scenario shipped with the package, or None."""
    fname = name if name.endswith(".toml") else f"{name}.toml"
    p = Path(str(resources.files("rissteer") / "data" / fname))
    return p if p.is_file() else None


def _num(section: dict, key: str, where: str, default=None, *, positive=False, integer=False, nonneg=False):
    qual = f"{where}.{key}" if where else key
    if key not in section:
        if default is None:
            raise ScenarioValidationError(qual, "missing")
        return default
    v = section[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ScenarioValidationError(qual, "must be a finite number")
    if integer and int(v) != v:
        raise ScenarioValidationError(qual, "must be an integer")
    if positive and not v > 0:
        raise ScenarioValidationError(qual, "must be > 0")
    if nonneg and v < 0:
        raise ScenarioValidationError(qual, "must be >= 0")
    return int(v) if integer else float(v)


def _section(data: dict, name: str, required: bool) -> dict:
    sec = data.get(name)
    if sec is None:
        if required:
            raise ScenarioValidationError(name, "missing section")
        return {}
    if not isinstance(sec, dict):
        raise ScenarioValidationError(name, "must be a table")
    for key in sec:
        if key not in _SECTION_KEYS[name]:
            raise ScenarioValidationError(f"{name}.{key}", "unknown key")
    return sec


def _feed(sec: dict):
    kind = sec.get("type")
    allowed = {
        "plane_wave": {"type", "theta_deg", "phi_deg", "amplitude"},
        "point_source": {"type", "position_m", "taper_exponent", "spreading"},
    }
    if kind not in allowed:
        raise ScenarioValidationError("feed.type", "must be 'plane_wave' or 'point_source'")
    for key in sec:
        if key not in allowed[kind]:
            raise ScenarioValidationError(f"feed.{key}", f"not valid for a {kind} feed")
    if kind == "plane_wave":
        theta = _num(sec, "theta_deg", "feed")
        phi = _num(sec, "phi_deg", "feed", 0.0)
        amp = _num(sec, "amplitude", "feed", 1.0, positive=True)
        if not 0.0 <= theta < 90.0:
            raise ScenarioValidationError("feed.theta_deg", "must lie in [0, 90)")
        return PlaneWave(Direction.from_degrees(theta, phi), amp)
    pos = sec.get("position_m")
    if (not isinstance(pos, list) or len(pos) != 3
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pos)):
        raise ScenarioValidationError("feed.position_m", "must be a list of three numbers")
    if not pos[2] > 0:
        raise ScenarioValidationError("feed.position_m", "z must be > 0 (feed above the array)")
    q = _num(sec, "taper_exponent", "feed", 0.0, nonneg=True)
    spreading = sec.get("spreading", True)
    if not isinstance(spreading, bool):
        raise ScenarioValidationError("feed.spreading", "must be true or false")
    return PointSource(tuple(float(v) for v in pos), q, spreading)


def scenario_from_dict(data: dict, base_dir: Path, source: Path | None = None) -> Scenario:
    for key in data:
        if key not in _TOP_KEYS:
            raise ScenarioValidationError(key, "unknown key")

    geo = _section(data, "geometry", True)
    try:
        geometry = ArrayGeometry(
            _num(geo, "nx", "geometry", positive=True, integer=True),
            _num(geo, "ny", "geometry", positive=True, integer=True),
            _num(geo, "pitch_m", "geometry", positive=True),
        )
    except InvalidArgument as exc:
        raise ScenarioValidationError("geometry", str(exc)) from None

    try:
        feed = _feed(_section(data, "feed", True))
    except InvalidArgument as exc:
        raise ScenarioValidationError("feed", str(exc)) from None

    tgt = _section(data, "target", True)
    t_theta = _num(tgt, "theta_deg", "target")
    if not -90.0 < t_theta < 90.0:
        raise ScenarioValidationError("target.theta_deg", "must lie in (-90, 90)")
    target = Direction.from_degrees(t_theta, _num(tgt, "phi_deg", "target", 0.0))

    table_ref = data.get("state_table")
    if not isinstance(table_ref, str) or not table_ref:
        raise ScenarioValidationError("state_table", "must name a state-table file")
    table_path = Path(table_ref)
    if not table_path.is_absolute():
        table_path = base_dir / table_path
    if not table_path.is_file():
        raise FileNotFoundError(f"state table not found: {table_path}")
    table = load_table(table_path)

    freq = _num(data, "frequency_hz", "", table.design_frequency, positive=True)
    lo, hi = table.band
    if not lo <= freq <= hi:
        raise ScenarioValidationError("frequency_hz", f"outside the state table band [{lo!r}, {hi!r}]")

    off = _section(data, "offsets", False)
    n_offsets = _num(off, "n_offsets", "offsets", DEFAULT_OFFSETS, positive=True, integer=True)

    pat = _section(data, "pattern", False)
    ef = pat.get("element_factor", False)
    if not isinstance(ef, bool):
        raise ScenarioValidationError("pattern.element_factor", "must be true or false")
    grid = PatternGrid(
        _num(pat, "theta_min_deg", "pattern", -90.0),
        _num(pat, "theta_max_deg", "pattern", 90.0),
        _num(pat, "theta_step_deg", "pattern", 0.25, positive=True),
        _num(pat, "phi_cut_deg", "pattern", 0.0),
        ef,
    )
    if not -90.0 <= grid.theta_min_deg < grid.theta_max_deg <= 90.0:
        raise ScenarioValidationError("pattern", "need -90 <= theta_min_deg < theta_max_deg <= 90")
    if (grid.theta_max_deg - grid.theta_min_deg) / grid.theta_step_deg < 2:
        raise ScenarioValidationError("pattern.theta_step_deg", "cut needs at least 3 samples")

    enh = _section(data, "enhance", False)
    uniform_state = None
    if "uniform_state" in enh:
        uniform_state = _num(enh, "uniform_state", "enhance", integer=True, nonneg=True)
        if uniform_state >= table.n_states:
            raise ScenarioValidationError("enhance.uniform_state", f"must be < {table.n_states}")

    sw = _section(data, "sweep", False)
    freqs = sw.get("frequencies_hz", [])
    if (not isinstance(freqs, list)
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0 for v in freqs)):
        raise ScenarioValidationError("sweep.frequencies_hz", "must be a list of positive numbers")
    freeze = sw.get("freeze_map", False)
    if not isinstance(freeze, bool):
        raise ScenarioValidationError("sweep.freeze_map", "must be true or false")

    out = data.get("output_dir")
    if out is not None and (not isinstance(out, str) or not out):
        raise ScenarioValidationError("output_dir", "must be a non-empty string")

    name = data.get("name")
    if name is not None and not isinstance(name, str):
        raise ScenarioValidationError("name", "must be a string")
    if name is None:
        name = source.stem if source else "scenario"

    return Scenario(
        name=name,
        geometry=geometry,
        feed=feed,
        target=target,
        frequency=freq,
        table=table,
        state_table_path=table_path,
        n_offsets=n_offsets,
        pattern=grid,
        uniform_state=uniform_state,
        sweep_frequencies=tuple(float(v) for v in freqs),
        freeze_map=freeze,
        output_dir=Path(out) if out else None,
        source=source,
    )


def load_scenario(path) -> Scenario:
    """Load and validate a scenario file.

    ``path`` may also be the name of a shipped scenario such as
    ``golden_60x60``. Relative ``state_table`` paths resolve against the
    scenario file's directory.
    """
    p = Path(path)
    if not p.exists():
        shipped = builtin_path(str(path))
        if shipped is not None:
            p = shipped
    data = load_toml(p)
    return scenario_from_dict(data, p.parent, source=p)
