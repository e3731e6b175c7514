"""Tabulated reflection coefficients of a switchable unit cell."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidArgument, OutOfBand, ScenarioValidationError
from .geometry import TWO_PI, circular_distance
from ._toml import load_toml

# Reflection magnitude used for both golden states: the -1.2 dB bound, taken
# as the worst case.
GOLDEN_MAGNITUDE_DB = -1.2
GOLDEN_FREQUENCY_HZ = 100.75e9


def db_to_linear(mag_db):
    return 10.0 ** (np.asarray(mag_db, dtype=float) / 20.0)


def _signed_step(a: float, b: float) -> float:
    """Phase step from a to b on the nearest branch, in (-pi, pi]."""
    d = (b - a) % TWO_PI
    if d > math.pi:
        d -= TWO_PI
    return d


@dataclass(frozen=True, eq=False)
class CellState:
    label: str
    frequencies: np.ndarray
    magnitudes: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        f = np.atleast_1d(np.asarray(self.frequencies, dtype=float))
        m = np.atleast_1d(np.asarray(self.magnitudes, dtype=float))
        p = np.atleast_1d(np.asarray(self.phases, dtype=float))
        if f.ndim != 1 or f.size == 0 or not (f.shape == m.shape == p.shape):
            raise InvalidArgument(f"state {self.label!r}: samples must be equal-length 1-D lists")
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(m)) and np.all(np.isfinite(p))):
            raise InvalidArgument(f"state {self.label!r}: samples must be finite")
        if np.any(np.diff(f) <= 0):
            raise InvalidArgument(f"state {self.label!r}: frequencies must be strictly increasing")
        if np.any(m <= 0) or np.any(m > 1):
            raise InvalidArgument(f"state {self.label!r}: reflection magnitude must lie in (0, 1]")
        for a, b in zip(p[:-1], p[1:]):
            if circular_distance(a, b) >= math.pi:
                raise InvalidArgument(
                    f"state {self.label!r}: adjacent phase samples are pi apart; "
                    "sample the curve more densely"
                )
        for name, arr in (("frequencies", f), ("magnitudes", m), ("phases", p)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def band(self) -> tuple[float, float]:
        return float(self.frequencies[0]), float(self.frequencies[-1])

    def sample(self, f: float) -> tuple[float, float]:
        """(magnitude, phase) at frequency f, interpolated between samples."""
        freqs = self.frequencies
        lo, hi = self.band
        if not (lo <= f <= hi):
            raise OutOfBand(
                f"frequency {f!r} Hz outside band [{lo!r}, {hi!r}] of state {self.label!r}"
            )
        k = int(np.searchsorted(freqs, f))
        if k < freqs.size and freqs[k] == f:
            return float(self.magnitudes[k]), float(self.phases[k])
        f0, f1 = freqs[k - 1], freqs[k]
        t = (f - f0) / (f1 - f0)
        m0, m1 = self.magnitudes[k - 1], self.magnitudes[k]
        p0 = float(self.phases[k - 1])
        p1 = p0 + _signed_step(p0, float(self.phases[k]))
        return float(m0 + t * (m1 - m0)), p0 + t * (p1 - p0)


@dataclass(frozen=True, eq=False)
class UnitCellStateTable:
    states: tuple[CellState, ...]
    design_frequency: float

    def __post_init__(self):
        states = tuple(self.states)
        if len(states) < 2:
            raise InvalidArgument("a state table needs at least two states")
        lo = max(s.band[0] for s in states)
        hi = min(s.band[1] for s in states)
        if not (lo <= self.design_frequency <= hi):
            raise InvalidArgument(
                f"design frequency {self.design_frequency!r} Hz is not covered by every state"
            )
        object.__setattr__(self, "states", states)

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def labels(self) -> list[str]:
        return [s.label for s in self.states]

    @property
    def band(self) -> tuple[float, float]:
        """Frequency range covered by every state."""
        return (max(s.band[0] for s in self.states), min(s.band[1] for s in self.states))

    def state(self, index: int) -> CellState:
        if isinstance(index, bool) or int(index) != index or not 0 <= index < self.n_states:
            raise InvalidArgument(f"state index {index!r} out of range for {self.n_states} states")
        return self.states[int(index)]

    def phases_at(self, f: float) -> np.ndarray:
        return np.array([self.state(i).sample(f)[1] for i in range(self.n_states)])

    def reflections_at(self, f: float, ideal_magnitude: bool = False) -> np.ndarray:
        """Complex reflection coefficient of every state at f."""
        out = np.empty(self.n_states, dtype=complex)
        for i in range(self.n_states):
            mag, ph = self.state(i).sample(f)
            out[i] = (1.0 if ideal_magnitude else mag) * np.exp(1j * ph)
        return out


def reflection_at(table: UnitCellStateTable, state_index: int, f: float) -> complex:
    mag, ph = table.state(state_index).sample(f)
    return complex(mag * np.exp(1j * ph))


def state_phase_difference(table: UnitCellStateTable, f: float) -> float:
    """Circular separation of the two state phases at f, in [0, pi]."""
    if table.n_states != 2:
        raise InvalidArgument(f"phase difference needs exactly 2 states, table has {table.n_states}")
    p0 = table.state(0).sample(f)[1]
    p1 = table.state(1).sample(f)[1]
    return circular_distance(p0, p1)


def golden_table() -> UnitCellStateTable:
    """Two-state table anchored at 100.75 GHz: phases 0 and pi, both at -1.2 dB."""
    mag = float(db_to_linear(GOLDEN_MAGNITUDE_DB))
    return UnitCellStateTable(
        states=(
            CellState("OFF", [GOLDEN_FREQUENCY_HZ], [mag], [0.0]),
            CellState("ON", [GOLDEN_FREQUENCY_HZ], [mag], [math.pi]),
        ),
        design_frequency=GOLDEN_FREQUENCY_HZ,
    )


def table_from_dict(data: dict) -> UnitCellStateTable:
    """Build a table from the parsed state-table document.

    Layout::

        design_frequency_hz = 100.75e9
        [[states]]
        label = "OFF"
        rows = [[f_hz, mag_db, phase_deg], ...]
    """
    allowed = {"design_frequency_hz", "states"}
    for key in data:
        if key not in allowed:
            raise ScenarioValidationError(key, "unknown key in state table")
    if "design_frequency_hz" not in data:
        raise ScenarioValidationError("design_frequency_hz", "missing")
    f0 = data["design_frequency_hz"]
    if isinstance(f0, bool) or not isinstance(f0, (int, float)) or not f0 > 0:
        raise ScenarioValidationError("design_frequency_hz", "must be a positive number")
    raw_states = data.get("states")
    if not isinstance(raw_states, list) or len(raw_states) < 2:
        raise ScenarioValidationError("states", "need at least two [[states]] entries")
    states = []
    for n, st in enumerate(raw_states):
        where = f"states[{n}]"
        if not isinstance(st, dict):
            raise ScenarioValidationError(where, "must be a table")
        for key in st:
            if key not in ("label", "rows"):
                raise ScenarioValidationError(f"{where}.{key}", "unknown key in state")
        label = st.get("label")
        if not isinstance(label, str) or not label:
            raise ScenarioValidationError(f"{where}.label", "must be a non-empty string")
        rows = st.get("rows")
        if not isinstance(rows, list) or not rows:
            raise ScenarioValidationError(f"{where}.rows", "need at least one [f_hz, mag_db, phase_deg] row")
        try:
            arr = np.array(rows, dtype=float)
        except (TypeError, ValueError):
            raise ScenarioValidationError(f"{where}.rows", "rows must be numeric triples") from None
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise ScenarioValidationError(f"{where}.rows", "rows must be [f_hz, mag_db, phase_deg]")
        if np.any(arr[:, 1] > 0):
            raise ScenarioValidationError(f"{where}.rows", "mag_db must be <= 0")
        if np.any(np.diff(arr[:, 0]) <= 0):
            raise ScenarioValidationError(f"{where}.rows", "frequencies must be strictly increasing")
        try:
            states.append(
                CellState(label, arr[:, 0], db_to_linear(arr[:, 1]), np.deg2rad(arr[:, 2]))
            )
        except InvalidArgument as exc:
            raise ScenarioValidationError(f"{where}.rows", str(exc)) from None
    try:
        return UnitCellStateTable(tuple(states), float(f0))
    except InvalidArgument as exc:
        raise ScenarioValidationError("design_frequency_hz", str(exc)) from None


def load_table(path) -> UnitCellStateTable:
    path = Path(path)
    return table_from_dict(load_toml(path))
