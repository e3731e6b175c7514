"""Continuous phase maps and discrete state maps over an array."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .geometry import TWO_PI, ArrayGeometry
from .unitcell import UnitCellStateTable


@dataclass(frozen=True, eq=False)
class PhaseMap:
    """Phase (radians, [0, 2pi)) each element should apply, indexed [i, j]."""

    values: np.ndarray
    geometry: ArrayGeometry
    frequency: float

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != self.geometry.shape:
            raise InvalidArgument(f"phase map shape {v.shape} != geometry {self.geometry.shape}")
        if np.any(v < 0) or np.any(v >= TWO_PI):
            raise InvalidArgument("phase map entries must lie in [0, 2pi)")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def reflections(self, f=None) -> np.ndarray:
        """Unit-magnitude reflection with the mapped phase."""
        return np.exp(1j * self.values)


@dataclass(frozen=True, eq=False)
class StateMap:
    """Per-element state index into ``table``, indexed [i, j]."""

    indices: np.ndarray
    geometry: ArrayGeometry
    table: UnitCellStateTable
    frequency: float

    def __post_init__(self):
        idx = np.array(self.indices)
        if idx.shape != self.geometry.shape:
            raise InvalidArgument(f"state map shape {idx.shape} != geometry {self.geometry.shape}")
        if idx.size and not np.issubdtype(idx.dtype, np.integer):
            if not np.all(idx == np.round(idx)):
                raise InvalidArgument("state indices must be integers")
        idx = idx.astype(np.int64)
        if np.any(idx < 0) or np.any(idx >= self.table.n_states):
            raise InvalidArgument("state index out of range for table")
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)

    @classmethod
    def uniform(cls, geometry, table, state, frequency) -> "StateMap":
        table.state(state)
        return cls(np.full(geometry.shape, int(state)), geometry, table, frequency)

    def reflections(self, f=None, ideal_magnitude: bool = False) -> np.ndarray:
        """Complex reflection grid realised by the table at ``f`` (default: map frequency)."""
        f = self.frequency if f is None else f
        return self.table.reflections_at(f, ideal_magnitude)[self.indices]

    def phases(self, f=None) -> np.ndarray:
        f = self.frequency if f is None else f
        return self.table.phases_at(f)[self.indices]

    def flipped(self) -> "StateMap":
        """Swap the states of a two-state map."""
        if self.table.n_states != 2:
            raise InvalidArgument("flip is defined for two-state tables only")
        return StateMap(1 - self.indices, self.geometry, self.table, self.frequency)
