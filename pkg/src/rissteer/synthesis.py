"""Phase-map synthesis: ideal compensation phase, state quantisation, offset search.

The continuous map is the phase the surface has to add so that the feed's
path-length phase is cancelled and a linear gradient towards ``u0`` remains:

    phi_ij = k |r_ij - r_feed| - k (u0 . r_ij) + delta_phi

For a plane-wave feed the range term becomes ``-k (u_src . r_ij)``, which is
the same expression with the source pushed to infinity along ``u_src`` and
the constant range dropped.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidArgument
from .farfield import array_factor_at, element_excitations
from .geometry import (
    TWO_PI,
    ArrayGeometry,
    Direction,
    PlaneWave,
    PointSource,
    circular_distance,
    element_positions,
    wavenumber,
    wrap_phase,
)
from .maps import PhaseMap, StateMap
from .unitcell import UnitCellStateTable

DEFAULT_OFFSETS = 64
# Distances closer than this count as a tie and go to the lower state index.
_TIE_TOL = 1e-12


def phase_from_positions(positions, feed, u0: Direction, delta_phi: float, k: float) -> np.ndarray:
    """Wrapped compensation phase at arbitrary element positions (..., 3)."""
    pos = np.asarray(positions, dtype=float)
    steer = pos @ u0.unit
    if isinstance(feed, PointSource):
        rng = np.linalg.norm(pos - np.asarray(feed.position), axis=-1)
        feed_term = k * rng
    elif isinstance(feed, PlaneWave):
        feed_term = -k * (pos @ feed.incidence.unit)
    else:
        raise InvalidArgument(f"unsupported feed {feed!r}")
    return wrap_phase(feed_term - k * steer + delta_phi)


def continuous_phase_map(g: ArrayGeometry, feed, u0: Direction, delta_phi: float, f: float) -> PhaseMap:
    values = phase_from_positions(element_positions(g), feed, u0, delta_phi, wavenumber(f))
    return PhaseMap(np.reshape(values, g.shape), g, f)


def quantize_map(pm: PhaseMap, table: UnitCellStateTable) -> StateMap:
    """Assign each element the state whose phase is circularly nearest.

    Works for any number of states; ties go to the lowest index.
    """
    state_phases = table.phases_at(pm.frequency)
    dist = np.stack([circular_distance(pm.values, p) for p in state_phases])
    best = dist.min(axis=0)
    idx = np.argmax(dist <= best + _TIE_TOL, axis=0)
    return StateMap(idx, pm.geometry, table, pm.frequency)


def offset_candidates(n_offsets: int) -> np.ndarray:
    if isinstance(n_offsets, bool) or int(n_offsets) != n_offsets or n_offsets < 1:
        raise InvalidArgument(f"n_offsets must be a positive integer, got {n_offsets!r}")
    return TWO_PI * np.arange(int(n_offsets)) / int(n_offsets)


def optimize_offset(g: ArrayGeometry, feed, u0: Direction, f: float, table: UnitCellStateTable,
                    n_offsets: int = DEFAULT_OFFSETS, ideal_magnitude: bool = False):
    """Sweep the global offset on a uniform grid and keep the best quantised map.

    The score is |AF(u0)| of the quantised map; the smallest offset wins
    ties (within 1e-12 relative). Returns (delta_phi, StateMap).
    """
    exc = element_excitations(g, feed, f)
    best = None
    for delta in offset_candidates(n_offsets):
        sm = quantize_map(continuous_phase_map(g, feed, u0, float(delta), f), table)
        score = abs(array_factor_at(g, exc, sm.reflections(f, ideal_magnitude), u0, f))
        if best is None or score > best[0] * (1 + 1e-12):
            best = (score, float(delta), sm)
    return best[1], best[2]


def continuous_peak(g: ArrayGeometry, feed, u0: Direction, f: float, magnitude: float = 1.0) -> float:
    """|AF(u0)| of the ideal continuous map: every contribution phase-aligned."""
    exc = element_excitations(g, feed, f)
    pm = continuous_phase_map(g, feed, u0, 0.0, f)
    return abs(array_factor_at(g, exc, magnitude * pm.reflections(), u0, f))


def quantization_loss_db(g: ArrayGeometry, feed, u0: Direction, f: float, sm: StateMap) -> float:
    """Peak penalty of ``sm`` against the continuous map with the same |gamma|.

    The continuous reference uses the mean reflection magnitude of the
    table's states so reflection loss does not leak into the figure.
    """
    mag = float(np.mean(np.abs(sm.table.reflections_at(f))))
    exc = element_excitations(g, feed, f)
    q = abs(array_factor_at(g, exc, sm.reflections(f), u0, f))
    return 20.0 * math.log10(continuous_peak(g, feed, u0, f, mag) / q)
