"""Far-field array factor of a phased surface and the beam metrics derived from it.

Sign convention: the incident field at element (i, j) carries the phase of
the feed wave there (``-k R`` for a point source), the surface multiplies it
by its reflection coefficient, and the far field is

    AF(u) = sum_ij  excitation_ij * gamma_ij * exp(+j k u . r_ij)

so a surface applying the compensation phase from
:func:`rissteer.synthesis.continuous_phase_map` peaks at the target direction.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidArgument, TooLargeInstance
from .geometry import (
    ArrayGeometry,
    Direction,
    PlaneWave,
    PointSource,
    cut_directions,
    element_positions,
    grid_directions,
    wavenumber,
)
from .maps import StateMap
from .unitcell import UnitCellStateTable

BRUTE_FORCE_CAP = 2**20
_CHUNK = 256


def eval_threads() -> int:
    """Worker count for pattern evaluation, capped by ``RIS_THREADS``."""
    raw = os.environ.get("RIS_THREADS")
    if raw is None or raw == "":
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise InvalidArgument(f"RIS_THREADS must be a positive integer, got {raw!r}")
    return n


# ---------------------------------------------------------------- excitation


def excitations_from_positions(positions, feed, k: float) -> np.ndarray:
    """Complex incident field at arbitrary element positions (..., 3)."""
    pos = np.asarray(positions, dtype=float)
    if isinstance(feed, PlaneWave):
        u_src = feed.incidence.unit
        return feed.amplitude * np.exp(1j * k * (pos @ u_src))
    if isinstance(feed, PointSource):
        rf = np.asarray(feed.position)
        d = pos - rf
        rng = np.linalg.norm(d, axis=-1)
        amp = np.ones_like(rng)
        if feed.taper_exponent > 0:
            centre = pos.reshape(-1, 3).mean(axis=0)
            bore = centre - rf
            bore = bore / np.linalg.norm(bore)
            cos_t = np.clip((d @ bore) / rng, 0.0, 1.0)
            amp = cos_t**feed.taper_exponent
        if feed.spreading:
            amp = amp / rng
        return amp * np.exp(-1j * k * rng)
    raise InvalidArgument(f"unsupported feed {feed!r}")


def element_excitations(g: ArrayGeometry, feed, f: float) -> np.ndarray:
    """Incident complex amplitude at each element, shape (nx, ny)."""
    return excitations_from_positions(element_positions(g), feed, wavenumber(f))


# ------------------------------------------------------------- array factor


@dataclass(frozen=True, eq=False)
class Cut:
    """Fixed-azimuth pattern cut over signed polar angles (radians)."""

    theta: np.ndarray
    phi: float = 0.0
    theta_deg: np.ndarray | None = None  # exact labels when built from degrees
    phi_deg: float | None = None

    @classmethod
    def degrees(cls, start=-90.0, stop=90.0, step=0.25, phi=0.0) -> "Cut":
        if not step > 0 or stop < start:
            raise InvalidArgument("pattern grid needs step > 0 and stop >= start")
        n = int(round((stop - start) / step)) + 1
        theta_deg = start + step * np.arange(n)
        return cls(np.deg2rad(theta_deg), math.radians(phi), theta_deg, float(phi))

    def labels_deg(self) -> tuple[np.ndarray, float]:
        t = self.theta_deg if self.theta_deg is not None else np.rad2deg(self.theta)
        p = self.phi_deg if self.phi_deg is not None else math.degrees(self.phi)
        return np.asarray(t, dtype=float), p

    @property
    def shape(self):
        return np.shape(self.theta)

    def directions(self) -> np.ndarray:
        return cut_directions(self.theta, self.phi)


@dataclass(frozen=True, eq=False)
class SphereGrid:
    theta: np.ndarray
    phi: np.ndarray

    @property
    def shape(self):
        return (np.size(self.theta), np.size(self.phi))

    def directions(self) -> np.ndarray:
        return grid_directions(self.theta, self.phi)


@dataclass(frozen=True, eq=False)
class Pattern:
    observe: Cut | SphereGrid
    values: np.ndarray
    frequency: float

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    @property
    def peak(self) -> float:
        """Normalisation reference: the largest |AF| sample."""
        return float(self.magnitude.max())

    def normalized_db(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 20.0 * np.log10(self.magnitude / self.peak)


def array_factor_values(positions, weights, directions, k, element_factor=False, threads=None):
    """Sum ``weights * exp(j k u.r)`` for every direction in ``directions`` (..., 3)."""
    pos = np.asarray(positions, dtype=float).reshape(-1, 3)
    w = np.asarray(weights, dtype=complex).reshape(-1)
    dirs = np.asarray(directions, dtype=float)
    out_shape = dirs.shape[:-1]
    flat = dirs.reshape(-1, 3)

    def chunk(lo):
        d = flat[lo:lo + _CHUNK]
        return np.exp(1j * k * (d @ pos.T)) @ w

    starts = range(0, flat.shape[0], _CHUNK)
    threads = eval_threads() if threads is None else threads
    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(chunk, starts))
    else:
        parts = [chunk(lo) for lo in starts]
    af = np.concatenate(parts) if parts else np.zeros(0, dtype=complex)
    if element_factor:
        af = af * np.clip(flat[:, 2], 0.0, None)
    return af.reshape(out_shape)


def _reflection_grid(applied, f) -> np.ndarray:
    if hasattr(applied, "reflections"):
        return applied.reflections(f)
    return np.asarray(applied, dtype=complex)


def array_factor(g: ArrayGeometry, excitations, applied, observe, f: float,
                 element_factor: bool = False) -> Pattern:
    """Evaluate the array factor over a cut or a theta/phi grid.

    ``applied`` is a PhaseMap, a StateMap (realised through its table at
    ``f``) or a raw complex reflection grid. With ``element_factor`` the
    sum is weighted by cos(theta) of the observation direction.
    """
    gamma = _reflection_grid(applied, f)
    exc = np.asarray(excitations, dtype=complex)
    if gamma.shape != g.shape or exc.shape != g.shape:
        raise InvalidArgument("excitation/reflection grids must match the geometry")
    values = array_factor_values(
        element_positions(g), exc * gamma, observe.directions(), wavenumber(f), element_factor
    )
    return Pattern(observe, values, f)


def array_factor_at(g: ArrayGeometry, excitations, applied, u, f: float) -> complex:
    """AF in a single direction (Direction or unit 3-vector)."""
    u = u.unit if isinstance(u, Direction) else np.asarray(u, dtype=float)
    w = np.asarray(excitations, dtype=complex) * _reflection_grid(applied, f)
    return complex(array_factor_values(element_positions(g), w, u[None, :], wavenumber(f), threads=1)[0])


def direct_sum_oracle(g: ArrayGeometry, excitations, reflections, u, f: float,
                      element_factor: bool = False) -> complex:
    """Naive double loop over elements; kept independent of array_factor on purpose."""
    if isinstance(u, Direction):
        ux = math.sin(u.theta) * math.cos(u.phi)
        uy = math.sin(u.theta) * math.sin(u.phi)
        uz = math.cos(u.theta)
    else:
        ux, uy, uz = (float(v) for v in u)
    k = 2.0 * math.pi * f / 299792458.0
    total = 0j
    for i in range(g.nx):
        x = (i - (g.nx - 1) / 2.0) * g.pitch
        for j in range(g.ny):
            y = (j - (g.ny - 1) / 2.0) * g.pitch
            a = complex(excitations[i][j]) * complex(reflections[i][j])
            total += a * cmath.exp(1j * k * (ux * x + uy * y))
    if element_factor:
        total *= max(uz, 0.0)
    return total


# ------------------------------------------------------------------ metrics


@dataclass(frozen=True)
class BeamMetrics:
    main_lobe: float  # signed theta in the cut, radians
    main_lobe_deg: float
    peak: float
    hpbw: float  # radians
    sll_db: float | None  # None when no sample lies outside the first nulls

    @property
    def hpbw_deg(self) -> float:
        return math.degrees(self.hpbw)


def _half_power_edge(theta, power, peak_idx, half, step):
    j = peak_idx
    n = len(power)
    while 0 <= j + step < n and power[j + step] >= half:
        j += step
    if not 0 <= j + step < n:
        return theta[j]
    p0, p1 = power[j], power[j + step]
    t = (p0 - half) / (p0 - p1)
    return theta[j] + t * (theta[j + step] - theta[j])


def _first_null(mag, peak_idx, step):
    j = peak_idx
    n = len(mag)
    while 0 <= j + step < n and mag[j + step] <= mag[j]:
        j += step
    return j


def beam_metrics(p: Pattern) -> BeamMetrics:
    """Main-lobe direction, half-power beamwidth and peak sidelobe of a cut."""
    if not isinstance(p.observe, Cut):
        raise InvalidArgument("beam metrics are defined on a pattern cut")
    theta = np.asarray(p.observe.theta, dtype=float)
    mag = p.magnitude
    if mag.size < 3:
        raise InvalidArgument("beam metrics need at least 3 pattern samples")
    i = int(np.argmax(mag))
    peak = float(mag[i])
    power = mag**2
    half = peak**2 / 2.0
    left = _half_power_edge(theta, power, i, half, -1)
    right = _half_power_edge(theta, power, i, half, +1)
    nl = _first_null(mag, i, -1)
    nr = _first_null(mag, i, +1)
    outside = np.concatenate([mag[:nl], mag[nr + 1:]])
    sll = None
    if outside.size and peak > 0:
        side = float(outside.max())
        sll = 20.0 * math.log10(side / peak) if side > 0 else -math.inf
    return BeamMetrics(float(theta[i]), float(p.observe.labels_deg()[0][i]), peak,
                       float(right - left), sll)


class Enhancement(NamedTuple):
    db: float
    degenerate: bool  # True when the uniform map's field is numerically zero


def enhancement(g: ArrayGeometry, feed, sm_on: StateMap, uniform_state: int, u_obs,
                f: float, element_factor: bool = False) -> Enhancement:
    """Field ratio (dB) at ``u_obs`` between ``sm_on`` and an all-``uniform_state`` map."""
    exc = element_excitations(g, feed, f)
    uniform = StateMap.uniform(g, sm_on.table, uniform_state, sm_on.frequency)
    on = abs(array_factor_at(g, exc, sm_on.reflections(f), u_obs, f))
    gamma_off = uniform.reflections(f)
    off = abs(array_factor_at(g, exc, gamma_off, u_obs, f))
    scale = float(np.sum(np.abs(exc * gamma_off)))
    if off <= 1e-13 * scale:
        return Enhancement(math.inf, True)
    if on == 0:
        return Enhancement(-math.inf, False)
    return Enhancement(20.0 * math.log10(on / off), False)


def brute_force_best_map(g: ArrayGeometry, feed, table: UnitCellStateTable, u0, f: float):
    """Exhaustively search every state map for the largest |AF(u0)|.

    Candidates are visited in lexicographic order of the row-major index
    sequence; the first one within 1e-12 (relative) of the maximum wins.
    Returns (StateMap, peak).
    """
    n_el = g.size
    n_st = table.n_states
    if n_st**n_el > BRUTE_FORCE_CAP:
        raise TooLargeInstance(
            f"{n_st}^{n_el} candidate maps exceeds the cap of {BRUTE_FORCE_CAP}"
        )
    u = u0.unit if isinstance(u0, Direction) else np.asarray(u0, dtype=float)
    k = wavenumber(f)
    pos = element_positions(g).reshape(-1, 3)
    exc = element_excitations(g, feed, f).reshape(-1)
    steer = exc * np.exp(1j * k * (pos @ u))
    contrib = steer[:, None] * table.reflections_at(f)[None, :]  # (element, state)

    total = n_st**n_el
    shape = (n_st,) * n_el
    rows = np.arange(n_el)
    peaks = np.empty(total)
    block = 1 << 14
    for lo in range(0, total, block):
        codes = np.arange(lo, min(lo + block, total))
        digits = np.stack(np.unravel_index(codes, shape), axis=1)
        peaks[lo:lo + len(codes)] = np.abs(contrib[rows[None, :], digits].sum(axis=1))
    best = peaks.max()
    m = int(np.flatnonzero(peaks >= best * (1 - 1e-12))[0])
    digits = np.array(np.unravel_index(m, (n_st,) * n_el)).reshape(g.shape)
    return StateMap(digits, g, table, f), float(peaks[m])
