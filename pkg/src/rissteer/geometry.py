"""Planar lattice, feed models and angle conventions.

Conventions used everywhere in the package:

* the array lies in the z=0 plane, centred on the origin;
* theta is measured from the array normal (+z), phi from +x;
* a signed theta in a fixed-phi cut maps to (|theta|, phi) or (|theta|, phi + pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument

SPEED_OF_LIGHT = 299792458.0
TWO_PI = 2.0 * math.pi


def wavenumber(frequency: float) -> float:
    """Free-space wavenumber in rad/m."""
    if not frequency > 0:
        raise InvalidArgument(f"frequency must be positive, got {frequency!r}")
    return TWO_PI * frequency / SPEED_OF_LIGHT


@dataclass(frozen=True)
class ArrayGeometry:
    nx: int
    ny: int
    pitch: float  # metres

    def __post_init__(self):
        if int(self.nx) != self.nx or self.nx < 1:
            raise InvalidArgument(f"nx must be a positive integer, got {self.nx!r}")
        if int(self.ny) != self.ny or self.ny < 1:
            raise InvalidArgument(f"ny must be a positive integer, got {self.ny!r}")
        if not (math.isfinite(self.pitch) and self.pitch > 0):
            raise InvalidArgument(f"pitch must be positive, got {self.pitch!r}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def size(self) -> int:
        return self.nx * self.ny


def element_positions(g: ArrayGeometry) -> np.ndarray:
    """Element centres as an (nx, ny, 3) array in metres.

    Element (i, j) sits at ((i - (nx-1)/2) p, (j - (ny-1)/2) p, 0), so the
    centroid is the origin.
    """
    xs = (np.arange(g.nx) - (g.nx - 1) / 2.0) * g.pitch
    ys = (np.arange(g.ny) - (g.ny - 1) / 2.0) * g.pitch
    pos = np.zeros((g.nx, g.ny, 3))
    pos[:, :, 0] = xs[:, None]
    pos[:, :, 1] = ys[None, :]
    return pos


@dataclass(frozen=True)
class Direction:
    theta: float  # radians, [0, pi]
    phi: float = 0.0  # radians, [-pi, pi)

    def __post_init__(self):
        if not (math.isfinite(self.theta) and 0.0 <= self.theta <= math.pi):
            raise InvalidArgument(f"theta must lie in [0, pi], got {self.theta!r}")
        if not (math.isfinite(self.phi) and -math.pi <= self.phi < math.pi):
            raise InvalidArgument(f"phi must lie in [-pi, pi), got {self.phi!r}")

    @classmethod
    def from_degrees(cls, theta_deg: float, phi_deg: float = 0.0) -> "Direction":
        """Build from degrees; a negative theta flips the azimuth by 180 deg."""
        theta = math.radians(theta_deg)
        phi = math.radians(phi_deg)
        if theta < 0:
            theta = -theta
            phi += math.pi
        phi = (phi + math.pi) % TWO_PI - math.pi
        return cls(theta, phi)

    @property
    def unit(self) -> np.ndarray:
        return direction_to_unit(self)


def direction_to_unit(d: Direction) -> np.ndarray:
    st = math.sin(d.theta)
    return np.array([st * math.cos(d.phi), st * math.sin(d.phi), math.cos(d.theta)])


def unit_to_direction(u) -> Direction:
    """Inverse of :func:`direction_to_unit` (the vector is normalised first)."""
    u = np.asarray(u, dtype=float)
    n = float(np.linalg.norm(u))
    if not n > 0:
        raise InvalidArgument("cannot convert a zero vector to a direction")
    x, y, z = u / n
    theta = math.atan2(math.hypot(x, y), z)
    phi = math.atan2(y, x)
    if phi >= math.pi:
        phi = -math.pi
    return Direction(theta, phi)


def cut_directions(theta_signed, phi_cut: float = 0.0) -> np.ndarray:
    """Unit vectors for signed polar angles in the azimuth plane ``phi_cut``.

    Returns an (n, 3) array. Negative angles land on the opposite side of
    the normal, i.e. azimuth ``phi_cut + pi``.
    """
    t = np.asarray(theta_signed, dtype=float)
    st = np.sin(t)
    return np.stack([st * math.cos(phi_cut), st * math.sin(phi_cut), np.cos(t)], axis=-1)


def grid_directions(theta, phi) -> np.ndarray:
    """Unit vectors on a theta x phi grid, shape (len(theta), len(phi), 3)."""
    t = np.asarray(theta, dtype=float)[:, None]
    p = np.asarray(phi, dtype=float)[None, :]
    st = np.sin(t)
    return np.stack(
        np.broadcast_arrays(st * np.cos(p), st * np.sin(p), np.cos(t)), axis=-1
    )


def wrap_phase(x):
    """Reduce phase(s) to [0, 2*pi).

    Works on scalars and arrays. Non-finite input raises InvalidArgument.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InvalidArgument("phase must be finite")
    w = np.mod(arr, TWO_PI)
    # np.mod of a tiny negative number rounds up to exactly 2*pi
    w = np.where(w >= TWO_PI, 0.0, w)
    if w.ndim == 0:
        return float(w)
    return w


def circular_distance(a, b):
    """Shortest angular separation between phases, in [0, pi]."""
    d = wrap_phase(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    out = np.minimum(d, TWO_PI - d)
    if np.ndim(out) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class PointSource:
    """Positioned feed radiating a spherical wave towards the array.

    ``taper_exponent`` is the q of a cos^q feed pattern whose boresight
    points at the array centre; ``spreading`` adds the 1/r amplitude decay.
    """

    position: tuple[float, float, float]
    taper_exponent: float = 0.0
    spreading: bool = True

    def __post_init__(self):
        pos = tuple(float(v) for v in self.position)
        if len(pos) != 3 or not all(math.isfinite(v) for v in pos):
            raise InvalidArgument("feed position must be a finite 3-vector")
        if not pos[2] > 0:
            raise InvalidArgument(f"feed must sit above the array (z > 0), got z={pos[2]!r}")
        if not (math.isfinite(self.taper_exponent) and self.taper_exponent >= 0):
            raise InvalidArgument("taper_exponent must be >= 0")
        object.__setattr__(self, "position", pos)


@dataclass(frozen=True)
class PlaneWave:
    """Uniform plane wave; ``incidence`` points from the array towards the source."""

    incidence: Direction = field(default_factory=lambda: Direction(0.0, 0.0))
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.incidence.theta < math.pi / 2:
            raise InvalidArgument("plane-wave incidence theta must be < 90 deg")
        if not (math.isfinite(self.amplitude) and self.amplitude > 0):
            raise InvalidArgument("plane-wave amplitude must be positive")


FeedModel = PointSource | PlaneWave
