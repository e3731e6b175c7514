"""CSV, metrics and portable-graymap writers.

Floats are written with ``repr`` (shortest round-trip decimal) so repeated
runs produce byte-identical files. Every writer goes through a temporary
file in the target directory followed by an atomic rename.
"""

from __future__ import annotations

import math
import os
import re
import tempfile
from pathlib import Path

import numpy as np

from .farfield import Cut
from .geometry import TWO_PI
from .maps import PhaseMap, StateMap

_PGM_HEADER = re.compile(rb"P5\s+(\d+)\s+(\d+)\s+(\d+)\s")


def fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def atomic_write(path, data: bytes | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode("utf-8")
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _grid_csv(nx, ny, frequency, rows) -> str:
    lines = ["# nx,ny,frequency_hz", f"{nx},{ny},{fmt(frequency)}"]
    lines.extend(",".join(r) for r in rows)
    return "\n".join(lines) + "\n"


def phase_map_csv(pm: PhaseMap) -> str:
    """Row i lists elements (i, 0..ny-1); entries in degrees."""
    deg = np.rad2deg(pm.values)
    return _grid_csv(pm.geometry.nx, pm.geometry.ny, pm.frequency,
                     ([fmt(v) for v in row] for row in deg))


def state_map_csv(sm: StateMap) -> str:
    return _grid_csv(sm.geometry.nx, sm.geometry.ny, sm.frequency,
                     ([str(int(v)) for v in row] for row in sm.indices))


def read_grid_csv(path) -> tuple[int, int, float, list[list[str]]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if len(lines) < 2 or lines[0] != "# nx,ny,frequency_hz":
        raise ValueError(f"{path}: missing grid header")
    nx, ny, f = lines[1].split(",")
    rows = [ln.split(",") for ln in lines[2:]]
    return int(nx), int(ny), float(f), rows


def pgm(levels: np.ndarray) -> bytes:
    """8-bit binary graymap (P5). Columns follow i (x), rows run from top j=ny-1 down."""
    img = np.asarray(levels).T[::-1]
    h, w = img.shape
    header = f"P5\n{w} {h}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(img, dtype=np.uint8).tobytes()


def read_pgm(path) -> np.ndarray:
    """Inverse of :func:`pgm`; returns levels indexed [i, j]."""
    raw = Path(path).read_bytes()
    m = _PGM_HEADER.match(raw)
    if m is None or int(m.group(3)) != 255:
        raise ValueError(f"{path}: not an 8-bit P5 graymap")
    w, h = int(m.group(1)), int(m.group(2))
    img = np.frombuffer(raw[m.end():m.end() + w * h], dtype=np.uint8).reshape(h, w)
    return img[::-1].T


def phase_heatmap(pm: PhaseMap) -> bytes:
    levels = np.rint(pm.values / TWO_PI * 255.0)
    return pgm(np.clip(levels, 0, 255))


def state_heatmap(sm: StateMap) -> bytes:
    n = sm.table.n_states
    levels = np.rint(sm.indices * (255.0 / (n - 1)))
    return pgm(levels)


def pattern_csv(pattern) -> str:
    """Columns theta_deg, phi_deg, re, im, mag_db_normalized."""
    obs = pattern.observe
    db = pattern.normalized_db()
    vals = pattern.values
    lines = ["theta_deg,phi_deg,re,im,mag_db_normalized"]
    if isinstance(obs, Cut):
        theta_deg, phi = obs.labels_deg()
        for t, v, d in zip(theta_deg, vals, db):
            lines.append(f"{fmt(t)},{fmt(phi)},{fmt(v.real)},{fmt(v.imag)},{fmt(d)}")
    else:
        for a, t in enumerate(np.rad2deg(obs.theta)):
            for b, p in enumerate(np.rad2deg(obs.phi)):
                v = vals[a, b]
                lines.append(f"{fmt(t)},{fmt(p)},{fmt(v.real)},{fmt(v.imag)},{fmt(db[a, b])}")
    return "\n".join(lines) + "\n"


def metrics_text(values: dict) -> str:
    """``key = value`` lines; readable as TOML."""
    out = []
    for key, v in values.items():
        if isinstance(v, bool):
            out.append(f"{key} = {'true' if v else 'false'}")
        elif isinstance(v, (int, np.integer)):
            out.append(f"{key} = {int(v)}")
        elif isinstance(v, str):
            out.append(f'{key} = "{v}"')
        else:
            out.append(f"{key} = {fmt(v)}")
    return "\n".join(out) + "\n"
