import math

import numpy as np
import pytest

from rissteer import (
    ArrayGeometry,
    CellState,
    Cut,
    PhaseMap,
    StateMap,
    UnitCellStateTable,
    array_factor,
)
from rissteer import export

from conftest import F0, PITCH


def test_fmt_round_trips():
    for v in (0.1, 1 / 3, 100.75e9, -1e-300, 2.0):
        assert float(export.fmt(v)) == v
    assert export.fmt(math.inf) == "inf" and export.fmt(-math.inf) == "-inf"


def test_phase_csv_layout():
    g = ArrayGeometry(2, 3, PITCH)
    pm = PhaseMap(np.radians([[0.0, 90.0, 180.0], [270.0, 45.0, 1.0]]), g, F0)
    lines = export.phase_map_csv(pm).splitlines()
    assert lines[0] == "# nx,ny,frequency_hz"
    assert lines[1] == "2,3,100750000000.0"
    assert [float(v) for v in lines[2].split(",")] == pytest.approx([0.0, 90.0, 180.0])
    assert len(lines) == 4


def test_state_csv_and_reader(tmp_path, table):
    g = ArrayGeometry(3, 2, PITCH)
    sm = StateMap(np.array([[0, 1], [1, 1], [0, 0]]), g, table, F0)
    p = export.atomic_write(tmp_path / "s.csv", export.state_map_csv(sm))
    nx, ny, f, rows = export.read_grid_csv(p)
    assert (nx, ny, f) == (3, 2, F0)
    assert [[int(v) for v in r] for r in rows] == sm.indices.tolist()


def test_pgm_round_trip(tmp_path):
    levels = np.arange(12).reshape(4, 3) * 20  # includes byte values that look like whitespace
    levels[0, 0] = 10
    levels[1, 1] = 32
    p = export.atomic_write(tmp_path / "x.pgm", export.pgm(levels))
    raw = p.read_bytes()
    assert raw.startswith(b"P5\n4 3\n255\n")
    assert np.array_equal(export.read_pgm(p), levels)


def test_state_heatmap_levels(tmp_path):
    states = tuple(CellState(f"S{i}", [F0], [1.0], [i * math.pi / 2]) for i in range(4))
    t = UnitCellStateTable(states, F0)
    g = ArrayGeometry(4, 1, PITCH)
    sm = StateMap(np.array([[0], [1], [2], [3]]), g, t, F0)
    p = export.atomic_write(tmp_path / "s.pgm", export.state_heatmap(sm))
    assert export.read_pgm(p)[:, 0].tolist() == [0, 85, 170, 255]


def test_phase_heatmap_scale(tmp_path):
    g = ArrayGeometry(3, 1, PITCH)
    pm = PhaseMap(np.array([[0.0], [math.pi], [2 * math.pi - 1e-9]]), g, F0)
    p = export.atomic_write(tmp_path / "p.pgm", export.phase_heatmap(pm))
    assert export.read_pgm(p)[:, 0].tolist() == [0, 128, 255]


def test_pattern_csv_columns(rng):
    g = ArrayGeometry(3, 3, PITCH)
    w = rng.normal(size=g.shape) + 0j
    p = array_factor(g, w, np.ones(g.shape), Cut.degrees(-90, 90, 45, phi=30), F0)
    lines = export.pattern_csv(p).splitlines()
    assert lines[0] == "theta_deg,phi_deg,re,im,mag_db_normalized"
    assert len(lines) == 6
    first = lines[1].split(",")
    assert first[0] == "-90.0" and first[1] == "30.0"
    assert max(float(r.split(",")[4]) for r in lines[1:]) == 0.0


def test_atomic_write_leaves_no_temp(tmp_path):
    export.atomic_write(tmp_path / "a" / "b.txt", "hello\n")
    assert sorted(x.name for x in (tmp_path / "a").iterdir()) == ["b.txt"]


def test_metrics_text_is_toml():
    from rissteer._toml import tomllib

    text = export.metrics_text({"main_lobe_deg": 0.0, "sll_db": math.nan, "n": 3, "flag": True, "enh": math.inf})
    data = tomllib.loads(text)
    assert data["main_lobe_deg"] == 0.0 and math.isnan(data["sll_db"])
    assert data["n"] == 3 and data["flag"] is True and data["enh"] == math.inf
