import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rissteer import (
    CellState,
    InvalidArgument,
    OutOfBand,
    ScenarioValidationError,
    UnitCellStateTable,
    load_table,
    reflection_at,
    state_phase_difference,
)
from rissteer.unitcell import table_from_dict

from conftest import F0


def two_state(p0, p1, f=F0):
    return UnitCellStateTable((CellState("A", [f], [1.0], [p0]), CellState("B", [f], [1.0], [p1])), f)


class TestReflectionAt:
    def test_golden_off_state(self, table):
        g = reflection_at(table, 0, F0)
        assert abs(g) == pytest.approx(10 ** (-1.2 / 20), rel=1e-12)
        assert abs(g) == pytest.approx(0.8710, abs=5e-5)
        assert np.angle(g) == 0.0

    def test_single_sample_exact(self):
        s = CellState("X", [1e9], [0.5], [1.25])
        t = UnitCellStateTable((s, s), 1e9)
        assert reflection_at(t, 1, 1e9) == 0.5 * np.exp(1.25j)

    def test_linear_midpoint(self):
        s = CellState("X", [1e9, 2e9], [0.8, 1.0], [0.0, 0.2])
        mag, ph = s.sample(1.5e9)
        assert mag == pytest.approx(0.9, abs=1e-15)
        assert ph == pytest.approx(0.1, abs=1e-15)

    def test_interpolation_across_the_seam(self):
        s = CellState("X", [1e9, 2e9], [1.0, 1.0], [math.radians(350), math.radians(10)])
        _, ph = s.sample(1.5e9)
        assert ph == pytest.approx(2 * math.pi, abs=1e-12)

    def test_out_of_band(self, table):
        with pytest.raises(OutOfBand):
            reflection_at(table, 0, 99e9)

    @pytest.mark.parametrize("idx", [-1, 2, 0.5, True])
    def test_invalid_state_index(self, table, idx):
        with pytest.raises(InvalidArgument):
            reflection_at(table, idx, F0)


class TestStatePhaseDifference:
    def test_golden_is_pi(self, table):
        assert state_phase_difference(table, F0) == pytest.approx(math.pi, abs=1e-9)

    def test_identical_states(self):
        assert state_phase_difference(two_state(0.3, 0.3), F0) == 0.0

    def test_wraps(self):
        d = state_phase_difference(two_state(0.0, math.radians(350)), F0)
        assert d == pytest.approx(math.radians(10), abs=1e-12)

    def test_needs_two_states(self):
        s = CellState("X", [F0], [1.0], [0.0])
        with pytest.raises(InvalidArgument):
            state_phase_difference(UnitCellStateTable((s, s, s), F0), F0)


class TestValidation:
    def test_magnitude_above_one(self):
        with pytest.raises(InvalidArgument):
            CellState("X", [1e9], [1.01], [0.0])

    def test_non_monotone(self):
        with pytest.raises(InvalidArgument):
            CellState("X", [2e9, 1e9], [1.0, 1.0], [0.0, 0.0])

    def test_half_turn_step_is_ambiguous(self):
        with pytest.raises(InvalidArgument):
            CellState("X", [1e9, 2e9], [1.0, 1.0], [0.0, math.pi])

    def test_design_frequency_must_be_covered(self):
        s = CellState("X", [1e9, 2e9], [1.0, 1.0], [0.0, 0.1])
        with pytest.raises(InvalidArgument):
            UnitCellStateTable((s, s), 3e9)

    def test_single_state_rejected(self):
        s = CellState("X", [1e9], [1.0], [0.0])
        with pytest.raises(InvalidArgument):
            UnitCellStateTable((s,), 1e9)


# Tables with phase steps strictly below pi between adjacent samples.
@st.composite
def cell_states(draw):
    n = draw(st.integers(1, 8))
    steps = draw(st.lists(st.floats(1e6, 1e9), min_size=n, max_size=n))
    freqs = 90e9 + np.cumsum(steps)
    mags = draw(st.lists(st.floats(0.01, 1.0), min_size=n, max_size=n))
    start = draw(st.floats(-10.0, 10.0))
    dph = draw(st.lists(st.floats(-3.0, 3.0), min_size=n, max_size=n))
    phases = start + np.concatenate([[0.0], np.cumsum(dph[1:])])
    return CellState("S", freqs, mags, phases)


class TestInterpolationProperties:
    @given(cell_states())
    def test_exact_at_samples(self, s):
        for f, m, p in zip(s.frequencies, s.magnitudes, s.phases):
            mag, ph = s.sample(float(f))
            assert mag == m and ph == p

    @given(cell_states(), st.floats(0.0, 1.0))
    def test_within_bracket(self, s, t):
        if s.frequencies.size < 2:
            return
        k = 0
        f = s.frequencies[k] + t * (s.frequencies[k + 1] - s.frequencies[k])
        mag, ph = s.sample(float(f))
        lo, hi = sorted(s.magnitudes[k:k + 2])
        assert lo - 1e-15 <= mag <= hi + 1e-15
        p0 = s.phases[k]
        step = (s.phases[k + 1] - p0 + math.pi) % (2 * math.pi) - math.pi
        a, b = sorted((p0, p0 + step))
        assert a - 1e-12 <= ph <= b + 1e-12

    def test_continuity(self):
        s = CellState("S", [100e9, 101e9], [0.8, 0.95], [0.2, 2.9])
        t = UnitCellStateTable((s, s), 100e9)
        h = 1e9
        f = 100.3e9
        for delta in (1e7, 1e5, 1e3, 1e1):
            diff = abs(reflection_at(t, 0, f) - reflection_at(t, 0, f + delta))
            # |dGamma/df| <= (|dm| + |dphi|) / h for this table
            assert diff <= (0.15 + 2.7) * delta / h * 1.0001


class TestTableFile:
    def test_load_converts_units(self, tmp_path):
        p = tmp_path / "t.toml"
        p.write_text(
            'design_frequency_hz = 1e9\n'
            '[[states]]\nlabel = "OFF"\nrows = [[1e9, -6.0, 90.0]]\n'
            '[[states]]\nlabel = "ON"\nrows = [[1e9, 0.0, -90.0]]\n'
        )
        t = load_table(p)
        assert t.labels == ["OFF", "ON"]
        mag, ph = t.state(0).sample(1e9)
        assert mag == pytest.approx(10 ** (-6 / 20))
        assert ph == pytest.approx(math.pi / 2)

    def test_positive_db_rejected(self):
        doc = {"design_frequency_hz": 1e9,
               "states": [{"label": "A", "rows": [[1e9, 0.5, 0.0]]}, {"label": "B", "rows": [[1e9, 0.0, 0.0]]}]}
        with pytest.raises(ScenarioValidationError, match="mag_db"):
            table_from_dict(doc)

    def test_non_monotone_rejected(self):
        doc = {"design_frequency_hz": 1e9,
               "states": [{"label": "A", "rows": [[2e9, 0, 0], [1e9, 0, 0]]},
                          {"label": "B", "rows": [[1e9, 0.0, 0.0]]}]}
        with pytest.raises(ScenarioValidationError, match="increasing"):
            table_from_dict(doc)

    def test_unknown_key_named(self):
        doc = {"design_frequency_hz": 1e9, "colour": "red", "states": []}
        with pytest.raises(ScenarioValidationError, match="colour"):
            table_from_dict(doc)

    def test_shipped_golden_matches_builtin(self, table):
        from rissteer.scenario import builtin_path

        t = load_table(builtin_path("golden_table"))
        assert t.design_frequency == F0
        for i in range(2):
            assert reflection_at(t, i, F0) == pytest.approx(reflection_at(table, i, F0), abs=1e-15)
