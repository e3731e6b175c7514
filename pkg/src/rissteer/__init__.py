"""Phase-map synthesis and far-field evaluation for 1-bit reconfigurable intelligent surfaces."""

__version__ = "0.1.0"

from .errors import (
    InvalidArgument,
    OutOfBand,
    RisError,
    ScenarioParseError,
    ScenarioValidationError,
    TooLargeInstance,
)
from .geometry import (
    SPEED_OF_LIGHT,
    ArrayGeometry,
    Direction,
    PlaneWave,
    PointSource,
    circular_distance,
    direction_to_unit,
    element_positions,
    unit_to_direction,
    wavenumber,
    wrap_phase,
)
from .unitcell import (
    CellState,
    UnitCellStateTable,
    golden_table,
    load_table,
    reflection_at,
    state_phase_difference,
)
from .maps import PhaseMap, StateMap
from .farfield import (
    BeamMetrics,
    Cut,
    Pattern,
    SphereGrid,
    array_factor,
    array_factor_at,
    beam_metrics,
    brute_force_best_map,
    direct_sum_oracle,
    element_excitations,
    enhancement,
)
from .synthesis import continuous_phase_map, optimize_offset, quantize_map
from .sweep import frequency_sweep
from .scenario import Scenario, load_scenario
