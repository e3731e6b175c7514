"""Array-level frequency sweep over a tabulated unit cell."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import RisError
from .farfield import BeamMetrics, Cut, array_factor, beam_metrics, element_excitations
from .synthesis import DEFAULT_OFFSETS, optimize_offset


@dataclass(frozen=True)
class SweepEntry:
    frequency: float
    metrics: BeamMetrics | None
    error: str | None = None


def frequency_sweep(g, feed, u0, table, f_list, *, freeze_map=False, cut=None,
                    n_offsets=DEFAULT_OFFSETS, element_factor=False):
    """Beam metrics at each frequency in ``f_list``.

    By default the map is re-synthesised at every frequency. With
    ``freeze_map`` the map synthesised at the table's design frequency is
    kept and only the cell reflections and the feed phase follow ``f``.
    Failures (typically out-of-band frequencies) are recorded per entry.
    """
    cut = cut if cut is not None else Cut.degrees()
    frozen = None
    if freeze_map:
        frozen = optimize_offset(g, feed, u0, table.design_frequency, table, n_offsets)[1]
    out = []
    for f in f_list:
        f = float(f)
        try:
            sm = frozen if frozen is not None else optimize_offset(g, feed, u0, f, table, n_offsets)[1]
            exc = element_excitations(g, feed, f)
            pat = array_factor(g, exc, sm.reflections(f), cut, f, element_factor)
            out.append(SweepEntry(f, beam_metrics(pat)))
        except RisError as exc:
            out.append(SweepEntry(f, None, f"{type(exc).__name__}: {exc}"))
    return out
