"""Command-line front end.

    rissteer <command> --scenario <path|name> [--out DIR] [--freeze-map] [--element-factor]

Commands: synth, pattern, enhance, sweep, oracle-check. Every run appends a
JSON line with the resolved configuration to ``<out>/runs.jsonl``. Errors
print one JSON object on stderr and exit with a code from ``EXIT_CODES``.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, export
from .errors import (
    InvalidArgument,
    OutOfBand,
    ScenarioParseError,
    ScenarioValidationError,
    TooLargeInstance,
)
from .farfield import (
    array_factor,
    array_factor_at,
    beam_metrics,
    brute_force_best_map,
    direct_sum_oracle,
    element_excitations,
    enhancement,
)
from .geometry import ArrayGeometry
from .scenario import Scenario, load_scenario
from .sweep import frequency_sweep
from .synthesis import continuous_phase_map, optimize_offset, quantization_loss_db

EXIT_CODES = {
    "ok": 0,
    "internal": 1,
    "usage": 2,
    "parse": 3,
    "validation": 4,
    "missing-file": 5,
    "out-of-band": 6,
    "too-large": 7,
    "invalid-argument": 8,
    "oracle-mismatch": 9,
    "artifact": 10,
}

ORACLE_TOL = 1e-12


class ArtifactError(Exception):
    pass


class OracleMismatch(Exception):
    pass


def _classify(exc: BaseException) -> str:
    if isinstance(exc, ScenarioParseError):
        return "parse"
    if isinstance(exc, ScenarioValidationError):
        return "validation"
    if isinstance(exc, FileNotFoundError):
        return "missing-file"
    if isinstance(exc, OutOfBand):
        return "out-of-band"
    if isinstance(exc, TooLargeInstance):
        return "too-large"
    if isinstance(exc, InvalidArgument):
        return "invalid-argument"
    if isinstance(exc, OracleMismatch):
        return "oracle-mismatch"
    if isinstance(exc, ArtifactError):
        return "artifact"
    return "internal"


def _use_element_factor(sc: Scenario, args) -> bool:
    return bool(args.element_factor or sc.pattern.element_factor)


def _synthesize(sc: Scenario):
    delta, sm = optimize_offset(sc.geometry, sc.feed, sc.target, sc.frequency, sc.table, sc.n_offsets)
    pm = continuous_phase_map(sc.geometry, sc.feed, sc.target, delta, sc.frequency)
    return delta, pm, sm


def _check_grid_csv(path, g: ArrayGeometry, integer: bool):
    nx, ny, _, rows = export.read_grid_csv(path)
    if (nx, ny) != g.shape or len(rows) != nx or any(len(r) != ny for r in rows):
        raise ArtifactError(f"{path}: grid does not match geometry {g.shape}")
    conv = int if integer else float
    for r in rows:
        for v in r:
            conv(v)


def _check_rows(path, n_expected: int):
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if len(lines) != n_expected + 1:
        raise ArtifactError(f"{path}: expected {n_expected} data rows, found {len(lines) - 1}")


def cmd_synth(sc: Scenario, out: Path, args) -> tuple[list[Path], dict]:
    delta, pm, sm = _synthesize(sc)
    paths = [
        export.atomic_write(out / "phase_map.csv", export.phase_map_csv(pm)),
        export.atomic_write(out / "state_map.csv", export.state_map_csv(sm)),
        export.atomic_write(out / "phase_map.pgm", export.phase_heatmap(pm)),
        export.atomic_write(out / "state_map.pgm", export.state_heatmap(sm)),
    ]
    _check_grid_csv(paths[0], sc.geometry, integer=False)
    _check_grid_csv(paths[1], sc.geometry, integer=True)
    for p in paths[2:]:
        if export.read_pgm(p).shape != sc.geometry.shape:
            raise ArtifactError(f"{p}: heatmap size does not match geometry")
    summary = {
        "offset_deg": math.degrees(delta),
        "states_used": int(np.unique(sm.indices).size),
        "quantization_loss_db": quantization_loss_db(sc.geometry, sc.feed, sc.target, sc.frequency, sm),
    }
    paths.append(export.atomic_write(out / "synth_summary.txt", export.metrics_text(summary)))
    return paths, summary


def cmd_pattern(sc: Scenario, out: Path, args) -> tuple[list[Path], dict]:
    _, _, sm = _synthesize(sc)
    cut = sc.pattern.cut()
    exc = element_excitations(sc.geometry, sc.feed, sc.frequency)
    pat = array_factor(sc.geometry, exc, sm, cut, sc.frequency, _use_element_factor(sc, args))
    m = beam_metrics(pat)
    metrics = {
        "main_lobe_deg": m.main_lobe_deg,
        "peak_linear": m.peak,
        "hpbw_deg": m.hpbw_deg,
        "sll_db": m.sll_db if m.sll_db is not None else math.nan,
    }
    p_csv = export.atomic_write(out / "pattern.csv", export.pattern_csv(pat))
    _check_rows(p_csv, cut.shape[0])
    p_met = export.atomic_write(out / "pattern_metrics.txt", export.metrics_text(metrics))
    return [p_csv, p_met], metrics


def cmd_enhance(sc: Scenario, out: Path, args) -> tuple[list[Path], dict]:
    _, _, sm = _synthesize(sc)
    per_state = {}
    for s in range(sc.table.n_states):
        e = enhancement(sc.geometry, sc.feed, sm, s, sc.target, sc.frequency)
        per_state[s] = e
    if sc.uniform_state is not None:
        chosen = per_state[sc.uniform_state]
    else:
        chosen = min(per_state.values(), key=lambda e: e.db)
    metrics = {"enhancement_db": chosen.db, "degenerate": chosen.degenerate}
    for s, e in per_state.items():
        metrics[f"enhancement_db_{sc.table.labels[s]}"] = e.db
    path = export.atomic_write(out / "enhancement.txt", export.metrics_text(metrics))
    return [path], metrics


def cmd_sweep(sc: Scenario, out: Path, args) -> tuple[list[Path], dict]:
    freqs = sc.sweep_frequencies or (sc.frequency,)
    entries = frequency_sweep(
        sc.geometry, sc.feed, sc.target, sc.table, freqs,
        freeze_map=bool(args.freeze_map or sc.freeze_map),
        cut=sc.pattern.cut(),
        n_offsets=sc.n_offsets,
        element_factor=_use_element_factor(sc, args),
    )
    lines = ["frequency_hz,main_lobe_deg,peak_linear,hpbw_deg,sll_db,status"]
    for e in entries:
        if e.metrics is None:
            status = e.error.replace(",", ";").replace("\n", " ")
            lines.append(f"{export.fmt(e.frequency)},nan,nan,nan,nan,{status}")
            continue
        m = e.metrics
        sll = m.sll_db if m.sll_db is not None else math.nan
        lines.append(
            f"{export.fmt(e.frequency)},{export.fmt(m.main_lobe_deg)},{export.fmt(m.peak)},"
            f"{export.fmt(m.hpbw_deg)},{export.fmt(sll)},ok"
        )
    path = export.atomic_write(out / "sweep.csv", "\n".join(lines) + "\n")
    _check_rows(path, len(entries))
    n_ok = sum(e.metrics is not None for e in entries)
    return [path], {"frequencies": len(entries), "ok": n_ok}


def oracle_report(sc: Scenario, size: int = 3, n_random: int = 20, seed: int = 0) -> dict:
    """Cross-check the production paths against their oracles on small instances."""
    sub = ArrayGeometry(min(size, sc.geometry.nx), min(size, sc.geometry.ny), sc.geometry.pitch)
    f = sc.frequency
    exc = element_excitations(sub, sc.feed, f)
    _, sm = optimize_offset(sub, sc.feed, sc.target, f, sc.table, sc.n_offsets)
    gamma = sm.reflections(f)
    cut = sc.pattern.cut()
    fast = array_factor(sub, exc, gamma, cut, f).values
    slow = np.array([direct_sum_oracle(sub, exc, gamma, u, f) for u in cut.directions()])
    errors = [float(np.max(np.abs(fast - slow)) / np.max(np.abs(slow)))]

    rng = np.random.default_rng(seed)
    for _ in range(n_random):
        g = ArrayGeometry(size, size, float(rng.uniform(0.2e-3, 3e-3)))
        e = rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape)
        r = rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape)
        t = rng.uniform(0, math.pi / 2, 16)
        p = rng.uniform(-math.pi, math.pi, 16)
        dirs = np.stack([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)], axis=1)
        fi = float(rng.uniform(10e9, 300e9))
        a = np.array([array_factor_at(g, e, r, u, fi) for u in dirs])
        b = np.array([direct_sum_oracle(g, e, r, u, fi) for u in dirs])
        errors.append(float(np.max(np.abs(a - b)) / np.max(np.abs(b))))

    opt_peak = abs(array_factor_at(sub, exc, gamma, sc.target, f))
    _, bf_peak = brute_force_best_map(sub, sc.feed, sc.table, sc.target, f)
    return {
        "sub_nx": sub.nx,
        "sub_ny": sub.ny,
        "instances": len(errors),
        "max_relative_error": max(errors),
        "tolerance": ORACLE_TOL,
        "optimize_offset_peak": opt_peak,
        "brute_force_peak": bf_peak,
        "brute_force_dominates": bool(bf_peak >= opt_peak * (1 - 1e-12)),
    }


def cmd_oracle_check(sc: Scenario, out: Path, args) -> tuple[list[Path], dict]:
    report = oracle_report(sc, size=args.size)
    path = export.atomic_write(out / "oracle_check.txt", export.metrics_text(report))
    if report["max_relative_error"] > ORACLE_TOL or not report["brute_force_dominates"]:
        raise OracleMismatch(
            f"oracle check failed: max relative error {report['max_relative_error']!r}, "
            f"brute force dominates = {report['brute_force_dominates']}"
        )
    return [path], report


COMMANDS = {
    "synth": cmd_synth,
    "pattern": cmd_pattern,
    "enhance": cmd_enhance,
    "sweep": cmd_sweep,
    "oracle-check": cmd_oracle_check,
}


def _record(out: Path, command: str, args, sc: Scenario, artifacts, summary, status: str):
    rec = {
        "time": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "command": command,
        "status": status,
        "rissteer": __version__,
        "numpy": np.__version__,
        "flags": {"freeze_map": bool(args.freeze_map), "element_factor": bool(args.element_factor)},
        "scenario": sc.resolved(),
        "artifacts": {
            p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in artifacts if p.exists()
        },
        "summary": summary,
    }
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "runs.jsonl", "a", encoding="utf-8") as fh:
        fh.write(json.dumps(rec, default=str, sort_keys=True) + "\n")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rissteer", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--scenario", required=True, help="scenario file or shipped scenario name")
    ap.add_argument("--out", help="output directory (overrides the scenario's output_dir)")
    ap.add_argument("--freeze-map", action="store_true",
                    help="sweep: keep the design-frequency map at every frequency")
    ap.add_argument("--element-factor", action="store_true",
                    help="weight patterns by a cos(theta) element factor")
    ap.add_argument("--size", type=int, default=3, help="oracle-check: sub-array edge length")
    return ap


def _fail(kind: str, message: str) -> int:
    code = EXIT_CODES[kind]
    line = json.dumps({"error": kind, "exit_code": code, "message": " ".join(str(message).split())})
    print(line, file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.size < 1:
        return _fail("usage", "--size must be >= 1")
    sc = None
    try:
        sc = load_scenario(args.scenario)
        out = Path(args.out) if args.out else (sc.output_dir or Path("rissteer_out") / sc.name)
        artifacts, summary = COMMANDS[args.command](sc, out, args)
        _record(out, args.command, args, sc, artifacts, summary, "ok")
    except Exception as exc:  # every failure maps to one exit code and one stderr line
        kind = _classify(exc)
        if sc is not None and kind != "internal":
            try:
                out = Path(args.out) if args.out else (sc.output_dir or Path("rissteer_out") / sc.name)
                _record(out, args.command, args, sc, [], {"error": str(exc)}, kind)
            except OSError:
                pass
        return _fail(kind, f"{type(exc).__name__}: {exc}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
