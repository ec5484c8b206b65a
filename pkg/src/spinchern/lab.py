"""Coupling-strength sweeps, plateau statistics and flat-file output.

A sweep scans the chain coupling over a grid and records the curvature
(and Chern number) per point by one of four methods; plateau detection
segments the resulting staircase and summarizes each quantized step.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._version import __version__
from .errors import DegenerateGroundState, LengthMismatch, TooFewRows
from .model import ChainSpec, FieldPoint
from .pulsesim import simulate_protocol_trotter
from .quench import QuenchProtocol, extract_curvature, evolve_quench
from .spectral import chern_lattice, curvature_spectral, ground_gap

METHODS = ("dynamical", "spectral", "lattice", "trotter")

# Worker count for row-parallel sweeps; unset or 1 keeps them serial.
WORKERS_ENV = "SPINCHERN_WORKERS"

# Half the minimal plateau spacing; robust to ramp-method noise ~0.02.
JUMP_THRESHOLD = 0.25


@dataclass(frozen=True)
class SweepConfig:
    """One coupling sweep: chain template, J grid, method and output."""

    spec: ChainSpec
    j_values: tuple
    velocities: tuple = (0.1,)
    steps: int = 300
    method: str = "spectral"
    output_path: str | None = None
    lattice_grid: tuple = (24, 24)

    def __post_init__(self):
        object.__setattr__(self, "j_values", tuple(float(j) for j in self.j_values))
        object.__setattr__(
            self, "velocities", tuple(float(v) for v in self.velocities)
        )
        if not self.j_values:
            raise ValueError("j_values must be nonempty")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.method in ("dynamical", "trotter") and not self.velocities:
            raise ValueError("ramp methods need at least one velocity")


@dataclass(frozen=True)
class SweepRow:
    """Curvature and Chern estimate at one coupling value."""

    j: float
    f_phitheta: float
    chern: float
    gap_at_pole: float
    method: str
    converged: bool


@dataclass(frozen=True)
class PlateauStats:
    """Summary of one quantized segment of a sweep."""

    plateau_mean: float
    plateau_std: float
    j_range: tuple
    nearest_theory: float


def _sweep_row(payload) -> SweepRow:
    n_spins, max_spins, j, method, velocities, steps, grid = payload
    spec = ChainSpec(n_spins=n_spins, coupling_j=j, max_spins=max_spins)
    gap = ground_gap(spec, FieldPoint(theta=0.0))
    try:
        if method == "spectral":
            f = curvature_spectral(spec, FieldPoint(theta=math.pi / 2)).f_phitheta
            chern = 2.0 * f
        elif method == "dynamical":
            results = [
                evolve_quench(spec, QuenchProtocol(v_theta=v, steps=steps))
                for v in velocities
            ]
            f = extract_curvature(results)
            chern = 2.0 * f
        elif method == "trotter":
            results = [
                simulate_protocol_trotter(spec, QuenchProtocol(v_theta=v, steps=steps))
                for v in velocities
            ]
            f = extract_curvature(results)
            chern = 2.0 * f
        else:
            integer = chern_lattice(spec, grid)
            chern = float(integer)
            f = 0.5 * chern
    except DegenerateGroundState:
        return SweepRow(
            j=j,
            f_phitheta=math.nan,
            chern=math.nan,
            gap_at_pole=gap,
            method=method,
            converged=False,
        )
    return SweepRow(
        j=j,
        f_phitheta=float(f),
        chern=float(chern),
        gap_at_pole=gap,
        method=method,
        converged=True,
    )


def run_sweep(cfg: SweepConfig) -> list[SweepRow]:
    """One row per coupling value, sorted by J.

    Coupling values hitting a ground-state degeneracy are kept as
    non-converged rows so downstream plots show where the jump sits.
    Set the worker-count environment variable to parallelize over rows;
    output order is independent of the worker count.
    """
    payloads = [
        (
            cfg.spec.n_spins,
            cfg.spec.max_spins,
            j,
            cfg.method,
            cfg.velocities,
            cfg.steps,
            cfg.lattice_grid,
        )
        for j in sorted(cfg.j_values)
    ]
    workers = int(os.environ.get(WORKERS_ENV, "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_row, payloads))
    return [_sweep_row(p) for p in payloads]


def detect_plateaus(rows) -> list[PlateauStats]:
    """Segment a sweep at jumps and degeneracies; summarize each piece.

    Adjacent converged rows whose curvature differs by more than
    ``JUMP_THRESHOLD`` start a new segment, as does any non-converged
    row.  Every segment is reported, including single-row ones between
    closely spaced jumps.
    """
    if sum(1 for r in rows if r.converged) < 3:
        raise TooFewRows("plateau detection needs at least 3 converged rows")
    ordered = sorted(rows, key=lambda r: r.j)
    segments: list[list[SweepRow]] = []
    current: list[SweepRow] = []
    for row in ordered:
        if not row.converged:
            if current:
                segments.append(current)
                current = []
            continue
        if current and abs(row.f_phitheta - current[-1].f_phitheta) > JUMP_THRESHOLD:
            segments.append(current)
            current = []
        current.append(row)
    if current:
        segments.append(current)

    stats = []
    for seg in segments:
        values = np.array([r.f_phitheta for r in seg])
        mean = float(values.mean())
        stats.append(
            PlateauStats(
                plateau_mean=mean,
                plateau_std=float(values.std()),
                j_range=(seg[0].j, seg[-1].j),
                nearest_theory=round(2.0 * mean) / 2.0,
            )
        )
    return stats


def deviation_report(observed, theory) -> float:
    """Root mean square deviation between observed and theory values."""
    observed = list(observed)
    theory = list(theory)
    if not observed or len(observed) != len(theory):
        raise LengthMismatch(
            f"observed has {len(observed)} entries, theory has {len(theory)}"
        )
    diffs = np.array(observed) - np.array(theory)
    return float(np.sqrt(np.mean(diffs**2)))


def _format_float(x: float) -> str:
    return format(float(x), ".17g")


def export_results(
    rows,
    stats,
    path,
    *,
    config: SweepConfig | None = None,
    crossings=None,
    seed=None,
) -> None:
    """CSV table of rows plus a JSON sidecar with run metadata.

    Floats are serialized with 17 significant digits, so re-importing
    reproduces them bit-exactly.
    """
    path = os.fspath(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["j", "f_phitheta", "chern", "gap_at_pole", "method", "converged"])
        for r in rows:
            writer.writerow(
                [
                    _format_float(r.j),
                    _format_float(r.f_phitheta),
                    _format_float(r.chern),
                    _format_float(r.gap_at_pole),
                    r.method,
                    "true" if r.converged else "false",
                ]
            )

    sidecar = {
        "version": __version__,
        "seed": seed,
        "config": None
        if config is None
        else {
            "n_spins": config.spec.n_spins,
            "coupling_j": config.spec.coupling_j,
            "max_spins": config.spec.max_spins,
            "j_values": list(config.j_values),
            "velocities": list(config.velocities),
            "steps": config.steps,
            "method": config.method,
            "output_path": config.output_path,
            "lattice_grid": list(config.lattice_grid),
        },
        "plateaus": [
            {
                "plateau_mean": s.plateau_mean,
                "plateau_std": s.plateau_std,
                "j_range": list(s.j_range),
                "nearest_theory": s.nearest_theory,
            }
            for s in stats
        ],
        "crossings": [] if crossings is None else list(crossings),
    }
    base, _ = os.path.splitext(path)
    with open(base + ".json", "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2)
        fh.write("\n")


def import_results(path) -> list[SweepRow]:
    """Read back a CSV written by export_results."""
    rows = []
    with open(os.fspath(path), newline="", encoding="utf-8") as fh:
        for record in csv.DictReader(fh):
            rows.append(
                SweepRow(
                    j=float(record["j"]),
                    f_phitheta=float(record["f_phitheta"]),
                    chern=float(record["chern"]),
                    gap_at_pole=float(record["gap_at_pole"]),
                    method=record["method"],
                    converged=record["converged"] == "true",
                )
            )
    return rows


def default_j_grid(step: float = 0.05, lo: float = -2.0, hi: float = 2.0) -> tuple:
    """The standard coupling grid bracketing every crossing for N <= 4."""
    count = int(round((hi - lo) / step)) + 1
    return tuple(float(j) for j in np.linspace(lo, hi, count))
