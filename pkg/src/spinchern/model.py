"""Spin-chain and NMR Hamiltonians with their parameter derivatives.

The chain Hamiltonian is

    H = -sum_j h_vec . sigma_vec_j  -  J sum_j sigma_vec_j . sigma_vec_{j+1}

with an identical external field on every site, isotropic
nearest-neighbor coupling and open boundaries.  The field is
parameterized on a sphere as

    h_vec = |h| (sin(theta) cos(phi), sin(theta) sin(phi), cos(theta)),

the convention under which the phi-derivative of H at the equator is
minus the total y-magnetization.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionCap
from .qcore import PAULI, site_operator

_AXES = ("x", "y", "z")


@dataclass(frozen=True)
class FieldPoint:
    """Spherical coordinates of the external field."""

    theta: float
    phi: float = 0.0
    magnitude: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi):
            raise ValueError(f"theta={self.theta} outside [0, pi]")
        if not (0.0 <= self.phi <= 2 * math.pi):
            raise ValueError(f"phi={self.phi} outside [0, 2*pi]")
        if not (self.magnitude > 0.0 and math.isfinite(self.magnitude)):
            raise ValueError("field magnitude must be positive and finite")


@dataclass(frozen=True)
class ChainSpec:
    """Open Heisenberg chain: size and isotropic coupling strength."""

    n_spins: int
    coupling_j: float
    max_spins: int = 10

    def __post_init__(self):
        if self.n_spins < 1:
            raise ValueError("n_spins must be >= 1")

    @property
    def dim(self) -> int:
        return 2**self.n_spins


@dataclass(frozen=True)
class MoleculeSpec:
    """Per-spin chemical shifts and symmetric scalar coupling table (Hz)."""

    labels: tuple
    shifts_hz: np.ndarray
    couplings_hz: np.ndarray
    t2_s: np.ndarray | None = None  # accepted from input files, unused

    def __post_init__(self):
        shifts = np.asarray(self.shifts_hz, dtype=float)
        couplings = np.asarray(self.couplings_hz, dtype=float)
        object.__setattr__(self, "shifts_hz", shifts)
        object.__setattr__(self, "couplings_hz", couplings)
        n = shifts.size
        if n < 2:
            raise ValueError("molecule needs at least two spins")
        if couplings.shape != (n, n):
            raise ValueError("couplings table must be n_spins x n_spins")
        if not np.allclose(couplings, couplings.T, atol=1e-12):
            raise ValueError("couplings table must be symmetric")
        if not (np.isfinite(shifts).all() and np.isfinite(couplings).all()):
            raise ValueError("molecule parameters must be finite")

    @property
    def n_spins(self) -> int:
        return self.shifts_hz.size

    @classmethod
    def from_json(cls, path) -> "MoleculeSpec":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        t2 = raw.get("t2_s")
        return cls(
            labels=tuple(raw["labels"]),
            shifts_hz=np.asarray(raw["shifts_hz"], dtype=float),
            couplings_hz=np.asarray(raw["couplings_hz"], dtype=float),
            t2_s=None if t2 is None else np.asarray(t2, dtype=float),
        )


def field_cartesian(p: FieldPoint) -> np.ndarray:
    """Cartesian components of the field vector."""
    st, ct = math.sin(p.theta), math.cos(p.theta)
    sp, cp = math.sin(p.phi), math.cos(p.phi)
    return p.magnitude * np.array([st * cp, st * sp, ct])


# Total spin operators and the unit-strength interaction are reused
# heavily by sweeps, so cache them per chain size.
_chain_cache: dict = {}


def _pair_operators(n_spins: int) -> dict:
    """Per-axis sums of adjacent two-site couplings, cached per size."""
    key = ("pairs", n_spins)
    pairs = _chain_cache.get(key)
    if pairs is None:
        dim = 2**n_spins
        pairs = {}
        for axis in _AXES:
            acc = np.zeros((dim, dim), dtype=complex)
            for k in range(n_spins - 1):
                acc += site_operator(PAULI[axis], k, n_spins) @ site_operator(
                    PAULI[axis], k + 1, n_spins
                )
            pairs[axis] = acc
        _chain_cache[key] = pairs
    return pairs


def _chain_operators(n_spins: int):
    ops = _chain_cache.get(n_spins)
    if ops is None:
        totals = {
            axis: sum(site_operator(PAULI[axis], k, n_spins) for k in range(n_spins))
            for axis in _AXES
        }
        pairs = _pair_operators(n_spins)
        interaction = pairs["x"] + pairs["y"] + pairs["z"]
        ops = (totals, interaction)
        _chain_cache[n_spins] = ops
    return ops


def _check_cap(spec: ChainSpec) -> None:
    if spec.n_spins > spec.max_spins:
        raise DimensionCap(
            f"2**{spec.n_spins} exceeds the configured cap 2**{spec.max_spins}"
        )


def build_heisenberg(spec: ChainSpec, p: FieldPoint) -> np.ndarray:
    """Chain Hamiltonian at a field point."""
    _check_cap(spec)
    totals, interaction = _chain_operators(spec.n_spins)
    hx, hy, hz = field_cartesian(p)
    return (
        -hx * totals["x"]
        - hy * totals["y"]
        - hz * totals["z"]
        - spec.coupling_j * interaction
    )


def param_derivative(spec: ChainSpec, p: FieldPoint, which: str) -> np.ndarray:
    """Analytic derivative of the Hamiltonian in ``theta`` or ``phi``.

    Only the field term depends on the angles, so the result is the
    (negated) total spin contracted with the derivative of the field
    direction.
    """
    _check_cap(spec)
    totals, _ = _chain_operators(spec.n_spins)
    st, ct = math.sin(p.theta), math.cos(p.theta)
    sp, cp = math.sin(p.phi), math.cos(p.phi)
    if which == "theta":
        d = (ct * cp, ct * sp, -st)
    elif which == "phi":
        d = (-st * sp, st * cp, 0.0)
    else:
        raise ValueError("which must be 'theta' or 'phi'")
    return -p.magnitude * (d[0] * totals["x"] + d[1] * totals["y"] + d[2] * totals["z"])


def total_magnetization(psi: np.ndarray, axis: str) -> float:
    """Expectation of the total Pauli magnetization along ``axis``."""
    if axis not in _AXES:
        raise ValueError("axis must be one of 'x', 'y', 'z'")
    dim = psi.shape[0]
    n_spins = dim.bit_length() - 1
    if 2**n_spins != dim:
        raise ValueError("state dimension is not a power of two")
    totals, _ = _chain_operators(n_spins)
    return float(np.real(np.vdot(psi, totals[axis] @ psi)))


def _z_diagonals(n_spins: int) -> np.ndarray:
    """Per-site sigma_z eigenvalue patterns over the computational basis."""
    return np.array(
        [
            np.tile(np.repeat(np.array([1.0, -1.0]), 2 ** (n_spins - 1 - i)), 2**i)
            for i in range(n_spins)
        ]
    )


def build_nmr_hamiltonian(m: MoleculeSpec) -> np.ndarray:
    """Natural NMR Hamiltonian: shift and weak-coupling zz terms.

    H = sum_i (w_i/2) sigma_z^i + sum_{i<j} (pi J_ij/2) sigma_z^i sigma_z^j,
    diagonal in the computational basis.  Coefficients are taken
    exactly as supplied (shifts and couplings in Hz).
    """
    n = m.n_spins
    z = _z_diagonals(n)
    diag = np.zeros(2**n)
    for i in range(n):
        diag += 0.5 * m.shifts_hz[i] * z[i]
        for j in range(i + 1, n):
            diag += 0.5 * math.pi * m.couplings_hz[i, j] * z[i] * z[j]
    return np.diag(diag.astype(complex))
