"""Dynamical curvature measurement by quasiadiabatic polar quench.

The polar angle is ramped from the north pole to the equator with a
linearly growing angular velocity; the transverse magnetization picked
up en route is first order in the ramp rate with the Berry curvature as
the proportionality constant.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DegenerateGroundState,
    OutOfRange,
    StepCountTooSmall,
    VelocityOutOfLinearZone,
)
from .model import ChainSpec, FieldPoint, param_derivative, total_magnetization
from .model import _chain_operators

# Largest ramp rate where the linear response window has been mapped.
LINEAR_ZONE_CAP = 1.53

# Magnetization drift beyond this on step doubling flags non-convergence.
CONVERGENCE_TOL = 1e-3


@dataclass(frozen=True)
class QuenchProtocol:
    """Polar ramp theta(t) = v^2 t^2 / (2 pi) ending at the equator."""

    v_theta: float
    steps: int = 300

    def __post_init__(self) -> None:
        if self.v_theta <= 0.0:
            raise OutOfRange("v_theta must be positive")
        if self.steps < 1:
            raise OutOfRange("steps must be at least 1")

    @property
    def total_time(self) -> float:
        return math.pi / self.v_theta


@dataclass(frozen=True)
class QuenchResult:
    """Final state and the curvature read off one ramp."""

    final_state: np.ndarray
    m_phi: float
    f_extracted: float
    v_theta: float
    adiabatic_overlap: float


def theta_of_t(protocol: QuenchProtocol, t: float) -> float:
    """Ramp profile; quadratic in t so the rate grows linearly from zero."""
    total = protocol.total_time
    if t < 0.0 or t > total * (1.0 + 1e-12):
        raise OutOfRange(f"t={t:.6g} outside ramp window [0, {total:.6g}]")
    return protocol.v_theta**2 * t**2 / (2.0 * math.pi)


def _ramp_pieces(spec: ChainSpec, magnitude: float):
    totals, interaction = _chain_operators(spec.n_spins)
    return (
        -magnitude * totals["x"],
        -magnitude * totals["z"],
        -spec.coupling_j * interaction,
    )


def _evolve(spec: ChainSpec, protocol: QuenchProtocol, magnitude: float):
    sin_part, cos_part, coupling_part = _ramp_pieces(spec, magnitude)
    start = cos_part + coupling_part
    values, vectors = np.linalg.eigh(start)
    if values[1] - values[0] < 1e-9 * magnitude:
        raise DegenerateGroundState(
            f"initial ground state degenerate (gap={values[1] - values[0]:.3e})"
        )
    psi = vectors[:, 0].astype(complex)

    dt = protocol.total_time / protocol.steps
    for k in range(protocol.steps):
        theta = theta_of_t(protocol, (k + 0.5) * dt)
        h = math.sin(theta) * sin_part + math.cos(theta) * cos_part + coupling_part
        values, vectors = np.linalg.eigh(h)
        psi = vectors @ (np.exp(-1j * values * dt) * (vectors.conj().T @ psi))
    return psi


def evolve_quench(
    spec: ChainSpec,
    protocol: QuenchProtocol,
    *,
    check_convergence: bool = False,
) -> QuenchResult:
    """Integrate the ramp with midpoint-sampled piecewise-constant steps.

    With ``check_convergence`` the step count is doubled once and the
    run rejected if the transverse magnetization moves by more than
    ``CONVERGENCE_TOL``.
    """
    magnitude = 1.0
    psi = _evolve(spec, protocol, magnitude)
    theta_final = theta_of_t(protocol, protocol.total_time)
    m_phi = total_magnetization(psi, "y") * math.sin(theta_final)

    if check_convergence:
        fine = _evolve(spec, replace(protocol, steps=2 * protocol.steps), magnitude)
        m_fine = total_magnetization(fine, "y") * math.sin(theta_final)
        if abs(m_fine - m_phi) > CONVERGENCE_TOL:
            raise StepCountTooSmall(
                f"m_phi drifts by {abs(m_fine - m_phi):.3e} on step doubling; "
                f"increase steps beyond {protocol.steps}"
            )

    sin_part, cos_part, coupling_part = _ramp_pieces(spec, magnitude)
    h_final = (
        math.sin(theta_final) * sin_part
        + math.cos(theta_final) * cos_part
        + coupling_part
    )
    values, vectors = np.linalg.eigh(h_final)
    overlap = abs(np.vdot(vectors[:, 0], psi)) ** 2

    return QuenchResult(
        final_state=psi,
        m_phi=float(m_phi),
        f_extracted=float(m_phi / protocol.v_theta),
        v_theta=protocol.v_theta,
        adiabatic_overlap=float(overlap),
    )


def generalized_force(spec: ChainSpec, p: FieldPoint, state: np.ndarray) -> float:
    """Expectation of -dH/dphi, the observable conjugate to the azimuth."""
    return float(-np.real(np.vdot(state, param_derivative(spec, p, "phi") @ state)))


def extract_curvature(results, *, linear_zone_cap: float = LINEAR_ZONE_CAP) -> float:
    """Curvature from one or more ramps.

    A single result gives the plain ratio m_phi / v; several results are
    combined by a least-squares fit of m_phi = F v through the origin.
    Rates beyond the mapped linear zone only generate a warning, since
    the estimate stays well defined.
    """
    results = list(results)
    if not results:
        raise ValueError("no quench results supplied")
    if any(r.v_theta > linear_zone_cap for r in results):
        warnings.warn(
            f"ramp rate exceeds the linear response zone cap {linear_zone_cap}",
            VelocityOutOfLinearZone,
        )
    if len(results) == 1:
        return results[0].m_phi / results[0].v_theta
    v = np.array([r.v_theta for r in results])
    m = np.array([r.m_phi for r in results])
    return float(np.dot(v, m) / np.dot(v, v))


def linear_zone_scan(
    spec: ChainSpec,
    velocities,
    steps: int = 300,
) -> list[tuple[float, float]]:
    """Table of (rate, m_phi/rate) for mapping the linear response zone."""
    velocities = list(velocities)
    if any(v <= 0.0 for v in velocities):
        raise OutOfRange("ramp rates must be positive")
    if sorted(velocities) != velocities:
        raise ValueError("velocities must be ascending")
    out = []
    for v in velocities:
        res = evolve_quench(spec, QuenchProtocol(v_theta=v, steps=steps))
        out.append((v, res.m_phi / v))
    return out
