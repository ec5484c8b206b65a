"""Static ground-state topology oracles.

Berry curvature from the sum-over-states formula, Chern numbers from
sphere quadrature and from a gauge-invariant lattice plaquette method,
and level-crossing location in the coupling strength.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateGroundState
from .model import ChainSpec, FieldPoint, build_heisenberg, param_derivative
from .qcore import EigenSystem, eigh

# Gap below this fraction of |h| counts as a ground-state degeneracy.
DEGENERACY_RTOL = 1e-9


@dataclass(frozen=True)
class CurvatureSample:
    """Berry curvature component F_phitheta at one field point."""

    point: FieldPoint
    f_phitheta: float
    gap: float


@dataclass(frozen=True)
class ChernResult:
    """First Chern number computed three ways for cross-validation."""

    integral_value: float
    lattice_integer: int
    reduced_value: float


def _solve(spec: ChainSpec, p: FieldPoint) -> EigenSystem:
    return eigh(build_heisenberg(spec, p))


def _require_gap(system: EigenSystem, p: FieldPoint) -> float:
    gap = system.ground_gap
    if gap < DEGENERACY_RTOL * p.magnitude:
        raise DegenerateGroundState(
            f"ground state degenerate (gap={gap:.3e}) at "
            f"theta={p.theta:.6g}, phi={p.phi:.6g}"
        )
    return gap


def ground_gap(spec: ChainSpec, p: FieldPoint) -> float:
    """Energy difference between the two lowest levels."""
    return _solve(spec, p).ground_gap


def curvature_spectral(spec: ChainSpec, p: FieldPoint) -> CurvatureSample:
    """Ground-state Berry curvature F_phitheta by sum over states.

    F = i sum_{n>0} [<0|dH/dphi|n><n|dH/dtheta|0> - (theta <-> phi)]
        / (e_n - e_0)^2,

    oriented so a single free spin gives +1/2 at the equator.
    """
    system = _solve(spec, p)
    gap = _require_gap(system, p)
    ground = system.ground_state
    a = system.vectors.conj().T @ (param_derivative(spec, p, "phi") @ ground)
    b = system.vectors.conj().T @ (param_derivative(spec, p, "theta") @ ground)
    denom = (system.values - system.values[0]) ** 2
    denom[0] = 1.0  # excluded term
    terms = -2.0 * np.imag(np.conj(a) * b) / denom
    terms[0] = 0.0
    return CurvatureSample(point=p, f_phitheta=float(terms.sum()), gap=gap)


def curvature_profile(spec: ChainSpec, thetas) -> list[CurvatureSample]:
    """Curvature samples along the phi=0 meridian."""
    return [curvature_spectral(spec, FieldPoint(theta=t)) for t in thetas]


def _gauss_theta_nodes(n_theta: int):
    nodes, weights = np.polynomial.legendre.leggauss(n_theta)
    return 0.5 * math.pi * (nodes + 1.0), 0.5 * math.pi * weights


def chern_integral(spec: ChainSpec, grid: tuple[int, int] = (64, 16)) -> float:
    """First Chern number as the curvature integral over the field sphere.

    Quadrature is Gauss-Legendre in theta against a uniform periodic
    rule in phi; both converge spectrally for the smooth integrand, so
    modest grids reach quadrature-exact results.
    """
    n_theta, n_phi = grid
    thetas, weights = _gauss_theta_nodes(n_theta)
    phis = np.linspace(0.0, 2.0 * math.pi, n_phi, endpoint=False)
    total = 0.0
    for theta, w in zip(thetas, weights):
        row = sum(
            curvature_spectral(spec, FieldPoint(theta=theta, phi=phi)).f_phitheta
            for phi in phis
        )
        total += w * row * (2.0 * math.pi / n_phi)
    return total / (2.0 * math.pi)


def chern_meridian(spec: ChainSpec, n_theta: int = 64) -> float:
    """Chern number via the rotational-invariance shortcut.

    The isotropic interaction makes the curvature phi-independent, so
    the sphere integral collapses to a single meridian integral.
    """
    thetas, weights = _gauss_theta_nodes(n_theta)
    values = [
        curvature_spectral(spec, FieldPoint(theta=t)).f_phitheta for t in thetas
    ]
    return float(np.dot(weights, values))


def chern_lattice(spec: ChainSpec, grid: tuple[int, int] = (24, 24)) -> int:
    """First Chern number from plaquette link phases on a closed grid.

    The Berry connection is discretized into overlap link variables;
    the summed plaquette phase winding is an exact integer for any grid
    fine enough that no plaquette phase wraps past pi.
    """
    n_theta, n_phi = grid
    thetas = np.linspace(0.0, math.pi, n_theta + 1)
    phis = np.linspace(0.0, 2.0 * math.pi, n_phi + 1)
    states = []
    for theta in thetas:
        row = []
        for phi in phis:
            p = FieldPoint(theta=float(theta), phi=float(phi))
            system = _solve(spec, p)
            _require_gap(system, p)
            row.append(system.ground_state)
        states.append(row)
    total = 0.0
    for i in range(n_theta):
        for k in range(n_phi):
            plaquette = (
                np.vdot(states[i][k], states[i + 1][k])
                * np.vdot(states[i + 1][k], states[i + 1][k + 1])
                * np.vdot(states[i + 1][k + 1], states[i][k + 1])
                * np.vdot(states[i][k + 1], states[i][k])
            )
            total += np.angle(plaquette)
    return int(round(total / (2.0 * math.pi)))


def chern_result(spec: ChainSpec, grid: tuple[int, int] = (24, 24)) -> ChernResult:
    """All three Chern estimates bundled for cross-validation."""
    equator = curvature_spectral(spec, FieldPoint(theta=math.pi / 2))
    return ChernResult(
        integral_value=chern_integral(spec),
        lattice_integer=chern_lattice(spec, grid),
        reduced_value=2.0 * equator.f_phitheta,
    )


def find_crossings(
    spec: ChainSpec,
    j_interval: tuple[float, float],
    scan_step: float = 0.01,
    gap_tol: float = 1e-8,
) -> list[float]:
    """Coupling values where the two lowest levels cross.

    The gap is scanned at the north pole (where different magnetization
    sectors may cross); each local minimum is refined by bisection on
    the sign of the gap slope and kept only if the refined gap closes.
    """
    lo, hi = j_interval
    if not lo < hi:
        raise ValueError("j_interval must satisfy lo < hi")
    pole = FieldPoint(theta=0.0)

    def gap_at(j: float) -> float:
        return ground_gap(replace(spec, coupling_j=j), pole)

    def slope(j: float, h: float = 1e-7) -> float:
        return (gap_at(j + h) - gap_at(j - h)) / (2.0 * h)

    n_points = max(2, int(round((hi - lo) / scan_step)) + 1)
    js = np.linspace(lo, hi, n_points)
    gaps = np.array([gap_at(j) for j in js])

    crossings = []
    for k in range(1, len(js) - 1):
        if not (gaps[k] <= gaps[k - 1] and gaps[k] <= gaps[k + 1]):
            continue
        if gaps[k] < gap_tol:
            crossings.append(float(js[k]))
            continue
        a, b = float(js[k - 1]), float(js[k + 1])
        if not (slope(a) < 0.0 < slope(b)):
            continue
        for _ in range(80):
            mid = 0.5 * (a + b)
            if slope(mid) < 0.0:
                a = mid
            else:
                b = mid
            if b - a < 1e-13:
                break
        j_star = 0.5 * (a + b)
        if gap_at(j_star) < gap_tol:
            crossings.append(j_star)
    return crossings
