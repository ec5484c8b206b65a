"""NMR realization layer: Trotter steps, pulse loops, zz refocusing.

The ramp protocol is decomposed into symmetric Trotter steps built from
collective rotations, diagonal field+zz segments and an xx+yy exchange
segment.  The diagonal segments map onto free NMR evolution with
deliberately off-resonant frames; the zz part of that evolution is
manufactured from a molecule's native coupling table by a refocusing
compiler that places pi pulses between delay segments.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DegenerateCouplings,
    DegenerateGroundState,
    OutOfRange,
    UnphysicalDurations,
)
from .model import (
    ChainSpec,
    FieldPoint,
    MoleculeSpec,
    _pair_operators,
    _z_diagonals,
    build_heisenberg,
    total_magnetization,
)
from .qcore import PAULI, expm_i
from .quench import QuenchProtocol, QuenchResult, theta_of_t

# Adjacent couplings closer than this (relative) cannot be told apart
# by the closed-form segment timings.
_COUPLING_RTOL = 1e-12


def _collective_ry(n_spins: int, angle: float) -> np.ndarray:
    """Simultaneous y-rotation of every spin; real orthogonal matrix."""
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    single = np.array([[c, -s], [s, c]])
    out = np.array([[1.0]])
    for _ in range(n_spins):
        out = np.kron(out, single)
    return out


def _split_parts(spec: ChainSpec, magnitude: float):
    """Diagonal (field+zz) part as a vector and the xx+yy part as a matrix."""
    z = _z_diagonals(spec.n_spins)
    adjacent_zz = (z[:-1] * z[1:]).sum(axis=0)
    a_diag = -magnitude * z.sum(axis=0) - spec.coupling_j * adjacent_zz
    pairs = _pair_operators(spec.n_spins)
    b_part = -spec.coupling_j * (pairs["x"] + pairs["y"])
    return a_diag, b_part


def trotter_step(spec: ChainSpec, p: FieldPoint, tau: float) -> np.ndarray:
    """One symmetric split step for the chain Hamiltonian at phi = 0.

    R_y(theta) e^{-i(H_z+H_zz)tau/2} e^{-i(H_xx+H_yy)tau}
    e^{-i(H_z+H_zz)tau/2} R_y(-theta); local error is third order in
    tau.  The rotation carries the field direction, so only the phi=0
    meridian is reachable.
    """
    if p.phi != 0.0:
        raise ValueError("trotter_step is defined on the phi=0 meridian")
    if tau <= 0.0:
        raise ValueError("tau must be positive")
    a_diag, b_part = _split_parts(spec, p.magnitude)
    half = np.exp(-0.5j * a_diag * tau)
    u_b = expm_i(b_part, tau)
    core = (half[:, None] * u_b) * half[None, :]
    rot = _collective_ry(spec.n_spins, p.theta)
    return rot @ core @ rot.T


def _trotter_evolve(
    spec: ChainSpec,
    protocol: QuenchProtocol,
    magnitude: float,
    deltas: np.ndarray | None = None,
) -> np.ndarray:
    """Final state of the Trotterized ramp, optionally with per-step
    rotation-angle offsets (shared by the framing +/- rotations)."""
    a_diag, b_part = _split_parts(spec, magnitude)
    start = np.diag(a_diag.astype(complex)) + b_part
    values, vectors = np.linalg.eigh(start)
    if values[1] - values[0] < 1e-9 * magnitude:
        raise DegenerateGroundState(
            f"initial ground state degenerate (gap={values[1] - values[0]:.3e})"
        )
    psi = vectors[:, 0].astype(complex)

    tau = protocol.total_time / protocol.steps
    half = np.exp(-0.5j * a_diag * tau)
    u_b = expm_i(b_part, tau)
    core = (half[:, None] * u_b) * half[None, :]

    for k in range(protocol.steps):
        theta = theta_of_t(protocol, (k + 0.5) * tau)
        if deltas is not None:
            theta = theta + deltas[k]
        rot = _collective_ry(spec.n_spins, theta)
        psi = rot @ (core @ (rot.T @ psi))
    return psi


def simulate_protocol_trotter(
    spec: ChainSpec, protocol: QuenchProtocol
) -> QuenchResult:
    """Trotterized counterpart of the exact-step ramp integrator."""
    magnitude = 1.0
    psi = _trotter_evolve(spec, protocol, magnitude)
    theta_final = theta_of_t(protocol, protocol.total_time)
    m_phi = total_magnetization(psi, "y") * math.sin(theta_final)

    h_final = build_heisenberg(
        spec, FieldPoint(theta=theta_final, magnitude=magnitude)
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


def trotter_order(spec: ChainSpec, p: FieldPoint, taus) -> float:
    """Log-log slope of the local step error against the step length."""
    taus = sorted(float(t) for t in taus)
    if len(taus) < 2 or taus[0] <= 0.0:
        raise ValueError("need at least two positive step lengths")
    h = build_heisenberg(spec, p)
    errors = [
        np.linalg.norm(trotter_step(spec, p, t) - expm_i(h, t), 2) for t in taus
    ]
    return float(np.polyfit(np.log(taus), np.log(errors), 1)[0])


def perturbed_fidelity(
    spec: ChainSpec,
    protocol: QuenchProtocol,
    angle_error_deg: float,
    seed: int = 0,
    trials: int = 20,
) -> float:
    """Worst-case overlap with the ideal ramp under rotation-angle noise.

    Each trial draws one uniform offset in +/-angle_error_deg per step;
    the offset shifts that step's framing rotation pair coherently (the
    same miscalibrated angle enters the + and - rotation).  Trials use
    seeds seed+0 .. seed+trials-1, so the result is reproducible and
    individual trials can run anywhere.
    """
    if angle_error_deg < 0.0:
        raise OutOfRange("angle_error_deg must be nonnegative")
    if trials < 1:
        raise OutOfRange("trials must be at least 1")
    magnitude = 1.0
    ideal = _trotter_evolve(spec, protocol, magnitude)
    bound = math.radians(angle_error_deg)
    worst = 1.0
    for trial in range(trials):
        rng = np.random.default_rng(seed + trial)
        deltas = rng.uniform(-bound, bound, protocol.steps)
        psi = _trotter_evolve(spec, protocol, magnitude, deltas)
        worst = min(worst, abs(np.vdot(ideal, psi)) ** 2)
    return float(worst)


# --- zz refocusing compiler -------------------------------------------------


@dataclass(frozen=True)
class CompiledZZ:
    """Delay segments and pi-pulse placements realizing a uniform zz chain.

    ``segment_patterns[s]`` records each spin's accumulated flip parity
    during segment ``s`` (first spin pinned to +1; a global flip is
    unobservable in zz evolution).  ``pi_pulse_placements`` has one
    entry per segment boundary, including the outer edges, listing the
    spins flipped there.
    """

    segment_durations: tuple
    segment_patterns: tuple
    pi_pulse_placements: tuple
    target_j: float
    tau: float
    base_couplings: np.ndarray

    @property
    def wall_time(self) -> float:
        return float(sum(self.segment_durations))


@dataclass(frozen=True)
class Rotation:
    """Instantaneous simultaneous rotation e^{-i angle sigma_axis/2}."""

    spins: tuple
    axis: str
    angle: float


@dataclass(frozen=True)
class Delay:
    """Free evolution under couplings plus per-spin frame offsets (rad/s)."""

    duration: float
    frame_offsets: tuple


@dataclass(frozen=True)
class PulseProgram:
    """Ordered rotation/delay event list for one molecule."""

    n_spins: int
    events: tuple

    def __post_init__(self):
        for ev in self.events:
            if isinstance(ev, Delay):
                if ev.duration < 0.0:
                    raise ValueError("delay durations must be nonnegative")
                if len(ev.frame_offsets) != self.n_spins:
                    raise ValueError("frame offsets must list every spin")
            elif isinstance(ev, Rotation):
                if not math.isfinite(ev.angle):
                    raise ValueError("rotation angles must be finite")
                if any(not 0 <= s < self.n_spins for s in ev.spins):
                    raise ValueError("rotation spin index out of range")
            else:
                raise TypeError(f"unknown event type {type(ev).__name__}")


def _adjacent_couplings(m: MoleculeSpec) -> np.ndarray:
    return np.array(
        [m.couplings_hz[i, i + 1] for i in range(m.n_spins - 1)]
    )


def _check_compilable(m: MoleculeSpec) -> None:
    adj = _adjacent_couplings(m)
    scale = float(np.max(np.abs(m.couplings_hz)))
    if scale == 0.0 or np.any(np.abs(adj) <= _COUPLING_RTOL * scale):
        raise DegenerateCouplings(
            f"adjacent couplings must be nonzero, got {adj.tolist()} Hz"
        )
    if m.n_spins == 3:
        pairs = [(0, 1)]
    elif m.n_spins == 4:
        pairs = [(1, 2)]
    else:
        pairs = []
    for a, b in pairs:
        if abs(adj[a] - adj[b]) <= _COUPLING_RTOL * scale:
            raise DegenerateCouplings(
                f"couplings J[{a}{a + 1}]={adj[a]} Hz and "
                f"J[{b}{b + 1}]={adj[b]} Hz coincide; segment timings degenerate"
            )


def _sign_patterns(n_spins: int):
    """All flip-parity patterns with the first spin pinned to +1."""
    return [
        (1,) + rest for rest in itertools.product((1, -1), repeat=n_spins - 1)
    ]


def effective_uniform_coupling(m: MoleculeSpec) -> float:
    """Uniform chain coupling (Hz) the standard schedule realizes at
    unit wall-time overhead.

    Two spins use the native coupling directly; longer chains are fixed
    by the inner adjacent pair a, b through J_a J_b / (J_a - J_b).
    """
    if not 2 <= m.n_spins <= 4:
        raise OutOfRange("refocusing compiler supports 2 to 4 spins")
    _check_compilable(m)
    adj = _adjacent_couplings(m)
    if m.n_spins == 2:
        return float(adj[0])
    if m.n_spins == 3:
        return float(adj[0] * adj[1] / (adj[0] - adj[1]))
    return float(adj[1] * adj[2] / (adj[1] - adj[2]))


def compile_zz(m: MoleculeSpec, target_j: float, tau: float) -> CompiledZZ:
    """Delay/pi-pulse schedule whose zz evolution over tau matches
    exp(-i (-target_j) sum_adjacent sigma_z sigma_z tau).

    Segment sign patterns toggle each coupling term by the product of
    the two spins' flip parities; the schedule solves for nonnegative
    segment durations that integrate adjacent couplings to the target
    and non-adjacent ones to zero, taking the minimum-wall-time vertex
    of that linear program.
    """
    if not 2 <= m.n_spins <= 4:
        raise OutOfRange("refocusing compiler supports 2 to 4 spins")
    if tau <= 0.0:
        raise ValueError("tau must be positive")
    _check_compilable(m)

    n = m.n_spins
    rows = []  # (i, j, required integrated weight)
    for i in range(n):
        for j in range(i + 1, n):
            coupling = m.couplings_hz[i, j]
            if j == i + 1:
                rows.append((i, j, -2.0 * target_j * tau / (math.pi * coupling)))
            elif coupling != 0.0:
                rows.append((i, j, 0.0))

    patterns = _sign_patterns(n)
    columns = np.array(
        [[p[i] * p[j] for p in patterns] for i, j, _ in rows], dtype=float
    )
    required = np.array([r for _, _, r in rows])

    best = None
    n_rows = len(rows)
    for subset in itertools.combinations(range(len(patterns)), n_rows):
        block = columns[:, subset]
        try:
            durations = np.linalg.solve(block, required)
        except np.linalg.LinAlgError:
            continue
        if np.max(np.abs(block @ durations - required)) > 1e-9 * max(
            1.0, np.max(np.abs(required))
        ):
            continue
        if np.min(durations) < -1e-12 * tau:
            continue
        wall = float(np.sum(durations))
        if best is None or wall < best[0] - 1e-15 * tau:
            best = (wall, subset, np.clip(durations, 0.0, None))
    if best is None:
        raise UnphysicalDurations(
            f"no nonnegative segment durations realize weights {required.tolist()}"
        )

    _, subset, durations = best
    segments = [
        (patterns[idx], float(t))
        for idx, t in zip(subset, durations)
        if t > 1e-15 * tau
    ]
    # Deterministic order: fewest flipped spins first, then pattern bits.
    segments.sort(key=lambda seg: (seg[0].count(-1), [x < 0 for x in seg[0]]))

    identity = (1,) * n
    boundary_patterns = [identity] + [p for p, _ in segments] + [identity]
    placements = tuple(
        frozenset(
            k
            for k in range(n)
            if boundary_patterns[b][k] != boundary_patterns[b + 1][k]
        )
        for b in range(len(boundary_patterns) - 1)
    )
    return CompiledZZ(
        segment_durations=tuple(t for _, t in segments),
        segment_patterns=tuple(p for p, _ in segments),
        pi_pulse_placements=placements,
        target_j=float(target_j),
        tau=float(tau),
        base_couplings=np.array(m.couplings_hz, dtype=float),
    )


def toggled_zz_coefficients(c: CompiledZZ) -> np.ndarray:
    """Effective zz coefficient of each pair, averaged over the target
    window: -target_j on adjacent pairs, 0 elsewhere, for a valid
    compilation."""
    n = len(c.segment_patterns[0]) if c.segment_patterns else 0
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            integrated = sum(
                t * p[i] * p[j]
                for p, t in zip(c.segment_patterns, c.segment_durations)
            )
            out[i, j] = out[j, i] = (
                0.5 * math.pi * c.base_couplings[i, j] * integrated / c.tau
            )
    return out


def to_pulse_program(c: CompiledZZ) -> PulseProgram:
    """Flatten a compiled schedule into delay and pi-pulse events."""
    n = c.base_couplings.shape[0]
    no_offset = (0.0,) * n
    events = []
    for b, flipped in enumerate(c.pi_pulse_placements):
        if flipped:
            events.append(
                Rotation(spins=tuple(sorted(flipped)), axis="x", angle=math.pi)
            )
        if b < len(c.segment_durations):
            events.append(
                Delay(duration=c.segment_durations[b], frame_offsets=no_offset)
            )
    return PulseProgram(n_spins=n, events=tuple(events))


def program_to_json(program: PulseProgram, path) -> None:
    """Write the event list in the interchange format."""
    payload = []
    for ev in program.events:
        if isinstance(ev, Delay):
            payload.append(
                {"type": "delay", "t_s": ev.duration, "frame": list(ev.frame_offsets)}
            )
        else:
            payload.append(
                {
                    "type": "pulse",
                    "spins": list(ev.spins),
                    "axis": ev.axis,
                    "angle_rad": ev.angle,
                }
            )
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def program_from_json(path) -> PulseProgram:
    """Read an event list; chain size is taken from the frame vectors."""
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    events = []
    n_spins = 0
    for item in payload:
        if item["type"] == "delay":
            frame = tuple(float(x) for x in item["frame"])
            n_spins = max(n_spins, len(frame))
            events.append(Delay(duration=float(item["t_s"]), frame_offsets=frame))
        elif item["type"] == "pulse":
            spins = tuple(int(s) for s in item["spins"])
            n_spins = max(n_spins, max(spins) + 1)
            events.append(
                Rotation(spins=spins, axis=item["axis"], angle=float(item["angle_rad"]))
            )
        else:
            raise ValueError(f"unknown event type {item['type']!r}")
    return PulseProgram(n_spins=n_spins, events=tuple(events))


def _pauli_rotation(axis: str, angle: float) -> np.ndarray:
    return math.cos(angle / 2.0) * np.eye(2) - 1j * math.sin(angle / 2.0) * PAULI[axis]


def simulate_program(program: PulseProgram, m: MoleculeSpec) -> np.ndarray:
    """Propagator of the event list in the per-spin rotating frame.

    Delays evolve under the coupling table plus the event's explicit
    frame offsets; chemical shifts are absorbed by the frames and do
    not appear.  Rotations are ideal and instantaneous.
    """
    n = program.n_spins
    if m.n_spins != n:
        raise ValueError("program and molecule sizes differ")
    z = _z_diagonals(n)
    zz = np.zeros(2**n)
    for i in range(n):
        for j in range(i + 1, n):
            zz += 0.5 * math.pi * m.couplings_hz[i, j] * z[i] * z[j]

    unitary = np.eye(2**n, dtype=complex)
    for ev in program.events:
        if isinstance(ev, Delay):
            diag = zz.copy()
            for i, offset in enumerate(ev.frame_offsets):
                diag += 0.5 * offset * z[i]
            unitary = np.exp(-1j * diag * ev.duration)[:, None] * unitary
        else:
            single = _pauli_rotation(ev.axis, ev.angle)
            gate = np.array([[1.0 + 0.0j]])
            for k in range(n):
                gate = np.kron(gate, single if k in ev.spins else np.eye(2))
            unitary = gate @ unitary
    return unitary


@dataclass(frozen=True)
class SequenceReport:
    """Propagator-level comparison of a compiled sequence to its target."""

    effective_propagator: np.ndarray
    target_propagator: np.ndarray
    fidelity: float
    trotter_order_estimate: float


def zz_target_propagator(n_spins: int, target_j: float, tau: float) -> np.ndarray:
    """Propagator of the uniform adjacent zz chain -target_j sum sz sz."""
    z = _z_diagonals(n_spins)
    diag = -target_j * (z[:-1] * z[1:]).sum(axis=0)
    return np.diag(np.exp(-1j * diag * tau))


def _target_propagator(c: CompiledZZ, scale: float = 1.0) -> np.ndarray:
    n = c.base_couplings.shape[0]
    return zz_target_propagator(n, c.target_j, c.tau * scale)


def _scaled(c: CompiledZZ, scale: float) -> CompiledZZ:
    return replace(
        c,
        segment_durations=tuple(t * scale for t in c.segment_durations),
        tau=c.tau * scale,
    )


def verify_sequence(c: CompiledZZ, m: MoleculeSpec) -> SequenceReport:
    """Simulate the compiled event list against the target zz propagator.

    All active terms commute, so a correct compilation is exact, not
    merely exact on average; any defect signals a compiler bug.  The
    order estimate compares defects at two overall durations and is
    reported as inf when both sit at roundoff.
    """
    effective = simulate_program(to_pulse_program(c), m)
    target = _target_propagator(c)
    dim = target.shape[0]
    fidelity = abs(np.trace(effective.conj().T @ target)) / dim

    def defect(scale: float) -> float:
        u = simulate_program(to_pulse_program(_scaled(c, scale)), m)
        return 1.0 - abs(np.trace(u.conj().T @ _target_propagator(c, scale))) / dim

    d_full, d_half = defect(1.0), defect(0.5)
    if d_full > 1e-12 and d_half > 1e-12:
        order = math.log2(d_full / d_half)
    else:
        order = math.inf
    return SequenceReport(
        effective_propagator=effective,
        target_propagator=target,
        fidelity=float(fidelity),
        trotter_order_estimate=float(order),
    )
