"""Dense complex linear algebra substrate.

Pauli operators, tensor products, Hermitian eigendecomposition and
unitary matrix exponentials.  All matrices are plain ``numpy.ndarray``
of dtype complex128; states are one-dimensional complex arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}

# Relative Frobenius tolerance accepted before declaring a matrix
# non-Hermitian; inputs within it are symmetrized to absorb roundoff.
HERMITICITY_RTOL = 1e-10


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues with orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def ground_state(self) -> np.ndarray:
        return self.vectors[:, 0]

    @property
    def ground_gap(self) -> float:
        return float(self.values[1] - self.values[0])


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product of two square operators."""
    return np.kron(a, b)


def kron_all(ops) -> np.ndarray:
    """Tensor product of a sequence of operators, left to right."""
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def site_operator(op: np.ndarray, site: int, n_spins: int) -> np.ndarray:
    """Embed a single-spin operator at ``site`` of an ``n_spins`` register."""
    if not 0 <= site < n_spins:
        raise ValueError(f"site {site} outside register of {n_spins} spins")
    ops = [IDENTITY_2] * n_spins
    ops[site] = op
    return kron_all(ops)


def _symmetrized(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    scale = np.linalg.norm(h)
    if scale > 0 and np.linalg.norm(h - h.conj().T) > HERMITICITY_RTOL * scale:
        raise NotHermitian(
            f"matrix asymmetry exceeds {HERMITICITY_RTOL:g} relative tolerance"
        )
    return (h + h.conj().T) / 2


def eigh(h: np.ndarray) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix.

    Input is symmetrized before solving.  Each eigenvector's phase is
    fixed by making its largest-magnitude component real positive, so
    results are deterministic for regression purposes.
    """
    values, vectors = np.linalg.eigh(_symmetrized(h))
    for k in range(vectors.shape[1]):
        idx = int(np.argmax(np.abs(vectors[:, k])))
        pivot = vectors[idx, k]
        if abs(pivot) > 0:
            vectors[:, k] *= np.conj(pivot) / abs(pivot)
    return EigenSystem(values=values, vectors=vectors)


def expm_i(h: np.ndarray, t: float) -> np.ndarray:
    """Unitary propagator exp(-i h t) for Hermitian ``h``.

    Computed through the eigendecomposition, which is exact for
    Hermitian inputs at these dimensions.
    """
    system = eigh(h)
    phases = np.exp(-1j * system.values * t)
    return (system.vectors * phases) @ system.vectors.conj().T


def propagate(system: EigenSystem, t: float, psi: np.ndarray) -> np.ndarray:
    """Apply exp(-i h t) to a state given the eigensystem of ``h``."""
    amplitudes = system.vectors.conj().T @ psi
    return system.vectors @ (np.exp(-1j * system.values * t) * amplitudes)
