from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinchern import (
    EigenSystem,
    NotHermitian,
    eigh,
    expm_i,
    kron_all,
    propagate,
    site_operator,
)
from spinchern.qcore import IDENTITY_2, PAULI, kron


def random_hermitian(dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


def test_pauli_algebra():
    for axis, mat in PAULI.items():
        assert np.allclose(mat @ mat, IDENTITY_2)
        assert np.allclose(mat, mat.conj().T)
    assert np.allclose(
        PAULI["x"] @ PAULI["y"] - PAULI["y"] @ PAULI["x"], 2j * PAULI["z"]
    )


def test_kron_agrees_with_numpy():
    a, b = PAULI["x"], PAULI["z"]
    assert np.allclose(kron(a, b), np.kron(a, b))
    assert np.allclose(kron_all([a, b, IDENTITY_2]), np.kron(np.kron(a, b), np.eye(2)))


def test_site_operator_embedding():
    on_first = site_operator(PAULI["z"], 0, 2)
    on_second = site_operator(PAULI["z"], 1, 2)
    assert np.allclose(on_first, np.kron(PAULI["z"], np.eye(2)))
    assert np.allclose(on_second, np.kron(np.eye(2), PAULI["z"]))
    with pytest.raises(ValueError):
        site_operator(PAULI["z"], 2, 2)


def test_eigh_sorted_and_phase_fixed():
    system = eigh(random_hermitian(8, seed=3))
    assert np.all(np.diff(system.values) >= 0)
    for k in range(8):
        column = system.vectors[:, k]
        pivot = column[np.argmax(np.abs(column))]
        assert pivot.imag == pytest.approx(0.0, abs=1e-12)
        assert pivot.real > 0


def test_eigh_rejects_non_hermitian():
    mat = random_hermitian(4, seed=0)
    mat[0, 1] += 0.1
    with pytest.raises(NotHermitian):
        eigh(mat)


def test_eigh_accepts_roundoff_asymmetry():
    mat = random_hermitian(4, seed=1)
    mat[0, 1] += 1e-14
    eigh(mat)  # within tolerance, symmetrized silently


def test_ground_accessors():
    system = eigh(np.diag([3.0, -1.0, 2.0]).astype(complex))
    assert system.values[0] == pytest.approx(-1.0)
    assert system.ground_gap == pytest.approx(3.0)
    assert abs(system.ground_state[1]) == pytest.approx(1.0)


@settings(max_examples=25, derandomize=True, deadline=None)
@given(seed=st.integers(0, 10_000), dim=st.sampled_from([2, 4, 8]))
def test_eigh_reconstructs_input(seed, dim):
    mat = random_hermitian(dim, seed)
    system = eigh(mat)
    rebuilt = (system.vectors * system.values) @ system.vectors.conj().T
    assert np.allclose(rebuilt, mat, atol=1e-10)


@settings(max_examples=25, derandomize=True, deadline=None)
@given(
    seed=st.integers(0, 10_000),
    t=st.floats(-5.0, 5.0, allow_nan=False, allow_infinity=False),
)
def test_expm_i_unitary_and_group_law(seed, t):
    mat = random_hermitian(4, seed)
    u = expm_i(mat, t)
    assert np.allclose(u @ u.conj().T, np.eye(4), atol=1e-9)
    assert np.allclose(expm_i(mat, t / 2) @ expm_i(mat, t / 2), u, atol=1e-9)


def test_expm_i_zero_time_is_identity():
    assert np.allclose(expm_i(random_hermitian(4, seed=7), 0.0), np.eye(4))


def test_propagate_eigenvector_picks_up_phase_only():
    system = eigh(random_hermitian(6, seed=11))
    psi = system.vectors[:, 2]
    out = propagate(system, 1.3, psi)
    expected = np.exp(-1j * system.values[2] * 1.3) * psi
    assert np.allclose(out, expected, atol=1e-12)
    assert np.linalg.norm(out) == pytest.approx(1.0, abs=1e-12)


def test_eigensystem_is_frozen():
    system = eigh(random_hermitian(2, seed=5))
    assert isinstance(system, EigenSystem)
    with pytest.raises(AttributeError):
        system.values = np.zeros(2)
