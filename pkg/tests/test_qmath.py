import numpy as np
import pytest

from ccxlab.errors import (
    DimensionMismatchError,
    NotHermitianError,
    NotPSDError,
    ZeroTraceError,
)
from ccxlab.qmath import (
    I2,
    X,
    Z,
    check_density_matrix,
    kron,
    matrix_sqrt_psd,
    pauli_string_matrix,
    project_to_density,
    state_fidelity,
)

from conftest import random_density_matrix, random_unitary


def test_kron_identity():
    assert np.array_equal(kron(I2, I2), np.eye(4))


def test_kron_double_bitflip():
    psi00 = np.array([1, 0, 0, 0], dtype=complex)
    psi11 = np.array([0, 0, 0, 1], dtype=complex)
    assert np.allclose(kron(X, X) @ psi00, psi11)


def test_kron_zz_diagonal_matches_expansion():
    # oracle: expand the definition entry by entry
    expected = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    expected[2 * i + k, 2 * j + l] = Z[i, j] * Z[k, l]
    assert np.allclose(kron(Z, Z), expected)
    assert np.allclose(np.diag(kron(Z, Z)), [1, -1, -1, 1])


def test_sqrt_identity():
    assert np.allclose(matrix_sqrt_psd(np.eye(4)), np.eye(4))


def test_sqrt_diagonal():
    assert np.allclose(matrix_sqrt_psd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))


def test_sqrt_bloch_state_squares_back():
    rho = 0.5 * (I2 + 0.6 * X)
    s = matrix_sqrt_psd(rho)
    assert np.max(np.abs(s @ s - rho)) < 1e-10
    # independent eigendecomposition oracle
    w, v = np.linalg.eigh(rho)
    oracle = (v * np.sqrt(w)) @ v.conj().T
    assert np.max(np.abs(s - oracle)) < 1e-12


def test_sqrt_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        matrix_sqrt_psd(np.array([[0, 1], [0, 0]], dtype=complex))


def test_sqrt_rejects_negative():
    with pytest.raises(NotPSDError):
        matrix_sqrt_psd(np.diag([1.0, -0.5]))


def test_sqrt_squares_back_on_random_psd(rng):
    for _ in range(20):
        rho = random_density_matrix(8, rng)
        s = matrix_sqrt_psd(rho)
        assert np.max(np.abs(s @ s - rho)) < 1e-8


def test_fidelity_identical_pure():
    rho = np.diag([1.0, 0.0]).astype(complex)
    assert state_fidelity(rho, rho) == pytest.approx(1.0, abs=1e-12)


def test_fidelity_orthogonal_pure():
    a = np.diag([1.0, 0.0]).astype(complex)
    b = np.diag([0.0, 1.0]).astype(complex)
    assert state_fidelity(a, b) == pytest.approx(0.0, abs=1e-12)


def test_fidelity_maximally_mixed_vs_pure():
    assert state_fidelity(np.eye(2) / 2, np.diag([1.0, 0.0])) == pytest.approx(0.5, abs=1e-12)


def test_fidelity_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        state_fidelity(np.eye(2) / 2, np.eye(4) / 4)


def test_fidelity_self_is_one_on_random_states(rng):
    for _ in range(100):
        rho = random_density_matrix(8, rng)
        assert abs(state_fidelity(rho, rho) - 1.0) < 1e-9


def test_fidelity_symmetry_and_unitary_invariance(rng):
    for _ in range(10):
        rho = random_density_matrix(8, rng)
        sig = random_density_matrix(8, rng, rank=2)
        f = state_fidelity(rho, sig)
        assert abs(f - state_fidelity(sig, rho)) < 1e-8
        u = random_unitary(8, rng)
        f_rot = state_fidelity(u @ rho @ u.conj().T, u @ sig @ u.conj().T)
        assert abs(f - f_rot) < 1e-8


def test_project_idempotent_on_valid_state(rng):
    rho = random_density_matrix(8, rng)
    assert np.max(np.abs(project_to_density(rho) - rho)) < 1e-12


def test_project_clips_and_renormalizes():
    out = project_to_density(np.diag([1.1, -0.1]))
    assert np.allclose(out, np.diag([1.0, 0.0]), atol=1e-12)


def test_project_zero_trace():
    with pytest.raises(ZeroTraceError):
        project_to_density(np.diag([-1.0, -2.0]))


def test_project_output_always_valid(rng):
    for _ in range(50):
        noise = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        herm = noise + noise.conj().T
        out = project_to_density(herm + 4 * np.eye(8))
        check_density_matrix(out)


def test_pauli_string_matrix_ordering():
    # letters[0] acts on qubit 0 = least significant bit
    zx = pauli_string_matrix("XZ")  # X on qubit 0, Z on qubit 1
    assert np.allclose(zx, np.kron(Z, X))
