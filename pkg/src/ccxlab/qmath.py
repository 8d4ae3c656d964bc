"""Dense complex linear algebra for small multi-qubit systems.

Everything is an ordinary ``numpy`` array of complex128. Dimensions stay at
or below 2**6, so spectral decomposition (``numpy.linalg.eigh``) is the only
matrix-function mechanism used; there are no iterative solvers.

Conventions
-----------
* Qubit 0 is the least-significant bit of a basis index (little-endian).
* ``kron_le(ops)`` takes one single-qubit operator per qubit, qubit 0 first,
  and returns the full operator under that convention.

Tolerances: 1e-10 at construction time, 1e-6 for input validation, 1e-8 for
algebraic identities.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    NotHermitianError,
    NotPSDError,
    NotUnitaryError,
    ZeroTraceError,
)

CONSTRUCTION_TOL = 1e-10
VALIDATION_TOL = 1e-6
IDENTITY_TOL = 1e-8

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)

PAULI_1Q = {"I": I2, "X": X, "Y": Y, "Z": Z}


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; dimensions multiply."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def kron_le(ops: Sequence[np.ndarray]) -> np.ndarray:
    """Tensor product of per-qubit operators, ``ops[0]`` acting on qubit 0.

    Little-endian: the qubit-0 factor is the Kronecker minor (fastest) index.
    """
    out = np.eye(1, dtype=complex)
    for op in reversed(list(ops)):
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def pauli_string_matrix(letters: str) -> np.ndarray:
    """Matrix of a Pauli string over {I, X, Y, Z}; letters[j] acts on qubit j."""
    return kron_le([PAULI_1Q[c] for c in letters])


def is_hermitian(m: np.ndarray, tol: float = VALIDATION_TOL) -> bool:
    return m.shape[0] == m.shape[1] and np.max(np.abs(m - dagger(m))) <= tol


def check_unitary(u: np.ndarray, tol: float = CONSTRUCTION_TOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise NotUnitaryError(f"expected a square matrix, got shape {u.shape}")
    dev = np.max(np.abs(dagger(u) @ u - np.eye(u.shape[0])))
    if dev > tol:
        raise NotUnitaryError(f"U^dag U deviates from identity by {dev:.3e} (tol {tol:g})")
    return u


def check_state_vector(psi: np.ndarray, tol: float = CONSTRUCTION_TOL) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > tol:
        raise ValueError(f"state vector norm {norm} deviates from 1 beyond {tol:g}")
    return psi


def check_density_matrix(rho: np.ndarray, *, herm_tol: float = CONSTRUCTION_TOL,
                         eig_tol: float = 1e-9, trace_tol: float = 1e-9) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - dagger(rho))) > herm_tol:
        raise NotHermitianError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > trace_tol:
        raise ValueError(f"density matrix trace {np.trace(rho)} != 1")
    if np.min(np.linalg.eigvalsh(rho)) < -eig_tol:
        raise NotPSDError("density matrix has a negative eigenvalue")
    return rho


def matrix_sqrt_psd(h: np.ndarray, *, validate_tol: float = VALIDATION_TOL) -> np.ndarray:
    """Principal square root of a Hermitian PSD matrix via eigendecomposition.

    Eigenvalues below zero (within ``validate_tol``) are clipped to zero.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {h.shape}")
    if np.max(np.abs(h - dagger(h))) > validate_tol:
        raise NotHermitianError("matrix_sqrt_psd requires a Hermitian input")
    w, v = np.linalg.eigh((h + dagger(h)) / 2)
    if w[0] < -validate_tol:
        raise NotPSDError(f"matrix_sqrt_psd requires PSD input; min eigenvalue {w[0]:.3e}")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ dagger(v)


def state_fidelity(rho: np.ndarray, lam: np.ndarray) -> float:
    """Fidelity (Tr sqrt(sqrt(rho) lam sqrt(rho)))**2 between density matrices."""
    rho = np.asarray(rho, dtype=complex)
    lam = np.asarray(lam, dtype=complex)
    if rho.shape != lam.shape:
        raise DimensionMismatchError(f"dimension mismatch: {rho.shape} vs {lam.shape}")
    s = matrix_sqrt_psd(rho)
    inner = s @ lam @ s
    w = np.linalg.eigvalsh((inner + dagger(inner)) / 2)
    f = float(np.sum(np.sqrt(np.clip(w, 0.0, None))) ** 2)
    return min(max(f, 0.0), 1.0)


def project_to_density(h: np.ndarray) -> np.ndarray:
    """Nearest-in-spirit physical state: Hermitize, clip negatives, renormalize.

    Idempotent on valid density matrices.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {h.shape}")
    herm = (h + dagger(h)) / 2
    w, v = np.linalg.eigh(herm)
    w = np.clip(w, 0.0, None)
    total = float(np.sum(w))
    if total <= 0.0:
        raise ZeroTraceError("all eigenvalues clipped to zero")
    return (v * (w / total)) @ dagger(v)
