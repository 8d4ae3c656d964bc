"""Shared seeded random-object helpers for the test suite."""

import numpy as np
import pytest


def _ginibre(dim, rng):
    return rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))


def random_state_vector(dim, rng):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density_matrix(dim, rng, rank=None):
    g = _ginibre(dim, rng) if rank is None else (
        rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank)))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_unitary(dim, rng):
    q, r = np.linalg.qr(_ginibre(dim, rng))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_cptp_kraus(dim, rng, n_kraus=3):
    """Random channel via a Haar-ish isometry split into Kraus blocks."""
    big = _ginibre(dim * n_kraus, rng)
    q, r = np.linalg.qr(big)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    iso = q[:, :dim]
    return [iso[i * dim:(i + 1) * dim, :] for i in range(n_kraus)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)
