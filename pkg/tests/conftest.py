"""Shared helpers for the test suite."""

import numpy as np
import pytest

from mpca import LoadingPair, Ranks


def random_orthonormal(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Random n x k matrix with orthonormal columns (Haar by QR)."""
    Q, _ = np.linalg.qr(rng.standard_normal((n, k)))
    return Q


def scaled_basis(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Random loading matrix satisfying L'L/n = I."""
    return np.sqrt(n) * random_orthonormal(n, k, rng)


def noiseless_series(T: int, p: int, q: int, p0: int, q0: int,
                     rng: np.random.Generator):
    """Exactly low-rank series X_t = R F_t C' with normalized loadings."""
    R = scaled_basis(p, p0, rng)
    C = scaled_basis(q, q0, rng)
    F = rng.standard_normal((T, p0, q0))
    X = np.einsum("pi,tij,qj->tpq", R, F, C)
    return X, LoadingPair(R, C), F


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
