"""Model types, factor scores and alignment."""

import numpy as np
import pytest

from mpca import (FactorModelFit, LoadingPair, Ranks, aligned_factor_error,
                  as_observations, common_components, factor_scores)
from mpca.model import alignment_rotations, GroundTruth

from conftest import noiseless_series, random_orthonormal, scaled_basis


def test_as_observations_validation():
    with pytest.raises(ValueError):
        as_observations(np.zeros((4, 5)))
    with pytest.raises(ValueError):
        as_observations(np.zeros((0, 4, 5)))
    bad = np.zeros((2, 3, 3))
    bad[1, 0, 0] = np.inf
    with pytest.raises(ValueError):
        as_observations(bad)
    X = as_observations([[[1, 2], [3, 4]]])
    assert X.dtype == np.float64 and X.shape == (1, 2, 2)


def test_ranks_r0_and_validation():
    assert Ranks(3, 5).r0 == 3
    assert Ranks(4, 2).r0 == 2
    with pytest.raises(ValueError):
        Ranks(0, 1)


def test_loading_pair_normalization_enforced(rng):
    R = scaled_basis(12, 2, rng)
    C = scaled_basis(9, 3, rng)
    L = LoadingPair(R, C, method="x")
    assert L.ranks == Ranks(2, 3)
    with pytest.raises(ValueError):
        LoadingPair(2.0 * R, C)
    with pytest.raises(ValueError):
        LoadingPair(R, rng.standard_normal((9, 3)))


def test_loading_pair_projectors(rng):
    L = LoadingPair(scaled_basis(10, 3, rng), scaled_basis(8, 2, rng))
    P_R, P_C = L.projectors()
    assert np.allclose(P_R @ P_R, P_R, atol=1e-10)
    assert np.allclose(P_C @ P_C, P_C, atol=1e-10)
    assert np.isclose(np.trace(P_R), 3.0) and np.isclose(np.trace(P_C), 2.0)


def test_factor_scores_exact_on_noiseless(rng):
    X, L, F = noiseless_series(6, 11, 7, 3, 2, rng)
    # with the true normalized loadings, R'XC/(pq) returns F exactly
    assert np.allclose(factor_scores(X, L), F, atol=1e-10)


def test_factor_scores_dimension_check(rng):
    X, L, _ = noiseless_series(3, 8, 6, 2, 2, rng)
    bad = LoadingPair(scaled_basis(9, 2, rng), L.C)
    with pytest.raises(ValueError):
        factor_scores(X, bad)


def test_common_components_projection_identity(rng):
    X, L, _ = noiseless_series(4, 9, 6, 2, 2, rng)
    noisy = X + 0.1 * rng.standard_normal(X.shape)
    S = common_components(noisy, L)
    P_R, P_C = L.projectors()
    ref = np.einsum("ij,tjk,kl->til", P_R, noisy, P_C)
    assert np.allclose(S, ref, atol=1e-10)


def test_alignment_recovers_rotated_truth(rng):
    X, L, F = noiseless_series(5, 10, 8, 3, 2, rng)
    truth = GroundTruth(R=L.R, C=L.C, F=F,
                        S=common_components(X, L))
    H = random_orthonormal(3, 3, rng)
    G = random_orthonormal(2, 2, rng)
    rotated = LoadingPair(L.R @ H, L.C @ G)
    H_R, H_C = alignment_rotations(rotated, truth)
    assert np.allclose(H_R, H, atol=1e-10)
    assert np.allclose(H_C, G, atol=1e-10)


def test_aligned_factor_error_zero_on_exact_fit(rng):
    X, L, F = noiseless_series(5, 12, 9, 2, 3, rng)
    truth = GroundTruth(R=L.R, C=L.C, F=F, S=X.copy())
    H = random_orthonormal(2, 2, rng)
    G = random_orthonormal(3, 3, rng)
    rotated = LoadingPair(L.R @ H, L.C @ G)
    fit = FactorModelFit(loadings=rotated,
                         factors=factor_scores(X, rotated))
    assert aligned_factor_error(fit, truth) < 1e-8
