"""Loading-space estimators.

Two subspace-averaging estimators (non-iterative operator-norm variant
and the iterative, projection-boosted Frobenius variant) plus the two
covariance-based baselines used for comparison, and a varimax rotation
for interpreting fitted loadings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import top_eigvecs, top_singvecs
from .metrics import space_distance
from .model import (FactorModelFit, LoadingPair, Ranks, as_observations,
                    factor_scores)


@dataclass(frozen=True)
class IterationControl:
    """Convergence control for the iterative estimators: stop once the
    subspace distance between successive iterates falls below tol."""

    tol: float = 1e-6
    max_iter: int = 100

    def __post_init__(self):
        if self.tol <= 0 or self.max_iter < 1:
            raise ValueError("tol must be positive and max_iter >= 1")


def _check_ranks(X: np.ndarray, ranks: Ranks) -> None:
    p, q = X.shape[1], X.shape[2]
    if max(ranks.p0, ranks.q0) > min(p, q):
        raise ValueError(
            f"ranks ({ranks.p0}, {ranks.q0}) exceed min(p, q) = {min(p, q)}"
        )


def best_subspace_op(X_t: np.ndarray, r0: int):
    """Best rank-r0 row/column subspaces of a single observation: the
    leading r0 left and right singular vectors."""
    U, V, _ = top_singvecs(X_t, r0, side="both")
    return U, V


def average_projectors(X: np.ndarray, r0: int):
    """Averages over t of the projectors onto the top-r0 left and right
    singular subspaces of each X_t."""
    X = as_observations(X)
    T, p, q = X.shape
    if not (1 <= r0 <= min(p, q)):
        raise ValueError(f"r0={r0} out of range for ({p}, {q})")
    P_R = np.zeros((p, p))
    P_C = np.zeros((q, q))
    for X_t in X:
        U, V, _ = top_singvecs(X_t, r0, side="both")
        P_R += U @ U.T
        P_C += V @ V.T
    return P_R / T, P_C / T


def _projected_average_projectors(X: np.ndarray, R_scaled: np.ndarray,
                                  C_scaled: np.ndarray, r0: int):
    """Averaged projectors onto the top-r0 eigenspaces of X_t P_C X_t'
    and X_t' P_R X_t, for P built from the scaled bases R/sqrt(p), C/sqrt(q).

    X_t P_C X_t' equals Y Y' for Y = X_t C / sqrt(q), so the eigenbasis
    is just the left singular basis of the thin matrix Y.
    """
    T, p, q = X.shape
    P_R = np.zeros((p, p))
    P_C = np.zeros((q, q))
    for X_t in X:
        Y = X_t @ C_scaled
        U, _ = top_singvecs(Y, r0, side="left")
        P_R += U @ U.T
        Z = X_t.T @ R_scaled
        V, _ = top_singvecs(Z, r0, side="left")
        P_C += V @ V.T
    return P_R / T, P_C / T


def mpca_op(X: np.ndarray, ranks: Ranks) -> LoadingPair:
    """Non-iterative subspace-averaging estimator.

    Per observation, take the top-r0 singular bases; average their
    projectors; the loadings are the leading p0 (q0) eigenvectors of
    the averaged projectors, scaled by sqrt(p) (sqrt(q)).
    """
    X = as_observations(X)
    _check_ranks(X, ranks)
    P_R, P_C = average_projectors(X, ranks.r0)
    p, q = X.shape[1], X.shape[2]
    VR, _ = top_eigvecs(P_R, ranks.p0)
    VC, _ = top_eigvecs(P_C, ranks.q0)
    return LoadingPair(np.sqrt(p) * VR, np.sqrt(q) * VC, method="mpca_op")


def mpca_f(X: np.ndarray, ranks: Ranks, ctl: IterationControl | None = None,
           warm_start: LoadingPair | None = None) -> FactorModelFit:
    """Iterative projection-boosted subspace-averaging estimator.

    Warm-started from mpca_op (or a caller-supplied pair), each sweep
    recomputes the per-observation subspaces from the data projected
    onto the other side's current loading space, then re-averages the
    projectors.  Stops when both subspace distances between successive
    iterates drop below ctl.tol.
    """
    X = as_observations(X)
    _check_ranks(X, ranks)
    if ctl is None:
        ctl = IterationControl()
    T, p, q = X.shape
    L = warm_start if warm_start is not None else mpca_op(X, ranks)
    R, C = L.R, L.C
    converged = False
    it = 0
    for it in range(1, ctl.max_iter + 1):
        P_R, P_C = _projected_average_projectors(
            X, R / np.sqrt(p), C / np.sqrt(q), ranks.r0)
        VR, _ = top_eigvecs(P_R, ranks.p0)
        VC, _ = top_eigvecs(P_C, ranks.q0)
        R_new, C_new = np.sqrt(p) * VR, np.sqrt(q) * VC
        delta = max(space_distance(R_new, R), space_distance(C_new, C))
        R, C = R_new, C_new
        if delta < ctl.tol:
            converged = True
            break
    out = LoadingPair(R, C, method="mpca_f")
    return FactorModelFit(loadings=out, factors=factor_scores(X, out),
                          iterations=it, converged=converged)


def pca_2d2(X: np.ndarray, ranks: Ranks) -> LoadingPair:
    """Covariance-averaging baseline: leading eigenvectors of the
    averaged row and column Gram matrices (1/T) sum_t X_t X_t' and
    (1/T) sum_t X_t' X_t."""
    X = as_observations(X)
    _check_ranks(X, ranks)
    T, p, q = X.shape
    M1 = np.einsum("tij,tkj->ik", X, X) / T
    M2 = np.einsum("tji,tjk->ik", X, X) / T
    VR, _ = top_eigvecs(M1, ranks.p0)
    VC, _ = top_eigvecs(M2, ranks.q0)
    return LoadingPair(np.sqrt(p) * VR, np.sqrt(q) * VC, method="pca_2d2")


def pe_estimate(X: np.ndarray, ranks: Ranks,
                ctl: IterationControl | None = None) -> LoadingPair:
    """Projected-covariance baseline: initialize with pca_2d2, then
    alternate R/sqrt(p) = top-p0 eigenvectors of (1/Tq) sum_t X_t P_C X_t'
    and symmetrically until convergence."""
    X = as_observations(X)
    _check_ranks(X, ranks)
    if ctl is None:
        ctl = IterationControl()
    T, p, q = X.shape
    L = pca_2d2(X, ranks)
    R, C = L.R, L.C
    for _ in range(ctl.max_iter):
        YR = np.einsum("tij,jk->tik", X, C) / q  # X_t C / q, p x q0
        M1 = np.einsum("tik,tlk->il", YR, YR) / T  # (1/Tq^2) sum X P_C X'
        YC = np.einsum("tji,jk->tik", X, R) / p
        M2 = np.einsum("tik,tlk->il", YC, YC) / T
        VR, _ = top_eigvecs(M1, ranks.p0)
        VC, _ = top_eigvecs(M2, ranks.q0)
        R_new, C_new = np.sqrt(p) * VR, np.sqrt(q) * VC
        delta = max(space_distance(R_new, R), space_distance(C_new, C))
        R, C = R_new, C_new
        if delta < ctl.tol:
            break
    return LoadingPair(R, C, method="pe")


def get_estimator(method: str):
    """Resolve an estimator tag to a callable (X, ranks, ctl=None) ->
    LoadingPair."""
    def _mpca_op(X, ranks, ctl=None):
        return mpca_op(X, ranks)

    def _mpca_f(X, ranks, ctl=None):
        return mpca_f(X, ranks, ctl).loadings

    def _pca_2d2(X, ranks, ctl=None):
        return pca_2d2(X, ranks)

    def _pe(X, ranks, ctl=None):
        return pe_estimate(X, ranks, ctl)

    table = {"mpca_op": _mpca_op, "mpca_f": _mpca_f,
             "pca_2d2": _pca_2d2, "pe": _pe}
    try:
        return table[method]
    except KeyError:
        raise ValueError(f"unknown estimator {method!r}") from None


def _varimax_criterion(L: np.ndarray) -> float:
    sq = L**2
    return float(np.sum(np.mean(sq**2, axis=0) - np.mean(sq, axis=0) ** 2))


def varimax(L: np.ndarray, tol: float = 1e-8, max_sweeps: int = 100):
    """Varimax rotation by pairwise planar rotations.

    Maximizes the summed per-column variance of squared loadings (no
    row normalization).  Sweeps over all column pairs, applying the
    analytic optimal angle for each, until the criterion improves by
    less than tol.  Returns (rotated loadings, rotation matrix).
    """
    L = np.array(L, dtype=np.float64)
    n, k = L.shape
    rot = np.eye(k)
    if k == 1:
        return L, rot
    crit = _varimax_criterion(L)
    for _ in range(max_sweeps):
        for i in range(k - 1):
            for j in range(i + 1, k):
                a, b = L[:, i], L[:, j]
                u = a**2 - b**2
                v = 2.0 * a * b
                A, B = np.sum(u), np.sum(v)
                C = np.sum(u**2 - v**2)
                D = 2.0 * np.sum(u * v)
                num = D - 2.0 * A * B / n
                den = C - (A**2 - B**2) / n
                theta = 0.25 * np.arctan2(num, den)
                c, s = np.cos(theta), np.sin(theta)
                G = np.array([[c, -s], [s, c]])
                L[:, [i, j]] = L[:, [i, j]] @ G
                rot[:, [i, j]] = rot[:, [i, j]] @ G
        new_crit = _varimax_criterion(L)
        if new_crit - crit < tol:
            break
        crit = new_crit
    return L, rot
