"""Factor-model data types and factor/common-component recovery.

Loadings follow the normalization R'R/p = I and C'C/q = I, so the
projectors onto the loading spaces are R R'/p and C C'/q.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import procrustes_align

NORM_TOL = 1e-8


def as_observations(X) -> np.ndarray:
    """Validate and return a (T, p, q) float array of matrix observations."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 3:
        raise ValueError(f"observations must be (T, p, q), got shape {X.shape}")
    if X.shape[0] < 1:
        raise ValueError("need at least one observation")
    if not np.all(np.isfinite(X)):
        raise ValueError("observations contain non-finite entries")
    return X


@dataclass(frozen=True)
class Ranks:
    """Row and column factor counts; r0 = min(p0, q0) is the per-observation
    compression rank."""

    p0: int
    q0: int

    def __post_init__(self):
        if self.p0 < 1 or self.q0 < 1:
            raise ValueError("factor counts must be positive")

    @property
    def r0(self) -> int:
        return min(self.p0, self.q0)


@dataclass
class LoadingPair:
    """Estimated loadings R (p x p0) and C (q x q0), tagged by method."""

    R: np.ndarray
    C: np.ndarray
    method: str = ""

    def __post_init__(self):
        self.R = np.asarray(self.R, dtype=np.float64)
        self.C = np.asarray(self.C, dtype=np.float64)
        p, p0 = self.R.shape
        q, q0 = self.C.shape
        for name, L, n, k in (("R", self.R, p, p0), ("C", self.C, q, q0)):
            dev = np.max(np.abs(L.T @ L / n - np.eye(k)))
            if dev > NORM_TOL:
                raise ValueError(
                    f"{name}'{name}/{'p' if name == 'R' else 'q'} deviates "
                    f"from identity by {dev:.2e}"
                )

    @property
    def ranks(self) -> Ranks:
        return Ranks(self.R.shape[1], self.C.shape[1])

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        p, q = self.R.shape[0], self.C.shape[0]
        return self.R @ self.R.T / p, self.C @ self.C.T / q


@dataclass
class FactorModelFit:
    """Loadings plus per-observation factor scores."""

    loadings: LoadingPair
    factors: np.ndarray  # (T, p0, q0)
    iterations: int = 0
    converged: bool = True


@dataclass
class GroundTruth:
    """True simulation parameters kept alongside a generated dataset."""

    R: np.ndarray
    C: np.ndarray
    F: np.ndarray  # (T, p0, q0)
    S: np.ndarray  # (T, p, q), S_t = R F_t C'
    E: np.ndarray | None = None

    @property
    def ranks(self) -> Ranks:
        return Ranks(self.R.shape[1], self.C.shape[1])


def factor_scores(X: np.ndarray, L: LoadingPair) -> np.ndarray:
    """Per-observation factor scores F_t = R' X_t C / (pq)."""
    X = as_observations(X)
    p, q = X.shape[1], X.shape[2]
    if L.R.shape[0] != p or L.C.shape[0] != q:
        raise ValueError("loading dimensions do not match observations")
    return np.einsum("pi,tpq,qj->tij", L.R, X, L.C) / (p * q)


def common_components(X: np.ndarray, L: LoadingPair) -> np.ndarray:
    """Estimated common components S_t = R F_t C' = P_R X_t P_C."""
    F = factor_scores(X, L)
    return np.einsum("pi,tij,qj->tpq", L.R, F, L.C)


def alignment_rotations(L: LoadingPair, truth: GroundTruth):
    """Orthonormal rotations mapping the true loadings onto the estimates."""
    p, q = truth.R.shape[0], truth.C.shape[0]
    H_R = procrustes_align(truth.R / np.sqrt(p), L.R / np.sqrt(p))
    H_C = procrustes_align(truth.C / np.sqrt(q), L.C / np.sqrt(q))
    return H_R, H_C


def aligned_factor_error(fit: FactorModelFit, truth: GroundTruth) -> float:
    """max_t ||Fhat_t - H_R' F_t H_C||_op after optimal rotation alignment."""
    H_R, H_C = alignment_rotations(fit.loadings, truth)
    aligned = np.einsum("ij,tjk,kl->til", H_R.T, truth.F, H_C)
    diff = fit.factors - aligned
    return float(max(np.linalg.svd(d, compute_uv=False)[0] for d in diff))
