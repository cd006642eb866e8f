"""Evaluation metrics: subspace distance, common-component errors and
the rolling-validation protocol for real panels."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import orthonormalize
from .model import LoadingPair, as_observations


def space_distance(A: np.ndarray, B: np.ndarray) -> float:
    """Scaled projection metric between the column spans of A and B.

    D = sqrt(1 - tr(P_A P_B) / k), in [0, 1]: 0 for equal spans, 1 for
    orthogonal spans.  Inputs may carry arbitrary column scaling; they
    are orthonormalized first, so only the spans matter.
    """
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    B = np.atleast_2d(np.asarray(B, dtype=np.float64))
    if A.shape != B.shape:
        raise ValueError("A and B must have the same shape")
    QA = orthonormalize(A)
    QB = orthonormalize(B)
    k = A.shape[1]
    # 1 - tr(P_A P_B)/k == ||(I - P_A) Q_B||_F^2 / k, but the residual
    # form avoids cancellation when the spans (nearly) coincide
    resid = QB - QA @ (QA.T @ QB)
    return float(np.sqrt(min(np.sum(resid**2) / k, 1.0)))


def cc_errors(S_hat: np.ndarray, S_true: np.ndarray) -> tuple[float, float]:
    """Common-component errors.

    MSE  = sum_t ||Shat_t - S_t||_F^2 / (T p q)
    opMax = max_t ||Shat_t - S_t||_op / sqrt(pq)
    """
    S_hat = np.asarray(S_hat, dtype=np.float64)
    S_true = np.asarray(S_true, dtype=np.float64)
    if S_hat.shape != S_true.shape or S_hat.ndim != 3:
        raise ValueError("sequences must be matching (T, p, q) arrays")
    T, p, q = S_hat.shape
    diff = S_hat - S_true
    mse = float(np.sum(diff**2) / (T * p * q))
    opmax = float(max(np.linalg.svd(d, compute_uv=False)[0] for d in diff))
    return mse, opmax / np.sqrt(p * q)


@dataclass
class MetricsReport:
    """Per-fit evaluation summary."""

    d_R: float
    d_C: float
    mse: float
    op_max: float
    per_t: np.ndarray | None = None


def evaluate_fit(L: LoadingPair, X: np.ndarray, truth) -> MetricsReport:
    """Subspace distances and common-component errors of a fitted pair."""
    from .model import common_components

    d_R = space_distance(L.R, truth.R)
    d_C = space_distance(L.C, truth.C)
    mse, opmax = cc_errors(common_components(X, L), truth.S)
    return MetricsReport(d_R=d_R, d_C=d_C, mse=mse, op_max=opmax)


def rolling_validate(series: np.ndarray, years: np.ndarray, n: int,
                     ranks, method: str = "mpca_f",
                     test_years=None, ctl=None):
    """Rolling-window validation on a monthly matrix panel.

    For each test year, loadings are fitted on the 12n months
    immediately before it and each of its 12 months is reconstructed by
    the double projection P_R Y P_C.  Returns a list of rows
    (year, mse, op_max) plus the mean and standard deviation of each
    metric across test years.
    """
    from .estimators import get_estimator

    series = as_observations(series)
    years = np.asarray(years)
    if len(years) != len(series):
        raise ValueError("years must label every month")
    T, p, q = series.shape
    uniq = sorted(set(years.tolist()))
    counts = {y: int(np.sum(years == y)) for y in uniq}
    fit = get_estimator(method)

    if test_years is None:
        test_years = [y for i, y in enumerate(uniq)
                      if sum(counts[z] for z in uniq[:i]) >= 12 * n]
    rows = []
    for y in test_years:
        first = int(np.argmax(years == y))
        if np.sum(years == y) != 12:
            raise ValueError(f"year {y} does not have 12 months")
        if first < 12 * n:
            raise ValueError(f"insufficient history before year {y}")
        train = series[first - 12 * n:first]
        test = series[first:first + 12]
        L = fit(train, ranks, ctl=ctl)
        P_R, P_C = L.projectors()
        pred = np.einsum("ij,tjk,kl->til", P_R, test, P_C)
        diff = test - pred
        mse = float(np.sum(diff**2) / (12 * p * q))
        opmax = float(max(np.linalg.svd(d, compute_uv=False)[0] for d in diff)
                      / np.sqrt(p * q))
        rows.append((y, mse, opmax))
    mses = np.array([r[1] for r in rows])
    ops = np.array([r[2] for r in rows])
    summary = {
        "mse_mean": float(mses.mean()), "mse_sd": float(mses.std(ddof=1)) if len(rows) > 1 else 0.0,
        "opmax_mean": float(ops.mean()), "opmax_sd": float(ops.std(ddof=1)) if len(rows) > 1 else 0.0,
    }
    return rows, summary
