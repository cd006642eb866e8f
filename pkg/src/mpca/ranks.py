"""Selection of the pair of factor numbers by eigenvalue ratios.

All selectors pick arg max over j <= r_max of consecutive eigenvalue
(or singular value) ratios; they differ in which matrix the spectrum
comes from: averaged subspace projectors (robust manifold variants) or
averaged covariance-type matrices (baselines).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .estimators import (IterationControl, _projected_average_projectors,
                         average_projectors, mpca_f, mpca_op, pca_2d2)
from .linalg import top_eigvecs
from .model import Ranks, as_observations

RATIO_FLOOR = 1e-12
DEFAULT_R_MAX = 8


@dataclass
class RankSelection:
    """Selected factor numbers plus the inspected ratio sequences."""

    p0_hat: int
    q0_hat: int
    r0_hat: int
    method: str
    ratio_traces: dict = field(default_factory=dict)

    @property
    def ranks(self) -> Ranks:
        return Ranks(self.p0_hat, self.q0_hat)


def _ratio_argmax(values: np.ndarray, r_max: int) -> tuple[int, np.ndarray]:
    """First arg max of values[j] / values[j+1] over j = 1..r_max
    (1-based), with a floor on the denominator so exactly low-rank
    spectra select the truncation point instead of dividing by zero."""
    values = np.asarray(values, dtype=np.float64)
    if len(values) < r_max + 1:
        raise ValueError(f"need at least r_max+1={r_max + 1} values")
    num = values[:r_max]
    den = np.maximum(values[1:r_max + 1], RATIO_FLOOR)
    ratios = num / den
    return int(np.argmax(ratios)) + 1, ratios


def per_obs_rank(X_t: np.ndarray, r_max: int) -> int:
    """Rank of a single observation: arg max of consecutive singular
    value ratios.  A zero trailing singular value makes the ratio at
    the preceding index infinite, so exactly low-rank inputs recover
    their rank."""
    X_t = np.asarray(X_t, dtype=np.float64)
    if r_max + 1 > min(X_t.shape):
        raise ValueError("r_max + 1 must not exceed min(p, q)")
    s = np.linalg.svd(X_t, compute_uv=False)
    if s[0] <= 0.0:
        raise ValueError("all-zero observation has no rank")
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = s[:r_max] / s[1:r_max + 1]
    ratios[~np.isfinite(ratios)] = np.inf
    return int(np.argmax(ratios)) + 1


def aggregate_ranks(values) -> int:
    """Round the mean per-observation rank to the nearest integer."""
    values = np.asarray(values, dtype=np.float64)
    return int(np.floor(values.mean() + 0.5))


def _pair_quality(tr_row: np.ndarray, tr_col: np.ndarray,
                  p0: int, q0: int) -> float:
    return float(min(tr_row[p0 - 1], tr_col[q0 - 1]))


def mer_op(X: np.ndarray, r_max: int = DEFAULT_R_MAX) -> RankSelection:
    """Non-iterative manifold eigenvalue-ratio selector.

    First compresses each observation at the rounded mean of the
    per-observation ranks, then applies the eigenvalue-ratio rule to
    the averaged left/right subspace projectors.
    """
    X = as_observations(X)
    T, p, q = X.shape
    if r_max + 1 > min(p, q):
        raise ValueError("r_max + 1 must not exceed min(p, q)")
    r0_hat = aggregate_ranks([per_obs_rank(X_t, r_max) for X_t in X])
    P_R, P_C = average_projectors(X, r0_hat)
    lam_R = np.linalg.eigvalsh(P_R)[::-1]
    lam_C = np.linalg.eigvalsh(P_C)[::-1]
    p0_hat, tr_row = _ratio_argmax(lam_R, r_max)
    q0_hat, tr_col = _ratio_argmax(lam_C, r_max)
    return RankSelection(p0_hat, q0_hat, r0_hat, "mer_op",
                         {"row": tr_row, "col": tr_col})


def mer_f(X: np.ndarray, r_max: int = DEFAULT_R_MAX,
          ctl: IterationControl | None = None) -> RankSelection:
    """Iterative manifold eigenvalue-ratio selector.

    Warm-started from mer_op; each step fits the projection-boosted
    loadings at the current pair, rebuilds the averaged projectors from
    the projected data and re-selects the pair, until the pair repeats.
    A non-consecutive recurrence (a cycle) is resolved by returning the
    visited pair whose smaller selected ratio is largest.
    """
    X = as_observations(X)
    if ctl is None:
        ctl = IterationControl()
    T, p, q = X.shape
    sel = mer_op(X, r_max)
    pair = (sel.p0_hat, sel.q0_hat)
    seen: dict[tuple[int, int], tuple[float, dict]] = {
        pair: (_pair_quality(sel.ratio_traces["row"], sel.ratio_traces["col"],
                             *pair), sel.ratio_traces)
    }
    traces = sel.ratio_traces
    for _ in range(ctl.max_iter):
        fit = mpca_f(X, Ranks(*pair), ctl)
        L = fit.loadings
        r0 = min(pair)
        P_R, P_C = _projected_average_projectors(
            X, L.R / np.sqrt(p), L.C / np.sqrt(q), r0)
        lam_R = np.linalg.eigvalsh(P_R)[::-1]
        lam_C = np.linalg.eigvalsh(P_C)[::-1]
        p0_new, tr_row = _ratio_argmax(lam_R, r_max)
        q0_new, tr_col = _ratio_argmax(lam_C, r_max)
        new = (p0_new, q0_new)
        traces = {"row": tr_row, "col": tr_col}
        if new == pair:
            break
        if new in seen:  # cycle: keep the best pair visited
            quality = _pair_quality(tr_row, tr_col, *new)
            if quality > seen[new][0]:
                seen[new] = (quality, traces)
            best = max(seen, key=lambda pr: seen[pr][0])
            pair, traces = best, seen[best][1]
            break
        seen[new] = (_pair_quality(tr_row, tr_col, *new), traces)
        pair = new
    return RankSelection(pair[0], pair[1], min(pair), "mer_f", traces)


def baseline_rank(X: np.ndarray, method: str, r_max: int = DEFAULT_R_MAX,
                  ctl: IterationControl | None = None) -> RankSelection:
    """Covariance-based eigenvalue-ratio baselines.

    "er_2d2" reads the ratios off the averaged Gram matrices
    (1/T) sum X X' and (1/T) sum X' X; "iter_er" iterates the rule on
    the projected covariances (1/Tq) sum X P_C X' (and symmetrically),
    starting from the er_2d2 pair.
    """
    X = as_observations(X)
    if ctl is None:
        ctl = IterationControl()
    T, p, q = X.shape
    if r_max + 1 > min(p, q):
        raise ValueError("r_max + 1 must not exceed min(p, q)")
    M1 = np.einsum("tij,tkj->ik", X, X) / T
    M2 = np.einsum("tji,tjk->ik", X, X) / T
    lam_R = np.linalg.eigvalsh(M1)[::-1]
    lam_C = np.linalg.eigvalsh(M2)[::-1]
    p0_hat, tr_row = _ratio_argmax(lam_R, r_max)
    q0_hat, tr_col = _ratio_argmax(lam_C, r_max)
    if method == "er_2d2":
        return RankSelection(p0_hat, q0_hat, min(p0_hat, q0_hat), "er_2d2",
                             {"row": tr_row, "col": tr_col})
    if method != "iter_er":
        raise ValueError(f"unknown baseline {method!r}")

    pair = (p0_hat, q0_hat)
    seen = {pair: (_pair_quality(tr_row, tr_col, *pair),
                   {"row": tr_row, "col": tr_col})}
    traces = seen[pair][1]
    for _ in range(ctl.max_iter):
        L = pca_2d2(X, Ranks(*pair))
        YR = np.einsum("tij,jk->tik", X, L.C / q)
        M1 = np.einsum("tik,tlk->il", YR, YR) / T
        YC = np.einsum("tji,jk->tik", X, L.R / p)
        M2 = np.einsum("tik,tlk->il", YC, YC) / T
        lam_R = np.linalg.eigvalsh(M1)[::-1]
        lam_C = np.linalg.eigvalsh(M2)[::-1]
        p0_new, tr_row = _ratio_argmax(lam_R, r_max)
        q0_new, tr_col = _ratio_argmax(lam_C, r_max)
        new = (p0_new, q0_new)
        traces = {"row": tr_row, "col": tr_col}
        if new == pair:
            break
        if new in seen:
            quality = _pair_quality(tr_row, tr_col, *new)
            if quality > seen[new][0]:
                seen[new] = (quality, traces)
            best = max(seen, key=lambda pr: seen[pr][0])
            pair, traces = best, seen[best][1]
            break
        seen[new] = (_pair_quality(tr_row, tr_col, *new), traces)
        pair = new
    return RankSelection(pair[0], pair[1], min(pair), "iter_er", traces)


def select_rank(X: np.ndarray, method: str, r_max: int = DEFAULT_R_MAX,
                ctl: IterationControl | None = None) -> RankSelection:
    """Dispatch on a selector tag: mer_op, mer_f, er_2d2 or iter_er."""
    if method == "mer_op":
        return mer_op(X, r_max)
    if method == "mer_f":
        return mer_f(X, r_max, ctl)
    return baseline_rank(X, method, r_max, ctl)
