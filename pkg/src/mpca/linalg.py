"""Dense linear-algebra kernel with deterministic sign conventions.

All decompositions order eigen/singular values in non-increasing order
and flip each returned column so that its largest-magnitude entry is
nonnegative, which makes outputs reproducible bit-for-bit on a given
BLAS for a given input.
"""

from __future__ import annotations

import numpy as np

SYM_TOL = 1e-10
ORTH_TOL = 1e-10


def _check_finite(M: np.ndarray, name: str = "matrix") -> np.ndarray:
    M = np.asarray(M, dtype=np.float64)
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains non-finite entries")
    return M


def fix_signs(V: np.ndarray) -> np.ndarray:
    """Flip columns so the entry of largest absolute value is nonnegative."""
    V = np.asarray(V)
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def top_eigvecs(M: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Leading k eigenvectors of a symmetric matrix.

    Returns (V, eigvals) where V is n x k with orthonormal, sign-fixed
    columns ordered by descending eigenvalue and eigvals is the full
    descending eigenvalue list.
    """
    M = _check_finite(M)
    n = M.shape[0]
    if M.ndim != 2 or M.shape[1] != n:
        raise ValueError("matrix must be square")
    if not (1 <= k <= n):
        raise ValueError(f"k={k} out of range for n={n}")
    M = 0.5 * (M + M.T)
    w, V = np.linalg.eigh(M)
    w = w[::-1]
    V = V[:, ::-1]
    return fix_signs(V[:, :k]), w


def top_singvecs(M: np.ndarray, k: int, side: str = "both"):
    """Leading k singular vectors of an n x m matrix.

    side is "left", "right" or "both".  Returns (U, s), (V, s) or
    (U, V, s) respectively, with s the full non-increasing singular
    value list.
    """
    M = _check_finite(M)
    n, m = M.shape
    if not (1 <= k <= min(n, m)):
        raise ValueError(f"k={k} out of range for shape {M.shape}")
    if side not in ("left", "right", "both"):
        raise ValueError(f"unknown side {side!r}")
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    U = fix_signs(U[:, :k])
    V = fix_signs(Vt.T[:, :k])
    if side == "left":
        return U, s
    if side == "right":
        return V, s
    return U, V, s


def projector(B: np.ndarray) -> np.ndarray:
    """Orthogonal projector B B' onto the span of an orthonormal basis."""
    B = _check_finite(B, "basis")
    k = B.shape[1]
    gram = B.T @ B
    if np.max(np.abs(gram - np.eye(k))) > ORTH_TOL:
        raise ValueError("basis columns are not orthonormal")
    return B @ B.T


def procrustes_align(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Orthonormal k x k matrix H minimizing ||B - A H||_F.

    Solution is U V' from the SVD of A'B.  A must have full column
    rank, otherwise the alignment is not well defined.
    """
    A = _check_finite(A, "A")
    B = _check_finite(B, "B")
    if A.shape != B.shape:
        raise ValueError("A and B must have the same shape")
    sA = np.linalg.svd(A, compute_uv=False)
    if sA[-1] <= 1e-12 * max(sA[0], 1.0):
        raise ValueError("A is rank deficient, alignment degenerate")
    U, _, Vt = np.linalg.svd(A.T @ B)
    return U @ Vt


def orthonormalize(A: np.ndarray) -> np.ndarray:
    """Orthonormal basis of span(A) via reduced QR; raises if rank deficient."""
    A = _check_finite(A)
    Q, R = np.linalg.qr(A)
    diag = np.abs(np.diag(R))
    if np.any(diag <= 1e-12 * max(np.max(diag, initial=0.0), 1.0)):
        raise ValueError("input is rank deficient")
    return Q
