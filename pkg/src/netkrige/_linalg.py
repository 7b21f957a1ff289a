"""Small dense linear-algebra helpers shared by selection and kriging."""

from __future__ import annotations

import numpy as np

EPS = np.finfo(float).eps
COND_LIMIT = 1e12


def is_diagonal(M: np.ndarray) -> bool:
    return np.count_nonzero(M - np.diag(np.diag(M))) == 0


def principal_sqrt(sigma: np.ndarray) -> np.ndarray:
    """Symmetric square root ``C`` of a positive definite ``sigma`` (``sigma = C C^T``)."""
    sigma = np.asarray(sigma, dtype=float)
    if is_diagonal(sigma):
        d = np.diag(sigma)
        if np.any(d <= 0):
            raise np.linalg.LinAlgError("covariance is not positive definite")
        return np.diag(np.sqrt(d))
    vals, vecs = np.linalg.eigh((sigma + sigma.T) / 2)
    if vals.min() <= 0:
        raise np.linalg.LinAlgError("covariance is not positive definite")
    return (vecs * np.sqrt(vals)) @ vecs.T


def pinv(M: np.ndarray, k=None) -> np.ndarray:
    """Moore-Penrose inverse; singular values below ``s_max * max(shape) * eps`` are dropped.

    With ``k`` only the leading ``k`` singular directions are inverted.
    """
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return np.zeros(M.shape[::-1])
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    keep = s > s[0] * max(M.shape) * EPS
    if k is not None:
        keep[k:] = False
    return (Vt[keep].T / s[keep]) @ U[:, keep].T


def gram_inverse(V: np.ndarray):
    """Inverse of a symmetric Gram block, falling back to the pseudo-inverse.

    Returns ``(inverse, well_conditioned)``.
    """
    V = np.asarray(V, dtype=float)
    if V.size == 0:
        return np.zeros_like(V), True
    cond = np.linalg.cond(V)
    if np.isfinite(cond) and cond <= COND_LIMIT:
        return np.linalg.solve(V, np.eye(V.shape[0])), True
    return pinv(V), False


def row_space_projector(A: np.ndarray) -> np.ndarray:
    """Orthogonal projector onto the span of the rows of ``A``."""
    return pinv(A) @ A


def pivoted_qr_columns(M: np.ndarray, k: int, tie_rtol: float = 1e-10):
    """First ``k`` pivots of a QR factorization with column pivoting.

    Each step takes the remaining column of largest norm (ties within
    ``tie_rtol`` go to the lowest index), then removes its direction from
    the other columns by modified Gram-Schmidt. Returns ``(pivots, R)``
    where ``R`` is the ``k x k`` leading triangular factor in pivot order.
    """
    W = np.array(M, dtype=float, copy=True)
    n = W.shape[1]
    if not 1 <= k <= min(W.shape):
        raise ValueError(f"k={k} outside 1..{min(W.shape)}")
    active = np.ones(n, dtype=bool)
    pivots = []
    Q = np.zeros((W.shape[0], k))
    floor = np.linalg.norm(W, axis=0).max() * max(W.shape) * EPS
    for step in range(k):
        norms = np.where(active, np.linalg.norm(W, axis=0), -1.0)
        top = norms.max()
        if top <= floor:
            raise np.linalg.LinAlgError("matrix rank is below the requested pivot count")
        p = int(np.flatnonzero(norms >= top * (1 - tie_rtol))[0])
        q = W[:, p] / norms[p]
        Q[:, step] = q
        for _ in range(2):  # second pass restores orthogonality
            W -= np.outer(q, q @ W)
        W[:, p] = 0.0
        active[p] = False
        pivots.append(p)
    R = Q.T @ np.asarray(M, dtype=float)[:, pivots]
    return pivots, np.triu(R)
