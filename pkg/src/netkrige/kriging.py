"""Linear prediction of path-metric summaries from a measured subset of paths.

Link metrics ``x`` have mean ``mu`` and covariance ``sigma``; path metrics are
``y = G x`` with mean ``G mu`` and covariance ``G sigma G^T``. Given the
measured paths ``s`` and the rest ``r``, a summary ``l^T y`` is predicted by a
fixed linear combination of ``y_s``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import _linalg
from .topology import DimensionError, RoutingMatrix


class ConditionWarning(RuntimeWarning):
    """The measured-path covariance block had to be pseudo-inverted."""


def _entries(G) -> np.ndarray:
    return G.entries if isinstance(G, RoutingMatrix) else np.asarray(G, dtype=float)


@dataclass(frozen=True, eq=False)
class LinkModel:
    """First two moments of the link metric."""

    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float).ravel()
        sigma = np.asarray(self.sigma, dtype=float)
        if sigma.ndim == 1:
            sigma = np.diag(sigma)
        if sigma.shape != (mu.size, mu.size):
            raise DimensionError(f"sigma has shape {sigma.shape}, expected {(mu.size, mu.size)}")
        if not np.allclose(sigma, sigma.T, rtol=1e-10, atol=1e-14):
            raise ValueError("link covariance must be symmetric")
        if _linalg.is_diagonal(sigma):
            if np.any(np.diag(sigma) <= 0):
                raise ValueError("link covariance must be positive definite")
        elif np.linalg.eigvalsh(sigma).min() <= 0:
            raise ValueError("link covariance must be positive definite")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def diagonal(cls, mu, std):
        return cls(mu, np.diag(np.asarray(std, dtype=float) ** 2))

    @property
    def n_links(self) -> int:
        return self.mu.size

    def scaling(self) -> np.ndarray:
        """Link scaling ``C`` with ``sigma = C C^T``."""
        return _linalg.principal_sqrt(self.sigma)

    def path_mean(self, G) -> np.ndarray:
        return _entries(G) @ self.mu

    def path_covariance(self, G) -> np.ndarray:
        A = _entries(G)
        return A @ self.sigma @ A.T


# --- summary vectors ---------------------------------------------------------


def average_summary(n_paths: int) -> np.ndarray:
    """Weights of the network-wide average, ``1/n_p`` on every path."""
    return np.full(n_paths, 1.0 / n_paths)


def group_difference_summary(n_paths: int, group_a, group_b) -> np.ndarray:
    """Average over ``group_a`` minus average over ``group_b``."""
    group_a, group_b = list(group_a), list(group_b)
    if not group_a or not group_b:
        raise ValueError("both groups need at least one path")
    if set(group_a) & set(group_b):
        raise ValueError("path groups must be disjoint")
    l = np.zeros(n_paths)
    l[group_a] = 1.0 / len(group_a)
    l[group_b] = -1.0 / len(group_b)
    return l


# --- moments -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PartitionedMoments:
    s: np.ndarray
    r: np.ndarray
    nu_s: np.ndarray
    nu_r: np.ndarray
    V_ss: np.ndarray
    V_sr: np.ndarray
    V_rs: np.ndarray
    V_rr: np.ndarray


def _split(n_paths, indices):
    s = np.asarray(indices, dtype=int).ravel()
    if s.size and (s.min() < 0 or s.max() >= n_paths):
        raise IndexError(f"path index out of range 0..{n_paths - 1}")
    r = np.setdiff1d(np.arange(n_paths), s)
    return s, r


def partition_moments(G, model: LinkModel, indices) -> PartitionedMoments:
    """Mean and covariance of ``y`` split into measured and remaining blocks."""
    A = _entries(G)
    if A.shape[1] != model.n_links:
        raise DimensionError(f"routing matrix has {A.shape[1]} links, model has {model.n_links}")
    s, r = _split(A.shape[0], indices)
    Gs, Gr = A[s], A[r]
    S = model.sigma
    V_sr = Gs @ S @ Gr.T
    return PartitionedMoments(
        s=s,
        r=r,
        nu_s=Gs @ model.mu,
        nu_r=Gr @ model.mu,
        V_ss=Gs @ S @ Gs.T,
        V_sr=V_sr,
        V_rs=V_sr.T,
        V_rr=Gr @ S @ Gr.T,
    )


def _check_summary(l, n_paths):
    l = np.asarray(l, dtype=float).ravel()
    if l.size != n_paths:
        raise DimensionError(f"summary vector has length {l.size}, expected {n_paths}")
    return l


def blp_ideal(G, model: LinkModel, indices, l, y_s) -> float:
    """Best linear predictor of ``l^T y`` when the link mean is known."""
    A = _entries(G)
    l = _check_summary(l, A.shape[0])
    m = partition_moments(A, model, indices)
    y_s = np.asarray(y_s, dtype=float)
    c_star = m.V_rs @ _linalg.pinv(m.V_ss)
    l_s, l_r = l[m.s], l[m.r]
    return float(l_s @ y_s + l_r @ m.nu_r + l_r @ c_star @ (y_s - m.nu_s))


def gls_mean(G_s, V_ss, y_s) -> np.ndarray:
    """Generalized least-squares link mean from measured paths.

    Links crossed by no measured path come out as zero.
    """
    G_s = np.asarray(G_s, dtype=float)
    V_inv = _linalg.pinv(np.asarray(V_ss, dtype=float))
    M = G_s.T @ V_inv @ G_s
    return _linalg.pinv(M) @ G_s.T @ V_inv @ np.asarray(y_s, dtype=float)


# --- predictors --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Predictor:
    """``prediction = weights @ y_s + bias_offset`` over the paths in ``indices``."""

    indices: np.ndarray
    weights: np.ndarray
    l: np.ndarray
    bias_offset: float = 0.0
    well_conditioned: bool = True
    selection: Optional[object] = field(default=None, repr=False)

    def predict(self, y_s) -> np.ndarray:
        """Predict from measured values (``k`` values, or an ``epochs x k`` array)."""
        y_s = np.asarray(y_s, dtype=float)
        if y_s.shape[-1] != self.indices.size:
            raise DimensionError(f"expected {self.indices.size} measured values, got {y_s.shape[-1]}")
        return y_s @ self.weights + self.bias_offset

    def predict_from_paths(self, y) -> np.ndarray:
        """Predict from full path vectors, reading only the measured entries."""
        y = np.asarray(y, dtype=float)
        return self.predict(y[..., self.indices])


def build_eblp(G, model: LinkModel, indices, l, selection=None) -> Predictor:
    """Estimated best linear predictor; needs only ``y_s``, ``G`` and ``sigma``.

    Repeated indices are collapsed to their first occurrence.
    """
    A = _entries(G)
    l = _check_summary(l, A.shape[0])
    raw = np.asarray(indices, dtype=int).ravel()
    if raw.size == 0:
        raise ValueError("at least one measured path is required")
    _, first = np.unique(raw, return_index=True)
    s = raw[np.sort(first)]
    m = partition_moments(A, model, s)
    V_inv, ok = _linalg.gram_inverse(m.V_ss)
    if not ok:
        warnings.warn("measured-path covariance is ill-conditioned; using pseudo-inverse", ConditionWarning, stacklevel=2)
    weights = l[s] + (m.V_rs @ V_inv).T @ l[m.r]
    return Predictor(s, weights, l, 0.0, ok, selection)


def build_truncated_predictor(G, model: LinkModel, indices, scaling, l, k: int, selection=None) -> Predictor:
    """Predictor built on the leading ``k`` singular directions of rescaled sampled rows.

    Rows ``(G C)_(i) * scaling_i`` of the sampled paths (repeats allowed) are
    truncated to rank ``k``; the whitened link vector is recovered on that
    subspace and pushed through ``l^T G C``.
    """
    A = _entries(G)
    l = _check_summary(l, A.shape[0])
    s = np.asarray(indices, dtype=int).ravel()
    D = np.asarray(scaling, dtype=float).ravel()
    if D.size != s.size:
        raise DimensionError("one scaling weight per sampled path required")
    GC = A @ model.scaling()
    tilde = D[:, None] * GC[s]
    k_eff = min(k, np.linalg.matrix_rank(tilde))
    weights = D * (_linalg.pinv(tilde, k_eff).T @ (GC.T @ l))
    return Predictor(s, weights, l, 0.0, True, selection)


def reconstruct_paths(G, indices, y_sub) -> np.ndarray:
    """All path values from a subset whose rows span the row space of ``G``."""
    A = _entries(G)
    s = np.asarray(indices, dtype=int)
    Gs = A[s]
    if np.linalg.matrix_rank(Gs) < np.linalg.matrix_rank(A):
        raise ValueError("measured paths do not span the routing matrix; cannot reconstruct")
    return A @ (_linalg.pinv(Gs) @ np.asarray(y_sub, dtype=float))


def bias_correct(pred: Predictor, G, l, full_y_at_t0) -> Predictor:
    """Shift a predictor so it is exact on one fully measured epoch."""
    A = _entries(G)
    l = _check_summary(l, A.shape[0])
    y0 = np.asarray(full_y_at_t0, dtype=float)
    if y0.size != A.shape[0]:
        raise DimensionError(f"full measurement needs {A.shape[0]} path values")
    offset = float(l @ y0 - pred.weights @ y0[pred.indices])
    return replace(pred, bias_offset=offset)


# --- prediction error --------------------------------------------------------


@dataclass(frozen=True)
class MSPE:
    total: float
    blp: float
    squared_bias: float
    blp_projection: float


def mspe_exact(G, model: LinkModel, indices, l, rtol: float = 1e-9) -> MSPE:
    """Closed-form mean-squared prediction error of the estimated BLP.

    The BLP part is computed both from the covariance blocks and as the
    squared norm of ``(G_r C)^T l_r`` projected off the row space of
    ``G_s C``; a disagreement beyond ``rtol`` raises ``ArithmeticError``.
    """
    A = _entries(G)
    l = _check_summary(l, A.shape[0])
    raw = np.asarray(indices, dtype=int).ravel()
    s = np.unique(raw)
    m = partition_moments(A, model, s)
    l_r = l[m.r]
    V_inv, _ = _linalg.gram_inverse(m.V_ss)
    blp = float(l_r @ (m.V_rr - m.V_rs @ V_inv @ m.V_sr) @ l_r)
    bias = float(l_r @ (m.V_rs @ V_inv @ A[m.s] - A[m.r]) @ model.mu)

    C = model.scaling()
    GsC, GrC = A[m.s] @ C, A[m.r] @ C
    v = GrC.T @ l_r
    resid = v - _linalg.row_space_projector(GsC) @ v
    projected = float(resid @ resid)

    scale = max(abs(blp), abs(projected), float(v @ v), np.finfo(float).tiny)
    if abs(blp - projected) > rtol * scale:
        raise ArithmeticError(f"BLP error forms disagree: {blp!r} vs {projected!r}")
    blp = max(blp, 0.0)
    return MSPE(blp + bias**2, blp, bias**2, projected)


def mspe_of_weights(G, model: LinkModel, indices, weights, l, offset: float = 0.0) -> float:
    """MSPE of an arbitrary linear predictor ``weights @ y_s + offset``.

    The prediction error is ``h^T x + offset`` with ``h = G_s^T w - G^T l``.
    """
    A = _entries(G)
    l = _check_summary(l, A.shape[0])
    s = np.asarray(indices, dtype=int).ravel()
    h = A[s].T @ np.asarray(weights, dtype=float) - A.T @ l
    return float(h @ model.sigma @ h + (h @ model.mu + offset) ** 2)
