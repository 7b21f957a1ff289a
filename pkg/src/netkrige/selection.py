"""Choosing which paths to measure.

Deterministic selection picks ``k`` rows of ``G C`` (``sigma = C C^T``) that
approximate the span of its leading ``k`` left singular vectors, by running
a column-pivoted QR on the transposed singular-vector block. Randomized
selection draws rows with replacement in proportion to their squared norms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _linalg
from .kriging import LinkModel, build_truncated_predictor, mspe_exact, mspe_of_weights
from .spectral import compute_spectrum
from .topology import RoutingMatrix


class SelectionError(ValueError):
    """Requested selection size is out of range for the routing matrix."""


@dataclass(frozen=True, eq=False)
class SelectionResult:
    indices: tuple
    scaling: np.ndarray
    method: str
    achieved_rank: int
    seed: Optional[int] = None

    @property
    def k(self) -> int:
        return len(self.indices)

    def to_dict(self) -> dict:
        return {
            "indices": [int(i) for i in self.indices],
            "scaling": [float(w) for w in self.scaling],
            "achieved_rank": int(self.achieved_rank),
            "method": self.method,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SelectionResult":
        return cls(
            indices=tuple(int(i) for i in doc["indices"]),
            scaling=np.asarray(doc.get("scaling", [1.0] * len(doc["indices"])), dtype=float),
            method=doc.get("method", "deterministic"),
            achieved_rank=int(doc.get("achieved_rank", 0)),
            seed=doc.get("seed"),
        )


def _entries(G):
    return G.entries if isinstance(G, RoutingMatrix) else np.asarray(G, dtype=float)


def _weighted(G, C=None):
    A = _entries(G)
    if C is None:
        return A
    C = np.asarray(C, dtype=float)
    if C.ndim == 1:
        C = np.diag(C)
    if np.linalg.matrix_rank(C) < C.shape[0]:
        raise np.linalg.LinAlgError("link scaling must be nonsingular")
    return A @ C


def _scaling_from_sigma(sigma, n_links):
    if sigma is None:
        return np.eye(n_links)
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim == 1:
        sigma = np.diag(sigma)
    try:
        return _linalg.principal_sqrt(sigma)
    except np.linalg.LinAlgError as exc:
        raise SelectionError("link covariance must be positive definite") from exc


def row_sampling_probabilities(G, C=None) -> np.ndarray:
    """Squared row norms of ``G C`` over its squared Frobenius norm."""
    A = _weighted(G, C)
    norms = np.einsum("ij,ij->i", A, A)
    if np.any(norms == 0):
        raise ValueError("routing matrix has an all-zero row")
    return norms / norms.sum()


def select_paths_deterministic(G, sigma, k: int) -> SelectionResult:
    """Pick ``k`` paths by pivoted QR on the leading left singular vectors of ``G C``."""
    A = _entries(G)
    C = _scaling_from_sigma(sigma, A.shape[1])
    GC = A @ C
    U, s, _ = np.linalg.svd(GC, full_matrices=False)
    rank = int(np.count_nonzero(s > s[0] * max(GC.shape) * _linalg.EPS))
    if not 1 <= k <= rank:
        raise SelectionError(f"k={k} must lie in 1..rank(GC)={rank}")
    pivots, _ = _linalg.pivoted_qr_columns(U[:, :k].T, k)
    p = row_sampling_probabilities(GC)
    idx = np.asarray(pivots)
    scaling = 1.0 / np.sqrt(k * p[idx])
    return SelectionResult(
        indices=tuple(int(i) for i in pivots),
        scaling=scaling,
        method="deterministic",
        achieved_rank=int(np.linalg.matrix_rank(A[idx])),
    )


def select_paths_randomized(G, C=None, c: int = 1, seed: int = 0) -> SelectionResult:
    """Draw ``c`` paths i.i.d. (with replacement) from the row-norm probabilities."""
    A = _entries(G)
    if not 1 <= c <= A.shape[0]:
        raise SelectionError(f"c={c} must lie in 1..{A.shape[0]}")
    p = row_sampling_probabilities(A, C)
    rng = np.random.default_rng(seed)
    idx = rng.choice(A.shape[0], size=c, replace=True, p=p)
    return SelectionResult(
        indices=tuple(int(i) for i in idx),
        scaling=1.0 / np.sqrt(c * p[idx]),
        method="randomized",
        achieved_rank=int(np.linalg.matrix_rank(A[idx])),
        seed=seed,
    )


def gram_deviation(G, C, indices, scaling) -> float:
    """``||A^T A - At^T At||_F / ||A||_F^2`` for ``A = G C`` and rescaled selected rows ``At``."""
    A = _weighted(G, C)
    idx = np.asarray(indices, dtype=int)
    At = np.asarray(scaling, dtype=float)[:, None] * A[idx]
    fro2 = float(np.sum(A * A))
    return float(np.linalg.norm(A.T @ A - At.T @ At, "fro") / fro2)


def compute_fk_curve(G, sigma, k_max: int, weighted: bool = False):
    """Normalized Gram deviation of the deterministic selection for ``k = 1..k_max``.

    Paths are chosen with the covariance-weighted selector; the deviation is
    measured on the unweighted routing matrix with row-norm probabilities
    of ``G`` unless ``weighted`` is set, in which case ``G C`` is used
    throughout.
    """
    A = _entries(G)
    C = _scaling_from_sigma(sigma, A.shape[1]) if weighted else None
    p = row_sampling_probabilities(A, C)
    out = []
    for k in range(1, k_max + 1):
        sel = select_paths_deterministic(A, sigma, k)
        idx = np.asarray(sel.indices)
        out.append((k, gram_deviation(A, C, idx, 1.0 / np.sqrt(k * p[idx]))))
    return out


def fk_slope(curve, k_lo: int = 2, k_hi: int = 25) -> float:
    """Least-squares slope of ``log f(k)`` against ``log k`` over ``k_lo..k_hi``."""
    ks = np.array([k for k, _ in curve], dtype=float)
    vals = np.array([v for _, v in curve], dtype=float)
    keep = (ks >= k_lo) & (ks <= k_hi) & (vals > 0)
    return float(np.polyfit(np.log(ks[keep]), np.log(vals[keep]), 1)[0])


def _model(mu, sigma, n_links):
    if sigma is None:
        sigma = np.eye(n_links)
    sigma = np.asarray(sigma, dtype=float)
    return LinkModel(mu, np.diag(sigma) if sigma.ndim == 1 else sigma)


def _whitened_mean_norm2(model: LinkModel) -> float:
    w = np.linalg.solve(model.scaling(), model.mu)
    return float(w @ w)


def _eigenvalue(spec, k):
    lam = spec.eigenvalues
    return float(lam[k]) if k < lam.size else 0.0


@dataclass(frozen=True)
class SelectionBound:
    k: int
    mspe: float
    bound: float
    fk: float
    next_eigenvalue: float
    satisfied: bool


def check_selection_bound(G, sigma, mu, l, k: int, rtol: float = 1e-9) -> SelectionBound:
    """Compare the exact MSPE of the deterministic selection with its spectral bound.

    ``bound = (|m|^2 + 1) * (lam_{k+1} + 2 f(k) ||GC||_F^2) * |l|^2`` where ``f(k)``
    is the realized Gram deviation, ``lam`` the spectrum of ``(GC)^T (GC)`` and
    ``m = C^{-1} mu`` the whitened mean (``m = mu`` when ``sigma = I``).
    """
    A = _entries(G)
    model = _model(mu, sigma, A.shape[1])
    C = model.scaling()
    l = np.asarray(l, dtype=float)
    sel = select_paths_deterministic(A, model.sigma, k)
    fk = gram_deviation(A, C, sel.indices, sel.scaling)
    lam_next = _eigenvalue(compute_spectrum(A, C), k)
    fro2 = float(np.sum((A @ C) ** 2))
    bound = (_whitened_mean_norm2(model) + 1) * (lam_next + 2 * fk * fro2) * float(l @ l)
    mspe = mspe_exact(A, model, sel.indices, l).total
    return SelectionBound(k, mspe, bound, fk, lam_next, bool(mspe <= bound * (1 + rtol)))


@dataclass(frozen=True)
class SamplingBound:
    violation_rate: float
    allowed_rate: float
    trials: int
    worst_ratio: float

    @property
    def satisfied(self) -> bool:
        return self.violation_rate <= self.allowed_rate


def sampling_bound_value(G, model: LinkModel, l, c: int, k: int, delta: float) -> float:
    """Right-hand side of the high-probability MSPE bound for ``c`` sampled paths."""
    A = _entries(G)
    C = model.scaling()
    GC = A @ C
    lam_next = _eigenvalue(compute_spectrum(A, C), k)
    fro2 = float(np.sum(GC * GC))
    slack = 2 * (1 + np.sqrt(np.log(2 / delta))) / np.sqrt(c) * fro2
    l = np.asarray(l, dtype=float)
    return (_whitened_mean_norm2(model) + 1) * (lam_next + slack) * float(l @ l)


def check_sampling_bound(G, sigma, mu, l, c: int, k: int, delta: float, trials: int, seed: int = 0) -> SamplingBound:
    """Empirical rate at which randomized selection breaks its MSPE bound.

    Each trial draws ``c`` paths with its own seed, builds the rank-``k``
    truncated predictor and evaluates its exact MSPE. The rate passes when
    it is at most ``delta + 3 sqrt(delta (1 - delta) / trials)``.
    """
    A = _entries(G)
    if not 1 <= k <= c <= A.shape[0]:
        raise SelectionError(f"need 1 <= k <= c <= n_p, got k={k}, c={c}")
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    model = _model(mu, sigma, A.shape[1])
    C = model.scaling()
    l = np.asarray(l, dtype=float)
    bound = sampling_bound_value(A, model, l, c, k, delta)
    seeds = np.random.SeedSequence(seed).generate_state(trials)
    violations = 0
    worst = 0.0
    for t in range(trials):
        sel = select_paths_randomized(A, C, c, int(seeds[t]))
        pred = build_truncated_predictor(A, model, sel.indices, sel.scaling, l, k)
        err = mspe_of_weights(A, model, pred.indices, pred.weights, l)
        worst = max(worst, err / bound)
        violations += int(err > bound)
    allowed = delta + 3 * np.sqrt(delta * (1 - delta) / trials)
    return SamplingBound(violations / trials, float(allowed), trials, float(worst))
