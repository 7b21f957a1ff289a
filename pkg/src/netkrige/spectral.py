"""Eigenanalysis of ``B = G^T G``, effective rank and betweenness."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .topology import RoutingMatrix, Topology, hop_diameter


class SpectralError(RuntimeError):
    """Eigendecomposition failed on a numerically pathological input."""


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray  # descending, clamped at zero
    eigenvectors: np.ndarray  # column k pairs with eigenvalues[k]
    numeric_rank: int

    @property
    def ratios(self) -> np.ndarray:
        """Eigenvalues rescaled by the largest one."""
        return self.eigenvalues / self.eigenvalues[0]


def _as_array(G) -> np.ndarray:
    return G.entries if isinstance(G, RoutingMatrix) else np.asarray(G, dtype=float)


def _fix_signs(vecs: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    vecs = vecs.copy()
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        nz = np.flatnonzero(np.abs(col) > tol)
        if nz.size and col[nz[0]] < 0:
            vecs[:, k] = -col
    return vecs


def spectrum_of_gram(B: np.ndarray) -> Spectrum:
    """Spectrum of a symmetric positive semidefinite Gram matrix."""
    B = np.asarray(B, dtype=float)
    if B.size == 0:
        raise SpectralError("empty matrix")
    try:
        vals, vecs = np.linalg.eigh(B)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(str(exc)) from exc
    if not np.all(np.isfinite(vals)):
        raise SpectralError("non-finite eigenvalues")
    order = np.argsort(-vals, kind="stable")
    vals, vecs = vals[order], vecs[:, order]
    top = max(vals[0], 0.0)
    tol = top * B.shape[0] * np.finfo(float).eps
    vals = np.where(vals > tol, vals, 0.0)
    rank = int(np.count_nonzero(vals > tol))
    return Spectrum(vals, _fix_signs(vecs), rank)


def compute_spectrum(G, C: Optional[np.ndarray] = None) -> Spectrum:
    """Eigendecomposition of ``G^T G``, or of ``(GC)^T (GC)`` when ``C`` is given."""
    A = _as_array(G)
    if A.size == 0:
        raise SpectralError("empty routing matrix")
    if C is not None:
        A = A @ C
    return spectrum_of_gram(A.T @ A)


def max_gap_index(spec: Spectrum) -> int:
    """Index ``k`` (1-based) with the largest drop ``(lam_k - lam_{k+1}) / lam_1``.

    Only the nonzero part of the spectrum is searched.
    """
    lam = spec.eigenvalues[: max(spec.numeric_rank, 1)]
    if lam.size < 2:
        return 1
    gaps = (lam[:-1] - lam[1:]) / lam[0]
    return int(np.argmax(gaps)) + 1


def effective_rank(spec: Spectrum, threshold: float, rtol: float = 1e-10) -> int:
    """Smallest ``k`` with ``lam_{k+1} / lam_1 < threshold``.

    Ratios within ``rtol`` of the threshold count as equal to it, so that
    numerically tied leading eigenvalues are not split.
    """
    if not 0 < threshold <= 1:
        raise ValueError("threshold must lie in (0, 1]")
    ratios = spec.ratios
    for k in range(1, ratios.size):
        if ratios[k] < threshold - rtol:
            return k
    return int(ratios.size)


@dataclass(frozen=True, eq=False)
class BetweennessReport:
    edge_betweenness: np.ndarray
    co_betweenness: np.ndarray
    diameter: int


def betweenness_report(G: RoutingMatrix, topo: Topology) -> BetweennessReport:
    if G.n_links != topo.n_links:
        raise ValueError("routing matrix and topology disagree on the link count")
    B = G.entries.T @ G.entries
    B = np.rint(B).astype(np.int64)
    return BetweennessReport(np.diag(B).copy(), B, hop_diameter(topo))


@dataclass(frozen=True)
class BetweennessBound:
    k: int
    eigenvalue: float
    bound: float
    satisfied: bool
    ratio: float
    ratio_bound: float
    ratio_satisfied: bool


def check_betweenness_bound(spec: Spectrum, rep: BetweennessReport, rtol: float = 1e-9):
    """Compare each eigenvalue with the sorted betweenness times the diameter.

    Checks ``lam_k <= b_k * diam`` and ``lam_k / lam_1 <= (b_k / b_1) * diam``
    with ``b`` the edge betweenness sorted in descending order. Violations
    are reported, not raised.
    """
    b = np.sort(np.asarray(rep.edge_betweenness, dtype=float))[::-1]
    lam = spec.eigenvalues
    d = rep.diameter
    rows = []
    for k in range(lam.size):
        bound = b[k] * d
        ratio = lam[k] / lam[0]
        ratio_bound = b[k] / b[0] * d
        rows.append(
            BetweennessBound(
                k=k + 1,
                eigenvalue=float(lam[k]),
                bound=float(bound),
                satisfied=bool(lam[k] <= bound * (1 + rtol) + rtol),
                ratio=float(ratio),
                ratio_bound=float(ratio_bound),
                ratio_satisfied=bool(ratio <= ratio_bound * (1 + rtol) + rtol),
            )
        )
    return rows
