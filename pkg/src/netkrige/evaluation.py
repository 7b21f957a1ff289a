"""Synthetic epoch series, prediction-quality metrics and spike detection."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .kriging import LinkModel, Predictor, bias_correct, build_eblp, reconstruct_paths
from .selection import select_paths_deterministic
from .topology import DimensionError, RoutingMatrix

log = logging.getLogger(__name__)

EPOCH_SECONDS = 600.0


@dataclass(frozen=True, eq=False)
class EpochSeries:
    """Path metric per epoch (``epochs x n_p``)."""

    values: np.ndarray
    epoch_duration: float = EPOCH_SECONDS
    link_truth: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] < 1:
            raise DimensionError("series values must be a non-empty epochs x paths array")
        if not np.all(np.isfinite(v)):
            raise ValueError("series values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def n_epochs(self) -> int:
        return self.values.shape[0]

    def summary(self, l) -> np.ndarray:
        return self.values @ np.asarray(l, dtype=float)


def random_link_model(n_links: int, seed: int, mean_range=(2.0, 36.0), std_range=(0.16, 0.94)) -> LinkModel:
    """Diagonal link model with means and standard deviations drawn uniformly."""
    rng = np.random.default_rng(seed)
    mu = rng.uniform(*mean_range, size=n_links)
    std = rng.uniform(*std_range, size=n_links)
    return LinkModel.diagonal(mu, std)


def simulate_series(G: RoutingMatrix, model: LinkModel, epochs: int, seed: int, spikes: Sequence = ()) -> EpochSeries:
    """Independent Gaussian link draws per epoch, pushed through ``G``.

    ``spikes`` holds ``(epoch, link, added)`` triples applied to the link
    draws. Epoch ``t`` uses its own generator spawned from ``seed``.
    """
    if epochs < 1:
        raise ValueError("need at least one epoch")
    n_e = model.n_links
    if G.n_links != n_e:
        raise DimensionError(f"routing matrix has {G.n_links} links, model has {n_e}")
    C = model.scaling()
    streams = np.random.SeedSequence(seed).spawn(epochs)
    x = np.empty((epochs, n_e))
    for t, ss in enumerate(streams):
        z = np.random.default_rng(ss).standard_normal(n_e)
        x[t] = model.mu + C @ z
    for epoch, link, added in spikes:
        if added < 0:
            raise ValueError("spike magnitudes must be nonnegative")
        x[int(epoch), int(link)] += added
    return EpochSeries(x @ G.entries.T, link_truth=x)


def summary_std(G: RoutingMatrix, model: LinkModel, l) -> float:
    """Standard deviation of ``l^T y`` under the link model."""
    h = G.entries.T @ np.asarray(l, dtype=float)
    return float(np.sqrt(h @ model.sigma @ h))


def spike_schedule(G: RoutingMatrix, model: LinkModel, l, n_spikes: int, epochs: int, seed: int,
                   scale=(3.0, 6.0), spacing: int = 20, first: int = 12):
    """Random link spikes sized in units of the summary's standard deviation.

    Spike epochs are drawn without replacement from ``first, first + spacing,
    ...`` so no detection window holds two spikes. Each spike hits one
    uniformly chosen link with a delay that lifts ``l^T y`` by
    ``U(*scale)`` summary standard deviations.
    """
    rng = np.random.default_rng(seed)
    slots = np.arange(first, epochs, spacing)
    if n_spikes > slots.size:
        raise ValueError(f"only {slots.size} spike slots fit into {epochs} epochs")
    chosen = np.sort(rng.choice(slots, n_spikes, replace=False))
    lift = G.entries.T @ np.asarray(l, dtype=float)
    sd = summary_std(G, model, l)
    out = []
    for epoch in chosen:
        link = int(rng.integers(G.n_links))
        size = rng.uniform(*scale) * sd / abs(lift[link])
        out.append((int(epoch), link, float(size)))
    return out


def predict_series(pred: Predictor, series: EpochSeries) -> np.ndarray:
    return pred.predict_from_paths(series.values)


def relative_errors(pred_values, true_values) -> np.ndarray:
    """``|pred - true| / |true|`` per epoch; epochs with a zero truth are dropped."""
    pred_values = np.asarray(pred_values, dtype=float)
    true_values = np.asarray(true_values, dtype=float)
    keep = true_values != 0
    if not np.all(keep):
        log.warning("excluding %d epochs whose true summary is zero", np.count_nonzero(~keep))
    return np.abs(pred_values[keep] - true_values[keep]) / np.abs(true_values[keep])


def relative_error_curve(series: EpochSeries, G: RoutingMatrix, model: LinkModel, l, k_values):
    """Mean absolute relative error of the deterministic-selection predictor for each ``k``."""
    l = np.asarray(l, dtype=float)
    truth = series.summary(l)
    out = []
    for k in k_values:
        sel = select_paths_deterministic(G, model.sigma, k)
        pred = build_eblp(G, model, sel.indices, l, selection=sel)
        out.append((int(k), float(relative_errors(predict_series(pred, series), truth).mean())))
    return out


def reference_paths(G: RoutingMatrix, model: LinkModel):
    """``rank(G)`` independent paths whose values determine every other path."""
    return select_paths_deterministic(G, model.sigma, G.rank()).indices


def full_measurement(G: RoutingMatrix, model: LinkModel, y_row) -> np.ndarray:
    """All path values of one epoch, rebuilt from the reference paths only."""
    ref = list(reference_paths(G, model))
    return reconstruct_paths(G, ref, np.asarray(y_row, dtype=float)[ref])


def bias_corrected_predictor(G: RoutingMatrix, model: LinkModel, l, k: int, series: EpochSeries, epoch: int = 0) -> Predictor:
    """Deterministic-selection predictor shifted to be exact at ``epoch``.

    The one-off full measurement at ``epoch`` is taken on the reference
    paths and extended to the rest through ``G``.
    """
    sel = select_paths_deterministic(G, model.sigma, k)
    pred = build_eblp(G, model, sel.indices, l, selection=sel)
    return bias_correct(pred, G, l, full_measurement(G, model, series.values[epoch]))


def correlation(pred_series, true_series) -> float:
    """Pearson correlation of two equally long series."""
    a = np.asarray(pred_series, dtype=float)
    b = np.asarray(true_series, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or a.size < 2:
        raise ValueError("need two 1-D series of equal length >= 2")
    a = a - a.mean()
    b = b - b.mean()
    denom = np.sqrt((a @ a) * (b @ b))
    if denom == 0:
        raise ValueError("correlation is undefined for a constant series")
    return float(np.clip((a @ b) / denom, -1.0, 1.0))


# --- spikes ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AnomalyLabels:
    flags: np.ndarray
    window: int = 6
    multiplier: float = 3.0


def detect_spikes(series, window: int = 6, multiplier: float = 3.0, two_sided: bool = True, ddof: int = 1) -> AnomalyLabels:
    """Flag epochs that stray from the mean of the preceding ``window`` values.

    Epoch ``t`` is flagged when its deviation from that mean exceeds
    ``multiplier`` times the standard deviation of the same window. The
    first ``window`` epochs are never flagged.
    """
    v = np.asarray(series, dtype=float).ravel()
    if window < 2:
        raise ValueError("window must be at least 2")
    if v.size <= window:
        raise ValueError("series must be longer than the window")
    windows = np.lib.stride_tricks.sliding_window_view(v[:-1], window)
    mean = windows.mean(axis=1)
    std = windows.std(axis=1, ddof=ddof)
    dev = v[window:] - mean
    if two_sided:
        dev = np.abs(dev)
    # rounding slack so a flat window does not flag its own rounding error
    slack = 16 * np.finfo(float).eps * np.abs(windows).max(axis=1)
    flags = np.zeros(v.size, dtype=bool)
    flags[window:] = dev > multiplier * std + slack
    return AnomalyLabels(flags, window, multiplier)


@dataclass(frozen=True)
class RocPoint:
    threshold: float
    tpr: float  # nan when the truth has no spikes
    fpr: float  # nan when every epoch is a true spike


@dataclass(frozen=True)
class RocCurve:
    points: tuple
    truth_multiplier: float

    def at(self, threshold: float) -> RocPoint:
        for p in self.points:
            if np.isclose(p.threshold, threshold):
                return p
        raise KeyError(threshold)


def default_thresholds(lo: float = 1.0, hi: float = 5.0, step: float = 0.25):
    n = int(round((hi - lo) / step))
    return [lo + i * step for i in range(n + 1)]


def roc_sweep(true_summary, pred_summary, window: int = 6, truth_multiplier: float = 3.0, thresholds=None) -> RocCurve:
    """True/false positive rates of predicted spikes against spikes in the truth."""
    if thresholds is None:
        thresholds = default_thresholds()
    truth = detect_spikes(true_summary, window, truth_multiplier).flags
    n_true = np.count_nonzero(truth)
    n_false = truth.size - n_true
    if n_true == 0:
        log.warning("true series has no spikes; TPR is undefined")
    points = []
    for thr in thresholds:
        flagged = detect_spikes(pred_summary, window, thr).flags
        tpr = np.count_nonzero(flagged & truth) / n_true if n_true else float("nan")
        fpr = np.count_nonzero(flagged & ~truth) / n_false if n_false else float("nan")
        points.append(RocPoint(float(thr), float(tpr), float(fpr)))
    return RocCurve(tuple(points), float(truth_multiplier))
