"""CSV and JSON readers/writers for the command-line tools.

Formats
-------
mu.csv
    ``link,mean`` header, one row per link id.
sigma.csv
    either ``link,variance`` (diagonal covariance) or a headerless
    ``n_e x n_e`` matrix.
measurements
    ``epoch,<path_id>,<path_id>,...`` header, one row per epoch. Every cell
    must hold a number.
summary series
    two columns, ``epoch,<name>``.
"""

from __future__ import annotations

import csv
import hashlib
import json

import numpy as np

from .topology import DimensionError

FLOAT_FORMAT = "{:.12g}"


class FormatError(ValueError):
    """A data file does not follow its documented format."""


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return FLOAT_FORMAT.format(float(x))


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if not isinstance(v, str) else v for v in row])


def _rows(path):
    try:
        with open(path, newline="") as fh:
            return [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc


def _float(cell, path, where):
    try:
        val = float(cell)
    except ValueError as exc:
        raise FormatError(f"{path}: non-numeric value {cell!r} at {where}") from exc
    if not np.isfinite(val):
        raise FormatError(f"{path}: non-finite value at {where}")
    return val


def _is_header(row):
    try:
        [float(c) for c in row]
    except ValueError:
        return True
    return False


def read_link_vector(path, n_links=None) -> np.ndarray:
    """Read a ``link,<value>`` file into a vector ordered by link id."""
    rows = _rows(path)
    if not rows:
        raise FormatError(f"{path}: empty file")
    if _is_header(rows[0]):
        rows = rows[1:]
    vals = {}
    for n, row in enumerate(rows, start=2):
        if len(row) != 2:
            raise FormatError(f"{path}: expected 2 columns on line {n}")
        vals[int(_float(row[0], path, f"line {n}"))] = _float(row[1], path, f"line {n}")
    n = len(vals) if n_links is None else n_links
    if sorted(vals) != list(range(n)):
        raise DimensionError(f"{path}: expected link ids 0..{n - 1}")
    return np.array([vals[j] for j in range(n)])


def read_sigma(path, n_links=None) -> np.ndarray:
    """Link covariance from either accepted layout."""
    rows = _rows(path)
    if not rows:
        raise FormatError(f"{path}: empty file")
    if _is_header(rows[0]) or len(rows[0]) == 2 and len(rows) != 2:
        return np.diag(read_link_vector(path, n_links))
    M = np.array([[_float(c, path, f"row {i}") for c in r] for i, r in enumerate(rows)])
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"{path}: covariance matrix must be square")
    if n_links is not None and M.shape[0] != n_links:
        raise DimensionError(f"{path}: covariance is {M.shape[0]}x{M.shape[0]}, expected {n_links}")
    return M


def write_link_vector(path, values, name):
    write_csv(path, ["link", name], ((j, v) for j, v in enumerate(values)))


def read_measurements(path):
    """Return ``(epochs, path_ids, values)`` from a measurement CSV."""
    rows = _rows(path)
    if len(rows) < 2:
        raise FormatError(f"{path}: need a header and at least one epoch")
    header = rows[0]
    if header[0].strip() != "epoch":
        raise FormatError(f"{path}: first header column must be 'epoch'")
    try:
        path_ids = [int(c) for c in header[1:]]
    except ValueError as exc:
        raise FormatError(f"{path}: path ids in the header must be integers") from exc
    epochs, values = [], []
    for n, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise FormatError(f"{path}: line {n} has {len(row)} fields, expected {len(header)}")
        if any(not c.strip() for c in row):
            raise FormatError(f"{path}: missing value on line {n}")
        epochs.append(int(_float(row[0], path, f"line {n}")))
        values.append([_float(c, path, f"line {n}") for c in row[1:]])
    return np.array(epochs), path_ids, np.array(values)


def write_measurements(path, values, path_ids=None):
    values = np.asarray(values)
    if path_ids is None:
        path_ids = range(values.shape[1])
    header = ["epoch"] + [str(i) for i in path_ids]
    write_csv(path, header, ([t, *row] for t, row in enumerate(values)))


def read_series(path):
    """Two-column ``epoch,<value>`` file; returns ``(epochs, values)``."""
    rows = _rows(path)
    if rows and _is_header(rows[0]):
        rows = rows[1:]
    if not rows:
        raise FormatError(f"{path}: no data rows")
    if any(len(r) != 2 for r in rows):
        raise FormatError(f"{path}: expected two columns")
    data = np.array([[_float(c, path, f"row {i}") for c in r] for i, r in enumerate(rows)])
    return data[:, 0].astype(int), data[:, 1]


def read_path_list(path):
    """Path ids, one per line (a CSV with one column also works)."""
    rows = _rows(path)
    if rows and _is_header(rows[0]):
        rows = rows[1:]
    return [int(_float(r[0], path, "path list")) for r in rows]


def read_summary_file(path, n_paths) -> np.ndarray:
    """Summary weights as ``path,weight`` rows."""
    rows = _rows(path)
    if rows and _is_header(rows[0]):
        rows = rows[1:]
    if rows and len(rows[0]) == 1:
        l = np.array([_float(r[0], path, "weights") for r in rows])
    else:
        l = np.zeros(n_paths)
        for r in rows:
            l[int(_float(r[0], path, "path id"))] = _float(r[1], path, "weight")
    if l.size != n_paths:
        raise DimensionError(f"{path}: summary has {l.size} weights, expected {n_paths}")
    return l


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read JSON from {path}: {exc}") from exc


def write_json(path, doc):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()
