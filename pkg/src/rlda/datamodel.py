"""Core data containers, group statistics, CSV ingestion, and simulation.

Conventions
-----------
- Observation matrices have shape ``(n, p)``: rows are observations.
- Group labels are 0-based integer indices into ``group_names``; names are
  assigned by first appearance during ingestion, which keeps the encoding
  deterministic.
- All containers are immutable after construction and safe to share across
  threads.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GroupedDataset",
    "GroupMeans",
    "SimulationConfig",
    "group_means",
    "group_means_to_json",
    "load_csv",
    "load_matrix_csv",
    "save_csv",
    "simulate",
    "sparse_shift",
]


def _as_float_matrix(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array, got ndim={arr.ndim}")
    return arr


@dataclass(frozen=True)
class GroupedDataset:
    """An ``(n, p)`` observation matrix with group labels.

    Parameters
    ----------
    values : ndarray of shape (n, p)
        Observations, one per row. Must be finite.
    labels : ndarray of shape (n,)
        Group index of each row, 0-based.
    group_names : tuple of str
        One display name per group, in first-appearance order.

    Notes
    -----
    The container accepts a single group so that group statistics can be
    computed on one sample; ingestion and the classifiers require at least
    two groups.
    """

    values: np.ndarray
    labels: np.ndarray
    group_names: tuple[str, ...]
    group_counts: np.ndarray = field(init=False)

    def __post_init__(self):
        values = _as_float_matrix(self.values, "values")
        labels = np.asarray(self.labels, dtype=int)
        if labels.ndim != 1 or labels.shape[0] != values.shape[0]:
            raise ValueError("labels must be a 1-D array with one entry per row")
        if values.shape[0] == 0 or values.shape[1] == 0:
            raise ValueError("dataset must contain at least one row and one column")
        if not np.all(np.isfinite(values)):
            bad = np.argwhere(~np.isfinite(values))[0]
            raise ValueError(f"non-finite value at row {bad[0]}, column {bad[1]}")
        k = len(self.group_names)
        if k < 1:
            raise ValueError("at least one group is required")
        if labels.min() < 0 or labels.max() >= k:
            raise ValueError("labels reference a non-existing group")
        counts = np.bincount(labels, minlength=k)
        if np.any(counts < 1):
            empty = self.group_names[int(np.argmin(counts))]
            raise ValueError(f"group {empty!r} has no observations")
        values.setflags(write=False)
        labels.setflags(write=False)
        counts.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "group_names", tuple(self.group_names))
        object.__setattr__(self, "group_counts", counts)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    @property
    def n_groups(self) -> int:
        return len(self.group_names)

    def subset(self, rows: np.ndarray) -> "GroupedDataset":
        """Restrict to the given row indices, keeping the group encoding."""
        rows = np.asarray(rows, dtype=int)
        return GroupedDataset(self.values[rows], self.labels[rows], self.group_names)


@dataclass(frozen=True)
class GroupMeans:
    """Pooled mean and per-group means of a grouped dataset.

    ``pooled`` is the mean over all rows; row ``k`` of ``per_group`` is the
    arithmetic mean of group ``k``. By construction ``pooled`` equals the
    count-weighted average of the ``per_group`` rows.
    """

    pooled: np.ndarray
    per_group: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        pooled = np.asarray(self.pooled, dtype=float)
        per_group = _as_float_matrix(self.per_group, "per_group")
        counts = np.asarray(self.counts, dtype=int)
        if pooled.shape != (per_group.shape[1],):
            raise ValueError("pooled mean length must match per_group columns")
        if counts.shape != (per_group.shape[0],):
            raise ValueError("counts must have one entry per group")
        weighted = counts @ per_group / counts.sum()
        if not np.allclose(weighted, pooled, rtol=1e-9, atol=1e-9):
            raise ValueError("pooled mean must be the count-weighted average of group means")
        for arr in (pooled, per_group, counts):
            arr.setflags(write=False)
        object.__setattr__(self, "pooled", pooled)
        object.__setattr__(self, "per_group", per_group)
        object.__setattr__(self, "counts", counts)


def group_means(data: GroupedDataset) -> GroupMeans:
    """Compute the pooled mean and the per-group means.

    Parameters
    ----------
    data : GroupedDataset

    Returns
    -------
    GroupMeans
    """
    k = data.n_groups
    per_group = np.empty((k, data.p))
    for g in range(k):
        per_group[g] = data.values[data.labels == g].mean(axis=0)
    pooled = data.values.mean(axis=0)
    return GroupMeans(pooled=pooled, per_group=per_group, counts=data.group_counts.copy())


def group_means_to_json(means: GroupMeans, group_names: tuple[str, ...] | None = None) -> str:
    """Serialize group means as a JSON document for inspection."""
    doc = {
        "pooled": means.pooled.tolist(),
        "per_group": means.per_group.tolist(),
        "counts": means.counts.tolist(),
    }
    if group_names is not None:
        doc["group_names"] = list(group_names)
    return json.dumps(doc, sort_keys=True)


@dataclass(frozen=True)
class SimulationConfig:
    """Two-group equicorrelated Gaussian design.

    Group one follows ``N_p(0, Sigma)`` and group two ``N_p(shift, Sigma)``
    with ``Sigma = sigma^2 [(1 - c) I + c 11^T]``, positive definite for
    ``c`` in ``[0, 1)``.

    Parameters
    ----------
    n, m : int
        Group sample sizes.
    p : int
        Dimension.
    sigma : float
        Scale; must be positive.
    c : float
        Equicorrelation in ``[0, 1)``.
    shift : ndarray of shape (p,)
        Mean of the second group.
    seed : int
        64-bit seed; generation is bit-reproducible given the seed.
    """

    n: int
    m: int
    p: int
    sigma: float
    c: float
    shift: np.ndarray
    seed: int

    def __post_init__(self):
        if self.n < 1 or self.m < 1 or self.p < 1:
            raise ValueError("n, m, p must be positive")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if not 0.0 <= self.c < 1.0:
            raise ValueError("c must lie in [0, 1)")
        shift = np.asarray(self.shift, dtype=float)
        if shift.shape != (self.p,):
            raise ValueError("shift must be a length-p vector")
        shift.setflags(write=False)
        object.__setattr__(self, "shift", shift)


def sparse_shift(p: int, nonzero: int = 5, value: float = 3.0) -> np.ndarray:
    """A p-vector whose first ``nonzero`` coordinates equal ``value``."""
    if not 0 <= nonzero <= p:
        raise ValueError("nonzero must lie in [0, p]")
    shift = np.zeros(p)
    shift[:nonzero] = value
    return shift


def _equicorrelated_sample(rng: np.random.Generator, rows: int, p: int, sigma: float, c: float) -> np.ndarray:
    # Factor form sigma * (sqrt(1-c) z + sqrt(c) z0 1): covariance
    # sigma^2 [(1-c) I + c 11^T] without any p x p factorization.
    z = rng.standard_normal((rows, p))
    z0 = rng.standard_normal(rows)
    return sigma * (np.sqrt(1.0 - c) * z + np.sqrt(c) * z0[:, None])


def simulate(config: SimulationConfig) -> GroupedDataset:
    """Draw the two-group equicorrelated Gaussian dataset.

    The generator is numpy's PCG64 seeded through ``SeedSequence(seed)``,
    with one spawned child stream per group; normal variates come from the
    generator's ziggurat method. Two calls with the same config are
    bitwise identical.

    Returns
    -------
    GroupedDataset
        ``n + m`` rows; group names ``("x", "y")``.
    """
    ss = np.random.SeedSequence(config.seed)
    stream_x, stream_y = ss.spawn(2)
    x = _equicorrelated_sample(np.random.default_rng(stream_x), config.n, config.p, config.sigma, config.c)
    y = _equicorrelated_sample(np.random.default_rng(stream_y), config.m, config.p, config.sigma, config.c)
    y += config.shift
    values = np.vstack([x, y])
    labels = np.concatenate([np.zeros(config.n, dtype=int), np.ones(config.m, dtype=int)])
    return GroupedDataset(values=values, labels=labels, group_names=("x", "y"))


def load_csv(path, label_column: str) -> GroupedDataset:
    """Load a grouped dataset from a headered, comma-separated UTF-8 file.

    Every column except ``label_column`` must be numeric and finite. Label
    strings are mapped to group indices in order of first appearance.

    Raises
    ------
    FileNotFoundError
        If the file does not exist.
    ValueError
        On a missing or non-numeric cell (reporting row and column), a
        missing label column, or fewer than 2 groups.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if label_column not in header:
            raise ValueError(f"{path}: label column {label_column!r} not found in header {header}")
        label_idx = header.index(label_column)
        feature_cols = [i for i in range(len(header)) if i != label_idx]
        if not feature_cols:
            raise ValueError(f"{path}: no feature columns besides the label column")

        rows: list[list[float]] = []
        labels: list[int] = []
        name_to_idx: dict[str, int] = {}
        names: list[str] = []
        for row_num, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ValueError(f"{path}: row {row_num} has {len(row)} cells, expected {len(header)}")
            name = row[label_idx].strip()
            if not name:
                raise ValueError(f"{path}: row {row_num}, column {label_column!r}: empty label")
            if name not in name_to_idx:
                name_to_idx[name] = len(names)
                names.append(name)
            labels.append(name_to_idx[name])
            parsed = []
            for i in feature_cols:
                cell = row[i].strip()
                try:
                    val = float(cell)
                except ValueError:
                    raise ValueError(
                        f"{path}: row {row_num}, column {header[i]!r}: non-numeric cell {cell!r}"
                    ) from None
                if not np.isfinite(val):
                    raise ValueError(f"{path}: row {row_num}, column {header[i]!r}: non-finite value {cell!r}")
                parsed.append(val)
            rows.append(parsed)

    if not rows:
        raise ValueError(f"{path}: no data rows")
    if len(names) < 2:
        raise ValueError(f"{path}: fewer than 2 groups (found {len(names)})")
    return GroupedDataset(values=np.array(rows), labels=np.array(labels), group_names=tuple(names))


def load_matrix_csv(path) -> tuple[np.ndarray, list[str]]:
    """Load an unlabeled numeric CSV as ``(matrix, column_names)``."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        rows = []
        for row_num, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ValueError(f"{path}: row {row_num} has {len(row)} cells, expected {len(header)}")
            try:
                rows.append([float(cell) for cell in row])
            except ValueError:
                raise ValueError(f"{path}: row {row_num}: non-numeric cell") from None
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.array(rows), header


def save_csv(data: GroupedDataset, path, label_column: str = "group") -> None:
    """Write a grouped dataset in the format accepted by :func:`load_csv`."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"v{j + 1}" for j in range(data.p)] + [label_column])
        for row, lab in zip(data.values, data.labels):
            writer.writerow([repr(float(v)) for v in row] + [data.group_names[lab]])
