"""Binary transaction matrix T and temporally decayed affinity matrix A."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .ingest import IdMaps, TransactionLog

DAY = 86400
DEFAULT_HALF_LIFE = 30 * DAY


@dataclass
class SparseMatrix:
    """COO sparse matrix with entries sorted by (row, col)."""

    shape: tuple[int, int]
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray

    @classmethod
    def from_entries(cls, shape, entries: dict[tuple[int, int], float]) -> "SparseMatrix":
        keys = sorted(entries)
        rows = np.array([k[0] for k in keys], dtype=np.int64)
        cols = np.array([k[1] for k in keys], dtype=np.int64)
        vals = np.array([entries[k] for k in keys], dtype=np.float64)
        return cls(shape=shape, rows=rows, cols=cols, vals=vals)

    @property
    def nnz(self) -> int:
        return len(self.vals)

    def support(self) -> set[tuple[int, int]]:
        return set(zip(self.rows.tolist(), self.cols.tolist()))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape)
        out[self.rows, self.cols] = self.vals
        return out


@dataclass
class InteractionMatrices:
    """T (binary) and A (decayed counts) over (user, category), same support."""

    T: SparseMatrix
    A: SparseMatrix
    reference_time: int


@dataclass
class NormalizedAffinity:
    """Standardized log1p of A's nonzeros; shift/scale invert the transform."""

    values: SparseMatrix
    shift: float
    scale: float

    def to_raw(self) -> np.ndarray:
        return np.expm1(self.values.vals * self.scale + self.shift)


def decay_weight(delta_t, half_life: float):
    """Exponential decay 2**(-delta_t / half_life); 1.0 at delta_t = 0."""
    delta_t = np.asarray(delta_t, dtype=np.float64)
    if np.any(delta_t < 0):
        raise ConfigError("delta_t must be non-negative")
    if half_life <= 0:
        raise ConfigError("half_life must be positive")
    out = np.exp2(-delta_t / half_life)
    return float(out) if out.ndim == 0 else out


def build_matrices(
    train: TransactionLog,
    idmaps: IdMaps,
    half_life: float = DEFAULT_HALF_LIFE,
    reference_time: int | None = None,
) -> InteractionMatrices:
    """Aggregate the train log into T and A.

    A_pq sums decay_weight(reference_time - ts) over that pair's transactions;
    T_pq is 1 wherever at least one transaction exists.
    """
    if reference_time is None:
        reference_time = train.max_timestamp
    if reference_time < train.max_timestamp:
        raise ConfigError("reference_time precedes a train transaction")
    shape = (idmaps.num_users, idmaps.num_categories)
    a_entries: dict[tuple[int, int], float] = {}
    for r in train:
        key = (idmaps.user_index[r.user_id], idmaps.category_index[r.category_id])
        w = decay_weight(reference_time - r.timestamp, half_life)
        a_entries[key] = a_entries.get(key, 0.0) + w
    A = SparseMatrix.from_entries(shape, a_entries)
    T = SparseMatrix(shape=shape, rows=A.rows.copy(), cols=A.cols.copy(), vals=np.ones(A.nnz))
    return InteractionMatrices(T=T, A=A, reference_time=reference_time)


def build_count_matrix(train: TransactionLog, idmaps: IdMaps) -> SparseMatrix:
    """Raw transaction counts per (user, category); input to the baselines."""
    shape = (idmaps.num_users, idmaps.num_categories)
    entries: dict[tuple[int, int], float] = {}
    for r in train:
        key = (idmaps.user_index[r.user_id], idmaps.category_index[r.category_id])
        entries[key] = entries.get(key, 0.0) + 1.0
    return SparseMatrix.from_entries(shape, entries)


def normalize_affinity(A: SparseMatrix) -> NormalizedAffinity:
    """Standardize log1p of the nonzero entries to mean 0, std 1.

    Raw values are recovered as expm1(value * scale + shift).
    """
    if A.nnz < 2:
        raise ConfigError("need at least 2 nonzero entries to normalize")
    logged = np.log1p(A.vals)
    shift = float(np.mean(logged))
    scale = float(np.std(logged))
    if scale == 0.0:
        raise ConfigError("affinity entries all equal; zero variance")
    values = SparseMatrix(
        shape=A.shape, rows=A.rows.copy(), cols=A.cols.copy(), vals=(logged - shift) / scale
    )
    return NormalizedAffinity(values=values, shift=shift, scale=scale)


def write_sparse(path, matrix: SparseMatrix) -> None:
    """Three-column text: row col value, sorted by (row, col)."""
    with open(path, "w", encoding="utf-8") as fh:
        for r, c, v in zip(matrix.rows, matrix.cols, matrix.vals):
            fh.write(f"{r} {c} {float(v)!r}\n")


def read_sparse(path, shape: tuple[int, int]) -> SparseMatrix:
    rows, cols, vals = [], [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            r, c, v = line.split()
            rows.append(int(r))
            cols.append(int(c))
            vals.append(float(v))
    return SparseMatrix(
        shape=shape,
        rows=np.array(rows, dtype=np.int64),
        cols=np.array(cols, dtype=np.int64),
        vals=np.array(vals, dtype=np.float64),
    )


def write_normalized(path, norm: NormalizedAffinity) -> None:
    """Same three-column body with a `shift=<f> scale=<f>` header line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"shift={norm.shift!r} scale={norm.scale!r}\n")
        for r, c, v in zip(norm.values.rows, norm.values.cols, norm.values.vals):
            fh.write(f"{r} {c} {float(v)!r}\n")


def read_normalized(path, shape: tuple[int, int]) -> NormalizedAffinity:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        shift = float(header[0].split("=")[1])
        scale = float(header[1].split("=")[1])
        rows, cols, vals = [], [], []
        for line in fh:
            r, c, v = line.split()
            rows.append(int(r))
            cols.append(int(c))
            vals.append(float(v))
    values = SparseMatrix(
        shape=shape,
        rows=np.array(rows, dtype=np.int64),
        cols=np.array(cols, dtype=np.int64),
        vals=np.array(vals, dtype=np.float64),
    )
    return NormalizedAffinity(values=values, shift=shift, scale=scale)
