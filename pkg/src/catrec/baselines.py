"""Comparison models: popularity, implicit ALS, BPR, and plain graph
embeddings. All expose scores over the full (user, category) index space."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .affinity import SparseMatrix
from .errors import ConfigError, DivergenceError
from .skipgram import EmbeddingTable


@dataclass
class PopModel:
    counts: np.ndarray  # per-category transaction counts

    def scores_for_user(self, p: int) -> np.ndarray:
        return self.counts.copy()


@dataclass
class AlsModel:
    user_factors: np.ndarray
    item_factors: np.ndarray

    def scores_for_user(self, p: int) -> np.ndarray:
        return self.item_factors @ self.user_factors[p]


@dataclass
class BprModel:
    user_factors: np.ndarray
    item_factors: np.ndarray
    item_bias: np.ndarray

    def scores_for_user(self, p: int) -> np.ndarray:
        return self.item_factors @ self.user_factors[p] + self.item_bias


@dataclass
class M2vModel:
    user_vectors: np.ndarray
    item_vectors: np.ndarray

    def scores_for_user(self, p: int) -> np.ndarray:
        return self.item_vectors @ self.user_vectors[p]


def itempop_fit(counts: SparseMatrix) -> PopModel:
    """Preference score = how often the category was bought in train,
    identical for every user."""
    totals = np.zeros(counts.shape[1])
    np.add.at(totals, counts.cols, counts.vals)
    return PopModel(counts=totals)


def itempop_score(model: PopModel, p: int, q: int) -> float:
    return float(model.counts[q])


def als_objective(
    dense_counts: np.ndarray, X: np.ndarray, Y: np.ndarray, reg: float, confidence_alpha: float
) -> float:
    """Confidence-weighted squared reconstruction error plus L2 penalty."""
    pref = (dense_counts > 0).astype(np.float64)
    conf = 1.0 + confidence_alpha * dense_counts
    err = pref - X @ Y.T
    return float(np.sum(conf * err**2) + reg * (np.sum(X**2) + np.sum(Y**2)))


def als_fit(
    counts: SparseMatrix,
    factors: int = 64,
    regularization: float = 0.01,
    confidence_alpha: float = 40.0,
    iterations: int = 15,
    seed: int = 0,
) -> tuple[AlsModel, list[float]]:
    """Implicit-feedback alternating least squares.

    Preference is 1 wherever a transaction exists; confidence is
    1 + confidence_alpha * count. Returns the model and the per-sweep
    objective values (non-increasing).
    """
    if factors < 1:
        raise ConfigError("factors must be >= 1")
    m, n = counts.shape
    dense = counts.to_dense()
    pref = (dense > 0).astype(np.float64)
    conf = 1.0 + confidence_alpha * dense
    rng = np.random.default_rng(seed)
    X = rng.normal(0.0, 0.01, size=(m, factors))
    Y = rng.normal(0.0, 0.01, size=(n, factors))
    eye = regularization * np.eye(factors)
    objectives = []

    def solve_side(A, B, conf_rows, pref_rows):
        # For each row i: minimize sum_j c_ij (p_ij - a_i . b_j)^2 + reg |a_i|^2
        out = np.empty_like(A)
        BtB = B.T @ B
        for i in range(A.shape[0]):
            c = conf_rows[i]
            lhs = BtB + B.T @ ((c - 1.0)[:, None] * B) + eye
            rhs = B.T @ (c * pref_rows[i])
            try:
                out[i] = np.linalg.solve(lhs, rhs)
            except np.linalg.LinAlgError as e:
                raise DivergenceError("singular ALS normal equations") from e
        return out

    for _ in range(iterations):
        X = solve_side(X, Y, conf, pref)
        Y = solve_side(Y, X, conf.T, pref.T)
        objectives.append(als_objective(dense, X, Y, regularization, confidence_alpha))
    return AlsModel(user_factors=X, item_factors=Y), objectives


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def bpr_triple_loss(model: BprModel, u: int, i: int, j: int, reg: float) -> float:
    """-ln sig(x_ui - x_uj) plus the L2 penalty on the touched parameters."""
    x = float(
        model.user_factors[u] @ (model.item_factors[i] - model.item_factors[j])
        + model.item_bias[i]
        - model.item_bias[j]
    )
    penalty = reg * (
        np.sum(model.user_factors[u] ** 2)
        + np.sum(model.item_factors[i] ** 2)
        + np.sum(model.item_factors[j] ** 2)
        + model.item_bias[i] ** 2
        + model.item_bias[j] ** 2
    )
    return float(np.logaddexp(0.0, -x) + penalty)


def bpr_triple_gradients(model: BprModel, u: int, i: int, j: int, reg: float):
    """Gradients of bpr_triple_loss w.r.t. (w_u, h_i, h_j, b_i, b_j)."""
    w_u = model.user_factors[u]
    h_i, h_j = model.item_factors[i], model.item_factors[j]
    x = float(w_u @ (h_i - h_j) + model.item_bias[i] - model.item_bias[j])
    g = -_sigmoid(-x)  # d(-ln sig(x))/dx
    return (
        g * (h_i - h_j) + 2.0 * reg * w_u,
        g * w_u + 2.0 * reg * h_i,
        -g * w_u + 2.0 * reg * h_j,
        g + 2.0 * reg * model.item_bias[i],
        -g + 2.0 * reg * model.item_bias[j],
    )


def bpr_fit(
    counts: SparseMatrix,
    factors: int = 64,
    learning_rate: float = 0.05,
    regularization: float = 0.01,
    epochs: int = 30,
    seed: int = 0,
) -> tuple[BprModel, list[float]]:
    """Pairwise-ranking SGD over sampled (user, positive, negative) triples.

    Returns the model and the per-epoch mean triple loss.
    """
    m, n = counts.shape
    positives: dict[int, np.ndarray] = {}
    by_user: dict[int, list[int]] = {}
    for p, q in zip(counts.rows, counts.cols):
        by_user.setdefault(int(p), []).append(int(q))
    for p, qs in by_user.items():
        if len(qs) >= n:
            raise ConfigError(f"user {p} has no non-positive category")
        positives[p] = np.array(sorted(set(qs)), dtype=np.int64)
    if len(positives) < m:
        raise ConfigError("every user needs at least one positive")

    rng = np.random.default_rng(seed)
    model = BprModel(
        user_factors=rng.normal(0.0, 0.01, size=(m, factors)),
        item_factors=rng.normal(0.0, 0.01, size=(n, factors)),
        item_bias=np.zeros(n),
    )
    pos_sets = {p: set(qs.tolist()) for p, qs in positives.items()}
    triples_per_epoch = counts.nnz
    trace = []
    for epoch in range(epochs):
        rng_e = np.random.default_rng([seed, 1 + epoch])
        total = 0.0
        for _ in range(triples_per_epoch):
            u = int(rng_e.integers(m))
            qs = positives[u]
            i = int(qs[rng_e.integers(len(qs))])
            j = int(rng_e.integers(n))
            while j in pos_sets[u]:
                j = int(rng_e.integers(n))
            total += bpr_triple_loss(model, u, i, j, regularization)
            g_w, g_hi, g_hj, g_bi, g_bj = bpr_triple_gradients(model, u, i, j, regularization)
            model.user_factors[u] -= learning_rate * g_w
            model.item_factors[i] -= learning_rate * g_hi
            model.item_factors[j] -= learning_rate * g_hj
            model.item_bias[i] -= learning_rate * g_bi
            model.item_bias[j] -= learning_rate * g_bj
        mean_loss = total / triples_per_epoch
        if not np.isfinite(mean_loss):
            raise DivergenceError("non-finite BPR loss", epoch=epoch)
        trace.append(mean_loss)
    return model, trace


def m2v_model(table: EmbeddingTable, m: int, n: int) -> M2vModel:
    """Scores are inner products of the graph-embedding vectors."""
    d = table.dimension
    users = np.zeros((m, d))
    items = np.zeros((n, d))
    for p in range(m):
        tok = f"u{p}"
        if tok in table:
            users[p] = table.vector(tok)
    for q in range(n):
        tok = f"c{q}"
        if tok in table:
            items[q] = table.vector(tok)
    return M2vModel(user_vectors=users, item_vectors=items)


def m2v_score(table: EmbeddingTable, p: int, q: int) -> float:
    u_tok, c_tok = f"u{p}", f"c{q}"
    if u_tok not in table or c_tok not in table:
        raise ConfigError(f"node missing from embedding table: u{p} or c{q}")
    return float(table.vector(u_tok) @ table.vector(c_tok))
