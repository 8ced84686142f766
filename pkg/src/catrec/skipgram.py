"""Heterogeneous skip-gram with negative sampling over the walk corpus."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DivergenceError
from .hetgraph import WalkCorpus, node_type


@dataclass
class SgnsConfig:
    dimension: int = 64
    window: int = 2
    negatives: int = 5
    lr_start: float = 0.025
    lr_end: float = 0.0001
    epochs: int = 5
    unigram_power: float = 0.75
    seed: int = 0

    def validate(self) -> None:
        if self.dimension < 1 or self.window < 1 or self.negatives < 1:
            raise ConfigError("dimension, window, and negatives must be >= 1")
        if not (0 < self.lr_end <= self.lr_start):
            raise ConfigError("need 0 < lr_end <= lr_start")


@dataclass
class EmbeddingTable:
    """Dense vectors per type-prefixed node token."""

    tokens: list[str]
    vectors: np.ndarray  # (len(tokens), dimension)
    index: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {tok: i for i, tok in enumerate(self.tokens)}

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def vector(self, token: str) -> np.ndarray:
        return self.vectors[self.index[token]]


def save_embeddings(path, table: EmbeddingTable) -> None:
    """First line `<count> <d>`, then one token + d floats per line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(table.tokens)} {table.dimension}\n")
        for tok, vec in zip(table.tokens, table.vectors):
            fh.write(tok + " " + " ".join(repr(float(x)) for x in vec) + "\n")


def load_embeddings(path) -> EmbeddingTable:
    with open(path, encoding="utf-8") as fh:
        count, dim = map(int, fh.readline().split())
        tokens, rows = [], []
        for _ in range(count):
            parts = fh.readline().split()
            tokens.append(parts[0])
            rows.append([float(x) for x in parts[1 : dim + 1]])
    return EmbeddingTable(tokens=tokens, vectors=np.array(rows, dtype=np.float64))


def extract_contexts(walk: list[str], window: int) -> list[tuple[str, str]]:
    """Ordered (center, context) pairs within the window, excluding self."""
    if window < 1:
        raise ConfigError("window must be >= 1")
    pairs = []
    for i, center in enumerate(walk):
        for j in range(max(0, i - window), min(len(walk), i + window + 1)):
            if j != i:
                pairs.append((center, walk[j]))
    return pairs


def softmax_prob(table: EmbeddingTable, context: str, center: str) -> float:
    """Exact softmax over all nodes; diagnostic only, O(|V|)."""
    scores = table.vectors @ table.vector(center)
    scores -= scores.max()
    expd = np.exp(scores)
    return float(expd[table.index[context]] / expd.sum())


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def sgns_loss(w_in, w_out, center: int, context: int, negatives) -> float:
    """-log sig(x_c.x_v) - sum_neg log sig(-x_n.x_v)."""
    v = w_in[center]
    pos = float(w_out[context] @ v)
    neg = w_out[negatives] @ v
    loss = np.logaddexp(0.0, -pos) + np.logaddexp(0.0, neg).sum()
    return float(loss)


def sgns_gradients(w_in, w_out, center: int, context: int, negatives):
    """Gradients of sgns_loss w.r.t. the touched rows."""
    v = w_in[center]
    g_pos = _sigmoid(float(w_out[context] @ v)) - 1.0
    g_neg = _sigmoid(w_out[negatives] @ v)
    g_center = g_pos * w_out[context] + g_neg @ w_out[negatives]
    g_context = g_pos * v
    g_negatives = np.outer(g_neg, v)
    return g_center, g_context, g_negatives


def sgns_step(w_in, w_out, center: int, context: int, negatives, lr: float) -> float:
    """One SGD step on a (center, context) pair; returns the pre-step loss."""
    loss = sgns_loss(w_in, w_out, center, context, negatives)
    if not np.isfinite(loss):
        raise DivergenceError("non-finite skip-gram loss")
    g_center, g_context, g_negatives = sgns_gradients(w_in, w_out, center, context, negatives)
    w_in[center] -= lr * g_center
    w_out[context] -= lr * g_context
    w_out[negatives] -= lr * g_negatives
    return loss


@dataclass
class NegativeSampler:
    """Per-type unigram**power sampler over corpus occurrence counts."""

    by_type: dict[str, tuple[np.ndarray, np.ndarray]]  # type -> (token rows, cum probs)

    @classmethod
    def from_counts(cls, tokens: list[str], counts: np.ndarray, power: float) -> "NegativeSampler":
        by_type: dict[str, tuple[np.ndarray, np.ndarray]] = {}
        types = sorted({node_type(t) for t in tokens})
        for t in types:
            rows = np.array([i for i, tok in enumerate(tokens) if node_type(tok) == t])
            weights = counts[rows].astype(np.float64) ** power
            by_type[t] = (rows, np.cumsum(weights / weights.sum()))
        return cls(by_type=by_type)

    def sample(self, typ: str, count: int, rng: np.random.Generator, exclude: int = -1) -> np.ndarray:
        rows, cum = self.by_type[typ]
        if len(rows) <= count:
            raise ConfigError(f"type {typ!r} too small for {count} negatives")
        out = rows[np.searchsorted(cum, rng.random(count), side="right")]
        while exclude >= 0 and np.any(out == exclude):
            redo = out == exclude
            out[redo] = rows[np.searchsorted(cum, rng.random(int(redo.sum())), side="right")]
        return out


def sample_negatives(
    sampler: NegativeSampler, typ: str, count: int, rng: np.random.Generator
) -> np.ndarray:
    return sampler.sample(typ, count, rng)


def train_skipgram(corpus: WalkCorpus, config: SgnsConfig) -> tuple[EmbeddingTable, list[float]]:
    """Train SGNS over the corpus; returns (table, per-epoch mean losses).

    Center vectors are initialized uniform in [-0.5/d, 0.5/d] from the seed
    and are the exported table; context vectors start at zero. Negatives are
    drawn within the context node's type.
    """
    config.validate()
    if not corpus.walks:
        raise ConfigError("empty walk corpus")
    counts_map: dict[str, int] = {}
    for walk in corpus.walks:
        for tok in walk:
            counts_map[tok] = counts_map.get(tok, 0) + 1
    tokens = sorted(counts_map)
    index = {tok: i for i, tok in enumerate(tokens)}
    counts = np.array([counts_map[t] for t in tokens], dtype=np.float64)

    d = config.dimension
    rng_init = np.random.default_rng(config.seed)
    w_in = (rng_init.random((len(tokens), d)) - 0.5) / d
    w_out = np.zeros((len(tokens), d))

    pairs = []
    for walk in corpus.walks:
        for center, context in extract_contexts(walk, config.window):
            pairs.append((index[center], index[context]))
    pairs = np.array(pairs, dtype=np.int64)

    sampler = NegativeSampler.from_counts(tokens, counts, config.unigram_power)
    ctx_types = [node_type(tokens[c]) for c in pairs[:, 1]] if len(pairs) else []

    total_steps = max(1, config.epochs * len(pairs))
    step = 0
    epoch_losses = []
    for epoch in range(config.epochs):
        rng = np.random.default_rng([config.seed, 1 + epoch])
        order = rng.permutation(len(pairs))
        total = 0.0
        for row in order:
            center, context = pairs[row]
            negatives = sampler.sample(ctx_types[row], config.negatives, rng, exclude=context)
            lr = config.lr_start + (config.lr_end - config.lr_start) * (step / total_steps)
            total += sgns_step(w_in, w_out, center, context, negatives, lr)
            step += 1
        epoch_losses.append(total / max(1, len(pairs)))
    if not np.all(np.isfinite(w_in)):
        raise DivergenceError("non-finite embedding vectors")
    return EmbeddingTable(tokens=tokens, vectors=w_in), epoch_losses
