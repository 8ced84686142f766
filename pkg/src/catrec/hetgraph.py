"""Typed User/Basket/Category graph and metapath-constrained random walks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .ingest import IdMaps, TransactionLog

USER, BASKET, CATEGORY = "u", "b", "c"
DEFAULT_SCHEMA = (USER, BASKET, CATEGORY, BASKET, USER)


def node_type(token: str) -> str:
    return token[0]


class WalkDeadEnd(Exception):
    """Current node has no usable transition of the required type."""


@dataclass
class HeteroGraph:
    """Undirected typed graph with co-occurrence edge weights.

    Edges connect only User-Basket and Basket-Category pairs. Adjacency is
    stored per (node, neighbor type) with cumulative weights precomputed for
    weighted sampling.
    """

    nodes_by_type: dict[str, list[str]] = field(default_factory=dict)
    # node -> neighbor type -> (neighbor tokens, cumulative weights)
    adjacency: dict[str, dict[str, tuple[list[str], np.ndarray]]] = field(default_factory=dict)

    def neighbors(self, node: str, required_type: str) -> tuple[list[str], np.ndarray]:
        by_type = self.adjacency.get(node, {})
        if required_type not in by_type:
            return [], np.empty(0)
        return by_type[required_type]


@dataclass
class MetapathSchema:
    """Cyclic node-type sequence constraining walk transitions."""

    types: tuple[str, ...] = DEFAULT_SCHEMA

    def __post_init__(self):
        if len(self.types) < 2:
            raise ConfigError("schema needs at least two types")
        if self.types[0] != self.types[-1]:
            raise ConfigError("schema must start and end with the same type")

    def __len__(self) -> int:
        return len(self.types)

    @property
    def period(self) -> int:
        return len(self.types) - 1

    def type_at(self, position: int) -> str:
        return self.types[position % self.period]


@dataclass
class WalkCorpus:
    walks: list[list[str]]
    seed: int

    def __len__(self) -> int:
        return len(self.walks)


def build_graph(train: TransactionLog, idmaps: IdMaps) -> HeteroGraph:
    """One User-Basket and one Basket-Category edge per distinct pair, with
    weight equal to the pair's multiplicity in the log."""
    if not train.records:
        raise ConfigError("cannot build a graph from an empty log")
    weights: dict[tuple[str, str], float] = {}
    for r in train:
        u = f"u{idmaps.user_index[r.user_id]}"
        b = f"b{idmaps.basket_index[r.basket_id]}"
        c = f"c{idmaps.category_index[r.category_id]}"
        weights[(u, b)] = weights.get((u, b), 0.0) + 1.0
        weights[(b, c)] = weights.get((b, c), 0.0) + 1.0

    raw_adj: dict[str, dict[str, dict[str, float]]] = {}
    nodes: dict[str, set[str]] = {USER: set(), BASKET: set(), CATEGORY: set()}
    for (left, right), w in weights.items():
        for a, z in ((left, right), (right, left)):
            nodes[node_type(a)].add(a)
            raw_adj.setdefault(a, {}).setdefault(node_type(z), {})[z] = w

    adjacency: dict[str, dict[str, tuple[list[str], np.ndarray]]] = {}
    for node, by_type in raw_adj.items():
        adjacency[node] = {}
        for t, nbrs in by_type.items():
            tokens = sorted(nbrs)
            cumw = np.cumsum([nbrs[tok] for tok in tokens])
            adjacency[node][t] = (tokens, cumw)
    nodes_by_type = {t: sorted(members) for t, members in nodes.items()}
    return HeteroGraph(nodes_by_type=nodes_by_type, adjacency=adjacency)


def next_node(
    graph: HeteroGraph,
    current: str,
    required_type: str,
    epsilon: float,
    rng: np.random.Generator,
) -> str:
    """Explore-exploit transition.

    With probability epsilon jump to a uniformly random node of the required
    type anywhere in the graph (explore); otherwise sample a neighbor of that
    type proportional to edge weight (exploit).
    """
    if epsilon > 0.0 and rng.random() < epsilon:
        pool = graph.nodes_by_type.get(required_type, [])
        if not pool:
            raise WalkDeadEnd(f"no nodes of type {required_type!r} in the graph")
        return pool[rng.integers(len(pool))]
    tokens, cumw = graph.neighbors(current, required_type)
    if not tokens:
        raise WalkDeadEnd(f"{current} has no neighbor of type {required_type!r}")
    pick = rng.random() * cumw[-1]
    return tokens[int(np.searchsorted(cumw, pick, side="right"))]


def generate_walk(
    graph: HeteroGraph,
    start: str,
    schema: MetapathSchema,
    length: int,
    epsilon0: float,
    gamma: float,
    rng: np.random.Generator,
) -> list[str] | None:
    """One schema-conforming walk of up to `length` nodes from a User node.

    Transition k (1-based) explores with probability epsilon0 * gamma**k.
    Dead ends truncate; a walk shorter than one schema period is discarded
    (returned as None).
    """
    if node_type(start) != schema.types[0]:
        raise ConfigError(f"start node {start} is not of type {schema.types[0]!r}")
    if length < len(schema):
        raise ConfigError("length must cover at least one full schema period")
    walk = [start]
    for k in range(1, length):
        required = schema.type_at(k)
        epsilon = epsilon0 * gamma**k
        try:
            walk.append(next_node(graph, walk[-1], required, epsilon, rng))
        except WalkDeadEnd:
            break
    if len(walk) < len(schema):
        return None
    return walk


def generate_corpus(
    graph: HeteroGraph,
    schema: MetapathSchema,
    walks_per_node: int,
    length: int,
    epsilon0: float,
    gamma: float,
    seed: int,
) -> WalkCorpus:
    """walks_per_node walks from every User node, each with an independent
    sub-seed derived from (seed, start index, walk index), so the corpus is
    identical regardless of generation order."""
    if walks_per_node < 1:
        raise ConfigError("walks_per_node must be >= 1")
    walks = []
    for start_idx, start in enumerate(graph.nodes_by_type.get(USER, [])):
        for walk_idx in range(walks_per_node):
            rng = np.random.default_rng([seed, start_idx, walk_idx])
            walk = generate_walk(graph, start, schema, length, epsilon0, gamma, rng)
            if walk is not None:
                walks.append(walk)
    return WalkCorpus(walks=walks, seed=seed)


def write_corpus(path, corpus: WalkCorpus) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for walk in corpus.walks:
            fh.write(" ".join(walk) + "\n")


def read_corpus(path, seed: int = 0) -> WalkCorpus:
    with open(path, encoding="utf-8") as fh:
        walks = [line.split() for line in fh if line.strip()]
    return WalkCorpus(walks=walks, seed=seed)
