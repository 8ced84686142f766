"""Top-k ranking metrics and the evaluation harness over a test split."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError
from .ingest import IdMaps, TransactionLog

DEFAULT_KS = (5, 10, 15, 20)
METRICS = ("NDCG", "HR", "MRR", "MAP", "LAUC")


@dataclass
class EvalReport:
    """Mean metric values over evaluated users, keyed by (metric, k)."""

    values: dict[tuple[str, int], float]
    user_count: int
    per_user: dict[tuple[str, int], list[float]] = field(default_factory=dict)


def _check_truth(truth: set) -> None:
    if not truth:
        raise ConfigError("ground truth is empty")


def ndcg_at_k(predictions: Sequence[int], truth: set, k: int) -> float:
    """Binary-relevance DCG over the top k, normalized by the ideal DCG."""
    _check_truth(truth)
    if k < 1:
        raise ConfigError("k must be >= 1")
    dcg = 0.0
    for i, item in enumerate(predictions[:k], start=1):
        if item in truth:
            dcg += 1.0 / math.log2(i + 1)
    idcg = sum(1.0 / math.log2(i + 1) for i in range(1, min(len(truth), k) + 1))
    return dcg / idcg


def hit_rate_at_k(predictions: Sequence[int], truth: set, k: int) -> float:
    """Fraction of the relevant categories retrieved in the top k."""
    _check_truth(truth)
    return len(truth.intersection(predictions[:k])) / len(truth)


def mrr_at_k(predictions: Sequence[int], truth: set, k: int) -> float:
    """Inverse position of the first hit within the top k; 0 when none."""
    _check_truth(truth)
    for i, item in enumerate(predictions[:k], start=1):
        if item in truth:
            return 1.0 / i
    return 0.0


def map_at_k(predictions: Sequence[int], truth: set, k: int) -> float:
    """Average precision over the top k with denominator min(|truth|, k)."""
    _check_truth(truth)
    hits = 0
    total = 0.0
    for i, item in enumerate(predictions[:k], start=1):
        if item in truth:
            hits += 1
            total += hits / i
    return total / min(len(truth), k)


def lauc_at_k(predictions: Sequence[int], truth: set, k: int, n: int) -> float:
    """Area under the ROC polyline of the top k, closed by a straight segment
    to (1, 1): the remaining relevant entries are assumed spread uniformly
    over the rest of the ranking."""
    _check_truth(truth)
    if len(truth) >= n:
        raise ConfigError("ground truth covers the whole catalog")
    negatives = n - len(truth)
    hits = 0
    points = [(0.0, 0.0)]
    for i, item in enumerate(predictions[:k], start=1):
        if item in truth:
            hits += 1
        points.append(((i - hits) / negatives, hits / len(truth)))
    points.append((1.0, 1.0))
    area = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return area


def ground_truth(test: TransactionLog, idmaps: IdMaps) -> dict[int, set[int]]:
    """Per evaluable user: category indices purchased in the test window.

    Users or categories absent from the train-derived ID maps are skipped;
    users end up in the result only with non-empty truth.
    """
    out: dict[int, set[int]] = {}
    for r in test:
        if r.user_id in idmaps.user_index and r.category_id in idmaps.category_index:
            out.setdefault(idmaps.user_index[r.user_id], set()).add(
                idmaps.category_index[r.category_id]
            )
    return out


def rank_scores(scores: np.ndarray) -> np.ndarray:
    """Full ranking by descending score, ties broken by ascending index."""
    return np.lexsort((np.arange(len(scores)), -scores))


def evaluate(
    ranked_for_user: Callable[[int], Sequence[int]],
    truth: dict[int, set[int]],
    ks: Sequence[int] = DEFAULT_KS,
    n: int | None = None,
    keep_per_user: bool = False,
) -> EvalReport:
    """Average each metric at each k over users with non-empty truth.

    `ranked_for_user` must return a duplicate-free ranking of category
    indices; `n` is the catalog size (needed by LAUC).
    """
    users = sorted(u for u, t in truth.items() if t)
    if not users:
        raise ConfigError("no evaluable users")
    if n is None:
        raise ConfigError("catalog size n is required")
    values: dict[tuple[str, int], float] = {}
    per_user: dict[tuple[str, int], list[float]] = {}
    sums = {(metric, k): 0.0 for metric in METRICS for k in ks}
    for u in users:
        preds = list(ranked_for_user(u))
        t = truth[u]
        for k in ks:
            row = {
                "NDCG": ndcg_at_k(preds, t, k),
                "HR": hit_rate_at_k(preds, t, k),
                "MRR": mrr_at_k(preds, t, k),
                "MAP": map_at_k(preds, t, k),
                "LAUC": lauc_at_k(preds, t, k, n),
            }
            for metric, value in row.items():
                sums[(metric, k)] += value
                if keep_per_user:
                    per_user.setdefault((metric, k), []).append(value)
    for key, total in sums.items():
        values[key] = total / len(users)
    return EvalReport(values=values, user_count=len(users), per_user=per_user)


def write_report(path, reports: dict[str, EvalReport], ks: Sequence[int] = DEFAULT_KS) -> None:
    """Delimited table: rows metric x k, one column per model."""
    models = list(reports)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("metric\tk\t" + "\t".join(models) + "\n")
        for metric in METRICS:
            for k in ks:
                cells = "\t".join(f"{reports[m].values[(metric, k)]:.6f}" for m in models)
                fh.write(f"{metric}\t{k}\t{cells}\n")
