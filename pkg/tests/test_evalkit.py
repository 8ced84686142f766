import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from catrec import evalkit
from catrec.errors import ConfigError
from catrec.ingest import IdMaps, TransactionLog

from conftest import rec

PREDS = [3, 0, 5, 1, 4, 2]


def test_ndcg_hand_computed():
    truth = {0, 1}
    # hits at ranks 2 and 4
    dcg = 1 / math.log2(3) + 1 / math.log2(5)
    idcg = 1 / math.log2(2) + 1 / math.log2(3)
    assert evalkit.ndcg_at_k(PREDS, truth, 5) == pytest.approx(dcg / idcg)
    assert evalkit.ndcg_at_k(PREDS, {3}, 1) == 1.0
    assert evalkit.ndcg_at_k(PREDS, {2}, 3) == 0.0


def test_ndcg_ideal_truncates_at_k():
    # |truth| > k: the ideal list also has only k slots
    assert evalkit.ndcg_at_k([0, 1], {0, 1, 2, 3}, 2) == 1.0


def test_hit_rate_hand_computed():
    assert evalkit.hit_rate_at_k(PREDS, {0, 1, 2}, 4) == pytest.approx(2 / 3)
    assert evalkit.hit_rate_at_k(PREDS, {9}, 6) == 0.0


def test_mrr_hand_computed():
    assert evalkit.mrr_at_k(PREDS, {5}, 6) == pytest.approx(1 / 3)
    assert evalkit.mrr_at_k(PREDS, {5}, 2) == 0.0
    assert evalkit.mrr_at_k(PREDS, {3, 5}, 6) == 1.0


def test_map_hand_computed():
    truth = {0, 1}
    # precision 1/2 at the rank-2 hit, 2/4 at the rank-4 hit
    assert evalkit.map_at_k(PREDS, truth, 5) == pytest.approx((1 / 2 + 2 / 4) / 2)
    assert evalkit.map_at_k(PREDS, {0, 1, 2, 9}, 2) == pytest.approx((1 / 2) / 2)


def test_lauc_perfect_and_worst_cases():
    # all relevant items at the top: area is 1
    assert evalkit.lauc_at_k([0, 1, 2, 3], {0, 1}, 2, 10) == pytest.approx(1.0)
    # no relevant item in the prefix: straight climb from (k/negatives, 0) to (1, 1)
    k, n, truth = 3, 10, {7}
    expected = (1 - k / (n - 1)) * 0.5
    assert evalkit.lauc_at_k([0, 1, 2], truth, k, n) == pytest.approx(expected)


def test_lauc_rejects_full_catalog_truth():
    with pytest.raises(ConfigError):
        evalkit.lauc_at_k([0], {0, 1}, 1, 2)


def test_metric_input_validation():
    with pytest.raises(ConfigError):
        evalkit.ndcg_at_k(PREDS, set(), 3)
    with pytest.raises(ConfigError):
        evalkit.ndcg_at_k(PREDS, {0}, 0)


@given(st.data())
def test_metrics_stay_in_unit_interval(data):
    n = data.draw(st.integers(3, 30))
    k = data.draw(st.integers(1, n))
    truth = set(data.draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=n - 1, unique=True)))
    preds = list(data.draw(st.permutations(range(n))))
    for fn in (evalkit.ndcg_at_k, evalkit.hit_rate_at_k, evalkit.mrr_at_k, evalkit.map_at_k):
        assert 0.0 <= fn(preds, truth, k) <= 1.0 + 1e-12
    assert 0.0 <= evalkit.lauc_at_k(preds, truth, k, n) <= 1.0 + 1e-12


def test_rank_scores_orders_and_breaks_ties():
    order = evalkit.rank_scores(np.array([0.5, 2.0, 0.5, -1.0]))
    assert order.tolist() == [1, 0, 2, 3]


def test_ground_truth_skips_unknown_ids():
    test = TransactionLog(
        [rec("known", "b1", "seen", 160), rec("ghost", "b2", "seen", 161), rec("known", "b3", "new", 162)]
    )
    maps = IdMaps(user_index={"known": 0}, category_index={"seen": 0}, basket_index={})
    truth = evalkit.ground_truth(test, maps)
    assert truth == {0: {0}}


def test_evaluate_averages_over_users():
    truth = {0: {0}, 1: {1}}
    rankings = {0: [0, 1, 2], 1: [0, 2, 1]}
    report = evalkit.evaluate(lambda p: rankings[p], truth, ks=(1, 3), n=3, keep_per_user=True)
    assert report.user_count == 2
    assert report.values[("HR", 1)] == pytest.approx(0.5)
    assert report.values[("MRR", 3)] == pytest.approx((1.0 + 1 / 3) / 2)
    assert report.per_user[("HR", 1)] == [1.0, 0.0]


def test_evaluate_requires_catalog_size():
    with pytest.raises(ConfigError):
        evalkit.evaluate(lambda p: [0], {0: {0}}, ks=(1,), n=None)


def test_write_report_layout(tmp_path):
    truth = {0: {0}}
    report = evalkit.evaluate(lambda p: [0, 1], truth, ks=(1, 2), n=3)
    path = tmp_path / "report.tsv"
    evalkit.write_report(path, {"A": report, "B": report}, ks=(1, 2))
    lines = path.read_text(encoding="utf-8").strip().split("\n")
    assert lines[0] == "metric\tk\tA\tB"
    assert len(lines) == 1 + len(evalkit.METRICS) * 2
    assert lines[1].startswith("NDCG\t1\t1.000000")
