import numpy as np
import pytest

from catrec import skipgram
from catrec.errors import ConfigError
from catrec.hetgraph import WalkCorpus


def toy_corpus():
    walks = [
        ["u0", "b0", "c0", "b1", "u1", "b0", "c1", "b1", "u0"],
        ["u1", "b1", "c1", "b0", "u0", "b1", "c0", "b0", "u1"],
        ["u0", "b0", "c1", "b0", "u0", "b1", "c0", "b1", "u1"],
    ]
    return WalkCorpus(walks=walks, seed=0)


def test_extract_contexts_window():
    pairs = skipgram.extract_contexts(["a", "b", "c", "d"], window=1)
    assert pairs == [("a", "b"), ("b", "a"), ("b", "c"), ("c", "b"), ("c", "d"), ("d", "c")]
    wide = skipgram.extract_contexts(["a", "b", "c"], window=5)
    assert ("a", "c") in wide and ("c", "a") in wide
    assert all(center != context for center, context in wide)


def test_sgns_loss_matches_formula(rng):
    w_in = rng.normal(size=(6, 4))
    w_out = rng.normal(size=(6, 4))
    negatives = np.array([3, 4])
    loss = skipgram.sgns_loss(w_in, w_out, 0, 1, negatives)

    def sig(x):
        return 1.0 / (1.0 + np.exp(-x))

    manual = -np.log(sig(w_out[1] @ w_in[0]))
    for neg in negatives:
        manual -= np.log(sig(-(w_out[neg] @ w_in[0])))
    assert loss == pytest.approx(manual)


def test_sgns_gradients_match_finite_differences(rng):
    w_in = rng.normal(scale=0.3, size=(5, 3))
    w_out = rng.normal(scale=0.3, size=(5, 3))
    negatives = np.array([2, 3])
    g_center, g_context, g_negatives = skipgram.sgns_gradients(w_in, w_out, 0, 1, negatives)
    eps = 1e-6

    def loss():
        return skipgram.sgns_loss(w_in, w_out, 0, 1, negatives)

    for arr, grad, idx in (
        (w_in, g_center, 0),
        (w_out, g_context, 1),
        (w_out, g_negatives[0], 2),
        (w_out, g_negatives[1], 3),
    ):
        for j in range(3):
            orig = arr[idx, j]
            arr[idx, j] = orig + eps
            up = loss()
            arr[idx, j] = orig - eps
            down = loss()
            arr[idx, j] = orig
            assert grad[j] == pytest.approx((up - down) / (2 * eps), rel=1e-4, abs=1e-8)


def test_sgns_step_reduces_pair_loss(rng):
    w_in = rng.normal(scale=0.1, size=(6, 8))
    w_out = rng.normal(scale=0.1, size=(6, 8))
    negatives = np.array([4, 5])
    before = skipgram.sgns_loss(w_in, w_out, 0, 1, negatives)
    returned = skipgram.sgns_step(w_in, w_out, 0, 1, negatives, lr=0.1)
    after = skipgram.sgns_loss(w_in, w_out, 0, 1, negatives)
    assert returned == before
    assert after < before


def test_negative_sampler_stays_within_type(rng):
    tokens = ["b0", "b1", "c0", "c1", "c2", "u0", "u1", "u2"]
    counts = np.arange(1, len(tokens) + 1, dtype=np.float64)
    sampler = skipgram.NegativeSampler.from_counts(tokens, counts, power=0.75)
    for _ in range(50):
        out = sampler.sample("c", 2, rng, exclude=3)
        assert all(tokens[i].startswith("c") for i in out)
        assert 3 not in out


def test_negative_sampler_needs_enough_nodes(rng):
    sampler = skipgram.NegativeSampler.from_counts(["c0", "c1"], np.array([1.0, 1.0]), 0.75)
    with pytest.raises(ConfigError):
        sampler.sample("c", 2, rng)


def test_softmax_prob_normalizes(rng):
    table = skipgram.EmbeddingTable(
        tokens=["a", "b", "c"], vectors=rng.normal(size=(3, 4))
    )
    total = sum(skipgram.softmax_prob(table, tok, "a") for tok in table.tokens)
    assert total == pytest.approx(1.0)


def test_train_skipgram_learns_and_is_deterministic():
    config = skipgram.SgnsConfig(dimension=8, window=2, negatives=1, epochs=8, seed=5)
    table_a, losses_a = skipgram.train_skipgram(toy_corpus(), config)
    table_b, losses_b = skipgram.train_skipgram(toy_corpus(), config)
    assert losses_a[-1] < losses_a[0]
    assert losses_a == losses_b
    assert np.array_equal(table_a.vectors, table_b.vectors)
    assert sorted(table_a.tokens) == table_a.tokens


def test_train_skipgram_rejects_empty_corpus():
    with pytest.raises(ConfigError):
        skipgram.train_skipgram(WalkCorpus(walks=[], seed=0), skipgram.SgnsConfig())


def test_embedding_file_round_trip(tmp_path, rng):
    table = skipgram.EmbeddingTable(tokens=["c0", "u0"], vectors=rng.normal(size=(2, 3)))
    path = tmp_path / "emb.txt"
    skipgram.save_embeddings(path, table)
    loaded = skipgram.load_embeddings(path)
    assert loaded.tokens == table.tokens
    assert np.array_equal(loaded.vectors, table.vectors)
