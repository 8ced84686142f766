import numpy as np
import pytest
from hypothesis import given, strategies as st

from catrec import affinity, ingest
from catrec.errors import ConfigError

from conftest import DAY, T0


def test_decay_weight_anchor_points():
    assert affinity.decay_weight(0, affinity.DEFAULT_HALF_LIFE) == 1.0
    assert affinity.decay_weight(affinity.DEFAULT_HALF_LIFE, affinity.DEFAULT_HALF_LIFE) == pytest.approx(0.5)
    assert affinity.decay_weight(2 * affinity.DEFAULT_HALF_LIFE, affinity.DEFAULT_HALF_LIFE) == pytest.approx(0.25)


@given(st.floats(0, 1e9), st.floats(0, 1e9))
def test_decay_weight_monotone(a, b):
    lo, hi = sorted((a, b))
    assert affinity.decay_weight(hi, 30 * DAY) <= affinity.decay_weight(lo, 30 * DAY)


def test_decay_weight_rejects_bad_args():
    with pytest.raises(ConfigError):
        affinity.decay_weight(-1.0, DAY)
    with pytest.raises(ConfigError):
        affinity.decay_weight(1.0, 0.0)


def test_build_matrices_support_and_values(tiny_log):
    maps = ingest.build_id_maps(tiny_log)
    ref = T0 + 20 * DAY
    mats = affinity.build_matrices(tiny_log, maps, half_life=30 * DAY, reference_time=ref)
    assert mats.T.support() == mats.A.support()
    assert np.all(mats.T.vals == 1.0)
    # alice x dairy: purchases on days 1 and 8, decayed from day 20
    p = maps.user_index["alice"]
    q = maps.category_index["dairy"]
    expected = 2.0 ** (-19 / 30) + 2.0 ** (-12 / 30)
    assert mats.A.to_dense()[p, q] == pytest.approx(expected)


def test_build_matrices_rejects_stale_reference(tiny_log):
    maps = ingest.build_id_maps(tiny_log)
    with pytest.raises(ConfigError):
        affinity.build_matrices(tiny_log, maps, reference_time=T0)


def test_count_matrix_counts_duplicates(tiny_log):
    maps = ingest.build_id_maps(tiny_log)
    counts = affinity.build_count_matrix(tiny_log, maps)
    dense = counts.to_dense()
    assert dense[maps.user_index["alice"], maps.category_index["dairy"]] == 2.0
    assert dense[maps.user_index["bob"], maps.category_index["produce"]] == 2.0
    assert dense.sum() == len(tiny_log)


def test_normalize_affinity_standardizes_and_inverts(rng):
    raw = rng.uniform(0.1, 5.0, size=12)
    A = affinity.SparseMatrix(
        shape=(4, 3),
        rows=np.repeat(np.arange(4), 3),
        cols=np.tile(np.arange(3), 4),
        vals=raw,
    )
    norm = affinity.normalize_affinity(A)
    assert np.mean(norm.values.vals) == pytest.approx(0.0, abs=1e-12)
    assert np.std(norm.values.vals) == pytest.approx(1.0)
    assert np.allclose(norm.to_raw(), raw)


def test_normalize_affinity_degenerate_inputs():
    one = affinity.SparseMatrix(
        shape=(1, 1), rows=np.array([0]), cols=np.array([0]), vals=np.array([2.0])
    )
    with pytest.raises(ConfigError):
        affinity.normalize_affinity(one)
    flat = affinity.SparseMatrix(
        shape=(1, 3), rows=np.zeros(3, int), cols=np.arange(3), vals=np.full(3, 2.0)
    )
    with pytest.raises(ConfigError):
        affinity.normalize_affinity(flat)


def test_sparse_file_round_trip(tmp_path, rng):
    A = affinity.SparseMatrix(
        shape=(5, 4),
        rows=np.array([0, 1, 4]),
        cols=np.array([3, 0, 2]),
        vals=rng.normal(size=3),
    )
    path = tmp_path / "A.txt"
    affinity.write_sparse(path, A)
    loaded = affinity.read_sparse(path, (5, 4))
    assert np.array_equal(loaded.rows, A.rows)
    assert np.array_equal(loaded.cols, A.cols)
    assert np.array_equal(loaded.vals, A.vals)  # repr round-trip is exact


def test_normalized_file_round_trip(tmp_path, rng):
    raw = rng.uniform(0.5, 3.0, size=6)
    A = affinity.SparseMatrix(
        shape=(3, 2),
        rows=np.repeat(np.arange(3), 2),
        cols=np.tile(np.arange(2), 3),
        vals=raw,
    )
    norm = affinity.normalize_affinity(A)
    path = tmp_path / "A_norm.txt"
    affinity.write_normalized(path, norm)
    loaded = affinity.read_normalized(path, (3, 2))
    assert loaded.shift == norm.shift
    assert loaded.scale == norm.scale
    assert np.array_equal(loaded.values.vals, norm.values.vals)
