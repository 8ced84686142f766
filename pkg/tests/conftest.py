import numpy as np
import pytest

from catrec import pipeline
from catrec.config import RunConfig
from catrec.ingest import TransactionLog, TransactionRecord

DAY = 86400
T0 = 1577836800  # 2020-01-01


def rec(user, basket, cat, day):
    return TransactionRecord(
        user_id=user, basket_id=basket, category_id=cat, timestamp=T0 + day * DAY
    )


@pytest.fixture
def tiny_log():
    """Three users, four categories, hand-placed timestamps."""
    return TransactionLog(
        [
            rec("alice", "b1", "dairy", 1),
            rec("alice", "b1", "bakery", 1),
            rec("alice", "b2", "dairy", 8),
            rec("bob", "b3", "produce", 2),
            rec("bob", "b4", "dairy", 9),
            rec("bob", "b5", "produce", 16),
            rec("carol", "b6", "frozen", 3),
            rec("carol", "b7", "frozen", 12),
        ]
    )


def run_pipeline(workdir, cfg):
    stages = {
        "synth": pipeline.run_synth(workdir, cfg),
        "ingest": pipeline.run_ingest(workdir, cfg),
        "matrices": pipeline.run_matrices(workdir, cfg),
        "walk": pipeline.run_walk(workdir, cfg),
        "skipgram": pipeline.run_skipgram(workdir, cfg),
        "train-vi": pipeline.run_train_vi(workdir, cfg),
    }
    for variant in pipeline.BASELINE_VARIANTS:
        stages[f"baseline-{variant}"] = pipeline.run_baseline(workdir, cfg, variant)
    stages["recommend"] = pipeline.run_recommend(workdir, cfg)
    stages["evaluate"] = pipeline.run_evaluate(workdir, cfg)
    return stages


@pytest.fixture(scope="session")
def fixture_run(tmp_path_factory):
    """Full pipeline over the default synthetic fixture, shared by the
    slower end-to-end tests. Returns (workdir, config, per-stage summaries)."""
    workdir = tmp_path_factory.mktemp("fixture")
    cfg = RunConfig(seed=7)
    stages = run_pipeline(workdir, cfg)
    return workdir, cfg, stages


@pytest.fixture
def rng():
    return np.random.default_rng(42)
