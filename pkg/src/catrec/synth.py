"""Synthetic transaction generator with planted block structure and
per-(user, category) purchase periodicity, so both the collaborative and the
temporal signal are recoverable."""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .ingest import TransactionLog, TransactionRecord

DAY = 86400
HORIZON_DAYS = 180
TRAIN_DAYS = 150  # boundary: last 30 days are the test window
START_EPOCH = 1577836800  # 2020-01-01


def generate_synthetic(
    users: int = 200,
    categories: int = 40,
    blocks: int = 4,
    noise: float = 0.5,
    seed: int = 7,
) -> TransactionLog:
    """Planted-block purchase log over a 180-day horizon.

    Users and categories are partitioned into affinity blocks. Each user
    repeatedly buys a handful of preferred in-block categories on a
    per-(user, category) cadence. `noise` in [0, 1] controls how much the
    pattern is broken: the probability that a preferred category churns
    (bursty early purchases that stop well before the test window) and the
    rate of one-off cross-block purchases. At noise = 0 every purchase,
    train or test, stays inside the user's own block and nothing churns.
    """
    if blocks < 2:
        raise ConfigError("need at least 2 blocks")
    if categories < blocks:
        raise ConfigError("need at least one category per block")
    if not (0.0 <= noise <= 1.0):
        raise ConfigError("noise must be in [0, 1]")
    rng = np.random.default_rng(seed)
    cat_block = np.array([q * blocks // categories for q in range(categories)])
    records: list[TransactionRecord] = []

    def emit(user: int, cat: int, day: float) -> None:
        ts = START_EPOCH + int(day * DAY)
        records.append(
            TransactionRecord(
                user_id=f"user{user:04d}",
                basket_id=f"user{user:04d}-d{int(day):03d}",
                category_id=f"cat{cat:03d}",
                timestamp=ts,
            )
        )

    for user in range(users):
        block = user * blocks // users
        block_cats = np.flatnonzero(cat_block == block)
        n_pref = min(8, len(block_cats))
        preferred = rng.choice(block_cats, size=n_pref, replace=False)
        # keep at least two steadily active categories per user
        churn_flags = rng.random(n_pref) < 0.8 * noise
        always_active = rng.choice(n_pref, size=min(2, n_pref), replace=False)
        churn_flags[always_active] = False
        for cat, churned in zip(preferred, churn_flags):
            if churned:
                period = rng.uniform(7.0, 15.0)
                window_end = rng.uniform(60.0, 90.0)
            else:
                period = rng.uniform(10.0, 20.0)
                window_end = HORIZON_DAYS
            phase = rng.uniform(0.0, period)
            day = phase
            while day < window_end:
                emit(user, int(cat), day)
                day += period * rng.uniform(0.9, 1.1)
        # one-off cross-block purchases, train window only
        for _ in range(rng.poisson(3.0 * noise)):
            other = np.flatnonzero(cat_block != block)
            cat = int(other[rng.integers(len(other))])
            emit(user, cat, rng.uniform(0.0, TRAIN_DAYS - 1.0))

    return TransactionLog(records)
