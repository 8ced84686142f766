"""Transaction log parsing, filtering, time split, and dense ID maps."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

from .errors import ConfigError

REQUIRED_COLUMNS = ("user_id", "basket_id", "category_id", "epoch_seconds")


@dataclass(frozen=True)
class TransactionRecord:
    user_id: str
    basket_id: str
    category_id: str
    timestamp: int

    def is_valid(self) -> bool:
        return (
            bool(self.user_id)
            and bool(self.basket_id)
            and bool(self.category_id)
            and self.timestamp > 0
        )


@dataclass
class TransactionLog:
    """Ordered list of records, kept sorted ascending by timestamp."""

    records: list[TransactionRecord] = field(default_factory=list)

    def __post_init__(self):
        self.records = sorted(self.records, key=lambda r: r.timestamp)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def min_timestamp(self) -> int:
        return self.records[0].timestamp

    @property
    def max_timestamp(self) -> int:
        return self.records[-1].timestamp

    def users(self) -> set[str]:
        return {r.user_id for r in self.records}

    def categories(self) -> set[str]:
        return {r.category_id for r in self.records}


@dataclass
class IdMaps:
    """Dense contiguous integer indices for users, categories, and baskets."""

    user_index: dict[str, int]
    category_index: dict[str, int]
    basket_index: dict[str, int]

    @property
    def num_users(self) -> int:
        return len(self.user_index)

    @property
    def num_categories(self) -> int:
        return len(self.category_index)

    @property
    def num_baskets(self) -> int:
        return len(self.basket_index)

    def users_by_index(self) -> list[str]:
        return _inverse(self.user_index)

    def categories_by_index(self) -> list[str]:
        return _inverse(self.category_index)

    def baskets_by_index(self) -> list[str]:
        return _inverse(self.basket_index)


def _inverse(index: dict[str, int]) -> list[str]:
    out = [""] * len(index)
    for key, i in index.items():
        out[i] = key
    return out


@dataclass
class ColumnSpec:
    """Maps the logical columns onto the header names of a delimited file."""

    user_id: str = "user_id"
    basket_id: str = "basket_id"
    category_id: str = "category_id"
    epoch_seconds: str = "epoch_seconds"
    delimiter: str = ","


def parse_transactions(path, columns: ColumnSpec | None = None) -> tuple[TransactionLog, int]:
    """Parse a delimited file into a sorted log.

    Returns (log, malformed_row_count). Malformed rows (empty IDs,
    non-positive or unparseable timestamps) are dropped and counted.
    Duplicate rows are kept: repeat purchases are signal.
    """
    columns = columns or ColumnSpec()
    try:
        fh = open(path, newline="", encoding="utf-8")
    except FileNotFoundError as e:
        raise ConfigError(f"input file not found: {path}") from e
    with fh:
        reader = csv.DictReader(fh, delimiter=columns.delimiter)
        header = reader.fieldnames or []
        for logical, name in (
            ("user_id", columns.user_id),
            ("basket_id", columns.basket_id),
            ("category_id", columns.category_id),
            ("epoch_seconds", columns.epoch_seconds),
        ):
            if name not in header:
                raise ConfigError(f"missing required column {name!r} (logical {logical})")
        records = []
        malformed = 0
        for row in reader:
            try:
                ts = int(row[columns.epoch_seconds])
            except (TypeError, ValueError):
                malformed += 1
                continue
            rec = TransactionRecord(
                user_id=(row[columns.user_id] or "").strip(),
                basket_id=(row[columns.basket_id] or "").strip(),
                category_id=(row[columns.category_id] or "").strip(),
                timestamp=ts,
            )
            if not rec.is_valid():
                malformed += 1
                continue
            records.append(rec)
    if not records:
        raise ConfigError(f"no valid rows in {path}")
    return TransactionLog(records), malformed


def write_transactions(path, log: TransactionLog, columns: ColumnSpec | None = None) -> None:
    """Write a log back out in the same delimited format."""
    columns = columns or ColumnSpec()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=columns.delimiter)
        writer.writerow([columns.user_id, columns.basket_id, columns.category_id, columns.epoch_seconds])
        for r in log:
            writer.writerow([r.user_id, r.basket_id, r.category_id, r.timestamp])


def split_by_time(log: TransactionLog, boundary: int) -> tuple[TransactionLog, TransactionLog]:
    """Split into train (ts < boundary) and test (ts >= boundary).

    A record exactly at the boundary lands in test.
    """
    train = [r for r in log if r.timestamp < boundary]
    test = [r for r in log if r.timestamp >= boundary]
    if not train:
        raise ConfigError(f"empty train split at boundary {boundary}")
    if not test:
        raise ConfigError(f"empty test split at boundary {boundary}")
    return TransactionLog(train), TransactionLog(test)


def filter_users(
    train: TransactionLog,
    test: TransactionLog,
    min_tx: int = 5,
    max_tx: int = 1000,
) -> tuple[TransactionLog, TransactionLog]:
    """Drop users whose TRAIN transaction count falls outside [min_tx, max_tx].

    Bounds are inclusive: low-engagement users are cold starts, very large
    counts are bulk buyers; both are removed from both splits.
    """
    if min_tx < 1:
        raise ConfigError("min_tx must be >= 1")
    if max_tx <= min_tx:
        raise ConfigError("max_tx must exceed min_tx")
    counts: dict[str, int] = {}
    for r in train:
        counts[r.user_id] = counts.get(r.user_id, 0) + 1
    keep = {u for u, c in counts.items() if min_tx <= c <= max_tx}
    if not keep:
        raise ConfigError("all users removed by the transaction-count filter")
    return (
        TransactionLog([r for r in train if r.user_id in keep]),
        TransactionLog([r for r in test if r.user_id in keep]),
    )


def filter_categories(
    train: TransactionLog, test: TransactionLog
) -> tuple[TransactionLog, TransactionLog]:
    """Keep only categories present in both splits (cold categories dropped)."""
    if not train.records or not test.records:
        raise ConfigError("both splits must be non-empty before category filtering")
    keep = train.categories() & test.categories()
    if not keep:
        raise ConfigError("no category appears in both train and test")
    return (
        TransactionLog([r for r in train if r.category_id in keep]),
        TransactionLog([r for r in test if r.category_id in keep]),
    )


def build_id_maps(train: TransactionLog) -> IdMaps:
    """Assign dense indices in first-appearance order over the train split."""
    if not train.records:
        raise ConfigError("cannot build ID maps from an empty log")
    users: dict[str, int] = {}
    categories: dict[str, int] = {}
    baskets: dict[str, int] = {}
    for r in train:
        if r.user_id not in users:
            users[r.user_id] = len(users)
        if r.category_id not in categories:
            categories[r.category_id] = len(categories)
        if r.basket_id not in baskets:
            baskets[r.basket_id] = len(baskets)
    return IdMaps(user_index=users, category_index=categories, basket_index=baskets)


def write_id_map(path, index: dict[str, int]) -> None:
    """Serialize one map as two-column text: external_id <TAB> index."""
    with open(path, "w", encoding="utf-8") as fh:
        for key, i in sorted(index.items(), key=lambda kv: kv[1]):
            fh.write(f"{key}\t{i}\n")


def read_id_map(path) -> dict[str, int]:
    out: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            key, i = line.rstrip("\n").split("\t")
            out[key] = int(i)
    return out
