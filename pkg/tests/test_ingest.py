import pytest

from catrec import ingest
from catrec.errors import ConfigError

from conftest import DAY, T0, rec


def write_csv(path, rows, header="user_id,basket_id,category_id,epoch_seconds"):
    path.write_text(header + "\n" + "\n".join(rows) + "\n", encoding="utf-8")


def test_parse_sorts_and_counts_malformed(tmp_path):
    path = tmp_path / "tx.csv"
    write_csv(
        path,
        [
            f"u1,b1,c1,{T0 + 5 * DAY}",
            f"u2,b2,c2,{T0 + 2 * DAY}",
            "u3,b3,c3,notanumber",
            f",b4,c4,{T0}",
            f"u5,b5,c5,-12",
        ],
    )
    log, malformed = ingest.parse_transactions(path)
    assert malformed == 3
    assert [r.user_id for r in log] == ["u2", "u1"]
    assert log.min_timestamp <= log.max_timestamp


def test_parse_missing_column_raises(tmp_path):
    path = tmp_path / "tx.csv"
    write_csv(path, [f"u1,b1,{T0}"], header="user_id,basket_id,epoch_seconds")
    with pytest.raises(ConfigError):
        ingest.parse_transactions(path)


def test_parse_custom_columns_and_delimiter(tmp_path):
    path = tmp_path / "tx.tsv"
    path.write_text(f"member\tcart\tdept\twhen\nu1\tb1\tc1\t{T0}\n", encoding="utf-8")
    cols = ingest.ColumnSpec(
        user_id="member", basket_id="cart", category_id="dept", epoch_seconds="when", delimiter="\t"
    )
    log, malformed = ingest.parse_transactions(path, cols)
    assert malformed == 0
    assert log.records[0].category_id == "c1"


def test_write_read_round_trip(tmp_path, tiny_log):
    path = tmp_path / "out.csv"
    ingest.write_transactions(path, tiny_log)
    loaded, malformed = ingest.parse_transactions(path)
    assert malformed == 0
    assert loaded.records == tiny_log.records


def test_split_boundary_record_goes_to_test(tiny_log):
    boundary = T0 + 8 * DAY
    train, test = ingest.split_by_time(tiny_log, boundary)
    assert all(r.timestamp < boundary for r in train)
    assert all(r.timestamp >= boundary for r in test)
    # alice's day-8 basket sits exactly on the boundary
    assert any(r.basket_id == "b2" for r in test)


def test_split_empty_side_raises(tiny_log):
    with pytest.raises(ConfigError):
        ingest.split_by_time(tiny_log, T0)
    with pytest.raises(ConfigError):
        ingest.split_by_time(tiny_log, T0 + 1000 * DAY)


def test_filter_users_inclusive_bounds():
    train = ingest.TransactionLog(
        [rec("low", "b1", "c1", 1)]
        + [rec("mid", f"b{i}", "c1", i) for i in range(2, 5)]
        + [rec("high", f"h{i}", "c1", i) for i in range(1, 7)]
    )
    test = ingest.TransactionLog([rec(u, "t1", "c1", 50) for u in ("low", "mid", "high")])
    ftrain, ftest = ingest.filter_users(train, test, min_tx=3, max_tx=5)
    assert ftrain.users() == {"mid"}
    assert ftest.users() == {"mid"}


def test_filter_categories_keeps_intersection(tiny_log):
    train, test = ingest.split_by_time(tiny_log, T0 + 8 * DAY)
    ftrain, ftest = ingest.filter_categories(train, test)
    kept = ftrain.categories()
    assert kept == train.categories() & test.categories()
    assert ftest.categories() <= kept


def test_id_maps_first_appearance_order(tiny_log):
    maps = ingest.build_id_maps(tiny_log)
    assert maps.user_index == {"alice": 0, "bob": 1, "carol": 2}
    assert maps.category_index["dairy"] == 0
    assert maps.categories_by_index()[0] == "dairy"
    assert maps.num_baskets == 7


def test_id_map_file_round_trip(tmp_path):
    index = {"cat b": 1, "cat a": 0, "cat c": 2}
    path = tmp_path / "map.tsv"
    ingest.write_id_map(path, index)
    assert ingest.read_id_map(path) == index
