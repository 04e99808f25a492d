import pytest
from hypothesis import given
from hypothesis import strategies as st

from txcleanse import (
    DatabaseBuilder,
    ItemDictionary,
    Transaction,
    database_from_items,
    item_frequencies,
    normalize_item,
)


def test_normalize_item():
    assert normalize_item("  Amusement   Park ") == "amusement park"
    assert normalize_item("DISNEYLAND") == "disneyland"
    assert normalize_item(" \t \n") == ""
    assert normalize_item("ichiro") == "ichiro"


class TestItemDictionary:
    def test_first_insertion_gets_id_zero(self):
        d = ItemDictionary()
        assert d.intern("disneyland") == 0

    def test_reintern_is_idempotent(self):
        d = ItemDictionary()
        assert d.intern("disneyland") == 0
        assert d.intern("disneyland") == 0
        assert d.intern(" Disneyland ") == 0
        assert len(d) == 1

    def test_dense_next_id(self):
        d = ItemDictionary()
        for i, word in enumerate(["a", "b", "c", "d", "e"]):
            assert d.intern(word) == i
        assert d.intern("ichiro") == 5

    def test_lookup_roundtrip(self):
        d = ItemDictionary()
        for word in ["major league", "ichiro", "baseball cap"]:
            assert d.lookup(d.intern(word)) == word
        assert d.id_of("ichiro") == 1
        assert d.id_of("unseen") is None
        assert "ichiro" in d

    def test_empty_after_normalization_rejected(self):
        d = ItemDictionary()
        with pytest.raises(ValueError):
            d.intern("   ")


class TestTransaction:
    def test_items_must_be_strictly_increasing(self):
        Transaction(0, (0, 1, 5))
        with pytest.raises(ValueError):
            Transaction(0, (1, 1, 2))
        with pytest.raises(ValueError):
            Transaction(0, (2, 1))

    def test_set_and_len(self):
        t = Transaction(3, (0, 2, 7), label="example.com")
        assert len(t) == 3
        assert 2 in t and 5 not in t
        assert t.item_set() == {0, 2, 7}
        assert t.label == "example.com"


class TestDatabaseBuilder:
    def test_duplicates_within_transaction_dropped(self):
        db = database_from_items([["a", "a", "b"]])
        assert [len(t) for t in db] == [2]

    def test_all_empty_transaction_not_added(self):
        b = DatabaseBuilder()
        assert b.add(["  ", ""]) is False
        assert b.add(["x"]) is True
        db = b.build()
        assert db.n == 1 and db.m == 1

    def test_tids_positional_and_items_sorted(self):
        db = database_from_items([["b", "a"], ["c", "a"]])
        assert [t.tid for t in db] == [0, 1]
        # b seen first -> id 0; items stored in id order
        assert db.item_strings(db.transactions[0]) == ["b", "a"]
        for t in db:
            assert list(t.items) == sorted(set(t.items))

    def test_counts(self):
        db = database_from_items([["a", "b"], ["b", "c"], ["b"]])
        assert db.n == 3
        assert db.m == 3
        assert db.total_occurrences() == 5


_items = st.lists(
    st.lists(st.sampled_from(["a", "b", "c", "d", "e", "f", "g "]), min_size=1, max_size=6),
    min_size=0,
    max_size=25,
)


@given(_items)
def test_occurrence_conservation(item_lists):
    """Sum of item frequencies equals sum of transaction sizes."""
    db = database_from_items(item_lists)
    hist = item_frequencies(db)
    assert sum(hist.per_item.values()) == db.total_occurrences()
    assert hist.item_count == db.m
    assert sum(count for _, count in hist.marginal) == db.m
