import io

import pytest
from hypothesis import given, strategies as st

from toc.errors import IngestError
from toc.ingest import (MOVIELENS_GENRES, Dataset, ObjectCatalog, RatingRecord, dedupe,
                        load_generic, parse_generic_catalog, parse_generic_ratings,
                        parse_genre_list, parse_movielens, write_generic_catalog,
                        write_generic_ratings)


def item_row(movie, genres, title="Some Movie (1995)"):
    flags = "|".join("1" if g in genres else "0" for g in MOVIELENS_GENRES)
    return f"{movie}|{title}|01-Jan-1995||http://example.invalid/|{flags}"


def test_generic_ratings_basic():
    recs = parse_generic_ratings(b"user,object,rating\nu1,o1,4\n")
    assert recs == [RatingRecord("u1", "o1", 4.0, None)]


def test_generic_ratings_timestamp_and_crlf():
    recs = parse_generic_ratings(io.BytesIO(b"user,object,rating,timestamp\r\nu1,o1,3.5,17\r\n"))
    assert recs == [RatingRecord("u1", "o1", 3.5, 17)]


def test_generic_ratings_header_only():
    assert parse_generic_ratings(b"user,object,rating\n") == []


@pytest.mark.parametrize("payload, line", [
    (b"user,object,rating\nu1,o1,abc\n", 2),
    (b"user,object,rating\nu1,o1\n", 2),
    (b"user,object,rating\nu1,o1,1\nu2,o2,1,2\n", 3),
    (b"who,what\nu1,o1\n", 1),
    (b"", 1),
])
def test_generic_ratings_errors_name_line(payload, line):
    with pytest.raises(IngestError) as exc:
        parse_generic_ratings(payload)
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


def test_generic_catalog():
    cat = parse_generic_catalog(b"object,topic\no1,Documentary\no1,Western\no2,Fiction\n"
                                b"o2,Fiction\n")
    assert cat["o1"] == {"Documentary", "Western"}
    assert cat["o2"] == {"Fiction"}
    assert cat.topics() == {"Documentary", "Western", "Fiction"}


def test_generic_catalog_empty_topic():
    with pytest.raises(IngestError) as exc:
        parse_generic_catalog(b'object,topic\no3,""\n')
    assert exc.value.line == 2


def test_catalog_invariants():
    with pytest.raises(ValueError):
        ObjectCatalog({"o": []})
    assert ObjectCatalog({"a": ["X", "Y"], "b": ["Z"]}).restrict(["Y"]) == ObjectCatalog({"a": ["Y"]})


def test_dedupe_latest_timestamp_wins():
    recs = [RatingRecord("u1", "o1", 3, 5), RatingRecord("u1", "o1", 4, 9)]
    assert dedupe(recs) == [RatingRecord("u1", "o1", 4, 9)]
    recs = [RatingRecord("u1", "o1", 4, 9), RatingRecord("u1", "o1", 3, 5)]
    assert dedupe(recs) == [RatingRecord("u1", "o1", 4, 9)]


def test_dedupe_file_order_tiebreak():
    recs = [RatingRecord("u1", "o1", 3), RatingRecord("u1", "o1", 5)]
    assert dedupe(recs) == [RatingRecord("u1", "o1", 5)]


def test_dedupe_identity_on_unique():
    recs = [RatingRecord("u1", "o1", 3, 1), RatingRecord("u2", "o1", 2, 1)]
    assert dedupe(recs) == recs


ids = st.text("abcxyz019", min_size=1, max_size=4)
records = st.builds(RatingRecord, ids, ids, st.integers(1, 5).map(float),
                    st.one_of(st.none(), st.integers(0, 10)))


@given(st.lists(records, max_size=30))
def test_dedupe_idempotent_and_unique(recs):
    once = dedupe(recs)
    assert dedupe(once) == once
    assert len({(r.user_id, r.object_id) for r in once}) == len(once)


@given(st.lists(st.builds(RatingRecord, ids, ids,
                          st.floats(-1e6, 1e6, allow_nan=False).map(lambda x: round(x, 3)),
                          st.integers(0, 2**40)), max_size=20))
def test_generic_ratings_roundtrip(recs):
    assert parse_generic_ratings(write_generic_ratings(recs)) == recs


@given(st.dictionaries(ids, st.sets(st.text("ABC -", min_size=1, max_size=5)
                                    .filter(lambda t: t.strip()), min_size=1, max_size=3),
                       max_size=8))
def test_generic_catalog_roundtrip(entries):
    cat = ObjectCatalog(entries)
    assert parse_generic_catalog(write_generic_catalog(cat)) == cat


def test_movielens_single_genre_row():
    u_item = (item_row("1", {"Documentary"}) + "\n").encode()
    ds = parse_movielens(b"7\t1\t5\t881250949\n", u_item)
    assert ds.catalog["1"] == {"Documentary"}
    assert ds.ratings == (RatingRecord("7", "1", 5.0, 881250949),)


def test_movielens_multi_genre_unknown_and_latin1():
    u_item = "\n".join([
        item_row("1", {"Documentary", "Western"}),
        item_row("2", {"unknown"}),
        item_row("3", set(), title="Café Flesh (1982)"),
    ]).encode("latin-1")
    ds = parse_movielens(b"1\t1\t3\t1\n1\t2\t3\t2\n", u_item)
    assert ds.catalog["1"] == {"Documentary", "Western"}
    assert ds.catalog["2"] == {"unknown"}
    assert ds.catalog["3"] == {"unknown"}
    assert all(r.object_id in ds.catalog for r in ds.ratings)


@pytest.mark.parametrize("u_data, u_item", [
    (b"1\t1\t3\n", item_row("1", {"Drama"})),
    (b"1\t1\t3\t1\n", "1|x||" + "|0" * 19),
    (b"1\t1\t3\t1\n", item_row("1", {"Drama"}).replace("|1", "|2", 1)),
    (b"1\t9\t3\t1\n", item_row("1", {"Drama"})),
])
def test_movielens_errors(u_data, u_item):
    with pytest.raises(IngestError):
        parse_movielens(u_data, u_item.encode())


def test_genre_list_file():
    text = b"".join(f"{g}|{i}\n".encode() for i, g in enumerate(MOVIELENS_GENRES)) + b"\n"
    assert parse_genre_list(text) == MOVIELENS_GENRES
    with pytest.raises(IngestError):
        parse_genre_list(b"a|0\nb|2\n")


def test_dataset_json_roundtrip(tmp_path):
    ds = load_generic(b"user,object,rating,timestamp\nu1,o1,4,1\nu1,o1,2,3\nu2,o1,5,2\n",
                      b"object,topic\no1,T\n")
    assert len(ds.ratings) == 2
    path = tmp_path / "ds.json"
    ds.save(path)
    back = Dataset.load(path)
    assert back.ratings == ds.ratings
    assert back.catalog == ds.catalog


def test_movielens_full(movielens):
    assert len(movielens.ratings) == 100000
    assert len(movielens.users()) == 943
    assert len(movielens.objects()) == 1682
    assert len(movielens.catalog) == 1682
    dw = movielens.catalog.restrict(["Documentary", "Western"])
    assert len(dw) == 77
