"""Rating datasets and object topic catalogs.

Two input layouts are supported: a generic CSV pair (``user,object,rating[,timestamp]``
plus ``object,topic``) and the native MovieLens 100k ``u.data`` / ``u.item`` files.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Iterator, Mapping, Sequence, Union

from .errors import IngestError

Source = Union[bytes, str, os.PathLike, BinaryIO]

# Genre order of the 19 trailing u.item flags (MovieLens 100k u.genre).
MOVIELENS_GENRES = (
    "unknown", "Action", "Adventure", "Animation", "Children's", "Comedy", "Crime",
    "Documentary", "Drama", "Fantasy", "Film-Noir", "Horror", "Musical", "Mystery",
    "Romance", "Sci-Fi", "Thriller", "War", "Western",
)


@dataclass(frozen=True)
class RatingRecord:
    user_id: str
    object_id: str
    rating: float
    timestamp: int | None = None

    def __post_init__(self):
        if not self.user_id or not self.object_id:
            raise ValueError("user_id and object_id must be non-empty")


class ObjectCatalog(Mapping[str, frozenset]):
    """Read-only map from object id to its non-empty set of topic labels."""

    def __init__(self, entries: Mapping[str, Iterable[str]] | None = None):
        self._entries: dict[str, frozenset[str]] = {}
        for obj, topics in (entries or {}).items():
            topics = frozenset(t.strip() for t in topics)
            if not topics or "" in topics:
                raise ValueError(f"object {obj!r} needs at least one non-empty topic")
            self._entries[str(obj)] = topics

    def __getitem__(self, obj: str) -> frozenset[str]:
        return self._entries[obj]

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __repr__(self):
        return f"ObjectCatalog({len(self)} objects, {len(self.topics())} topics)"

    def __eq__(self, other):
        if isinstance(other, ObjectCatalog):
            return self._entries == other._entries
        return NotImplemented

    def topics(self) -> frozenset[str]:
        return frozenset().union(*self._entries.values()) if self._entries else frozenset()

    def restrict(self, topics: Iterable[str]) -> "ObjectCatalog":
        """Objects carrying any of ``topics``, keeping only those topic labels."""
        wanted = set(topics)
        return ObjectCatalog({o: ts & wanted for o, ts in self._entries.items() if ts & wanted})


@dataclass
class Dataset:
    ratings: tuple[RatingRecord, ...]
    catalog: ObjectCatalog
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.ratings = tuple(self.ratings)

    def users(self) -> set[str]:
        return {r.user_id for r in self.ratings}

    def objects(self) -> set[str]:
        return {r.object_id for r in self.ratings}

    def to_json(self) -> dict:
        return {
            "ratings": [[r.user_id, r.object_id, r.rating, r.timestamp] for r in self.ratings],
            "catalog": {o: sorted(ts) for o, ts in sorted(self.catalog.items())},
            "provenance": self.provenance,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Dataset":
        try:
            ratings = [RatingRecord(str(u), str(o), float(r), None if t is None else int(t))
                       for u, o, r, t in data["ratings"]]
            catalog = ObjectCatalog(data["catalog"])
        except (KeyError, TypeError, ValueError) as exc:
            raise IngestError(f"malformed dataset JSON: {exc}") from exc
        return cls(tuple(ratings), catalog, dict(data.get("provenance", {})))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, sort_keys=True, separators=(",", ":"))
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Dataset":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise IngestError(f"{path}: not valid JSON ({exc})") from exc
        return cls.from_json(data)


def _read_bytes(source: Source) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return fh.read()
    return source.read()


def _decode_utf8(raw: bytes) -> str:
    try:
        return raw.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        line = raw[: exc.start].count(b"\n") + 1
        raise IngestError("input is not valid UTF-8", line) from exc


def _csv_rows(text: str) -> Iterator[tuple[int, list[str]]]:
    reader = csv.reader(io.StringIO(text, newline=""))
    for row in reader:
        if not row or row == [""]:
            continue
        yield reader.line_num, [cell.strip() for cell in row]


def _parse_number(text: str, what: str, line: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise IngestError(f"non-numeric {what} {text!r}", line) from None


def parse_generic_ratings(source: Source) -> list[RatingRecord]:
    """Parse a ``user,object,rating[,timestamp]`` CSV with header row."""
    rows = _csv_rows(_decode_utf8(_read_bytes(source)))
    first = next(rows, None)
    if first is None:
        raise IngestError("missing header user,object,rating[,timestamp]", 1)
    line, header = first
    header = [h.lower() for h in header]
    if header not in (["user", "object", "rating"], ["user", "object", "rating", "timestamp"]):
        raise IngestError(f"bad header {','.join(header)!r}; expected user,object,rating[,timestamp]",
                          line)
    arity = len(header)
    out = []
    for line, row in rows:
        if len(row) != arity:
            raise IngestError(f"expected {arity} fields, got {len(row)}", line)
        user, obj = row[0], row[1]
        if not user or not obj:
            raise IngestError("empty user or object id", line)
        rating = _parse_number(row[2], "rating", line)
        ts = None
        if arity == 4 and row[3] != "":
            try:
                ts = int(row[3])
            except ValueError:
                raise IngestError(f"non-integer timestamp {row[3]!r}", line) from None
        out.append(RatingRecord(user, obj, rating, ts))
    return out


def parse_generic_catalog(source: Source) -> ObjectCatalog:
    """Parse an ``object,topic`` CSV; repeated objects accumulate topics."""
    rows = _csv_rows(_decode_utf8(_read_bytes(source)))
    first = next(rows, None)
    if first is None or [h.lower() for h in first[1]] != ["object", "topic"]:
        raise IngestError("missing header object,topic", first[0] if first else 1)
    topics: dict[str, set[str]] = {}
    for line, row in rows:
        if len(row) != 2:
            raise IngestError(f"expected 2 fields, got {len(row)}", line)
        obj, topic = row
        if not obj:
            raise IngestError("empty object id", line)
        if not topic:
            raise IngestError(f"empty topic for object {obj!r}", line)
        topics.setdefault(obj, set()).add(topic)
    return ObjectCatalog(topics)


def _format_number(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def write_generic_ratings(ratings: Iterable[RatingRecord]) -> bytes:
    ratings = list(ratings)
    with_ts = any(r.timestamp is not None for r in ratings)
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["user", "object", "rating", "timestamp"] if with_ts else ["user", "object", "rating"])
    for r in ratings:
        row = [r.user_id, r.object_id, _format_number(r.rating)]
        if with_ts:
            row.append("" if r.timestamp is None else str(r.timestamp))
        w.writerow(row)
    return buf.getvalue().encode("utf-8")


def write_generic_catalog(catalog: ObjectCatalog) -> bytes:
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["object", "topic"])
    for obj in catalog:
        for topic in sorted(catalog[obj]):
            w.writerow([obj, topic])
    return buf.getvalue().encode("utf-8")


def dedupe(ratings: Sequence[RatingRecord]) -> list[RatingRecord]:
    """Keep one record per (user, object): latest timestamp wins, then the later row.

    Records without a timestamp rank below any timestamped one. Output keeps
    the file order of first appearance of each pair.
    """
    chosen: dict[tuple[str, str], RatingRecord] = {}
    for r in ratings:
        key = (r.user_id, r.object_id)
        prev = chosen.get(key)
        if prev is None:
            chosen[key] = r
            continue
        old_ts = -float("inf") if prev.timestamp is None else prev.timestamp
        new_ts = -float("inf") if r.timestamp is None else r.timestamp
        if new_ts >= old_ts:
            chosen[key] = r
    return list(chosen.values())


def parse_genre_list(source: Source) -> tuple[str, ...]:
    """Parse a ``u.genre`` file (``name|index`` lines) into index order."""
    text = _read_bytes(source).decode("latin-1")
    pairs = []
    for line_no, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            name, idx = line.rsplit("|", 1)
            pairs.append((int(idx), name))
        except ValueError:
            raise IngestError(f"bad genre line {line!r}", line_no) from None
    pairs.sort()
    if [i for i, _ in pairs] != list(range(len(pairs))):
        raise IngestError("genre indices must be contiguous from 0")
    return tuple(name for _, name in pairs)


def parse_movielens(u_data: Source, u_item: Source, genres: Sequence[str] | None = None,
                    provenance: dict | None = None) -> Dataset:
    """Load MovieLens 100k ``u.data`` (tab-separated) and ``u.item`` (pipe-separated).

    Every movie maps to the genres whose flag is 1. Movies with no flag set
    fall back to the ``unknown`` genre. ``u.item`` is Latin-1 in the published
    archive, so it is decoded with a UTF-8 attempt and a Latin-1 fallback.
    """
    genres = tuple(genres or MOVIELENS_GENRES)
    raw_item = _read_bytes(u_item)
    try:
        item_text = raw_item.decode("utf-8")
    except UnicodeDecodeError:
        item_text = raw_item.decode("latin-1")

    catalog: dict[str, set[str]] = {}
    for line_no, line in enumerate(item_text.splitlines(), 1):
        if not line.strip():
            continue
        fields = line.split("|")
        if len(fields) != 5 + len(genres):
            raise IngestError(f"u.item row has {len(fields)} fields, expected {5 + len(genres)}",
                              line_no)
        movie = fields[0].strip()
        if not movie:
            raise IngestError("empty movie id", line_no)
        flags = fields[5:]
        if any(f not in ("0", "1") for f in flags):
            raise IngestError(f"non-binary genre flag in {flags!r}", line_no)
        topics = {g for g, f in zip(genres, flags) if f == "1"}
        catalog[movie] = topics or {"unknown"}

    try:
        data_text = _read_bytes(u_data).decode("utf-8")
    except UnicodeDecodeError as exc:
        raise IngestError("u.data is not valid UTF-8") from exc
    ratings = []
    for line_no, line in enumerate(data_text.splitlines(), 1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise IngestError(f"u.data row has {len(fields)} fields, expected 4", line_no)
        user, movie = fields[0].strip(), fields[1].strip()
        if not user or not movie:
            raise IngestError("empty user or movie id", line_no)
        rating = _parse_number(fields[2], "rating", line_no)
        try:
            ts = int(fields[3])
        except ValueError:
            raise IngestError(f"non-integer timestamp {fields[3]!r}", line_no) from None
        if movie not in catalog:
            raise IngestError(f"rated movie {movie!r} missing from u.item", line_no)
        ratings.append(RatingRecord(user, movie, rating, ts))

    prov = {"format": "movielens"}
    prov.update(provenance or {})
    return Dataset(tuple(dedupe(ratings)), ObjectCatalog(catalog), prov)


def load_generic(ratings: Source, catalog: Source, provenance: dict | None = None) -> Dataset:
    prov = {"format": "generic"}
    prov.update(provenance or {})
    return Dataset(tuple(dedupe(parse_generic_ratings(ratings))),
                   parse_generic_catalog(catalog), prov)


def load_movielens_dir(path) -> Dataset:
    """Load ``u.data``/``u.item`` (and ``u.genre`` when present) from a directory."""
    path = os.fspath(path)
    genre_file = os.path.join(path, "u.genre")
    genres = parse_genre_list(genre_file) if os.path.exists(genre_file) else None
    return parse_movielens(os.path.join(path, "u.data"), os.path.join(path, "u.item"), genres,
                           provenance={"ratings": "u.data", "items": "u.item"})
