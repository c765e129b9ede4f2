"""Rebuild MovieLens 100k native files (u.data, u.item, u.genre) offline.

The GroupLens archive is the canonical source; when it is unreachable this
script pulls the ``recbole`` wheel from the package index (it bundles the same
100k ratings and per-movie genre lists as atomic files) and writes them back
in the native layout. Release dates and IMDb URLs are not in the wheel and are
left empty; the parser does not use them.

    python scripts/fetch_movielens.py data/ml-100k
"""

import argparse
import glob
import io
import subprocess
import sys
import tempfile
import urllib.request
import zipfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from toc.ingest import MOVIELENS_GENRES  # noqa: E402

GROUPLENS_URL = "https://files.grouplens.org/datasets/movielens/ml-100k.zip"
PREFIX = "recbole/dataset_example/ml-100k/"


def from_grouplens(out: Path) -> bool:
    try:
        with urllib.request.urlopen(GROUPLENS_URL, timeout=20) as resp:
            archive = zipfile.ZipFile(io.BytesIO(resp.read()))
    except OSError as exc:
        print(f"grouplens unavailable ({exc}); falling back to recbole wheel")
        return False
    for name in ("u.data", "u.item", "u.genre"):
        (out / name).write_bytes(archive.read(f"ml-100k/{name}"))
    return True


def from_recbole(out: Path) -> None:
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps", "-q",
                        "recbole==1.2.1", "-d", tmp], check=True)
        wheel = zipfile.ZipFile(glob.glob(f"{tmp}/recbole-*.whl")[0])
        inter = wheel.read(PREFIX + "ml-100k.inter").decode("latin-1").splitlines()
        items = wheel.read(PREFIX + "ml-100k.item").decode("latin-1").splitlines()

    with open(out / "u.data", "w", encoding="utf-8", newline="\n") as fh:
        for line in inter[1:]:
            user, item, rating, ts = line.split("\t")
            fh.write(f"{user}\t{item}\t{int(float(rating))}\t{int(float(ts))}\n")

    with open(out / "u.item", "w", encoding="latin-1", newline="\n") as fh:
        for line in items[1:]:
            fields = line.split("\t") + [""] * 4
            item, title, year, classes = fields[:4]
            genres = set(classes.split())
            unknown = genres - set(MOVIELENS_GENRES)
            if unknown:
                raise SystemExit(f"item {item}: unexpected genres {sorted(unknown)}")
            flags = "|".join("1" if g in genres else "0" for g in MOVIELENS_GENRES)
            name = f"{title} ({year})" if year else title
            fh.write(f"{item}|{name}||||{flags}\n")

    with open(out / "u.genre", "w", encoding="utf-8", newline="\n") as fh:
        for i, g in enumerate(MOVIELENS_GENRES):
            fh.write(f"{g}|{i}\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out", nargs="?", default="data/ml-100k")
    ap.add_argument("--source", choices=["auto", "grouplens", "recbole"], default="auto")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.source == "recbole" or not (args.source != "recbole" and from_grouplens(out)):
        if args.source == "grouplens":
            raise SystemExit("grouplens download failed")
        from_recbole(out)
    print(f"wrote MovieLens 100k files to {out}")


if __name__ == "__main__":
    main()
