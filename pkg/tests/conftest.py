import os
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]


def movielens_dir():
    path = Path(os.environ.get("TOC_MOVIELENS_DIR", ROOT / "data" / "ml-100k"))
    if (path / "u.data").exists() and (path / "u.item").exists():
        return path
    return None


@pytest.fixture(scope="session")
def movielens():
    path = movielens_dir()
    if path is None:
        pytest.skip("MovieLens 100k not on disk (run scripts/fetch_movielens.py)")
    from toc.ingest import load_movielens_dir

    return load_movielens_dir(path)
