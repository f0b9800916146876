"""Shared fixtures: one disposable series cache for the whole session.

The cache directory doubles as SIEGEL_CACHE_DIR so any code path that
builds a default SeriesStore (CLI runner, service app) stays inside the
test sandbox instead of touching the user's cache.
"""

import os

import pytest

from siegel_hecke.cache import SeriesStore
from siegel_hecke.catalog import builtin_catalog


@pytest.fixture(scope="session", autouse=True)
def cache_dir(tmp_path_factory):
    path = tmp_path_factory.mktemp("series-cache")
    old = os.environ.get("SIEGEL_CACHE_DIR")
    os.environ["SIEGEL_CACHE_DIR"] = str(path)
    yield path
    if old is None:
        os.environ.pop("SIEGEL_CACHE_DIR", None)
    else:
        os.environ["SIEGEL_CACHE_DIR"] = old


@pytest.fixture(scope="session")
def store(cache_dir):
    s = SeriesStore(str(cache_dir))
    # Trace 12 covers the exact-identity checks and every p <= 3 heuristic
    # run; tests needing more extend the same cache on demand.
    s.ensure_generators(12)
    return s


@pytest.fixture(scope="session")
def catalog():
    return {form.name: form for form in builtin_catalog()}
