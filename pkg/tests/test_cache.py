"""Series cache: files, manifest bookkeeping, reuse, and tamper detection.

Every test builds its own store in a private directory; the session-wide
store is deliberately not touched here.
"""

import os

import pytest

from siegel_hecke.cache import CacheError, SeriesStore, cache_directory
from siegel_hecke.generators import igusa_generator


def test_cache_directory_resolution(tmp_path, monkeypatch):
    explicit = tmp_path / "explicit"
    assert cache_directory(str(explicit)) == explicit
    monkeypatch.setenv("SIEGEL_CACHE_DIR", str(tmp_path / "from-env"))
    assert cache_directory(None) == tmp_path / "from-env"


def test_ensure_generators_creates_files(tmp_path):
    store = SeriesStore(str(tmp_path))
    paths = store.ensure_generators(4)
    assert [p.name for p in paths] == [
        "E4_T4.qexp",
        "E6_T4.qexp",
        "chi10_T4.qexp",
        "chi12_T4.qexp",
    ]
    assert all(p.exists() for p in paths)
    assert store.manifest_path.exists()
    assert (tmp_path / "cohen_h.tbl").exists()


def test_ensure_generators_idempotent(tmp_path):
    store = SeriesStore(str(tmp_path))
    first = store.ensure_generators(3)
    stamps = {p: p.stat().st_mtime_ns for p in first}
    again = SeriesStore(str(tmp_path)).ensure_generators(3)
    assert first == again
    assert {p: p.stat().st_mtime_ns for p in again} == stamps


def test_series_roundtrips_through_disk(tmp_path):
    store = SeriesStore(str(tmp_path))
    built = store.series("chi10", 4)
    fresh = SeriesStore(str(tmp_path)).series("chi10", 4)
    assert fresh == built
    assert fresh == igusa_generator("chi10", 4)


def test_series_restricts_from_larger_stored_bound(tmp_path):
    store = SeriesStore(str(tmp_path))
    big = store.series("E4", 6)
    small = store.series("E4", 4)
    assert small.trace_bound == 4
    for idx, val in small.coeffs.items():
        assert big.coefficient(idx) == val
    # No extra file materialized for the restriction.
    assert not (tmp_path / "E4_T4.qexp").exists()


def test_series_extends_from_smaller_stored_bound(tmp_path):
    store = SeriesStore(str(tmp_path))
    store.series("chi12", 3)
    extended = store.series("chi12", 6)
    assert extended == igusa_generator("chi12", 6)
    assert (tmp_path / "chi12_T6.qexp").exists()


def test_series_input_validation(tmp_path):
    store = SeriesStore(str(tmp_path))
    with pytest.raises(ValueError):
        store.series("E8", 4)
    with pytest.raises(ValueError):
        store.series("E4", -1)


def test_verify_clean_store(tmp_path):
    store = SeriesStore(str(tmp_path))
    store.ensure_generators(3)
    assert store.verify() == []


def test_tampered_file_detected(tmp_path):
    store = SeriesStore(str(tmp_path))
    store.ensure_generators(3)
    victim = tmp_path / "E6_T3.qexp"
    victim.write_text(victim.read_text().replace("SIEGELQEXP", "SIEGELQEXQ"))
    fresh = SeriesStore(str(tmp_path))
    problems = fresh.verify()
    assert any("checksum mismatch" in p for p in problems)
    with pytest.raises(CacheError, match="checksum"):
        fresh.series("E6", 3)


def test_missing_file_detected(tmp_path):
    store = SeriesStore(str(tmp_path))
    store.ensure_generators(3)
    os.unlink(tmp_path / "chi10_T3.qexp")
    problems = SeriesStore(str(tmp_path)).verify()
    assert any("missing" in p for p in problems)


def test_corrupt_manifest_rejected(tmp_path):
    store = SeriesStore(str(tmp_path))
    store.ensure_generators(2)
    store.manifest_path.write_text("{broken")
    with pytest.raises(CacheError, match="manifest"):
        SeriesStore(str(tmp_path))


def test_cohen_table_persisted_and_reused(tmp_path):
    store = SeriesStore(str(tmp_path))
    store.ensure_generators(4)
    known = store.cohen_table().known()
    assert known
    fresh = SeriesStore(str(tmp_path))
    assert fresh.cohen_table().known() == known
