"""Disk store for generator expansions and the Cohen class-number table.

Layout: one serialized expansion per generator per trace bound
(``E4_T12.qexp``), a single class-number table (``cohen_h.tbl``), and a
``manifest.json`` recording a sha256 checksum per file.  Checksums are
verified on every load; a mismatch is an error, never a silent rebuild.
Extending a generator to a higher trace bound reuses the best existing file
as a prefix and computes only the missing traces.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .generators import GENERATOR_NAMES, GENERATOR_WEIGHTS, igusa_generator
from .hclass import CohenTable, dump_cohen_table, load_cohen_table
from .qexp import TruncatedSeries, dump_series, load_series

__all__ = ["CacheError", "SeriesStore", "cache_directory", "ENV_CACHE_DIR"]

ENV_CACHE_DIR = "SIEGEL_CACHE_DIR"
MANIFEST_NAME = "manifest.json"
COHEN_NAME = "cohen_h.tbl"


class CacheError(RuntimeError):
    """Missing, malformed, or checksum-violating cache content."""


def cache_directory(explicit: Optional[str] = None) -> Path:
    """Resolution order: explicit argument, SIEGEL_CACHE_DIR, ~/.cache."""
    if explicit:
        return Path(explicit)
    env = os.environ.get(ENV_CACHE_DIR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "siegel-hecke"


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class SeriesStore:
    """Build-on-miss access to generator expansions, backed by one directory."""

    def __init__(self, directory: Optional[str] = None):
        self.directory = cache_directory(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._series: Dict[Tuple[str, int], TruncatedSeries] = {}
        self._table: Optional[CohenTable] = None
        self._manifest = self._load_manifest()

    # -- manifest -------------------------------------------------------------

    @property
    def manifest_path(self) -> Path:
        return self.directory / MANIFEST_NAME

    def _load_manifest(self) -> dict:
        if not self.manifest_path.exists():
            return {"format": 1, "files": {}}
        try:
            data = json.loads(self.manifest_path.read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise CacheError(f"unreadable manifest {self.manifest_path}: {e}") from e
        if not isinstance(data, dict) or "files" not in data:
            raise CacheError(f"malformed manifest {self.manifest_path}")
        return data

    def _write_manifest(self):
        tmp = self.manifest_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(self._manifest, indent=1, sort_keys=True) + "\n")
        os.replace(tmp, self.manifest_path)

    def _record(self, filename: str, meta: dict):
        meta = dict(meta)
        meta["sha256"] = _sha256(self.directory / filename)
        self._manifest["files"][filename] = meta
        self._write_manifest()

    def _checked_read(self, filename: str) -> str:
        path = self.directory / filename
        entry = self._manifest["files"].get(filename)
        if entry is None:
            raise CacheError(f"{filename} is not in the manifest")
        if not path.exists():
            raise CacheError(f"{filename} listed in manifest but missing on disk")
        digest = _sha256(path)
        if digest != entry["sha256"]:
            raise CacheError(
                f"checksum mismatch for {path} (manifest {entry['sha256'][:12]}, "
                f"file {digest[:12]})"
            )
        return path.read_text()

    # -- class-number table ----------------------------------------------------

    def cohen_table(self) -> CohenTable:
        if self._table is None:
            self._table = CohenTable()
            if COHEN_NAME in self._manifest["files"]:
                values = load_cohen_table(self._checked_read(COHEN_NAME))
                self._table.preload((r, n, q) for (r, n), q in values.items())
        return self._table

    def _save_cohen_table(self):
        if self._table is None:
            return
        known = self._table.known()
        entry = self._manifest["files"].get(COHEN_NAME)
        if entry is not None and entry.get("count") == len(known):
            return
        tmp = self.directory / (COHEN_NAME + ".tmp")
        tmp.write_text(dump_cohen_table(known))
        os.replace(tmp, self.directory / COHEN_NAME)
        self._record(COHEN_NAME, {"kind": "cohen", "count": len(known)})

    # -- generator expansions ---------------------------------------------------

    @staticmethod
    def filename(name: str, trace_bound: int) -> str:
        return f"{name}_T{trace_bound}.qexp"

    def _stored_bounds(self, name: str) -> List[int]:
        out = []
        for meta in self._manifest["files"].values():
            if meta.get("kind") == "series" and meta.get("name") == name:
                out.append(int(meta["trace_bound"]))
        return sorted(out)

    def _load(self, name: str, trace_bound: int) -> TruncatedSeries:
        key = (name, trace_bound)
        hit = self._series.get(key)
        if hit is None:
            text = self._checked_read(self.filename(name, trace_bound))
            weight, series = load_series(text)
            if weight != GENERATOR_WEIGHTS[name] or series.trace_bound != trace_bound:
                raise CacheError(
                    f"{self.filename(name, trace_bound)} does not describe "
                    f"{name} at trace bound {trace_bound}"
                )
            self._series[key] = series
            hit = series
        return hit

    def _store(self, name: str, series: TruncatedSeries):
        filename = self.filename(name, series.trace_bound)
        tmp = self.directory / (filename + ".tmp")
        tmp.write_text(dump_series(series, GENERATOR_WEIGHTS[name]))
        os.replace(tmp, self.directory / filename)
        self._record(
            filename,
            {"kind": "series", "name": name, "trace_bound": series.trace_bound},
        )
        self._series[(name, series.trace_bound)] = series
        self._save_cohen_table()

    def series(self, name: str, trace_bound: int) -> TruncatedSeries:
        """The generator expansion at exactly the requested trace bound,
        loading, extending, or building as needed."""
        if name not in GENERATOR_NAMES:
            raise ValueError(f"unknown generator {name!r}")
        if trace_bound < 0:
            raise ValueError("trace bound must be nonnegative")
        stored = self._stored_bounds(name)
        adequate = [b for b in stored if b >= trace_bound]
        if adequate:
            series = self._load(name, adequate[0])
            if adequate[0] == trace_bound:
                return series
            return series.restrict(trace_bound)
        table = self.cohen_table()
        if stored:
            base = self._load(name, stored[-1])
            extension = igusa_generator(
                name, trace_bound, table, min_trace=stored[-1] + 1
            )
            coeffs = dict(base.coeffs)
            coeffs.update(extension.coeffs)
            series = TruncatedSeries(trace_bound, coeffs)
        else:
            series = igusa_generator(name, trace_bound, table)
        self._store(name, series)
        return series

    def ensure_generators(self, trace_bound: int) -> List[Path]:
        """Materialize all four generators; returns the four file paths."""
        paths = []
        for name in GENERATOR_NAMES:
            self.series(name, trace_bound)
            best = max(b for b in self._stored_bounds(name) if b >= trace_bound)
            paths.append(self.directory / self.filename(name, best))
        return paths

    # -- health ------------------------------------------------------------------

    def verify(self) -> List[str]:
        """Checksum and parse every manifest entry; returns found problems."""
        problems: List[str] = []
        for filename, meta in sorted(self._manifest["files"].items()):
            try:
                text = self._checked_read(filename)
            except CacheError as e:
                problems.append(str(e))
                continue
            try:
                if meta.get("kind") == "series":
                    weight, series = load_series(text)
                    if weight != GENERATOR_WEIGHTS.get(meta.get("name")):
                        problems.append(f"{filename}: unexpected weight {weight}")
                    if series.trace_bound != int(meta["trace_bound"]):
                        problems.append(f"{filename}: trace bound disagrees with manifest")
                elif meta.get("kind") == "cohen":
                    load_cohen_table(text)
                else:
                    problems.append(f"{filename}: unknown kind {meta.get('kind')!r}")
            except ValueError as e:
                problems.append(f"{filename}: {e}")
        return problems
