"""Content-addressed JSON store for alignment search results.

Layout: ``<root>/manifest.json`` maps a query hash to its entry, and each
entry's results live in ``<root>/<hash>.json``.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

ENV_VAR = "LATTICETRI_CACHE_DIR"


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "latticetri"


def query_hash(query: dict) -> str:
    blob = json.dumps(query, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


class ResultCache:
    def __init__(self, root=None):
        self.root = Path(root) if root is not None else default_cache_dir()

    @property
    def manifest_path(self) -> Path:
        return self.root / "manifest.json"

    def _load_manifest(self) -> dict:
        try:
            return json.loads(self.manifest_path.read_text())
        except (FileNotFoundError, json.JSONDecodeError):
            return {}

    def _save_manifest(self, manifest: dict) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        tmp = self.manifest_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(manifest, sort_keys=True, indent=1) + "\n")
        tmp.replace(self.manifest_path)

    def get(self, query: dict):
        h = query_hash(query)
        entry = self._load_manifest().get(h)
        if entry is None:
            return None
        try:
            return json.loads((self.root / entry["file"]).read_text())
        except (FileNotFoundError, json.JSONDecodeError):
            return None

    def put(self, query: dict, results) -> str:
        h = query_hash(query)
        self.root.mkdir(parents=True, exist_ok=True)
        fname = f"{h}.json"
        (self.root / fname).write_text(json.dumps(results, sort_keys=True) + "\n")
        manifest = self._load_manifest()
        manifest[h] = {"query": query, "file": fname}
        self._save_manifest(manifest)
        return h

    def ls(self) -> list[dict]:
        return [{"hash": h, **e} for h, e in sorted(self._load_manifest().items())]

    def gc(self) -> int:
        """Drop manifest entries with missing/corrupt files and orphan result files."""
        manifest = self._load_manifest()
        removed = 0
        for h in list(manifest):
            path = self.root / manifest[h]["file"]
            try:
                json.loads(path.read_text())
            except (FileNotFoundError, json.JSONDecodeError):
                del manifest[h]
                removed += 1
        if self.root.exists():
            known = {e["file"] for e in manifest.values()}
            for p in self.root.glob("*.json"):
                if p.name != "manifest.json" and p.name not in known:
                    p.unlink()
                    removed += 1
            self._save_manifest(manifest)
        return removed
