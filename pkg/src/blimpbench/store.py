"""Disk persistence for designs.

A store is a directory: one canonical TOML file per design under
``designs/`` plus an ``index.json`` mapping ids to metadata.  Sessions are
never persisted.  Writes are atomic (temp file + rename) and serialized by
a lock; reads re-parse the stored file so the content hash is always the
hash of what is actually on disk.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
import uuid
from dataclasses import dataclass
from pathlib import Path

from .design import DesignSpec, parse_design, render_design

__all__ = ["StoredDesign", "DesignStore", "content_hash", "DATA_DIR_ENV"]

DATA_DIR_ENV = "BLIMP_DATA_DIR"


def content_hash(design: DesignSpec) -> str:
    """SHA-256 of the canonical rendering; stable across process runs."""
    return hashlib.sha256(render_design(design).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class StoredDesign:
    id: str
    name: str
    content_hash: str
    created_at: float

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "content_hash": self.content_hash,
            "created_at": self.created_at,
        }


def default_data_dir() -> Path:
    env = os.environ.get(DATA_DIR_ENV)
    if env:
        return Path(env)
    return Path.cwd() / "blimp-data"


class DesignStore:
    def __init__(self, data_dir: Path | str | None = None):
        self.root = Path(data_dir) if data_dir is not None else default_data_dir()
        self.designs_dir = self.root / "designs"
        self.index_path = self.root / "index.json"
        self.designs_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        if not self.index_path.exists():
            self._write_index({})

    def _read_index(self) -> dict:
        return json.loads(self.index_path.read_text(encoding="utf-8"))

    def _write_index(self, index: dict) -> None:
        tmp = self.index_path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(index, indent=2, sort_keys=True), encoding="utf-8")
        tmp.replace(self.index_path)

    def save(self, design: DesignSpec) -> StoredDesign:
        text = render_design(design)
        record = StoredDesign(
            id=uuid.uuid4().hex[:12],
            name=design.name,
            content_hash=content_hash(design),
            created_at=time.time(),
        )
        with self._lock:
            path = self.designs_dir / f"{record.id}.toml"
            tmp = path.with_suffix(".toml.tmp")
            tmp.write_text(text, encoding="utf-8")
            tmp.replace(path)
            index = self._read_index()
            index[record.id] = record.to_dict()
            self._write_index(index)
        return record

    def get(self, design_id: str) -> tuple[StoredDesign, DesignSpec]:
        with self._lock:
            index = self._read_index()
            if design_id not in index:
                raise KeyError(f"unknown design {design_id!r}")
            meta = index[design_id]
            text = (self.designs_dir / f"{design_id}.toml").read_text(encoding="utf-8")
        design = parse_design(text)
        record = StoredDesign(
            id=meta["id"],
            name=meta["name"],
            content_hash=meta["content_hash"],
            created_at=meta["created_at"],
        )
        return record, design

    def list(self) -> list[StoredDesign]:
        with self._lock:
            index = self._read_index()
        records = [
            StoredDesign(
                id=m["id"],
                name=m["name"],
                content_hash=m["content_hash"],
                created_at=m["created_at"],
            )
            for m in index.values()
        ]
        return sorted(records, key=lambda r: r.created_at)
