"""On-disk cache of QP structure tables, keyed by k and code version.

The code version is the package version plus a digest of the modules that
determine the products, so editing them invalidates old tables.
"""
from __future__ import annotations

import hashlib
import json
import logging
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

from sqlalchemy import create_engine, text
from sqlalchemy.exc import SQLAlchemyError

from core import __version__

logger = logging.getLogger(__name__)

DB_NAME = "structure_tables.db"


class StructureCacheError(RuntimeError):
    """Raised when the structure-table cache cannot be read or written."""


# Modules whose source decides every structure constant
PRODUCT_SOURCES = ("diagrams.py", "partition_algebra.py", "quasi_partition.py", "ratfunc.py")


def source_fingerprint(paths: Optional[Iterable[Union[str, Path]]] = None) -> str:
    """Short sha256 digest over the given files (default: ``PRODUCT_SOURCES``)."""
    if paths is None:
        here = Path(__file__).resolve().parent
        paths = [here / name for name in PRODUCT_SOURCES]
    digest = hashlib.sha256()
    for path in paths:
        path = Path(path)
        digest.update(path.name.encode("utf-8"))
        try:
            digest.update(path.read_bytes())
        except OSError as exc:
            raise StructureCacheError(f"cannot fingerprint {path}: {exc}") from exc
    return digest.hexdigest()[:12]


def current_code_version() -> str:
    return f"{__version__}+{source_fingerprint()}"


class StructureCache:
    """SQLite store of serialized structure tables.

    Payloads are the JSON documents produced by ``StructureTable.to_json``;
    entries written by another code version are ignored.
    """

    def __init__(self, directory: Union[str, Path], code_version: Optional[str] = None):
        """
        Open (and create if needed) the cache database in a directory.

        Args:
            directory: Folder holding ``structure_tables.db``.
            code_version: Version tag stored with every entry; defaults to
                ``current_code_version()``.
        """
        self.directory = Path(directory)
        self.code_version = code_version or current_code_version()
        self._lock = threading.Lock()
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            # check_same_thread=False so table builders on worker threads can share it
            self.engine = create_engine(
                f"sqlite:///{(self.directory / DB_NAME).resolve()}",
                connect_args={"check_same_thread": False},
                echo=False,
            )
            with self.engine.begin() as conn:
                conn.execute(
                    text(
                        "CREATE TABLE IF NOT EXISTS structure_tables ("
                        "k INTEGER NOT NULL, "
                        "code_version TEXT NOT NULL, "
                        "payload TEXT NOT NULL, "
                        "created_at TEXT NOT NULL, "
                        "PRIMARY KEY (k, code_version))"
                    )
                )
        except (OSError, SQLAlchemyError) as exc:
            raise StructureCacheError(f"cannot open structure cache in {self.directory}: {exc}") from exc

    def load(self, k: int) -> Optional[List[Dict[str, Any]]]:
        """Return the cached payload for k, or None on a miss."""
        stmt = text("SELECT code_version, payload FROM structure_tables WHERE k = :k")
        try:
            with self.engine.begin() as conn:
                rows = conn.execute(stmt, {"k": k}).fetchall()
        except SQLAlchemyError as exc:
            logger.warning("structure cache unreadable for k=%d: %s", k, exc)
            return None
        for version, payload in rows:
            if version != self.code_version:
                logger.warning("ignoring stale structure table k=%d (version %s)", k, version)
                continue
            try:
                data = json.loads(payload)
            except json.JSONDecodeError as exc:
                logger.warning("corrupt structure table k=%d: %s", k, exc)
                return None
            logger.info("structure cache hit for k=%d", k)
            return data
        logger.info("structure cache miss for k=%d", k)
        return None

    def store(self, k: int, payload: List[Dict[str, Any]]) -> None:
        stmt = text(
            "INSERT OR REPLACE INTO structure_tables (k, code_version, payload, created_at) "
            "VALUES (:k, :code_version, :payload, :created_at)"
        )
        params = {
            "k": k,
            "code_version": self.code_version,
            "payload": json.dumps(payload, sort_keys=True),
            "created_at": datetime.now(timezone.utc).isoformat(),
        }
        with self._lock:
            try:
                with self.engine.begin() as conn:
                    conn.execute(stmt, params)
            except SQLAlchemyError as exc:
                raise StructureCacheError(f"cannot write structure table k={k}: {exc}") from exc
        logger.info("stored structure table k=%d in %s", k, self.directory)



# Cache objects keyed by resolved directory
_caches: Dict[str, StructureCache] = {}


def get_structure_cache(directory: Union[str, Path]) -> StructureCache:
    key = str(Path(directory).expanduser().resolve())
    if key not in _caches:
        _caches[key] = StructureCache(key)
    return _caches[key]


# ---------- JSON files ----------


def table_file_name(k: int) -> str:
    return f"structure_table_k{k}.json"


def export_table_json(table, directory: Union[str, Path]) -> Path:
    """Write a structure table to ``<directory>/structure_table_k{k}.json``."""
    path = Path(directory) / table_file_name(table.k)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(table.to_json(), indent=1, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise StructureCacheError(f"cannot write {path}: {exc}") from exc
    return path


def load_table_json(path: Union[str, Path]):
    from core.quasi_partition import StructureTable

    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise StructureCacheError(f"cannot read {path}: {exc}") from exc
    return StructureTable.from_json(data)
