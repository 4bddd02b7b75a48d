"""On-disk backend for the graded-piece matrix cache.

Entries are JSON files named by the sha256 of (tool version, p, p′, operator,
source, weight). Matrix entries are stored as "num/den" strings and carry a
digest of their payload; an entry that fails to parse or to match its digest
is discarded and recomputed.
"""
import hashlib
import json
import logging
import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional

from config.settings import TOOL_VERSION
from engine.operators import PieceKey
from lattice.fock import WlogError, format_rational
from linalg.matrix import RationalMatrix

logger = logging.getLogger(__name__)


class CacheCorrupt(WlogError):
    pass


def entry_key(key: PieceKey, version: str = TOOL_VERSION) -> str:
    fields = dict(key.digest_fields(), version=version)
    return hashlib.sha256(json.dumps(fields, sort_keys=True).encode()).hexdigest()


def _payload_digest(shape, rows) -> str:
    return hashlib.sha256(json.dumps([shape, rows], sort_keys=True).encode()).hexdigest()


def encode_matrix(matrix: RationalMatrix) -> Dict[str, Any]:
    rows = [[format_rational(x) for x in row] for row in matrix.rows]
    shape = list(matrix.shape)
    return {"shape": shape, "rows": rows, "digest": _payload_digest(shape, rows)}


def decode_matrix(data: Dict[str, Any]) -> RationalMatrix:
    try:
        shape, rows, digest = data["shape"], data["rows"], data["digest"]
    except (KeyError, TypeError) as e:
        raise CacheCorrupt(f"missing field {e}")
    if digest != _payload_digest(shape, rows):
        raise CacheCorrupt("payload digest mismatch")
    try:
        matrix = RationalMatrix([[Fraction(x) for x in row] for row in rows], shape[1])
    except (ValueError, ZeroDivisionError, IndexError) as e:
        raise CacheCorrupt(f"unreadable entry: {e}")
    if list(matrix.shape) != list(shape):
        raise CacheCorrupt(f"shape {matrix.shape} does not match header {shape}")
    return matrix


class DiskMatrixStore:
    """MatrixBackend over a directory; safe for concurrent readers during a write."""

    def __init__(self, cache_dir: str, version: str = TOOL_VERSION):
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self.version = version
        self.discarded = 0

    def _path(self, key: PieceKey) -> Path:
        digest = entry_key(key, self.version)
        return self.cache_dir / digest[:2] / f"{digest}.json"

    def get(self, key: PieceKey) -> Optional[RationalMatrix]:
        path = self._path(key)
        if not path.exists():
            return None
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
            if data.get("version") != self.version or data.get("key") != key.digest_fields():
                raise CacheCorrupt("entry header does not match its key")
            return decode_matrix(data["matrix"])
        except (CacheCorrupt, ValueError, KeyError, AttributeError, OSError) as e:
            logger.warning(f"Discarding corrupt cache entry {path.name}: {e}")
            self.discarded += 1
            try:
                path.unlink()
            except OSError:
                pass
            return None

    def put(self, key: PieceKey, matrix: RationalMatrix) -> None:
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        entry = {"version": self.version, "key": key.digest_fields(), "matrix": encode_matrix(matrix)}
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                json.dump(entry, f, sort_keys=True)
            os.replace(tmp, path)
        except OSError as e:
            logger.warning(f"Could not write cache entry {path.name}: {e}")
            if os.path.exists(tmp):
                os.unlink(tmp)
