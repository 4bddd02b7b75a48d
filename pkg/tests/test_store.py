import json
from fractions import Fraction

import pytest

from engine.operators import MatrixCache, PieceKey
from lattice.fock import Params
from linalg.matrix import RationalMatrix
from reports.store import CacheCorrupt, DiskMatrixStore, decode_matrix, encode_matrix, entry_key


def _key(weight=Fraction(1)):
    return PieceKey(Params(3, 2), "N", "V", weight)


def _matrix():
    return RationalMatrix([[Fraction(1, 3), 0], [Fraction(-2), Fraction(5, 7)]])


def test_round_trip_on_disk(tmp_path):
    store = DiskMatrixStore(str(tmp_path))
    store.put(_key(), _matrix())
    found = store.get(_key())
    assert found.rows == _matrix().rows
    assert store.get(_key(Fraction(2))) is None


def test_version_bump_misses(tmp_path):
    DiskMatrixStore(str(tmp_path), version="a").put(_key(), _matrix())
    assert DiskMatrixStore(str(tmp_path), version="b").get(_key()) is None
    assert entry_key(_key(), "a") != entry_key(_key(), "b")


def test_corrupt_entry_is_discarded(tmp_path):
    store = DiskMatrixStore(str(tmp_path))
    store.put(_key(), _matrix())
    path = store._path(_key())
    entry = json.loads(path.read_text())
    entry["matrix"]["rows"][0][0] = "9/4"
    path.write_text(json.dumps(entry))
    assert store.get(_key()) is None
    assert store.discarded == 1
    assert not path.exists()


def test_unparseable_entry_is_discarded(tmp_path):
    store = DiskMatrixStore(str(tmp_path))
    store.put(_key(), _matrix())
    path = store._path(_key())
    path.write_text("{not json")
    assert store.get(_key()) is None
    assert store.discarded == 1


def test_decode_rejects_missing_fields():
    data = encode_matrix(_matrix())
    del data["digest"]
    with pytest.raises(CacheCorrupt):
        decode_matrix(data)


def test_cache_reads_through_backend(tmp_path):
    backend = DiskMatrixStore(str(tmp_path))
    calls = []

    def compute():
        calls.append(1)
        return _matrix()

    first = MatrixCache(backend)
    first.get_or_compute(_key(), compute)
    first.get_or_compute(_key(), compute)
    assert (first.hits, first.misses) == (1, 1)

    second = MatrixCache(backend)
    assert second.get_or_compute(_key(), compute).rows == _matrix().rows
    assert len(calls) == 1
    assert second.hits == 1
