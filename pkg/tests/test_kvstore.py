import random

import pytest

from fieldbase.kvstore import KVStore, StoreFormatError, prefix_end


def test_put_get_and_reopen(tmp_path):
    path = tmp_path / "t.db"
    with KVStore(path) as kv:
        kv.put(b"a", b"1")
        kv.put_many([(b"b", b"2"), (b"c", b"3")])
        assert kv.get(b"b") == b"2"
    with KVStore(path) as kv:
        assert kv.get(b"a") == b"1"
        assert kv.get(b"c") == b"3"
        assert kv.get(b"zz") is None
        assert len(kv) == 3


def test_overwrite_keeps_last_value(tmp_path):
    path = tmp_path / "t.db"
    with KVStore(path) as kv:
        kv.put(b"k", b"old")
        kv.put(b"k", b"new")
    with KVStore(path) as kv:
        assert kv.get(b"k") == b"new"
        assert len(kv) == 1


def test_range_scan_matches_dict_oracle(tmp_path):
    rng = random.Random(17)
    kv = KVStore(None)
    truth = {}
    for _ in range(500):
        k = bytes(rng.randrange(256) for _ in range(rng.randrange(1, 8)))
        v = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 5)))
        truth[k] = v
    kv.put_many(truth.items())
    for _ in range(50):
        lo = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 4)))
        hi = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 4)))
        if hi < lo:
            lo, hi = hi, lo
        got = list(kv.range_scan(lo, hi))
        want = sorted((k, v) for k, v in truth.items() if lo <= k < hi)
        assert got == want


def test_prefix_scan():
    kv = KVStore(None)
    kv.put_many(
        [(b"f/1", b"x"), (b"f/2", b"y"), (b"g/1", b"z"), (b"f\xff", b"w")]
    )
    assert [k for k, _ in kv.prefix_scan(b"f/")] == [b"f/1", b"f/2"]
    assert [k for k, _ in kv.prefix_scan(b"f")] == [b"f/1", b"f/2", b"f\xff"]


def test_prefix_end():
    assert prefix_end(b"ab") == b"ac"
    assert prefix_end(b"a\xff") == b"b"
    assert prefix_end(b"\xff\xff") is None
    assert prefix_end(b"") is None


def test_reopen_is_identical(tmp_path):
    path = tmp_path / "t.db"
    rng = random.Random(23)
    with KVStore(path) as kv:
        for _ in range(20):
            batch = [
                (bytes([rng.randrange(97, 123)]) * rng.randrange(1, 4), b"v%d" % rng.randrange(100))
                for _ in range(rng.randrange(1, 6))
            ]
            kv.put_many(batch)
        before = list(kv.range_scan(b""))
    with KVStore(path) as kv:
        assert list(kv.range_scan(b"")) == before


def test_torn_tail_rolls_back_to_last_commit(tmp_path):
    path = tmp_path / "t.db"
    with KVStore(path) as kv:
        kv.put_many([(b"good", b"1")])
        kv.put_many([(b"also", b"2")])
    full = path.read_bytes()
    # clip into the middle of the final batch's frames
    for cut in range(len(full) - 1, len(full) - 12, -1):
        path.write_bytes(full[:cut])
        with KVStore(path) as kv:
            assert kv.get(b"good") == b"1"
            assert kv.get(b"also") is None
    # the file was repaired: appending works and earlier data survives
    with KVStore(path) as kv:
        kv.put_many([(b"again", b"3")])
    with KVStore(path) as kv:
        assert kv.get(b"good") == b"1"
        assert kv.get(b"again") == b"3"


def test_corrupt_byte_stops_replay_at_prefix(tmp_path):
    path = tmp_path / "t.db"
    with KVStore(path) as kv:
        kv.put_many([(b"first", b"1")])
        end_first = path.stat().st_size
        kv.put_many([(b"second", b"2")])
    raw = bytearray(path.read_bytes())
    raw[end_first + 9] ^= 0xFF
    path.write_bytes(bytes(raw))
    with KVStore(path) as kv:
        assert kv.get(b"first") == b"1"
        assert kv.get(b"second") is None


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "t.db"
    path.write_bytes(b"not a store at all")
    with pytest.raises(StoreFormatError):
        KVStore(path)


def test_read_only_mode(tmp_path):
    path = tmp_path / "t.db"
    with KVStore(path) as kv:
        kv.put(b"k", b"v")
    with KVStore(path, read_only=True) as kv:
        assert kv.get(b"k") == b"v"
        with pytest.raises(RuntimeError):
            kv.put(b"x", b"y")


def test_in_memory_mode():
    kv = KVStore(None)
    kv.put(b"k", b"v")
    assert kv.get(b"k") == b"v"
    assert kv.path is None
