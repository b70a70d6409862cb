"""Single-file ordered key-value store with crash-consistent appends.

Layout: a magic header, then a sequence of CRC-framed records. Each record
is [u32 payload length][u32 crc32][payload]; the payload's first byte is the
op (put or commit). Puts accumulate in a pending buffer and reach the live
table only when their batch's commit marker is read back, so a torn tail
(partial batch, clipped frame, bad checksum) rolls back to the last commit.
The whole table lives in memory; an ordered key list built lazily serves
range scans.

Concurrency contract: many readers or one writer. Each open handle holds a
private snapshot, so readers are unaffected by a writer appending after they
opened.
"""

from __future__ import annotations

import bisect
import os
import struct
import zlib
from pathlib import Path

MAGIC = b"fbkv1\x00"
VERSION = 1

_OP_PUT = 1
_OP_COMMIT = 2

_HEAD = struct.Struct("<II")  # payload length, crc32


class StoreFormatError(RuntimeError):
    """The file is not a store of ours (bad magic or version)."""


class KVStore:
    """Ordered byte-keyed table, file-backed unless path is None."""

    def __init__(self, path: str | os.PathLike | None, *, read_only: bool = False):
        self._data: dict[bytes, bytes] = {}
        self._keys: list[bytes] = []
        self._sorted = True
        self._file = None
        self.path = Path(path) if path is not None else None
        if self.path is None:
            return
        exists = self.path.exists()
        mode = "rb" if read_only else ("r+b" if exists else "w+b")
        self._file = open(self.path, mode)
        if exists and self.path.stat().st_size > 0:
            good_end = self._replay()
            if not read_only and good_end < self.path.stat().st_size:
                self._file.truncate(good_end)
        else:
            if read_only:
                raise FileNotFoundError(self.path)
            self._file.write(MAGIC + bytes([VERSION]))
            self._file.flush()
        self._read_only = read_only
        if not read_only:
            self._file.seek(0, os.SEEK_END)

    def _replay(self) -> int:
        f = self._file
        f.seek(0)
        head = f.read(len(MAGIC) + 1)
        if head[: len(MAGIC)] != MAGIC:
            raise StoreFormatError(f"{self.path}: bad magic")
        if head[len(MAGIC)] != VERSION:
            raise StoreFormatError(f"{self.path}: unsupported version {head[-1]}")
        good_end = f.tell()
        pending: list[tuple[bytes, bytes]] = []
        while True:
            frame_head = f.read(_HEAD.size)
            if len(frame_head) < _HEAD.size:
                break
            length, crc = _HEAD.unpack(frame_head)
            payload = f.read(length)
            if len(payload) < length or zlib.crc32(payload) != crc or not payload:
                break
            op = payload[0]
            if op == _OP_PUT:
                if len(payload) < 5:
                    break
                (klen,) = struct.unpack_from("<I", payload, 1)
                if 5 + klen > len(payload):
                    break
                pending.append((payload[5 : 5 + klen], payload[5 + klen :]))
            elif op == _OP_COMMIT:
                for k, v in pending:
                    self._set(k, v)
                pending.clear()
                good_end = f.tell()
            else:
                break
        return good_end

    def _set(self, key: bytes, value: bytes) -> None:
        if key not in self._data:
            if self._sorted and self._keys and key < self._keys[-1]:
                self._sorted = False
            self._keys.append(key)
        self._data[key] = value

    def put_many(self, items) -> None:
        """Apply a batch atomically: all visible after reopen, or none."""
        items = list(items)
        if self._file is not None:
            if self._read_only:
                raise RuntimeError("store opened read-only")
            chunks = []
            for key, value in items:
                payload = bytes([_OP_PUT]) + struct.pack("<I", len(key)) + key + value
                chunks.append(_HEAD.pack(len(payload), zlib.crc32(payload)) + payload)
            commit = bytes([_OP_COMMIT])
            chunks.append(_HEAD.pack(len(commit), zlib.crc32(commit)) + commit)
            self._file.write(b"".join(chunks))
            self._file.flush()
            os.fsync(self._file.fileno())
        for key, value in items:
            self._set(key, value)

    def put(self, key: bytes, value: bytes) -> None:
        self.put_many([(key, value)])

    def get(self, key: bytes, default: bytes | None = None) -> bytes | None:
        return self._data.get(key, default)

    def __contains__(self, key: bytes) -> bool:
        return key in self._data

    def __len__(self) -> int:
        return len(self._data)

    def _ensure_sorted(self) -> None:
        if not self._sorted:
            self._keys.sort()
            self._sorted = True

    def range_scan(self, lo: bytes, hi: bytes | None = None):
        """Yield (key, value) with lo <= key < hi in key order."""
        self._ensure_sorted()
        i = bisect.bisect_left(self._keys, lo)
        n = len(self._keys)
        while i < n:
            k = self._keys[i]
            if hi is not None and k >= hi:
                return
            yield k, self._data[k]
            i += 1

    def prefix_scan(self, prefix: bytes):
        return self.range_scan(prefix, prefix_end(prefix))

    def close(self) -> None:
        if self._file is not None:
            self._file.close()
            self._file = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def prefix_end(prefix: bytes) -> bytes | None:
    """Smallest byte string greater than every string starting with prefix,
    or None when no such bound exists (prefix is empty or all 0xff)."""
    trimmed = prefix.rstrip(b"\xff")
    if not trimmed:
        return None
    return trimmed[:-1] + bytes([trimmed[-1] + 1])
