"""Field database on top of the key-value log.

Key namespaces (all keys are bytes, ids are 8-byte big-endian):

  f/<id>                         record row (canonical JSON)
  u/<deg>/<coeffs>               uniqueness of (degree, polynomial) -> id
  dd/<deg><disckey>/<id>         (degree, |D|) range index
  rt/<p>/<e>/<id>                ramification triples, e >= 1 only
  rp/<primelist>\\x00<id>         exact ramified-prime-set index
  c/<table>/<n>/<seq>            completeness ledger rows
  al/<label>                     alpha exponent per group, "num/den"
  wm/<n>/<p>/<c or *>            wild local masses, "num/den"
  m/...                          metadata (id counter, degree inventory, flags)

<deg> is two decimal digits, <disckey> the order-preserving discriminant
encoding, <p> and <e> reuse that encoding so iteration order is numeric.
Every insert is one atomic batch; indexes never disagree with rows unless
the file is tampered with, which audit() detects.
"""

from __future__ import annotations

import heapq
import json
from fractions import Fraction
from typing import Iterable, Iterator

from .completeness import CompletenessRecord
from .encoding import decode_absdisc, encode_absdisc
from .groups import MAX_DEGREE
from .kvstore import KVStore, prefix_end
from .localdata import SlopeContent, parse_slope_content
from .model import (
    ClassGroupStructure,
    FactoredInteger,
    FieldRecord,
    GroupId,
    PrimePowerProduct,
    SignedDiscriminant,
)


class DuplicateRecordError(ValueError):
    """A record with the same degree and polynomial is already stored."""


def _id_bytes(record_id: int) -> bytes:
    return record_id.to_bytes(8, "big")


def _deg_bytes(degree: int) -> bytes:
    return b"%02d" % degree


def _poly_key(degree: int, polynomial: tuple[int, ...]) -> bytes:
    return b"u/" + _deg_bytes(degree) + b"/" + ",".join(map(str, polynomial)).encode()


def _fraction_text(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _parse_fraction(text: str) -> Fraction:
    num, _, den = text.partition("/")
    return Fraction(int(num), int(den or "1"))


def record_to_dict(record: FieldRecord) -> dict:
    """Canonical JSON-ready form; the inverse of record_from_dict."""
    return {
        "degree": record.degree,
        "poly": list(record.polynomial),
        "group": str(record.group),
        "s": record.disc.s,
        "disc": [[p, e] for p, e in record.disc.absdisc.factors],
        "h": list(record.class_group.cyclic_orders),
        "narrow": (
            None
            if record.narrow_class_group is None
            else list(record.narrow_class_group.cyclic_orders)
        ),
        "local": {str(p): c.text() for p, c in sorted(record.local_data.items())},
        "grd": None if record.grd is None else record.grd.text(),
    }


def record_from_dict(data: dict, record_id: int | None = None) -> FieldRecord:
    group = GroupId.parse(data["group"])
    absdisc = FactoredInteger.from_factors({int(p): int(e) for p, e in data["disc"]})
    local: dict[int, SlopeContent] = {}
    for key, text in data.get("local", {}).items():
        p = int(key)
        local[p] = parse_slope_content(text, p)
    grd_text = data.get("grd")
    return FieldRecord(
        degree=data["degree"],
        polynomial=tuple(data["poly"]),
        group=group,
        disc=SignedDiscriminant(data["s"], absdisc),
        class_group=ClassGroupStructure(tuple(data["h"])),
        narrow_class_group=(
            None
            if data.get("narrow") is None
            else ClassGroupStructure(tuple(data["narrow"]))
        ),
        local_data=local,
        grd=None if grd_text is None else PrimePowerProduct.parse(grd_text),
        id=record_id,
    )


def _completeness_to_dict(row: CompletenessRecord) -> dict:
    out: dict = {"table": row.kind, "n": row.n}
    if row.s is not None:
        out["s"] = row.s
    if row.group is not None:
        out["group"] = str(row.group)
    if row.bound is not None:
        out["bound"] = str(row.bound)
    if row.grd_bound is not None:
        out["grd_bound"] = _fraction_text(row.grd_bound)
    if row.primes is not None:
        out["primes"] = list(row.primes)
    if row.group_set is not None:
        out["groups"] = str(row.group_set)
    return out


def _completeness_from_dict(data: dict) -> CompletenessRecord:
    return CompletenessRecord(
        kind=data["table"],
        n=data["n"],
        s=data.get("s"),
        group=None if "group" not in data else GroupId.parse(data["group"]),
        bound=None if "bound" not in data else int(data["bound"]),
        grd_bound=(
            None if "grd_bound" not in data else _parse_fraction(data["grd_bound"])
        ),
        primes=None if "primes" not in data else tuple(data["primes"]),
        group_set=None if "groups" not in data else int(data["groups"]),
    )


class FieldStore:
    """All persistent state: field records with their indexes, the
    completeness ledger, alpha exponents, wild mass tables, and flags."""

    def __init__(self, path=None, *, read_only: bool = False):
        self._kv = KVStore(path, read_only=read_only)

    def close(self) -> None:
        self._kv.close()

    def __enter__(self) -> "FieldStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- record rows ---------------------------------------------------

    def _next_id(self) -> int:
        raw = self._kv.get(b"m/next_id")
        return 1 if raw is None else int(raw)

    def insert_field(self, record: FieldRecord) -> int:
        """Store one record with all its index entries, atomically.
        Rejects a second record with the same degree and polynomial."""
        if not 1 <= record.degree <= MAX_DEGREE:
            raise ValueError(f"degree {record.degree} out of range")
        poly_key = _poly_key(record.degree, record.polynomial)
        if poly_key in self._kv:
            raise DuplicateRecordError(
                f"degree {record.degree} polynomial already stored"
            )
        record_id = self._next_id()
        idb = _id_bytes(record_id)
        deg = _deg_bytes(record.degree)
        disckey = encode_absdisc(record.absdisc).encode()
        puts: list[tuple[bytes, bytes]] = [
            (
                b"f/" + idb,
                json.dumps(
                    record_to_dict(record), sort_keys=True, separators=(",", ":")
                ).encode(),
            ),
            (poly_key, idb),
            (b"dd/" + deg + disckey + b"/" + idb, b""),
        ]
        for p, e in record.disc.absdisc.factors:
            puts.append(
                (
                    b"rt/"
                    + encode_absdisc(p).encode()
                    + b"/"
                    + encode_absdisc(e).encode()
                    + b"/"
                    + idb,
                    b"",
                )
            )
        ram = ",".join(str(p) for p in record.ramified_primes)
        puts.append((b"rp/" + ram.encode() + b"\x00" + idb, b""))
        degrees = self.degrees()
        if record.degree not in degrees:
            degrees = sorted(degrees + [record.degree])
            puts.append((b"m/degrees", json.dumps(degrees).encode()))
        puts.append((b"m/next_id", str(record_id + 1).encode()))
        self._kv.put_many(puts)
        record.id = record_id
        return record_id

    def get_field(self, record_id: int) -> FieldRecord:
        raw = self._kv.get(b"f/" + _id_bytes(record_id))
        if raw is None:
            raise KeyError(f"no record with id {record_id}")
        return record_from_dict(json.loads(raw), record_id)

    def iter_fields(self) -> Iterator[FieldRecord]:
        for key, raw in self._kv.range_scan(b"f/", prefix_end(b"f/")):
            yield record_from_dict(json.loads(raw), int.from_bytes(key[2:], "big"))

    def count_fields(self) -> int:
        return sum(1 for _ in self._kv.range_scan(b"f/", prefix_end(b"f/")))

    def degrees(self) -> list[int]:
        raw = self._kv.get(b"m/degrees")
        return [] if raw is None else json.loads(raw)

    # -- indexes --------------------------------------------------------

    def _degree_index_entries(
        self, degree: int, lo: int, hi: int
    ) -> Iterator[tuple[bytes, bytes, bytes]]:
        lo = max(lo, 1)
        if hi < lo:
            return
        deg = _deg_bytes(degree)
        start = b"dd/" + deg + encode_absdisc(lo).encode()
        # "/" sorts below "0", so appending "0" to the hi key makes the
        # half-open scan include every id suffix at exactly |D| = hi.
        stop = b"dd/" + deg + encode_absdisc(hi).encode() + b"0"
        for key, _ in self._kv.range_scan(start, stop):
            # ids are exactly 8 bytes and may contain separator bytes,
            # so split by width, not by delimiter.
            rest = key[3 + len(deg) :]
            yield rest[:-9], deg, rest[-8:]

    def scan_absdisc_range(
        self, degree: int | None, lo: int, hi: int
    ) -> Iterator[FieldRecord]:
        """Records with lo <= |D| <= hi in ascending |D| order, one degree
        or merged across all of them."""
        if degree is not None:
            its = [self._degree_index_entries(degree, lo, hi)]
        else:
            its = [self._degree_index_entries(d, lo, hi) for d in self.degrees()]
        for _, _, idb in heapq.merge(*its):
            yield self.get_field(int.from_bytes(idb, "big"))

    def lookup_ramification(
        self, p: int, e_min: int, e_max: int | None
    ) -> set[int]:
        """Ids of records where p ramifies with exponent in [e_min, e_max].
        Exponent 0 is never indexed; use the prime-set index for that."""
        e_min = max(e_min, 1)
        if e_max is not None and e_max < e_min:
            return set()
        base = b"rt/" + encode_absdisc(p).encode() + b"/"
        start = base + encode_absdisc(e_min).encode()
        if e_max is None:
            stop = prefix_end(base)
        else:
            stop = base + encode_absdisc(e_max).encode() + b"0"
        return {
            int.from_bytes(key[-8:], "big")
            for key, _ in self._kv.range_scan(start, stop)
        }

    def ids_with_ram_primes(self, primes: Iterable[int]) -> set[int]:
        """Ids whose ramified prime set is exactly the given set."""
        ram = ",".join(str(p) for p in sorted(set(primes)))
        prefix = b"rp/" + ram.encode() + b"\x00"
        return {
            int.from_bytes(key[len(prefix) :], "big")
            for key, _ in self._kv.prefix_scan(prefix)
        }

    # -- completeness ledger ---------------------------------------------

    def add_completeness(self, row: CompletenessRecord) -> bool:
        """Append a ledger row; returns False if an identical row exists."""
        if row in self.completeness_rows(kind=row.kind, n=row.n):
            return False
        raw = self._kv.get(b"m/next_seq")
        seq = 1 if raw is None else int(raw)
        key = b"c/" + row.kind.encode() + b"/" + _deg_bytes(row.n) + b"/" + _id_bytes(seq)
        value = json.dumps(
            _completeness_to_dict(row), sort_keys=True, separators=(",", ":")
        ).encode()
        self._kv.put_many([(key, value), (b"m/next_seq", str(seq + 1).encode())])
        return True

    def completeness_rows(
        self, kind: str | None = None, n: int | None = None
    ) -> list[CompletenessRecord]:
        prefix = b"c/"
        if kind is not None:
            prefix += kind.encode() + b"/"
            if n is not None:
                prefix += _deg_bytes(n) + b"/"
        rows = [
            _completeness_from_dict(json.loads(raw))
            for _, raw in self._kv.prefix_scan(prefix)
        ]
        if kind is None and n is not None:
            rows = [r for r in rows if r.n == n]
        return rows

    # -- alpha exponents and wild masses ---------------------------------

    def set_alpha(self, group: GroupId, value: Fraction) -> None:
        if value < 1:
            raise ValueError("alpha exponents are at least 1")
        self._kv.put_many(
            [(b"al/" + str(group).encode(), _fraction_text(value).encode())]
        )

    def alpha_table(self) -> dict[GroupId, Fraction]:
        out = {}
        for key, raw in self._kv.prefix_scan(b"al/"):
            out[GroupId.parse(key[3:].decode())] = _parse_fraction(raw.decode())
        return out

    def set_wild_mass(self, n: int, p: int, c, value: Fraction) -> None:
        """c is a discriminant exponent, or "*" for the summed total."""
        tag = b"*" if c == "*" else b"%06d" % c
        key = b"wm/" + _deg_bytes(n) + b"/" + encode_absdisc(p).encode() + b"/" + tag
        self._kv.put_many([(key, _fraction_text(value).encode())])

    def wild_masses(self, n: int, p: int) -> dict[int, Fraction]:
        prefix = b"wm/" + _deg_bytes(n) + b"/" + encode_absdisc(p).encode() + b"/"
        out = {}
        for key, raw in self._kv.prefix_scan(prefix):
            tag = key[len(prefix) :]
            if tag != b"*":
                out[int(tag)] = _parse_fraction(raw.decode())
        return out

    def mass_table(self):
        """All ingested wild masses as one LocalMassTable."""
        from .mass import LocalMassTable

        wild: dict[tuple[int, int], dict[int, Fraction]] = {}
        totals: dict[tuple[int, int], Fraction] = {}
        for key, raw in self._kv.prefix_scan(b"wm/"):
            n_part, p_part, tag = key[3:].split(b"/", 2)
            n = int(n_part)
            p = decode_absdisc(p_part.decode())
            value = _parse_fraction(raw.decode())
            if tag == b"*":
                totals[(n, p)] = value
            else:
                wild.setdefault((n, p), {})[int(tag)] = value
        return LocalMassTable(wild=wild, wild_totals=totals)

    def wild_total(self, n: int, p: int) -> Fraction | None:
        """Explicit total row when present, else the sum of the exponent
        rows, else None. Summing assumes the rows enumerate every exponent
        with nonzero mass, which is the data file's contract."""
        key = b"wm/" + _deg_bytes(n) + b"/" + encode_absdisc(p).encode() + b"/*"
        raw = self._kv.get(key)
        if raw is not None:
            return _parse_fraction(raw.decode())
        masses = self.wild_masses(n, p)
        if masses:
            return sum(masses.values(), Fraction(0))
        return None

    # -- flags ------------------------------------------------------------

    @property
    def grh_conditional(self) -> bool:
        return self._kv.get(b"m/grh") == b"1"

    @grh_conditional.setter
    def grh_conditional(self, value: bool) -> None:
        self._kv.put_many([(b"m/grh", b"1" if value else b"0")])

    # -- integrity ----------------------------------------------------------

    def audit(self) -> list[str]:
        """Cross-check every index entry against the record rows and back.
        Returns human-readable violations; empty means consistent."""
        problems: list[str] = []
        records: dict[int, FieldRecord] = {}
        for key, raw in self._kv.range_scan(b"f/", prefix_end(b"f/")):
            rid = int.from_bytes(key[2:], "big")
            try:
                records[rid] = record_from_dict(json.loads(raw), rid)
            except (ValueError, KeyError) as exc:
                problems.append(f"record {rid}: unreadable row ({exc})")

        seen_poly = set()
        for key, raw in self._kv.prefix_scan(b"u/"):
            rid = int.from_bytes(raw, "big")
            rec = records.get(rid)
            if rec is None:
                problems.append(f"uniqueness entry {key!r}: no record {rid}")
                continue
            if _poly_key(rec.degree, rec.polynomial) != key:
                problems.append(f"record {rid}: uniqueness key mismatch")
            seen_poly.add(rid)
        for rid in records.keys() - seen_poly:
            problems.append(f"record {rid}: missing uniqueness entry")

        seen_dd = set()
        for key, _ in self._kv.prefix_scan(b"dd/"):
            rest = key[3:]
            disckey = rest[:-9]
            rid = int.from_bytes(rest[-8:], "big")
            rec = records.get(rid)
            if rec is None:
                problems.append(f"disc index {key!r}: no record {rid}")
                continue
            want = _deg_bytes(rec.degree) + encode_absdisc(rec.absdisc).encode()
            if disckey != want:
                problems.append(f"record {rid}: disc index key mismatch")
            seen_dd.add(rid)
        for rid in records.keys() - seen_dd:
            problems.append(f"record {rid}: missing disc index entry")

        triples: dict[int, set[tuple[int, int]]] = {rid: set() for rid in records}
        for key, _ in self._kv.prefix_scan(b"rt/"):
            enc_p, enc_e, idb = key[3:].split(b"/", 2)
            rid = int.from_bytes(idb, "big")
            if rid not in records:
                problems.append(f"ramification index {key!r}: no record {rid}")
                continue
            triples[rid].add(
                (decode_absdisc(enc_p.decode()), decode_absdisc(enc_e.decode()))
            )
        for rid, rec in records.items():
            if triples[rid] != set(rec.disc.absdisc.factors):
                problems.append(f"record {rid}: ramification index disagrees")

        seen_rp = set()
        for key, _ in self._kv.prefix_scan(b"rp/"):
            ram = key[3:-9]
            rid = int.from_bytes(key[-8:], "big")
            rec = records.get(rid)
            if rec is None:
                problems.append(f"prime-set index {key!r}: no record {rid}")
                continue
            want = ",".join(str(p) for p in rec.ramified_primes).encode()
            if ram != want:
                problems.append(f"record {rid}: prime-set index mismatch")
            seen_rp.add(rid)
        for rid in records.keys() - seen_rp:
            problems.append(f"record {rid}: missing prime-set index entry")

        if records:
            top = max(records)
            if self._next_id() <= top:
                problems.append("id counter at or below an existing id")
        degrees = set(self.degrees())
        for rid, rec in records.items():
            if rec.degree not in degrees:
                problems.append(f"record {rid}: degree missing from inventory")
        return sorted(problems)
