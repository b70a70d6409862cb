"""Bulk loading from JSON-lines files and whitespace-separated constant tables.

One JSON object per line, tagged by "kind":

  field         a number field row; see _field_from_json for the keys
  completeness  a ledger row (tables A/B/C/D)
  alpha         one alpha(G) exponent: {"kind":"alpha","group":"4T1","value":"1"}
  wildmass      one local mass: {"kind":"wildmass","n":5,"p":2,"c":0,"value":"1"}
                (c "*" marks a per-prime total row)
  dataset       file-level flags: {"kind":"dataset","grh_conditional":true}

Blank lines and #-comments are skipped.  Bad lines never abort the file;
they come back in IngestReport.rejected with line-accurate reasons.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Iterable

from .completeness import CompletenessRecord
from .encoding import encode_group_set
from .localdata import alpha_exponent, parse_slope_content
from .model import (
    ClassGroupStructure,
    FactoredInteger,
    FieldRecord,
    GroupId,
    PrimePowerProduct,
    SignedDiscriminant,
)
from .primes import is_prime
from .store import DuplicateRecordError, FieldStore

__all__ = [
    "AlphaRow",
    "WildMassRow",
    "DatasetFlags",
    "IngestReport",
    "parse_record",
    "validate_record",
    "ingest_lines",
    "ingest_text_table",
    "load_seed",
]


@dataclass(frozen=True)
class AlphaRow:
    group: GroupId
    value: Fraction


@dataclass(frozen=True)
class WildMassRow:
    n: int
    p: int
    c: int | str  # "*" for the per-prime total
    value: Fraction


@dataclass(frozen=True)
class DatasetFlags:
    grh_conditional: bool


@dataclass
class IngestReport:
    """accepted + len(rejected) equals the number of payload lines."""

    accepted: int = 0
    rejected: list[tuple[int, str]] = field(default_factory=list)
    grh_conditional: bool | None = None

    def reject(self, lineno: int, reason: str) -> None:
        self.rejected.append((lineno, reason))


def _require(obj: dict, key: str):
    if key not in obj:
        raise ValueError(f"missing key {key!r}")
    return obj[key]


def _int_field(obj: dict, key: str) -> int:
    value = _require(obj, key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"{key} must be an integer")
    return value


def _fraction_field(obj: dict, key: str) -> Fraction:
    value = _require(obj, key)
    if isinstance(value, bool):
        raise ValueError(f"{key} must be a number or fraction string")
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad {key}: {value!r}") from exc


def _orders(value, key: str) -> tuple[int, ...]:
    if not isinstance(value, list) or any(
        isinstance(h, bool) or not isinstance(h, int) for h in value
    ):
        raise ValueError(f"{key} must be a list of integers")
    return tuple(value)


def _field_from_json(obj: dict) -> FieldRecord:
    degree = _int_field(obj, "degree")
    poly = _require(obj, "poly")
    if not isinstance(poly, list) or any(
        isinstance(c, bool) or not isinstance(c, int) for c in poly
    ):
        raise ValueError("poly must be a list of integers")
    group = GroupId.parse(str(_require(obj, "group")))
    s = _int_field(obj, "s")
    disc_obj = _require(obj, "disc")
    if not isinstance(disc_obj, dict):
        raise ValueError("disc must be a prime -> exponent object")
    pairs = []
    for p_text, e in disc_obj.items():
        if not str(p_text).isdigit():
            raise ValueError(f"bad disc prime {p_text!r}")
        if isinstance(e, bool) or not isinstance(e, int):
            raise ValueError(f"bad disc exponent for {p_text}")
        pairs.append((int(p_text), e))
    disc = SignedDiscriminant(s, FactoredInteger.from_factors(pairs))
    narrow = obj.get("narrow")
    local = obj.get("local") or {}
    if not isinstance(local, dict):
        raise ValueError("local must be a prime -> slope-content object")
    local_data = {}
    for p_text, content in local.items():
        if not str(p_text).isdigit():
            raise ValueError(f"bad local prime {p_text!r}")
        local_data[int(p_text)] = parse_slope_content(str(content), int(p_text))
    grd_text = obj.get("grd")
    return FieldRecord(
        degree=degree,
        polynomial=tuple(poly),
        group=group,
        disc=disc,
        class_group=ClassGroupStructure(_orders(obj.get("h", []), "h")),
        narrow_class_group=(
            None if narrow is None else ClassGroupStructure(_orders(narrow, "narrow"))
        ),
        local_data=local_data,
        grd=None if grd_text is None else PrimePowerProduct.parse(str(grd_text)),
    )


def _completeness_from_json(obj: dict) -> CompletenessRecord:
    table = str(_require(obj, "table"))
    n = _int_field(obj, "n")
    if table == "A":
        return CompletenessRecord(
            "A", n, s=_int_field(obj, "s"), bound=_int_field(obj, "bound")
        )
    if table == "B":
        return CompletenessRecord(
            "B",
            n,
            s=_int_field(obj, "s"),
            group=GroupId.parse(str(_require(obj, "group"))),
            bound=_int_field(obj, "bound"),
        )
    if table == "C":
        primes = _require(obj, "primes")
        if not isinstance(primes, list):
            raise ValueError("primes must be a list")
        groups_value = _require(obj, "groups")
        if isinstance(groups_value, list):
            code = encode_group_set(n, [int(t) for t in groups_value]).code
        elif isinstance(groups_value, int) and not isinstance(groups_value, bool):
            code = groups_value
        else:
            raise ValueError("groups must be a set code or a list of t-numbers")
        return CompletenessRecord(
            "C", n, primes=tuple(sorted(int(p) for p in primes)), group_set=code
        )
    if table == "D":
        return CompletenessRecord(
            "D",
            n,
            group=GroupId.parse(str(_require(obj, "group"))),
            grd_bound=_fraction_field(obj, "bound"),
        )
    raise ValueError(f"unknown ledger table {table!r}")


def parse_record(line: str):
    """One JSON-lines payload line to its typed row."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValueError(f"not valid JSON: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ValueError("line must be a JSON object")
    kind = obj.get("kind")
    if kind == "field":
        return _field_from_json(obj)
    if kind == "completeness":
        return _completeness_from_json(obj)
    if kind == "alpha":
        return AlphaRow(
            GroupId.parse(str(_require(obj, "group"))), _fraction_field(obj, "value")
        )
    if kind == "wildmass":
        n = _int_field(obj, "n")
        p = _int_field(obj, "p")
        c = _require(obj, "c")
        if c != "*" and (isinstance(c, bool) or not isinstance(c, int)):
            raise ValueError('c must be an integer or "*"')
        return WildMassRow(n, p, c, _fraction_field(obj, "value"))
    if kind == "dataset":
        flag = _require(obj, "grh_conditional")
        if not isinstance(flag, bool):
            raise ValueError("grh_conditional must be a boolean")
        return DatasetFlags(flag)
    raise ValueError(f"unknown kind {kind!r}")


def validate_record(record: FieldRecord) -> list[str]:
    """Consistency checks beyond what construction enforces; empty means ok."""
    out = []
    n = record.degree
    if len(record.polynomial) != n + 1:
        out.append(
            f"degree-{n} polynomial needs {n + 1} coefficients, got {len(record.polynomial)}"
        )
    if not record.polynomial or record.polynomial[0] != 1:
        out.append("polynomial must be monic")
    if record.group.degree != n:
        out.append(f"group {record.group} does not act in degree {n}")
    if 2 * record.s > n:
        out.append(f"{record.s} complex places will not fit in degree {n}")
    for p, e in record.disc.absdisc.factors:
        if not is_prime(p):
            out.append(f"disc factor {p} is not prime")
        if e < 1:
            out.append(f"disc exponent for {p} must be >= 1")
    ramified = set(record.ramified_primes)
    for p in record.local_data:
        if p not in ramified:
            out.append(f"slope content at {p}, but {p} does not ramify")
    if record.grd is not None:
        grd_primes = {p for p, _ in record.grd.terms}
        if grd_primes != ramified:
            out.append("grd involves a different prime set than the discriminant")
        if record.rd().compare(record.grd) > 0:
            out.append("grd below rd")
        for p, content in sorted(record.local_data.items()):
            want = alpha_exponent(content)
            have = dict(record.grd.terms).get(p, Fraction(0))
            if want != have:
                out.append(
                    f"grd exponent at {p} is {have}, slope content gives {want}"
                )
    return out


def ingest_lines(store: FieldStore, lines: Iterable[str]) -> IngestReport:
    """Load a JSON-lines payload; one store write per accepted line."""
    report = IngestReport()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            row = parse_record(line)
            if isinstance(row, FieldRecord):
                problems = validate_record(row)
                if problems:
                    report.reject(lineno, "; ".join(problems))
                    continue
                store.insert_field(row)
            elif isinstance(row, CompletenessRecord):
                store.add_completeness(row)
            elif isinstance(row, AlphaRow):
                store.set_alpha(row.group, row.value)
            elif isinstance(row, WildMassRow):
                store.set_wild_mass(row.n, row.p, row.c, row.value)
            else:
                store.grh_conditional = row.grh_conditional
                report.grh_conditional = row.grh_conditional
        except DuplicateRecordError as exc:
            report.reject(lineno, str(exc))
            continue
        except ValueError as exc:
            report.reject(lineno, str(exc))
            continue
        report.accepted += 1
    return report


def ingest_text_table(store: FieldStore, lines: Iterable[str], kind: str) -> IngestReport:
    """Whitespace-separated constant tables: "group value" rows for kind
    "alpha", "n p c value" rows (c may be *) for kind "wildmass"."""
    if kind not in ("alpha", "wildmass"):
        raise ValueError(f"unknown table kind {kind!r}")
    report = IngestReport()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if kind == "alpha":
                if len(parts) != 2:
                    raise ValueError("expected: group value")
                store.set_alpha(GroupId.parse(parts[0]), Fraction(parts[1]))
            else:
                if len(parts) != 4:
                    raise ValueError("expected: n p c value")
                c = parts[2] if parts[2] == "*" else int(parts[2])
                store.set_wild_mass(int(parts[0]), int(parts[1]), c, Fraction(parts[3]))
        except (ValueError, ZeroDivisionError) as exc:
            report.reject(lineno, str(exc))
            continue
        report.accepted += 1
    return report


def load_seed(store: FieldStore) -> IngestReport:
    """Load the bundled sample dataset and its ledger/constant rows."""
    text = resources.files(__package__).joinpath("data/seed.jsonl").read_text()
    return ingest_lines(store, text.splitlines())
