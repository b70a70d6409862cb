"""The four-step search pipeline.

Step 1 narrows candidates through whichever index fits the request (the
(degree, |D|) range index, ramification triples, or the exact prime-set
index), step 2 re-checks every constraint exactly, step 3 asks the
completeness checker whether the answer is provably the whole truth, and
step 4 is the caller's rendering problem.

Correctness never depends on step 1 being clever: it only has to produce a
superset of the matching records, and the brute-force equivalence tests
hold it to that.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .completeness import check_complete
from .model import FieldRecord
from .primes import is_prime, next_prime
from .store import FieldStore

SORT_KEYS = ("rd", "grd", "absdisc")
CLASS_DISPLAYS = ("class", "narrow")

# beyond this many listed primes, subset enumeration of the prime-set index
# stops being worth it
SUBSET_ENUMERATION_LIMIT = 16
PRIME_RANGE_SPAN_LIMIT = 1_000_000


@dataclass(frozen=True)
class RamCondition:
    """One ramification constraint: every prime in [p_lo, p_hi] must have
    ord_p(|D|) inside [e_lo, e_hi], with 0 additionally allowed when
    may_be_zero is set."""

    p_lo: int
    p_hi: int | None = None  # None: single prime p_lo
    e_lo: int = 1
    e_hi: int | None = None  # None: unbounded above
    may_be_zero: bool = False

    def __post_init__(self) -> None:
        if self.p_lo < 2:
            raise ValueError("prime bound below 2")
        if self.p_hi is not None and self.p_hi < self.p_lo:
            raise ValueError("empty prime range")
        if self.e_lo < 1:
            raise ValueError(
                "exponent range starts at 1; use may_be_zero to allow 0"
            )
        if self.e_hi is not None and self.e_hi < self.e_lo:
            raise ValueError("empty exponent range")

    @property
    def single_prime(self) -> int | None:
        if self.p_hi is None or self.p_hi == self.p_lo:
            return self.p_lo
        return None

    def listed_primes(self) -> list[int]:
        """The primes inside the range, when enumerable."""
        single = self.single_prime
        if single is not None:
            return [single] if is_prime(single) else []
        if self.p_hi - self.p_lo > PRIME_RANGE_SPAN_LIMIT:
            raise ValueError("prime range too wide to enumerate")
        out = []
        p = next_prime(self.p_lo)
        while p <= self.p_hi:
            out.append(p)
            p = next_prime(p + 1)
        return out

    def holds_for(self, record: FieldRecord) -> bool:
        lo, hi = self.p_lo, self.p_hi if self.p_hi is not None else self.p_lo
        absdisc = record.disc.absdisc

        def exponent_ok(e: int) -> bool:
            if e == 0:
                return self.may_be_zero
            return e >= self.e_lo and (self.e_hi is None or e <= self.e_hi)

        if self.may_be_zero:
            # only the record's own ramified primes can violate
            return all(
                exponent_ok(e) for p, e in absdisc.factors if lo <= p <= hi
            )
        # every prime of the range must ramify suitably; walking primes in
        # order fails within omega(|D|)+1 probes because the first
        # non-ramified prime ends it
        p = next_prime(lo)
        while p <= hi:
            if not exponent_ok(absdisc.ord_of(p)):
                return False
            p = next_prime(p + 1)
        return True


@dataclass(frozen=True)
class SearchRequest:
    degrees: frozenset[int] | None = None  # None: unrestricted
    degree_min: int | None = None  # only consulted when degrees is None
    groups: frozenset | None = None  # of GroupId
    s_values: frozenset[int] | None = None
    absdisc_min: int | None = None
    absdisc_max: int | None = None
    rd_max: Fraction | None = None
    grd_min: Fraction | None = None
    grd_max: Fraction | None = None
    ram_constraints: tuple[RamCondition, ...] = ()
    only_listed: bool = False
    max_ramified_prime: int | None = None
    sort_key: str = "rd"
    class_display: str = "class"
    limit: int | None = None
    offset: int = 0

    def __post_init__(self) -> None:
        if self.degrees is not None:
            if not self.degrees:
                raise ValueError("empty degree set")
            if any(d < 1 for d in self.degrees):
                raise ValueError("degrees start at 1")
        if self.s_values is not None and any(s < 0 for s in self.s_values):
            raise ValueError("signature counts are nonnegative")
        if (
            self.absdisc_min is not None
            and self.absdisc_max is not None
            and self.absdisc_max < self.absdisc_min
        ):
            raise ValueError("empty |D| range")
        if self.rd_max is not None and self.rd_max <= 0:
            raise ValueError("rd bound must be positive")
        for bound in (self.grd_min, self.grd_max):
            if bound is not None and bound <= 0:
                raise ValueError("grd bounds must be positive")
        if (
            self.grd_min is not None
            and self.grd_max is not None
            and self.grd_max < self.grd_min
        ):
            raise ValueError("empty grd range")
        if self.only_listed:
            if not self.ram_constraints:
                raise ValueError("only-listed-primes needs an explicit prime list")
            for c in self.ram_constraints:
                if c.p_hi is not None and c.p_hi - c.p_lo > PRIME_RANGE_SPAN_LIMIT:
                    raise ValueError("only-listed-primes needs enumerable ranges")
        if self.sort_key not in SORT_KEYS:
            raise ValueError(f"sort key must be one of {SORT_KEYS}")
        if self.class_display not in CLASS_DISPLAYS:
            raise ValueError(f"class display must be one of {CLASS_DISPLAYS}")
        if self.limit is not None and self.limit < 0:
            raise ValueError("limit is nonnegative")
        if self.offset < 0:
            raise ValueError("offset is nonnegative")

    def listed_primes(self) -> frozenset[int]:
        return _listed_primes(self.ram_constraints)


@functools.lru_cache(maxsize=256)
def _listed_primes(constraints: tuple[RamCondition, ...]) -> frozenset[int]:
    out: set[int] = set()
    for c in constraints:
        out.update(c.listed_primes())
    return frozenset(out)


@dataclass(frozen=True)
class SearchResult:
    rows: tuple[FieldRecord, ...]
    complete: bool
    completeness_trace: str
    total: int  # matching rows before limit/offset


def matches(record: FieldRecord, req: SearchRequest, *, missing_grd_ok=False) -> bool:
    """Exact evaluation of every constraint against one record."""
    if req.degrees is not None:
        if record.degree not in req.degrees:
            return False
    elif req.degree_min is not None and record.degree < req.degree_min:
        return False
    if req.groups is not None and record.group not in req.groups:
        return False
    if req.s_values is not None and record.s not in req.s_values:
        return False
    absdisc = record.absdisc
    if req.absdisc_min is not None and absdisc < req.absdisc_min:
        return False
    if req.absdisc_max is not None and absdisc > req.absdisc_max:
        return False
    if req.rd_max is not None and Fraction(absdisc) > req.rd_max**record.degree:
        return False
    if req.grd_min is not None or req.grd_max is not None:
        if record.grd is None:
            if not missing_grd_ok:
                return False
        else:
            if req.grd_min is not None and record.grd.compare_fraction(req.grd_min) < 0:
                return False
            if req.grd_max is not None and record.grd.compare_fraction(req.grd_max) > 0:
                return False
    for c in req.ram_constraints:
        if not c.holds_for(record):
            return False
    if req.only_listed:
        allowed = req.listed_primes()
        if any(p not in allowed for p in record.ramified_primes):
            return False
    if req.max_ramified_prime is not None:
        if any(p > req.max_ramified_prime for p in record.ramified_primes):
            return False
    return True


def post_filter(candidates: Iterable[FieldRecord], req: SearchRequest):
    """Step 2: exact re-check of all constraints over step 1's stream."""
    return [r for r in candidates if matches(r, req)]


def _compare_key(a: FieldRecord, b: FieldRecord, key: str) -> int:
    if key == "absdisc":
        primary = (a.absdisc > b.absdisc) - (a.absdisc < b.absdisc)
    elif key == "rd":
        # rd(a) vs rd(b) as |Da|^nb vs |Db|^na, all integers
        lhs = a.absdisc ** b.degree
        rhs = b.absdisc ** a.degree
        primary = (lhs > rhs) - (lhs < rhs)
    else:
        if a.grd is None and b.grd is None:
            primary = 0
        elif a.grd is None:
            primary = 1  # unknown grd sorts last
        elif b.grd is None:
            primary = -1
        else:
            primary = a.grd.compare(b.grd)
    if primary:
        return primary
    ta = (a.absdisc, a.degree, a.group.t_number, a.poly_text())
    tb = (b.absdisc, b.degree, b.group.t_number, b.poly_text())
    return (ta > tb) - (ta < tb)


def sort_results(rows: Iterable[FieldRecord], key: str) -> list[FieldRecord]:
    if key not in SORT_KEYS:
        raise ValueError(f"sort key must be one of {SORT_KEYS}")
    return sorted(rows, key=functools.cmp_to_key(lambda a, b: _compare_key(a, b, key)))


def _floor_pow(bound: Fraction, n: int) -> int:
    return bound.numerator**n // bound.denominator**n


def _scan_degrees(store: FieldStore, req: SearchRequest) -> list[int]:
    if req.degrees is not None:
        return sorted(req.degrees)
    degrees = store.degrees()
    if req.degree_min is not None:
        degrees = [d for d in degrees if d >= req.degree_min]
    return degrees


def _candidates(store: FieldStore, req: SearchRequest) -> Iterator[FieldRecord]:
    """Step 1: a superset of the matching records, as narrow as the
    available indexes allow."""
    has_disc_bound = (
        req.absdisc_max is not None
        or req.rd_max is not None
        or req.grd_max is not None
    )

    id_set: set[int] | None = None
    if req.only_listed:
        listed = sorted(req.listed_primes())
        if len(listed) <= SUBSET_ENUMERATION_LIMIT:
            ids: set[int] = set()
            for mask in range(1 << len(listed)):
                subset = [p for i, p in enumerate(listed) if mask >> i & 1]
                ids |= store.ids_with_ram_primes(subset)
            id_set = ids
    for c in req.ram_constraints:
        p = c.single_prime
        # a single composite "prime" makes the constraint vacuous, so the
        # (empty) index lookup must not be trusted for it
        if p is not None and not c.may_be_zero and is_prime(p):
            found = store.lookup_ramification(p, c.e_lo, c.e_hi)
            id_set = found if id_set is None else id_set & found

    if has_disc_bound or id_set is None:
        lo = req.absdisc_min if req.absdisc_min is not None else 1
        for degree in _scan_degrees(store, req):
            caps = [req.absdisc_max] if req.absdisc_max is not None else []
            if req.rd_max is not None:
                caps.append(_floor_pow(req.rd_max, degree))
            if req.grd_max is not None:
                caps.append(_floor_pow(req.grd_max, degree))
            hi = min(caps) if caps else 10**9999
            for rec in store.scan_absdisc_range(degree, lo, hi):
                if id_set is None or rec.id in id_set:
                    yield rec
    else:
        for rid in sorted(id_set):
            yield store.get_field(rid)


def execute_search(store: FieldStore, req: SearchRequest) -> SearchResult:
    rows = sort_results(post_filter(_candidates(store, req), req), req.sort_key)
    complete, trace = check_complete(
        req, store.completeness_rows(), store.alpha_table()
    )
    if complete and (req.grd_min is not None or req.grd_max is not None):
        # A record without a stored grd is excluded by any grd constraint
        # even though the field itself might satisfy it; claiming the
        # listing complete would then overpromise.
        shadowed = any(
            r.grd is None and matches(r, req, missing_grd_ok=True)
            for r in _candidates(store, req)
        )
        if shadowed:
            complete = False
            trace += "; withdrawn: matching records lack a stored grd"
    total = len(rows)
    if req.offset:
        rows = rows[req.offset :]
    if req.limit is not None:
        rows = rows[: req.limit]
    return SearchResult(
        rows=tuple(rows), complete=complete, completeness_trace=trace, total=total
    )
