"""Completeness ledger and the search-completeness decision.

The ledger holds assertions of four kinds:

  A: (n, s, B)       every field with this degree and signature and |D| <= B
                     is in the database;
  B: (n, s, G, B)    same, additionally restricted to one Galois group;
  C: (n, S, L)       every degree-n field unramified outside the prime set S
                     whose group lies in the encoded set L is present;
  D: (n, G, B)       every degree-n field with group G and grd <= B is present.

check_complete walks the degrees of a request keeping a workset of Galois
groups (and a residual discriminant window) still in doubt, discharging them
via A/B bounds, grd reasoning through alpha(G), per-value C lookups when at
most ten discriminant values remain, and whole-prime-set C lookups.

The decision errs toward False: an unprovable request is reported incomplete,
never the reverse.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

from . import groups
from .encoding import encode_group_set
from .model import GroupId
from .primes import FactorLimitError, factor, primes_below

__all__ = [
    "CompletenessRecord",
    "RationalPower",
    "check_complete",
    "grd_bound_from_rd",
    "rd_cover_from_grd",
    "absdisc_cap",
]

if TYPE_CHECKING:
    from .query import SearchRequest

RESIDUAL_LIMIT = 10  # values we are willing to check one by one
MAX_PRIME_ENUMERATION = 1_000_000  # cap for expanding a max-prime bound
FACTOR_EFFORT = 10**18


@dataclass(frozen=True)
class CompletenessRecord:
    kind: str
    n: int
    s: int | None = None
    group: GroupId | None = None
    bound: int | None = None  # A/B: bound on |D|
    grd_bound: Fraction | None = None  # D: bound on grd
    primes: tuple[int, ...] | None = None  # C
    group_set: int | None = None  # C: sum of 2^(t-1)

    def __post_init__(self) -> None:
        shape = {
            "A": (True, False, True, False, False),
            "B": (True, True, True, False, False),
            "C": (False, False, False, True, True),
            "D": (False, True, False, False, True),
        }.get(self.kind)
        if shape is None:
            raise ValueError(f"unknown ledger table {self.kind!r}")
        want_s, want_group, want_bound, want_primes, _ = shape
        if (self.s is not None) != want_s:
            raise ValueError(f"table {self.kind}: signature field mismatch")
        if (self.group is not None) != want_group:
            raise ValueError(f"table {self.kind}: group field mismatch")
        if (self.bound is not None) != want_bound:
            raise ValueError(f"table {self.kind}: |D| bound field mismatch")
        if (self.grd_bound is not None) != (self.kind == "D"):
            raise ValueError(f"table {self.kind}: grd bound field mismatch")
        if (self.primes is not None) != (self.kind == "C"):
            raise ValueError(f"table {self.kind}: prime set field mismatch")
        if (self.group_set is not None) != (self.kind == "C"):
            raise ValueError(f"table {self.kind}: group set field mismatch")
        if self.group is not None and self.group.degree != self.n:
            raise ValueError("ledger group degree disagrees with n")


@dataclass(frozen=True)
class RationalPower:
    """base ** exp with rational base >= 0 and rational exp > 0, compared
    exactly by cross powers."""

    base: Fraction
    exp: Fraction

    def le(self, other: Fraction) -> bool:
        n, d = self.exp.numerator, self.exp.denominator
        return self.base**n <= other**d

    def value_or_none(self) -> Fraction | None:
        if self.exp.denominator == 1:
            return self.base**self.exp.numerator
        return None


def grd_bound_from_rd(group: GroupId, rd_bound: Fraction, alpha) -> RationalPower:
    """Exact rd_bound ** alpha(G): every group-G field with rd <= rd_bound
    has grd at most this. Raises KeyError when alpha(G) is unknown, which
    only blocks this one reduction."""
    a = alpha.get(group)
    if a is None:
        raise KeyError(f"no alpha value for {group}")
    return RationalPower(Fraction(rd_bound), Fraction(a))


def rd_cover_from_grd(grd_bound: Fraction) -> Fraction:
    """A grd <= B request is covered by rd <= B coverage, since rd <= grd."""
    if grd_bound < 1:
        return Fraction(1)
    return Fraction(grd_bound)


def absdisc_cap(bound: Fraction, degree: int) -> int:
    """Largest |D| compatible with rd <= bound in this degree."""
    b = Fraction(bound)
    return b.numerator**degree // b.denominator**degree


def check_complete(req: "SearchRequest", ledger, alpha) -> tuple[bool, str]:
    """Decide whether every field matching req is provably in the database.

    ledger is a sequence of CompletenessRecord; alpha maps GroupId to the
    exact exponent relating rd and grd bounds for that group.
    """
    if req.degrees is None:
        return False, "no upper bound on degree"
    listed: frozenset[int] | None = None
    if req.only_listed:
        try:
            listed = req.listed_primes()
        except ValueError:
            return False, "only-listed request with an unbounded prime range"
    has_bound = (
        req.absdisc_max is not None
        or req.rd_max is not None
        or req.grd_max is not None
        or req.max_ramified_prime is not None
        or listed is not None
    )
    if not has_bound:
        return False, "no bound on |D|, rd, grd, or ramifying primes"

    by_degree: dict[int, list[CompletenessRecord]] = {}
    for row in ledger:
        by_degree.setdefault(row.n, []).append(row)

    notes: list[str] = []
    for n in sorted(req.degrees):
        ok, why = _check_degree(req, n, by_degree.get(n, []), alpha, listed)
        if not ok:
            return False, f"degree {n}: {why}"
        if why:
            notes.append(f"degree {n}: {why}")
    if not notes:
        return True, "no degree in range can contain matching fields"
    return True, "; ".join(notes)


def _required_s(req: "SearchRequest", n: int) -> list[int]:
    full = range(0, n // 2 + 1)
    if req.s_values is None:
        return list(full)
    return [s for s in full if s in req.s_values]


def _check_degree(
    req: "SearchRequest", n: int, rows: list[CompletenessRecord], alpha, listed
) -> tuple[bool, str]:
    if req.groups is not None:
        ts = sorted(g.t_number for g in req.groups if g.degree == n)
        if not ts:
            return True, ""
    else:
        count = groups.group_count(n)
        if count is None:
            return False, "transitive group inventory unknown"
        ts = list(range(1, count + 1))
    s_needed = _required_s(req, n)
    if not s_needed:
        return True, ""

    disc_cap: int | None = None
    caps = []
    if req.absdisc_max is not None:
        caps.append(req.absdisc_max)
    if req.rd_max is not None:
        caps.append(absdisc_cap(req.rd_max, n))
    if req.grd_max is not None:
        caps.append(absdisc_cap(rd_cover_from_grd(req.grd_max), n))
    if caps:
        disc_cap = min(caps)
        if disc_cap < 1:
            return True, "discriminant bound below 1"

    # Coverage below which A/B rows account for every (group, s) cell.
    a_cov = {s: 0 for s in s_needed}
    b_cov: dict[tuple[int, int], int] = {}
    d_cov: dict[int, Fraction] = {}
    c_rows: list[CompletenessRecord] = []
    for row in rows:
        if row.kind == "A" and row.s in a_cov:
            a_cov[row.s] = max(a_cov[row.s], row.bound)
        elif row.kind == "B" and row.s in s_needed:
            key = (row.group.t_number, row.s)
            b_cov[key] = max(b_cov.get(key, 0), row.bound)
        elif row.kind == "D":
            t = row.group.t_number
            d_cov[t] = max(d_cov.get(t, Fraction(0)), row.grd_bound)
        elif row.kind == "C":
            c_rows.append(row)

    def cell_cov(t: int) -> int:
        return min(max(a_cov[s], b_cov.get((t, s), 0)) for s in s_needed)

    remaining = list(ts)
    notes = []
    if disc_cap is not None:
        remaining = [t for t in remaining if cell_cov(t) < disc_cap]
        if not remaining:
            return True, f"|D| <= {disc_cap} covered by signature bounds"
        notes.append(f"bounds cover |D| <= {disc_cap} except groups {remaining}")

    # grd-based removal via D rows.
    still = []
    for t in remaining:
        cover = d_cov.get(t)
        if cover is None:
            still.append(t)
            continue
        g = GroupId(n, t)
        done = False
        if req.grd_max is not None and cover >= req.grd_max:
            done = True
        if not done and req.rd_max is not None:
            try:
                done = grd_bound_from_rd(g, req.rd_max, alpha).le(cover)
            except KeyError:
                pass
        if not done and req.absdisc_max is not None:
            a = alpha.get(g)
            if a is not None:
                need = RationalPower(Fraction(req.absdisc_max), a / n)
                done = need.le(cover)
        if done:
            notes.append(f"grd coverage retires {n}T{t}")
        else:
            still.append(t)
    remaining = still
    if not remaining:
        return True, "; ".join(notes)

    need_code = encode_group_set(n, remaining).code

    # Whole-prime-set certificates.
    prime_sets: list[frozenset[int]] = []
    if listed is not None:
        prime_sets.append(listed)
    if (
        req.max_ramified_prime is not None
        and req.max_ramified_prime <= MAX_PRIME_ENUMERATION
    ):
        prime_sets.append(frozenset(primes_below(req.max_ramified_prime + 1)))
    for pset in prime_sets:
        for row in c_rows:
            if pset <= set(row.primes) and row.group_set & need_code == need_code:
                notes.append(
                    f"prime set {sorted(pset)} certificate covers groups {remaining}"
                )
                return True, "; ".join(notes)

    # Few enough residual discriminant values: check each against table C.
    if disc_cap is not None:
        low = min(cell_cov(t) for t in remaining)
        if req.absdisc_min is not None:
            low = max(low, req.absdisc_min - 1)
        if disc_cap - low <= RESIDUAL_LIMIT:
            for d in range(low + 1, disc_cap + 1):
                try:
                    d_primes = set(factor(d, giveup_above=FACTOR_EFFORT))
                except FactorLimitError:
                    return False, f"residual value {d} too hard to factor"
                for row in c_rows:
                    if d_primes <= set(row.primes) and (
                        row.group_set & need_code == need_code
                    ):
                        break
                else:
                    return False, f"residual value {d} not certified"
            notes.append(f"residual values {low + 1}..{disc_cap} certified")
            return True, "; ".join(notes)
        return False, (
            f"groups {remaining} uncovered on ({low}, {disc_cap}]"
        )
    return False, f"groups {remaining} not covered by any certificate"
