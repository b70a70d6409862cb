"""Mass heuristics, exactly.

Everything here is a rational computation: the archimedean mass of a
signature, tame local masses from partition counts, wild local masses from
ingested constants, the product prediction for field counts, and the
observed-versus-predicted frequency tables. Decimal rendering happens only
at the display layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Mapping

from .model import FieldRecord, render_fraction_hundredths


class MissingMassError(ValueError):
    """A wild local mass was needed but never ingested."""


def delta(n: int) -> Fraction:
    """Global correction factor: 1 in degrees 1 and 2, 1/2 beyond."""
    return Fraction(1) if n <= 2 else Fraction(1, 2)


def mass_infinity(n: int, s: int) -> Fraction:
    """Mass of the signature with s complex places in degree n."""
    if not 0 <= 2 * s <= n:
        raise ValueError(f"signature s={s} out of range for degree {n}")
    return Fraction(1, factorial(n - 2 * s) * factorial(s) * 2**s)


def mass_infinity_total(n: int) -> Fraction:
    return sum((mass_infinity(n, s) for s in range(n // 2 + 1)), Fraction(0))


@lru_cache(maxsize=None)
def partitions_with_parts(n: int, k: int) -> int:
    """Partitions of n into exactly k parts; 0 when impossible."""
    if n < 0 or k < 0:
        raise ValueError("partition arguments must be nonnegative")
    if n == 0:
        return 1 if k == 0 else 0
    if k == 0 or k > n:
        return 0
    return partitions_with_parts(n - 1, k - 1) + partitions_with_parts(n - k, k)


def tame_mass(n: int, p: int, c: int) -> Fraction:
    """Local mass at a prime p > n, where only tame ramification exists:
    the count of partitions of n into n - c parts."""
    if p <= n:
        raise ValueError(f"p={p} is wild for degree {n}; ingest its mass table")
    if not 0 <= c <= n - 1:
        raise ValueError(f"tame exponent c={c} out of range for degree {n}")
    return Fraction(partitions_with_parts(n, n - c))


class LocalMassTable:
    """Per-prime local masses for whatever degrees are loaded.

    Tame entries (p > n) are computed; wild entries come from ingested
    constants, either a full exponent list or just the summed total."""

    def __init__(
        self,
        wild: Mapping[tuple[int, int], Mapping[int, Fraction]] | None = None,
        wild_totals: Mapping[tuple[int, int], Fraction] | None = None,
    ):
        self._wild = {k: dict(v) for k, v in (wild or {}).items()}
        self._totals = dict(wild_totals or {})
        for (n, p), row in self._wild.items():
            if any(v < 0 for v in row.values()):
                raise ValueError(f"negative mass in wild row ({n}, {p})")

    def is_tame(self, n: int, p: int) -> bool:
        return p > n

    def mass(self, n: int, p: int, c: int) -> Fraction:
        if p > n:
            if c >= n:
                return Fraction(0)
            return tame_mass(n, p, c)
        row = self._wild.get((n, p))
        if row is None:
            raise MissingMassError(f"wild mass not ingested for n={n}, p={p}")
        return row.get(c, Fraction(0))

    def exponents(self, n: int, p: int) -> list[int]:
        """Exponents with (potentially) nonzero mass."""
        if p > n:
            return list(range(n))
        row = self._wild.get((n, p))
        if row is None:
            raise MissingMassError(f"wild mass not ingested for n={n}, p={p}")
        return sorted(row)

    def total(self, n: int, p: int) -> Fraction:
        if p > n:
            return Fraction(sum(partitions_with_parts(n, k) for k in range(n + 1)))
        if (n, p) in self._totals:
            return self._totals[(n, p)]
        row = self._wild.get((n, p))
        if row is None:
            raise MissingMassError(f"wild mass not ingested for n={n}, p={p}")
        return sum(row.values(), Fraction(0))


def total_local_mass(n: int, p: int, table: LocalMassTable) -> Fraction:
    return table.total(n, p)


@dataclass(frozen=True)
class MassPrediction:
    value: Fraction
    applicable: bool

    def decimal(self) -> str:
        return render_fraction_hundredths(self.value)


def predict_count(
    n: int,
    s: int | None,
    prime_exponents: Mapping[int, int | None],
    table: LocalMassTable,
) -> MassPrediction:
    """Predicted field count for one discriminant shape.

    s None means summed over all signatures; a None exponent means summed
    over all exponents at that prime. The prediction is computed even when
    the target discriminant is a perfect square, but flagged inapplicable
    there: a square target pins down a quadratic subextension the heuristic
    knowingly ignores."""
    value = delta(n)
    if s is None:
        value *= mass_infinity_total(n)
    else:
        value *= mass_infinity(n, s)
    for p, c in sorted(prime_exponents.items()):
        if c is None:
            value *= table.total(n, p)
        else:
            if c < 0:
                raise ValueError("discriminant exponents are nonnegative")
            value *= table.mass(n, p, c)
    exact_square = (
        s is not None
        and s % 2 == 0
        and all(c is not None and c % 2 == 0 for c in prime_exponents.values())
    )
    return MassPrediction(value=value, applicable=not exact_square)


@dataclass(frozen=True)
class FrequencyRow:
    exponent: int
    predicted: Fraction
    observed: Fraction


@dataclass(frozen=True)
class PlaceComparison:
    place: int | None  # None is the infinite place
    rows: tuple[FrequencyRow, ...]


def frequency_comparison(
    records: Iterable[FieldRecord],
    n: int,
    places: Iterable[int | None],
    table: LocalMassTable,
) -> list[PlaceComparison]:
    """Observed local discriminant exponents against mass predictions.

    Predicted columns are masses in display units: scaled by n! at the
    infinite place, bare at finite ones. Observed columns rescale raw
    counts by (total mass in the same units) / (number of records), so a
    dataset distributed exactly proportionally to the masses reproduces
    the predicted row."""
    records = list(records)
    if not records:
        raise ValueError("no records to compare")
    for r in records:
        if r.degree != n:
            raise ValueError(f"record of degree {r.degree} in a degree-{n} table")
    count = len(records)
    out = []
    for place in places:
        if place is None:
            unit = Fraction(factorial(n))
            support = list(range(n // 2 + 1))
            observed: dict[int, int] = {}
            for r in records:
                observed[r.s] = observed.get(r.s, 0) + 1
            masses = {s: mass_infinity(n, s) for s in support}
        else:
            unit = Fraction(1)
            support = table.exponents(n, place)
            observed = {}
            for r in records:
                c = r.disc.absdisc.ord_of(place)
                observed[c] = observed.get(c, 0) + 1
            masses = {c: table.mass(n, place, c) for c in support}
        if place is None:
            total_units = sum((unit * m for m in masses.values()), Fraction(0))
        else:
            total_units = unit * table.total(n, place)
        rows = []
        for c in sorted(set(support) | set(observed)):
            predicted = unit * masses.get(c, Fraction(0))
            seen = Fraction(observed.get(c, 0)) * total_units / count
            rows.append(FrequencyRow(exponent=c, predicted=predicted, observed=seen))
        out.append(PlaceComparison(place=place, rows=tuple(rows)))
    return out
