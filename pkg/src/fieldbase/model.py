"""Core domain types and exact invariant arithmetic.

Everything here is exact: discriminants are factored big integers, root
discriminants are products of prime powers with rational exponents, and
decimal strings appear only at render time (rounded half-up to hundredths).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm, prod
from typing import TYPE_CHECKING

from . import groups

if TYPE_CHECKING:
    from .localdata import SlopeContent


def iroot(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0, k >= 1, in integer arithmetic."""
    if n < 0 or k < 1:
        raise ValueError("iroot needs n >= 0, k >= 1")
    if n == 0 or k == 1:
        return n
    x = 1 << -(-n.bit_length() // k)  # starts at or above the root
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def _hundredths_from_milli(floor_milli: int) -> str:
    """Round x to hundredths given floor(1000*x), half away from zero."""
    n = (floor_milli + 5) // 10
    return f"{n // 100}.{n % 100:02d}"


def render_fraction_hundredths(q: Fraction) -> str:
    if q < 0:
        raise ValueError("negative value")
    return _hundredths_from_milli(1000 * q.numerator // q.denominator)


_TERM_RE = re.compile(r"^(\d+)(?:\^(?:\{(-?\d+(?:/\d+)?)\}|(-?\d+(?:/\d+)?)))?$")


@dataclass(frozen=True)
class PrimePowerProduct:
    """An exact positive real of the form prod p_i^{e_i}, primes increasing,
    rational exponents >= 0. Houses grd and rd values."""

    terms: tuple[tuple[int, Fraction], ...]

    def __post_init__(self) -> None:
        last = 1
        for p, e in self.terms:
            if p <= last:
                raise ValueError(f"bases must be strictly increasing, got {p}")
            if e < 0:
                raise ValueError(f"exponent of {p} is negative")
            last = p

    @classmethod
    def of(cls, pairs) -> "PrimePowerProduct":
        merged: dict[int, Fraction] = {}
        for p, e in pairs:
            merged[p] = merged.get(p, Fraction(0)) + Fraction(e)
        terms = tuple((p, merged[p]) for p in sorted(merged) if merged[p] != 0)
        return cls(terms)

    @classmethod
    def one(cls) -> "PrimePowerProduct":
        return cls(())

    @classmethod
    def parse(cls, text: str) -> "PrimePowerProduct":
        text = text.strip()
        if text == "1":
            return cls.one()
        pairs = []
        for token in text.split():
            m = _TERM_RE.match(token)
            if not m:
                raise ValueError(f"bad prime power {token!r}")
            base = int(m.group(1))
            exp = Fraction(m.group(2) or m.group(3) or 1)
            pairs.append((base, exp))
        return cls.of(pairs)

    def text(self) -> str:
        if not self.terms:
            return "1"
        parts = []
        for p, e in self.terms:
            if e.denominator == 1:
                parts.append(f"{p}^{e.numerator}")
            else:
                parts.append(f"{p}^{{{e.numerator}/{e.denominator}}}")
        return " ".join(parts)

    def times(self, other: "PrimePowerProduct") -> "PrimePowerProduct":
        return PrimePowerProduct.of(self.terms + other.terms)

    def is_one(self) -> bool:
        return not self.terms

    def floor_scaled(self, places: int) -> int:
        """floor(value * 10**places), exactly."""
        L = 1
        for _, e in self.terms:
            L = lcm(L, e.denominator)
        n = 10 ** (places * L)
        for p, e in self.terms:
            n *= p ** int(e * L)
        return iroot(n, L)

    def decimal2(self) -> str:
        return _hundredths_from_milli(self.floor_scaled(3))

    def compare(self, other: "PrimePowerProduct") -> int:
        diff: dict[int, Fraction] = {p: e for p, e in self.terms}
        for p, e in other.terms:
            diff[p] = diff.get(p, Fraction(0)) - e
        L = 1
        for e in diff.values():
            L = lcm(L, e.denominator)
        num = den = 1
        for p, e in diff.items():
            k = int(e * L)
            if k > 0:
                num *= p**k
            elif k < 0:
                den *= p**-k
        return (num > den) - (num < den)

    def compare_fraction(self, q: Fraction) -> int:
        """Sign of (self - q) for q >= 0."""
        if q < 0:
            return 1
        L = 1
        for _, e in self.terms:
            L = lcm(L, e.denominator)
        lhs = prod(p ** int(e * L) for p, e in self.terms) * q.denominator**L
        rhs = q.numerator**L
        return (lhs > rhs) - (lhs < rhs)

    def __le__(self, other: "PrimePowerProduct") -> bool:
        return self.compare(other) <= 0

    def __lt__(self, other: "PrimePowerProduct") -> bool:
        return self.compare(other) < 0


@dataclass(frozen=True)
class RootValue:
    """n-th root of an unfactored positive integer (radical form)."""

    radicand: int
    index: int

    def text(self) -> str:
        if self.index == 1:
            return str(self.radicand)
        return f"{self.radicand}^{{1/{self.index}}}"

    def floor_scaled(self, places: int) -> int:
        return iroot(self.radicand * 10 ** (places * self.index), self.index)

    def decimal2(self) -> str:
        return _hundredths_from_milli(self.floor_scaled(3))


@dataclass(frozen=True)
class FactoredInteger:
    """A positive integer carried together with its prime factorization."""

    factors: tuple[tuple[int, int], ...]
    value: int

    def __post_init__(self) -> None:
        last = 1
        for p, e in self.factors:
            if p <= last:
                raise ValueError(f"factor primes must increase, got {p}")
            if e < 1:
                raise ValueError(f"exponent of {p} must be >= 1")
            last = p
        expected = prod(p**e for p, e in self.factors)
        if expected != self.value:
            raise ValueError(f"value {self.value} != product of factors {expected}")

    @classmethod
    def from_factors(cls, pairs) -> "FactoredInteger":
        if isinstance(pairs, dict):
            pairs = pairs.items()
        factors = tuple(sorted((int(p), int(e)) for p, e in pairs))
        return cls(factors, prod(p**e for p, e in factors))

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def ord_of(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0


@dataclass(frozen=True)
class SignedDiscriminant:
    """The formal signed discriminant: s complex places and factored |D|."""

    s: int
    absdisc: FactoredInteger

    def __post_init__(self) -> None:
        if self.s < 0:
            raise ValueError("complex place count cannot be negative")


def format_discriminant(d: SignedDiscriminant) -> str:
    body = " ".join(f"{p}^{e}" for p, e in d.absdisc.factors) or "1"
    if d.s == 0:
        return body
    return f"-^{d.s} {body}"


def parse_discriminant(text: str) -> SignedDiscriminant:
    parts = text.split()
    s = 0
    if parts and parts[0].startswith("-^"):
        s = int(parts[0][2:])
        parts = parts[1:]
    if parts == ["1"]:
        parts = []
    pairs = []
    for token in parts:
        base, sep, exp = token.partition("^")
        if not sep or not base.isdigit() or not exp.isdigit():
            raise ValueError(f"bad discriminant factor {token!r}")
        pairs.append((int(base), int(exp)))
    return SignedDiscriminant(s, FactoredInteger.from_factors(pairs))


@dataclass(frozen=True, order=True)
class GroupId:
    degree: int
    t_number: int

    def __post_init__(self) -> None:
        groups.validate(self.degree, self.t_number)

    @classmethod
    def parse(cls, text: str) -> "GroupId":
        return cls(*groups.parse_label(text))

    @property
    def label(self) -> str:
        return groups.label(self.degree, self.t_number)

    def __str__(self) -> str:
        return f"{self.degree}T{self.t_number}"


@dataclass(frozen=True)
class ClassGroupStructure:
    """Cyclic factor orders of a (narrow) class group; empty means trivial."""

    cyclic_orders: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(h < 1 for h in self.cyclic_orders):
            raise ValueError("cyclic orders must be >= 1")

    @property
    def order(self) -> int:
        return prod(self.cyclic_orders)


def format_class_group(c: ClassGroupStructure) -> str:
    shown = [h for h in c.cyclic_orders if h > 1]
    if not shown:
        return "1"
    return ".".join(str(h) for h in shown)


@dataclass
class FieldRecord:
    """One number field row: the invariants arrive as ingested metadata."""

    degree: int
    polynomial: tuple[int, ...]
    group: GroupId
    disc: SignedDiscriminant
    class_group: ClassGroupStructure
    narrow_class_group: ClassGroupStructure | None = None
    local_data: dict[int, "SlopeContent"] = field(default_factory=dict)
    grd: PrimePowerProduct | None = None
    id: int | None = None

    @property
    def s(self) -> int:
        return self.disc.s

    @property
    def absdisc(self) -> int:
        return self.disc.absdisc.value

    @property
    def ramified_primes(self) -> tuple[int, ...]:
        return self.disc.absdisc.primes

    def rd(self) -> PrimePowerProduct:
        return PrimePowerProduct.of(
            (p, Fraction(e, self.degree)) for p, e in self.disc.absdisc.factors
        )

    def poly_text(self) -> str:
        return format_polynomial(self.polynomial)


def root_discriminant(absdisc, degree: int):
    """Exact |D|^(1/degree): a PrimePowerProduct when the factorization is
    known, a RootValue otherwise."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if isinstance(absdisc, FactoredInteger):
        if absdisc.value < 1:
            raise ValueError("absolute discriminant must be >= 1")
        return PrimePowerProduct.of(
            (p, Fraction(e, degree)) for p, e in absdisc.factors
        )
    value = int(absdisc)
    if value < 1:
        raise ValueError("absolute discriminant must be >= 1")
    return RootValue(value, degree)


def format_polynomial(coeffs) -> str:
    """Render monic integer coefficients (highest degree first) like
    x^4-x^3+2x+1."""
    n = len(coeffs) - 1
    parts: list[str] = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        k = n - i
        sign = "-" if c < 0 else ("+" if parts else "")
        mag = abs(c)
        if k == 0:
            body = str(mag)
        else:
            x = "x" if k == 1 else f"x^{k}"
            body = x if mag == 1 else f"{mag}{x}"
        parts.append(sign + body)
    return "".join(parts) or "0"
