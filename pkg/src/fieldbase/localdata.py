"""Slope content at a prime and its contribution to Galois root discriminants.

A content [s_1,...,s_m]_t^u at p records wild slopes (weakly increasing,
each > 1), the tame degree t (coprime to p), and the unramified degree u.
The exponent it contributes to grd is

    alpha = sum_{i=1..m} (p-1)/p^i * s_{m+1-i}  +  (1/p^m) * (t-1)/t

so the largest slope carries weight (p-1)/p. This always lands in
[(t-1)/t, max slope), tame contents giving exactly (t-1)/t.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .model import PrimePowerProduct
from .primes import is_prime

_CONTENT_RE = re.compile(
    r"^\[(?P<slopes>[^\]]*)\](?:_(?P<t>\d+))?(?:\^(?P<u>\d+))?$"
)


@dataclass(frozen=True)
class SlopeContent:
    p: int
    wild_slopes: tuple[Fraction, ...]
    tame_degree: int = 1
    unramified_degree: int = 1

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.tame_degree < 1 or self.unramified_degree < 1:
            raise ValueError("tame and unramified degrees must be >= 1")
        if self.tame_degree % self.p == 0:
            raise ValueError(
                f"tame degree {self.tame_degree} not coprime to {self.p}"
            )
        prev = None
        for slope in self.wild_slopes:
            if slope <= 1:
                raise ValueError(f"wild slope {slope} must exceed 1")
            if prev is not None and slope < prev:
                raise ValueError("wild slopes must be weakly increasing")
            prev = slope

    def text(self) -> str:
        inner = ",".join(
            str(s.numerator) if s.denominator == 1 else f"{s.numerator}/{s.denominator}"
            for s in self.wild_slopes
        )
        out = f"[{inner}]"
        if self.tame_degree != 1:
            out += f"_{self.tame_degree}"
        if self.unramified_degree != 1:
            out += f"^{self.unramified_degree}"
        return out


def parse_slope_content(text: str, p: int) -> SlopeContent:
    """Parse "[2,2,3]_2^4"-style content at prime p; t and u default to 1."""
    m = _CONTENT_RE.match(text.strip())
    if not m:
        raise ValueError(f"malformed slope content {text!r}")
    body = m.group("slopes").strip()
    slopes = []
    if body:
        for token in body.split(","):
            try:
                slopes.append(Fraction(token.strip()))
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"bad slope {token!r} in {text!r}") from exc
    t = int(m.group("t") or 1)
    u = int(m.group("u") or 1)
    return SlopeContent(p, tuple(slopes), t, u)


def alpha_exponent(content: SlopeContent) -> Fraction:
    """The exponent of p in the Galois root discriminant."""
    p = content.p
    slopes = content.wild_slopes
    m = len(slopes)
    total = Fraction(0)
    pk = 1
    for i in range(1, m + 1):
        pk *= p
        total += Fraction(p - 1, pk) * slopes[m - i]
    t = content.tame_degree
    return total + Fraction(t - 1, t) / pk


def grd_from_contents(contents) -> PrimePowerProduct:
    """Product of p^alpha over a prime -> SlopeContent mapping (or an
    iterable of contents with distinct primes)."""
    if hasattr(contents, "items"):
        items = list(contents.items())
    else:
        items = [(c.p, c) for c in contents]
    seen: set[int] = set()
    pairs = []
    for p, content in items:
        if p != content.p:
            raise ValueError(f"content at prime {content.p} keyed by {p}")
        if p in seen:
            raise ValueError(f"duplicate prime {p} in slope contents")
        seen.add(p)
        pairs.append((p, alpha_exponent(content)))
    return PrimePowerProduct.of(pairs)
