"""Bit-exact key encodings.

Absolute discriminants become decimal strings prefixed with a 4-digit
zero-padded floor(log10 |D|), which makes lexicographic order agree with
numeric order up to the capacity 10^10000. Sets of Galois groups in one
degree become sum-of-powers-of-two codes, carried as decimal text.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

from . import groups

CAPACITY_DIGITS = 10000


def _allow_big_decimal() -> None:
    # CPython caps int<->str conversions well below our 10^10000 capacity.
    if hasattr(sys, "get_int_max_str_digits"):
        if sys.get_int_max_str_digits() < CAPACITY_DIGITS + 100:
            sys.set_int_max_str_digits(CAPACITY_DIGITS + 100)


def encode_absdisc(absdisc: int) -> str:
    """Order-preserving key for 1 <= |D| < 10^10000."""
    if absdisc < 1:
        raise ValueError(f"absolute discriminant must be >= 1, got {absdisc}")
    _allow_big_decimal()
    digits = str(absdisc)
    if len(digits) > CAPACITY_DIGITS:
        raise ValueError(
            f"absolute discriminant has {len(digits)} digits; "
            f"key format caps at {CAPACITY_DIGITS}"
        )
    return f"{len(digits) - 1:04d}{digits}"


def decode_absdisc(key: str) -> int:
    if len(key) < 5 or not key.isdigit():
        raise ValueError(f"malformed discriminant key {key!r}")
    payload = key[4:]
    if len(payload) != int(key[:4]) + 1:
        raise ValueError(f"key prefix inconsistent with payload length: {key!r}")
    if payload[0] == "0":
        raise ValueError(f"payload has leading zero: {key!r}")
    _allow_big_decimal()
    return int(payload)


@dataclass(frozen=True)
class GroupSetCode:
    """Subset of t-numbers in one degree as sum(2^(t-1)), decimal text."""

    degree: int
    code: int

    @property
    def text(self) -> str:
        return str(self.code)


def encode_group_set(degree: int, members) -> GroupSetCode:
    count = groups.group_count(degree)
    code = 0
    for t in members:
        if t < 1 or (count is not None and t > count):
            raise ValueError(f"t-number {t} out of range for degree {degree}")
        code |= 1 << (t - 1)
    return GroupSetCode(degree, code)


def set_contains(code, t: int) -> bool:
    if t < 1:
        raise ValueError("t-number must be positive")
    bits = code.code if isinstance(code, GroupSetCode) else int(code)
    return bool(bits >> (t - 1) & 1)
