"""Transitive permutation group identifiers (nTj labels).

The t-number ranges come from the classification of transitive groups, which
is complete through degree 48; those counts are a static table here. Degrees
past the table (up to MAX_DEGREE) are accepted with unvalidated t-numbers.
"""

from __future__ import annotations

MAX_DEGREE = 64

# Number of transitive groups of each degree, 1..48.
TRANSITIVE_GROUP_COUNTS = {
    1: 1, 2: 1, 3: 2, 4: 5, 5: 5, 6: 16, 7: 7, 8: 50, 9: 34, 10: 45,
    11: 8, 12: 301, 13: 9, 14: 63, 15: 104, 16: 1954, 17: 10, 18: 983,
    19: 8, 20: 1117, 21: 164, 22: 59, 23: 7, 24: 25000, 25: 211, 26: 96,
    27: 2392, 28: 1854, 29: 8, 30: 5712, 31: 12, 32: 2801324, 33: 162,
    34: 115, 35: 407, 36: 121279, 37: 11, 38: 76, 39: 306, 40: 315842,
    41: 10, 42: 9491, 43: 10, 44: 2113, 45: 10923, 46: 56, 47: 6,
    48: 195826352,
}

# Conventional names for the groups the data files actually use. Anything
# not listed here renders as its plain nTj label.
_NAMES = {
    (1, 1): "C1",
    (2, 1): "C2",
    (3, 1): "C3",
    (3, 2): "S3",
    (4, 1): "C4",
    (4, 2): "V4",
    (4, 3): "D4",
    (4, 4): "A4",
    (4, 5): "S4",
    (5, 1): "C5",
    (5, 2): "D5",
    (5, 3): "F5",
    (5, 4): "A5",
    (5, 5): "S5",
    (6, 15): "A6",
    (6, 16): "S6",
    (7, 1): "C7",
    (7, 2): "D7",
    (7, 3): "F21",
    (7, 4): "F42",
    (7, 5): "SL3(2)",
    (7, 6): "A7",
    (7, 7): "S7",
    (8, 37): "PSL2(7)",
    (8, 43): "PGL2(7)",
    (9, 32): "SL2(8).3",
}

_ALIASES = {name: key for key, name in _NAMES.items()}


def group_count(degree: int) -> int | None:
    """Known count of transitive groups in this degree, or None."""
    return TRANSITIVE_GROUP_COUNTS.get(degree)


def validate(degree: int, t_number: int) -> None:
    if not 1 <= degree <= MAX_DEGREE:
        raise ValueError(f"degree {degree} outside supported range 1..{MAX_DEGREE}")
    if t_number < 1:
        raise ValueError(f"t-number must be positive, got {t_number}")
    count = TRANSITIVE_GROUP_COUNTS.get(degree)
    if count is not None and t_number > count:
        raise ValueError(
            f"degree {degree} has only {count} transitive groups, got T{t_number}"
        )


def label(degree: int, t_number: int) -> str:
    return _NAMES.get((degree, t_number), f"{degree}T{t_number}")


def parse_label(text: str) -> tuple[int, int]:
    """Read "4T3" or a conventional name like "D4" into (degree, t)."""
    text = text.strip()
    if text in _ALIASES:
        return _ALIASES[text]
    head, sep, tail = text.partition("T")
    if sep and head.isdigit() and tail.isdigit():
        degree, t = int(head), int(tail)
        validate(degree, t)
        return degree, t
    raise ValueError(f"unrecognized group label {text!r}")
