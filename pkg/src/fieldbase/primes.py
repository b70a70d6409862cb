"""Primality testing and integer factoring on plain ints.

The engine never factors anything astronomically hard: ingest validation
checks that listed bases are prime, and the completeness checker factors at
most ten residual discriminant values per query, under an explicit effort
cap. Deterministic Miller-Rabin witnesses cover everything below 3.3e24;
beyond that a handful of random bases keeps the test honest.
"""

from __future__ import annotations

import random


class FactorLimitError(ValueError):
    """A composite cofactor was larger than the caller's effort cap."""


_SMALL = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

# Sorenson-Webster: these witnesses decide primality for n < 3.3e24.
_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_DETERMINISTIC_BELOW = 3_317_044_064_679_887_385_961_981

_trial_primes: list[int] = []


def _miller_rabin(n: int, a: int) -> bool:
    d = n - 1
    r = (d & -d).bit_length() - 1
    d >>= r
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(r - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL:
        if n % p == 0:
            return n == p
    for a in _WITNESSES:
        if a % n == 0:
            continue  # the witness itself (only possible for tiny n)
        if not _miller_rabin(n, a):
            return False
    if n >= _DETERMINISTIC_BELOW:
        rng = random.Random(n)
        for _ in range(16):
            if not _miller_rabin(n, rng.randrange(2, n - 1)):
                return False
    return True


def primes_below(limit: int) -> list[int]:
    """All primes < limit, by sieve."""
    if limit <= 2:
        return []
    flags = bytearray([1]) * limit
    flags[0] = flags[1] = 0
    for p in range(2, int(limit**0.5) + 1):
        if flags[p]:
            flags[p * p :: p] = bytearray(len(range(p * p, limit, p)))
    return [i for i in range(limit) if flags[i]]


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    if n <= 2:
        return 2
    n |= 1
    while not is_prime(n):
        n += 2
    return n


def _rho(n: int) -> int:
    """A nontrivial factor of composite n (Brent's cycle variant)."""
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = _gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = _gcd(abs(x - ys), n)
        if g != n:
            return g


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def factor(n: int, *, giveup_above: int | None = 10**18) -> dict[int, int]:
    """Factor n >= 1 into {prime: exponent}.

    Raises FactorLimitError if, after trial division, a composite cofactor
    exceeds giveup_above (pass None to persevere regardless).
    """
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    global _trial_primes
    if not _trial_primes:
        _trial_primes = primes_below(10_000)
    out: dict[int, int] = {}
    for p in _trial_primes:
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n == 1:
        return out
    stack = [n]
    while stack:
        m = stack.pop()
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        if giveup_above is not None and m > giveup_above:
            raise FactorLimitError(f"composite cofactor {m} exceeds effort cap")
        d = _rho(m)
        stack.append(d)
        stack.append(m // d)
    return out
