"""Exact elementary number theory helpers: gcd content, factorization,
modular inverses, CRT, Legendre symbols.

Everything operates on plain Python integers (arbitrary precision).
"""
from __future__ import annotations

import math
from collections.abc import Iterable, Sequence

from .errors import ResourceExhausted

TRIAL_DIVISION_BOUND = 10**6

# Deterministic Miller-Rabin witness set, valid for all n < 3.3 * 10**24
# (in particular the full 64-bit range).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def content(v: Iterable[int]) -> int:
    """gcd of a sequence of integers (0 for the empty/zero sequence)."""
    g = 0
    for c in v:
        g = math.gcd(g, c)
    return g


def gcd_all(*values: int) -> int:
    return content(values)


def is_prime(n: int) -> bool:
    """Deterministic primality test for n < 3.3e24 (Miller-Rabin)."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization {p: multiplicity} of a positive integer.

    Trial division up to 10**6, then a deterministic Miller-Rabin check on
    the remaining cofactor.  A composite cofactor beyond the trial bound, or
    n outside the 64-bit range, raises ResourceExhausted: the inputs this
    package meets are desk-scale by assumption, and we refuse to guess.
    """
    if n < 1:
        raise ValueError(f"factorize expects a positive integer, got {n}")
    if n >= 2**64:
        raise ResourceExhausted(f"{n} exceeds the deterministic factorization range")
    out: dict[int, int] = {}
    m = n
    for p in (2, 3):
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
    p = 5
    step = 2  # alternate 5,7,11,13,... (6k +- 1)
    while p * p <= m and p <= TRIAL_DIVISION_BOUND:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += step
        step = 6 - step
    if m > 1:
        if not is_prime(m):
            raise ResourceExhausted(
                f"cofactor {m} survives trial division to {TRIAL_DIVISION_BOUND} and is composite"
            )
        out[m] = out.get(m, 0) + 1
    return out


def prime_factors(n: int) -> list[int]:
    """Sorted distinct prime factors of n >= 1."""
    return sorted(factorize(n))


def primes_upto(bound: int) -> list[int]:
    """All primes <= bound, by sieve."""
    if bound < 2:
        return []
    sieve = bytearray([1]) * (bound + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, int(math.isqrt(bound)) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i, flag in enumerate(sieve) if flag]


def inv_mod(a: int, m: int) -> int:
    """Inverse of a modulo m; requires gcd(a, m) = 1."""
    return pow(a, -1, m)


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> int:
    """Solve x = r1 (mod m1), x = r2 (mod m2) for coprime moduli."""
    diff = (r2 - r1) % m2
    return (r1 + m1 * (diff * inv_mod(m1 % m2, m2) % m2)) % (m1 * m2)


def crt_list(residues: Sequence[int], moduli: Sequence[int]) -> int:
    """CRT over pairwise coprime moduli."""
    r, m = residues[0] % moduli[0], moduli[0]
    for r2, m2 in zip(residues[1:], moduli[1:]):
        r = crt_pair(r, m, r2, m2)
        m *= m2
    return r


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) in {-1, 0, 1} for an odd prime p."""
    if p <= 2 or not is_prime(p):
        raise ValueError(f"legendre requires an odd prime, got {p}")
    r = pow(a % p, (p - 1) // 2, p)
    if r == p - 1:
        return -1
    return r
