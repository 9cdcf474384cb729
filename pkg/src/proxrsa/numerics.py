"""Integer primitives: primality, prime search, sieving and seeded randomness.

Python's built-in ``int`` is the arbitrary-precision integer type used
throughout; every routine here accepts and returns plain ints.  All
randomness flows through :class:`SeedStream` (SHA-256 in counter mode), so
identical seeds reproduce identical results bit for bit.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    NotInvertibleError,
    ParameterError,
    RangeTooLargeError,
    SearchExhaustedError,
    StreamExhaustedError,
)

_MAX_COUNTER = 1 << 64
_MAX_SIEVE_HI = 1 << 40
_MAX_SIEVE_SPAN = 1 << 28


def _simple_sieve(limit: int) -> list[int]:
    if limit < 2:
        return []
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.flatnonzero(mask).tolist()


# Trial division by these fully decides primality below 2048**2.
_SMALL_PRIMES = _simple_sieve(2048)
_SMALL_PRIME_SET = set(_SMALL_PRIMES)
_SMALL_PRIME_LIMIT = 2048 * 2048


@dataclass
class SeedStream:
    """Deterministic byte stream: block i = SHA-256(seed || i as 8-byte BE).

    (seed, counter) fully determines all future output; the counter is
    64-bit and overflow raises rather than wrapping.
    """

    seed: bytes
    counter: int = 0

    def __post_init__(self) -> None:
        if len(self.seed) != 32:
            raise ParameterError("seed must be exactly 32 bytes")
        if not 0 <= self.counter < _MAX_COUNTER:
            raise ParameterError("counter out of 64-bit range")

    def block(self) -> bytes:
        if self.counter >= _MAX_COUNTER:
            raise StreamExhaustedError("seed stream counter overflow")
        digest = hashlib.sha256(self.seed + self.counter.to_bytes(8, "big")).digest()
        self.counter += 1
        return digest


def prf_block(stream: SeedStream) -> bytes:
    """Next 256-bit block of the stream; advances the counter by one."""
    return stream.block()


def stream_uint(stream: SeedStream, bound: int) -> int:
    """Uniform integer in [0, bound) by rejection sampling on 256-bit blocks."""
    if bound <= 0:
        raise ParameterError("bound must be positive")
    limit = (1 << 256) - ((1 << 256) % bound)
    while True:
        value = int.from_bytes(prf_block(stream), "big")
        if value < limit:
            return value % bound


def stream_bits(stream: SeedStream, nbits: int) -> int:
    """nbits-wide integer from the stream (leading bits of consecutive blocks)."""
    if nbits <= 0:
        raise ParameterError("nbits must be positive")
    nblocks = -(-nbits // 256)
    raw = b"".join(prf_block(stream) for _ in range(nblocks))
    return int.from_bytes(raw, "big") >> (256 * nblocks - nbits)


def gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def mod_pow(base: int, exponent: int, modulus: int) -> int:
    """Square-and-multiply modular exponentiation."""
    if modulus < 1:
        raise ParameterError("modulus must be >= 1")
    if exponent < 0:
        raise ParameterError("exponent must be non-negative")
    result = 1 % modulus
    base %= modulus
    while exponent:
        if exponent & 1:
            result = result * base % modulus
        base = base * base % modulus
        exponent >>= 1
    return result


def mod_inverse(a: int, m: int) -> int:
    """Inverse of a modulo m via extended Euclid; requires gcd(a, m) = 1."""
    if m < 2:
        raise ParameterError("modulus must be >= 2")
    old_r, r = a % m, m
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    if old_r != 1:
        raise NotInvertibleError(f"gcd({a}, {m}) = {old_r} != 1")
    return old_s % m


def isqrt(n: int) -> int:
    """Integer square root: largest r with r*r <= n."""
    if n < 0:
        raise ParameterError("isqrt of negative value")
    return math.isqrt(n)


def _mr_base_stream(n: int) -> SeedStream:
    # Bases are derived from n itself so the test is a pure function of n.
    material = b"miller-rabin-bases:" + n.to_bytes((n.bit_length() + 7) // 8, "big")
    return SeedStream(hashlib.sha256(material).digest())


def is_probable_prime(n: int, rounds: int = 64) -> bool:
    """Trial division by small primes, then `rounds` Miller-Rabin rounds.

    Bases come from a SeedStream derived from n, making the verdict
    deterministic and replayable.  Error probability for a composite that
    survives trial division is at most 4**-rounds.
    """
    if rounds < 1:
        raise ParameterError("rounds must be >= 1")
    if n < 2:
        return False
    if n in _SMALL_PRIME_SET:
        return True
    for p in _SMALL_PRIMES:
        if p * p > n:
            return True
        if n % p == 0:
            return False
    if n < _SMALL_PRIME_LIMIT:
        return True

    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    stream = _mr_base_stream(n)
    for _ in range(rounds):
        a = 2 + stream_uint(stream, n - 3)
        x = mod_pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime_in_progression(
    start: int, residue: int, modulus: int, max_steps: int, rounds: int = 64
) -> int:
    """Smallest prime p >= start with p == residue (mod modulus).

    Candidates go start', start'+modulus, start'+2*modulus, ... where
    start' is the first value >= start in the residue class; at most
    max_steps candidates are examined.
    """
    if modulus < 1:
        raise ParameterError("modulus must be >= 1")
    if not 0 <= residue < modulus:
        raise ParameterError("residue must satisfy 0 <= residue < modulus")
    if gcd(residue, modulus) != 1:
        raise ParameterError(f"gcd({residue}, {modulus}) != 1: class contains at most one prime")
    if max_steps < 1:
        raise ParameterError("max_steps must be >= 1")

    candidate = start + ((residue - start) % modulus)
    for _ in range(max_steps):
        if candidate >= 2 and is_probable_prime(candidate, rounds):
            return candidate
        candidate += modulus
    raise SearchExhaustedError(
        f"no prime == {residue} (mod {modulus}) within {max_steps} candidates from {start}"
    )


def sieve_range(lo: int, hi: int) -> list[int]:
    """All primes in [lo, hi], ascending.  Span is capped at 2**28."""
    if lo < 0 or hi < 0:
        raise ParameterError("bounds must be non-negative")
    if lo > hi:
        raise ParameterError("lo must not exceed hi")
    if hi > _MAX_SIEVE_HI:
        raise RangeTooLargeError(f"hi exceeds 2^40 budget: {hi}")
    if hi - lo > _MAX_SIEVE_SPAN:
        raise RangeTooLargeError(f"segment span exceeds 2^28: {hi - lo}")
    if hi < 2:
        return []

    mask = np.ones(hi - lo + 1, dtype=bool)
    for v in range(lo, min(hi, 1) + 1):
        mask[v - lo] = False
    for p in _base_primes(hi):
        first = max(p * p, ((lo + p - 1) // p) * p)
        if first > hi:
            continue
        mask[first - lo :: p] = False
    return [int(lo + i) for i in np.flatnonzero(mask)]


def _base_primes(hi: int) -> list[int]:
    root = math.isqrt(hi)
    if root <= 2048:
        return [p for p in _SMALL_PRIMES if p <= root]
    return _simple_sieve(root)


def first_primes(count: int) -> list[int]:
    """The first `count` primes."""
    if count < 0:
        raise ParameterError("count must be non-negative")
    primes: list[int] = []
    limit = max(32, count * 16)
    while len(primes) < count:
        primes = _simple_sieve(limit)
        limit *= 2
    return primes[:count]
