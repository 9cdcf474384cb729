"""Independent key validation.

Re-derives every invariant from the raw integers of a key document.  The
checks here intentionally do not call into keygen/numerics/entropy: the
primality test uses fixed prime bases instead of per-candidate streams,
exponent and proximity checks are exact integer comparisons written out
inline, and the entropy constraint is re-evaluated from scratch with
mpmath.  A bug in the generation path therefore cannot hide itself.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional, Union

from mpmath import mp, mpf

from .keyfile import LoadedKey
from .keygen import KeyPair

_VALIDATOR_BASES = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67,
    71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139,
    149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223,
    227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293,
    307, 311,
]

_ROUNDTRIP_MESSAGES = [2, 3, 5, 42, 1234567]


def _probably_prime(n: int) -> bool:
    """Miller-Rabin over 64 fixed prime bases (independent of the generator's test)."""
    if n < 2:
        return False
    for b in _VALIDATOR_BASES:
        if n == b:
            return True
        if n % b == 0:
            return False
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for b in _VALIDATOR_BASES:
        x = pow(b, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pairwise_proximity_ok(primes: list[int], gamma: Fraction) -> bool:
    num2 = gamma.numerator * gamma.numerator
    den2 = gamma.denominator * gamma.denominator
    for i in range(len(primes)):
        for j in range(i + 1, len(primes)):
            p, q = primes[i], primes[j]
            if den2 * (p - q) * (p - q) >= num2 * p * q:
                return False
    return True


def _entropy_constraint_ok(p: int, q: int, gamma: Fraction, beta: float) -> bool:
    # delta < gamma is already checked exactly; here only the H2 budget.
    with mp.workprec(192):
        delta = mpf(abs(p - q)) / mp.sqrt(mpf(p) * mpf(q))
        purity = (1 + mp.sqrt(1 - 4 * delta**2 / (2 + delta) ** 2)) / 2
        h2 = -mp.log(purity, 2)
        budget = mpf(beta) * mp.log(mpf(gamma.denominator) / mpf(gamma.numerator), 2)
        return h2 < budget


def _odd_prime_factors(m: int) -> list[int]:
    out = []
    n = m
    while n % 2 == 0:
        n //= 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 2
    if n > 1:
        out.append(n)
    return out


def validate_key(key: Union[LoadedKey, KeyPair]) -> list[str]:
    """All violated invariants of a key, empty when the key is valid."""
    if isinstance(key, KeyPair):
        variant = key.variant
        n, e, d = key.n, key.e, key.d
        primes = list(key.primes)
        m_modulus = key.m_modulus
        residues = list(key.residues)
        inner = list(key.inner_primes) if key.inner_primes else None
        gamma = key.params.resolved_gamma()
        beta = key.params.beta
        k = key.params.k
    else:
        variant = key.variant
        n, e, d = key.n, key.e, key.d
        primes = list(key.primes)
        m_modulus = key.m_modulus
        residues = list(key.residues)
        inner = list(key.inner_primes) if key.inner_primes else None
        gamma = key.gamma
        beta = key.beta
        k = key.k

    failures: list[str] = []

    if variant not in ("standard", "multiprime", "compatible"):
        failures.append(f"unknown variant {variant!r}")
        return failures
    if variant == "compatible" and not inner:
        failures.append("compatible key is missing inner primes")
        return failures

    product = 1
    phi = 1
    for p in primes:
        product *= p
        phi *= p - 1
    if product != n:
        failures.append("N != product of primes")
    for p in primes:
        if not _probably_prime(p):
            failures.append(f"composite prime entry {p}")
    if inner:
        for p in inner:
            if not _probably_prime(p):
                failures.append(f"composite inner prime {p}")

    if math.gcd(e, phi) != 1:
        failures.append("gcd(e, phi) != 1")
    elif e * d % phi != 1:
        failures.append("e*d != 1 (mod phi)")
    if d**10 <= n**3:
        failures.append("private exponent below d^10 > N^3 floor")

    congruent = inner if variant == "compatible" else primes
    if len(congruent) != len(residues):
        failures.append("residue list length mismatch")
    else:
        for i, (p, r) in enumerate(zip(congruent, residues)):
            if p % m_modulus != r:
                failures.append(f"prime[{i}] not congruent to its residue mod M")
    if len(set(residues)) != len(residues):
        failures.append("residues are not pairwise distinct mod M")
    for f in _odd_prime_factors(m_modulus):
        if f - 1 < len(residues):
            continue  # too few unit classes mod f to separate the residues
        classes = [r % f for r in residues]
        if len(set(classes)) != len(classes):
            failures.append(f"residues collide modulo factor {f} of M")

    if not 0 < gamma < 1:
        failures.append(f"gamma outside (0, 1): {gamma}")
    else:
        if variant == "standard":
            if not _pairwise_proximity_ok(primes, gamma):
                failures.append("prime pair violates exact proximity bound")
            elif not _entropy_constraint_ok(primes[0], primes[1], gamma, beta):
                failures.append("prime pair violates entropy budget")
        elif variant == "multiprime":
            if not _pairwise_proximity_ok(primes, gamma):
                failures.append("prime cluster violates exact pairwise proximity")
        else:
            if not _pairwise_proximity_ok(inner, gamma):
                failures.append("inner pair violates exact proximity bound")
            elif not _entropy_constraint_ok(inner[0], inner[1], gamma, beta):
                failures.append("inner pair violates entropy budget")
            failures.extend(_compatible_outer_failures(primes, inner, n, k))

    for msg in _roundtrip_failures(n, e, d):
        failures.append(msg)
    return failures


def _compatible_outer_failures(primes: list[int], inner: list[int], n: int, k: int) -> list[str]:
    out: list[str] = []
    if len(primes) != 2 or len(inner) != 2:
        return ["compatible key must hold exactly two outer and two inner primes"]
    # The shift is recoverable: inner primes are k//2 - shift bits wide.
    if inner[0].bit_length() != inner[1].bit_length():
        return ["inner primes have unequal widths; shift is ambiguous"]
    shift = k // 2 - inner[0].bit_length()
    if shift < 1:
        return ["inner primes too wide for any positive shift"]
    gap = abs(primes[0] - primes[1])
    if gap < (1 << (k // 2 - shift)):
        out.append("outer gap below 2^(k/2 - shift)")
    if gap**4 <= n:
        out.append("outer gap within Fermat-factoring reach (|p'-q'|^4 <= N)")
    return out


def _roundtrip_failures(n: int, e: int, d: int) -> list[str]:
    for msg in _ROUNDTRIP_MESSAGES:
        if msg >= n:
            continue
        if pow(pow(msg, e, n), d, n) != msg:
            return [f"RSA roundtrip failed for message {msg}"]
    return []
