"""Entropy-constrained RSA key generation.

Three variants share one pipeline:

* standard: two primes in prescribed residue classes mod M (a product of
  small primes), with |p - q| < gamma*sqrt(p*q) and the collision-entropy
  estimate under beta*log2(1/gamma).
* multiprime: m >= 3 primes, pairwise proximity-constrained, distinct
  residue classes.
* compatible: a close inner pair hidden in the low bits of outer primes
  p' = K*2^shift + p, q' = (K+j)*2^shift + q whose own gap is forced above
  2^(k/2 - shift), keeping Fermat-style factoring infeasible on the outer
  modulus.

Everything is a deterministic function of the parameters (seed included):
candidate bases, residues and search order are all derived from one
SHA-256 counter stream, and candidate scans always return the smallest
qualifying value, so two runs can never diverge.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import numerics
from .entropy import (
    EntropyReport,
    check_entropy_constraint,
    h2_from_delta,
    multiprime_h2_bound,
    proximity_delta,
    proximity_holds_exact,
    purity_lower,
)
from .errors import InfeasibleError, ParameterError, SearchExhaustedError
from .numerics import SeedStream

PRIME_TEST_ROUNDS = 64
DEFAULT_SHIFT = 100
MIN_SHIFT = 20


def default_gamma(k: int, epsilon: float) -> Fraction:
    """Rational approximation of k^(-1/2 + epsilon)."""
    if not 0 < epsilon < 0.5:
        raise ParameterError("epsilon must lie in (0, 1/2)")
    return Fraction(float(k) ** (-0.5 + epsilon)).limit_denominator(1 << 32)


@dataclass(frozen=True)
class KeyGenParams:
    """All tunables of the generation pipeline.

    gamma=None selects the k^(-1/2+epsilon) default; ell=None selects
    floor(log2 k) small primes for the congruence modulus.
    """

    k: int
    seed: bytes
    gamma: Optional[Fraction] = None
    beta: float = 0.9
    epsilon: float = 0.1
    ell: Optional[int] = None
    e: int = 65537
    max_candidates: int = 10_000
    max_restarts: int = 64

    def validate(self) -> None:
        if self.k < 16 or self.k % 2 != 0:
            raise ParameterError(f"k must be an even integer >= 16: {self.k}")
        if len(self.seed) != 32:
            raise ParameterError("seed must be exactly 32 bytes")
        if self.gamma is not None and not 0 < self.gamma < 1:
            raise ParameterError(f"gamma must lie in (0, 1): {self.gamma}")
        if not 0 < self.beta < 1:
            raise ParameterError(f"beta must lie in (0, 1): {self.beta}")
        if not 0 < self.epsilon < 0.5:
            raise ParameterError(f"epsilon must lie in (0, 1/2): {self.epsilon}")
        if self.ell is not None and self.ell < 1:
            raise ParameterError("ell must be >= 1")
        if self.e < 3 or self.e % 2 == 0:
            raise ParameterError(f"public exponent must be odd and >= 3: {self.e}")
        if self.max_candidates < 1 or self.max_restarts < 1:
            raise ParameterError("search limits must be positive")

    def resolved_gamma(self) -> Fraction:
        return self.gamma if self.gamma is not None else default_gamma(self.k, self.epsilon)

    def resolved_ell(self) -> int:
        return self.ell if self.ell is not None else max(1, self.k.bit_length() - 1)


@dataclass
class KeyPair:
    """Fully validated key material plus the data needed to re-validate it."""

    variant: str  # standard | multiprime | compatible
    n: int
    e: int
    d: int
    primes: list[int]
    m_modulus: int
    residues: list[int]
    phi: int
    entropy: EntropyReport
    params: KeyGenParams
    inner_primes: Optional[list[int]] = None


def build_small_modulus(ell: int) -> int:
    """Product of the first ell primes."""
    if ell < 1:
        raise ParameterError("ell must be >= 1")
    m = 1
    for p in numerics.first_primes(ell):
        m *= p
    return m


def _odd_prime_factors(m: int) -> list[int]:
    factors = []
    n = m
    while n % 2 == 0:
        n //= 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            factors.append(f)
            while n % f == 0:
                n //= f
        f += 2
    if n > 1:
        factors.append(n)
    return factors


def _totient(m: int) -> int:
    phi = m
    n = m
    for p in [2] + _odd_prime_factors(m):
        if n % p == 0:
            phi = phi // p * (p - 1)
    return phi


def derive_residues(m_modulus: int, stream: SeedStream, count: int) -> list[int]:
    """`count` distinct units of Z_M^*, spread across the factors of M.

    Residues are pairwise distinct modulo every odd prime factor p of M
    wherever that is achievable (p - 1 >= count); a factor with fewer unit
    classes than residues cannot separate them (pigeonhole), and modulo 2
    every unit is 1, so those factors are skipped.  Requesting more
    residues than Z_M^* has elements is infeasible outright.  Draws come
    from the stream by rejection sampling, so fixed (seed, M, count)
    always reproduces the same list.
    """
    if m_modulus < 2:
        raise ParameterError("modulus must be >= 2")
    if count < 1:
        raise ParameterError("count must be >= 1")
    if count > _totient(m_modulus):
        raise InfeasibleError(
            f"{count} distinct residues requested but |Z_{m_modulus}^*| is smaller"
        )

    separating = [p for p in _odd_prime_factors(m_modulus) if p - 1 >= count]
    chosen: list[int] = []
    seen_classes = [set() for _ in separating]
    seen_values: set[int] = set()
    while len(chosen) < count:
        candidate = numerics.stream_uint(stream, m_modulus)
        if candidate in seen_values or numerics.gcd(candidate, m_modulus) != 1:
            continue
        classes = [candidate % p for p in separating]
        if any(c in s for c, s in zip(classes, seen_classes)):
            continue
        chosen.append(candidate)
        seen_values.add(candidate)
        for c, s in zip(classes, seen_classes):
            s.add(c)
    return chosen


def _partner_candidates(p: int, residue: int, modulus: int, max_gap: int):
    """Candidates == residue (mod modulus) ordered by |q - p|, ties toward smaller q."""
    up = p + ((residue - p) % modulus)
    if up == p:
        up += modulus
    down = p - ((p - residue) % modulus)
    if down == p:
        down -= modulus
    while True:
        gap_up = up - p
        gap_down = p - down
        if gap_up >= max_gap and gap_down >= max_gap:
            return
        if gap_down <= gap_up and gap_down < max_gap and down >= 3:
            yield down
            down -= modulus
        elif gap_up < max_gap:
            yield up
            up += modulus
        else:
            down -= modulus


def _search_close_partner(
    p: int,
    residue: int,
    m_modulus: int,
    gamma: Fraction,
    beta: float,
    max_candidates: int,
) -> Optional[tuple[int, EntropyReport]]:
    """Nearest prime q == residue (mod M) inside (p - gamma*p, p + gamma*p)
    that passes the exact proximity and entropy constraints, or None."""
    # Smallest gap outside the open window |q - p| < gamma * p.
    max_gap = (gamma.numerator * p - 1) // gamma.denominator + 1
    examined = 0
    for q in _partner_candidates(p, residue, m_modulus, max_gap):
        if examined >= max_candidates:
            break
        examined += 1
        if not numerics.is_probable_prime(q, PRIME_TEST_ROUNDS):
            continue
        ok, report = check_entropy_constraint(p, q, gamma, beta)
        if ok:
            return q, report
    return None


def _dominant_pair_report(primes: list[int], gamma: Fraction, m: int) -> EntropyReport:
    """Multi-prime report: worst (largest-delta) pair drives the estimate."""
    worst = None
    for i in range(len(primes)):
        for j in range(i + 1, len(primes)):
            d = proximity_delta(primes[i], primes[j])
            if worst is None or d > worst:
                worst = d
    return EntropyReport(
        delta=worst,
        purity_lower=purity_lower(worst),
        h2_estimate_bits=h2_from_delta(worst),
        h2_bound_bits=multiprime_h2_bound(m, gamma),
        budget_bits=None,
        constraint_ok=True,
    )


def _finalize_exponents(e: int, primes: list[int]) -> Optional[tuple[int, int, int, int]]:
    """(n, phi, e, d) when e is usable and d clears the d^10 > n^3 floor."""
    n = 1
    phi = 1
    for p in primes:
        n *= p
        phi *= p - 1
    if numerics.gcd(e, phi) != 1:
        return None
    d = numerics.mod_inverse(e, phi)
    if d**10 <= n**3:
        return None
    return n, phi, e, d


def generate_keypair(params: KeyGenParams) -> KeyPair:
    """Two-prime generation: congruence classes, exact proximity, entropy cap.

    p is the next prime == a (mod M) at or above a PRF-drawn k/2-bit base;
    q is found by scanning the residue class of b outward from p, closest
    candidate first, so the smallest compliant gap wins.  Restarts draw a
    fresh base from the same stream.
    """
    params.validate()
    gamma = params.resolved_gamma()
    m_modulus = build_small_modulus(params.resolved_ell())
    stream = SeedStream(params.seed)
    res_a, res_b = derive_residues(m_modulus, stream, 2)

    half_bits = params.k // 2
    if m_modulus.bit_length() > half_bits:
        raise ParameterError(
            f"congruence modulus ({m_modulus.bit_length()} bits) too wide for {half_bits}-bit primes"
        )
    for _ in range(params.max_restarts):
        p, q, report = _attempt_pair(
            stream, half_bits, res_a, res_b, m_modulus, gamma, params
        )
        if p is None:
            continue
        done = _finalize_exponents(params.e, [p, q])
        if done is None:
            continue
        n, phi, e, d = done
        return KeyPair(
            variant="standard",
            n=n,
            e=e,
            d=d,
            primes=[p, q],
            m_modulus=m_modulus,
            residues=[res_a, res_b],
            phi=phi,
            entropy=report,
            params=params,
            inner_primes=None,
        )
    raise SearchExhaustedError(
        f"no compliant pair within {params.max_restarts} restarts (k={params.k}, gamma={gamma})"
    )


def _attempt_pair(stream, half_bits, res_a, res_b, m_modulus, gamma, params):
    base = numerics.stream_bits(stream, half_bits)
    base |= 3 << (half_bits - 2)  # keep p*q at full width
    try:
        p = numerics.next_prime_in_progression(
            base, res_a, m_modulus, params.max_candidates, PRIME_TEST_ROUNDS
        )
    except SearchExhaustedError:
        return None, None, None
    found = _search_close_partner(
        p, res_b, m_modulus, gamma, params.beta, params.max_candidates
    )
    if found is None:
        return None, None, None
    q, report = found
    return p, q, report


def generate_multiprime(params: KeyGenParams, m: int) -> KeyPair:
    """m >= 3 primes of k//m bits, pairwise |p_i - p_j| < gamma*sqrt(p_i*p_j).

    The first prime anchors the cluster; each further prime is the nearest
    candidate in its own residue class that keeps every pairwise gap legal.
    """
    params.validate()
    if m < 3:
        raise ParameterError(f"multi-prime count must be >= 3: {m}")
    gamma = params.resolved_gamma()
    m_modulus = build_small_modulus(params.resolved_ell())
    stream = SeedStream(params.seed)
    residues = derive_residues(m_modulus, stream, m)

    prime_bits = params.k // m
    if prime_bits < 8:
        raise ParameterError(f"k={params.k} too small for {m} primes")
    if m_modulus.bit_length() > prime_bits:
        raise ParameterError(
            f"congruence modulus ({m_modulus.bit_length()} bits) too wide for {prime_bits}-bit primes"
        )

    for _ in range(params.max_restarts):
        primes = _attempt_cluster(stream, prime_bits, residues, m_modulus, gamma, params)
        if primes is None:
            continue
        done = _finalize_exponents(params.e, primes)
        if done is None:
            continue
        n, phi, e, d = done
        return KeyPair(
            variant="multiprime",
            n=n,
            e=e,
            d=d,
            primes=primes,
            m_modulus=m_modulus,
            residues=residues,
            phi=phi,
            entropy=_dominant_pair_report(primes, gamma, m),
            params=params,
            inner_primes=None,
        )
    raise SearchExhaustedError(
        f"no compliant {m}-prime cluster within {params.max_restarts} restarts"
    )


def _attempt_cluster(stream, prime_bits, residues, m_modulus, gamma, params):
    base = numerics.stream_bits(stream, prime_bits)
    base |= 3 << (prime_bits - 2)
    try:
        anchor = numerics.next_prime_in_progression(
            base, residues[0], m_modulus, params.max_candidates, PRIME_TEST_ROUNDS
        )
    except SearchExhaustedError:
        return None
    primes = [anchor]
    max_gap = gamma.numerator * anchor // gamma.denominator + 1
    for residue in residues[1:]:
        chosen = None
        examined = 0
        for q in _partner_candidates(anchor, residue, m_modulus, max_gap):
            if examined >= params.max_candidates:
                break
            examined += 1
            if not numerics.is_probable_prime(q, PRIME_TEST_ROUNDS):
                continue
            if all(proximity_holds_exact(p, q, gamma) for p in primes):
                chosen = q
                break
        if chosen is None:
            return None
        primes.append(chosen)
    return primes


def generate_compatible(params: KeyGenParams, shift: int = DEFAULT_SHIFT) -> KeyPair:
    """Layered construction: close inner pair, wide-gap outer pair.

    Inner primes p, q of k//2 - shift bits are generated exactly like the
    standard variant.  Outer primes are p' = K*2^shift + p and
    q' = (K + j)*2^shift + q with j large enough that
    |p' - q'| >= 2^(k//2 - shift) holds unconditionally:
    j >= ceil((|p - q| + 2*target_gap) / 2^shift).
    """
    params.validate()
    if shift < MIN_SHIFT:
        raise ParameterError(f"shift must be >= {MIN_SHIFT}: {shift}")
    inner_bits = params.k // 2 - shift
    if inner_bits < 16:
        raise ParameterError(
            f"k={params.k} with shift={shift} leaves only {inner_bits} bits for inner primes"
        )

    gamma = params.resolved_gamma()
    # The inner pair is its own generation problem at effective size
    # 2*inner_bits, so the default congruence modulus scales with that,
    # not with the outer k; an explicit ell is honored as given.
    inner_ell = params.ell if params.ell is not None else max(1, (2 * inner_bits).bit_length() - 1)
    m_modulus = build_small_modulus(inner_ell)
    stream = SeedStream(params.seed)
    res_a, res_b = derive_residues(m_modulus, stream, 2)
    if m_modulus.bit_length() > inner_bits:
        raise ParameterError(
            f"congruence modulus ({m_modulus.bit_length()} bits) too wide for {inner_bits}-bit inner primes"
        )

    target_gap = 1 << (params.k // 2 - shift)
    scale = 1 << shift
    for _ in range(params.max_restarts):
        p, q, report = _attempt_pair(
            stream, inner_bits, res_a, res_b, m_modulus, gamma, params
        )
        if p is None:
            continue
        # Inner widths must be exact so the shift stays recoverable from
        # the key file (validators re-derive it from the inner bit length).
        if p.bit_length() != inner_bits or q.bit_length() != inner_bits:
            continue
        outer = _attempt_outer(stream, params, shift, p, q, target_gap, scale)
        if outer is None:
            continue
        p_outer, q_outer = outer
        done = _finalize_exponents(params.e, [p_outer, q_outer])
        if done is None:
            continue
        n, phi, e, d = done
        return KeyPair(
            variant="compatible",
            n=n,
            e=e,
            d=d,
            primes=[p_outer, q_outer],
            m_modulus=m_modulus,
            residues=[res_a, res_b],
            phi=phi,
            entropy=report,
            params=params,
            inner_primes=[p, q],
        )
    raise SearchExhaustedError(
        f"no compatible-layer key within {params.max_restarts} restarts (k={params.k}, shift={shift})"
    )


def _attempt_outer(stream, params, shift, p, q, target_gap, scale):
    outer_k_bits = params.k // 2 - shift  # width of K so that p' spans k//2 bits
    k_base = numerics.stream_bits(stream, outer_k_bits)
    k_base |= 1 << (outer_k_bits - 1)

    p_outer = None
    for step in range(params.max_candidates):
        candidate = (k_base + step) * scale + p
        if numerics.is_probable_prime(candidate, PRIME_TEST_ROUNDS):
            p_outer = candidate
            k_chosen = k_base + step
            break
    if p_outer is None:
        return None

    j_floor = -(-(abs(p - q) + 2 * target_gap) // scale)
    for step in range(params.max_candidates):
        j = j_floor + step
        candidate = (k_chosen + j) * scale + q
        if numerics.is_probable_prime(candidate, PRIME_TEST_ROUNDS):
            gap = abs(candidate - p_outer)
            if gap < target_gap:  # unreachable by construction; guard anyway
                return None
            return p_outer, candidate
    return None
