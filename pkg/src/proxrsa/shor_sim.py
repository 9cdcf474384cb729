"""Exact period-finding measurement statistics for toy moduli (N <= 2^20).

The measured register follows the textbook post-QFT law with offset 0 and
m = ceil(Q/r) superposed periods:

    probs[y] = |sum_{j<m} exp(2*pi*i*j*r*y/Q)|^2 / (Q*m)

which collapses to m/Q at y with r*y == 0 (mod Q), to 0 where the
geometric sum closes (Q | m*t), and to a sin-ratio elsewhere.  The exact
sum over all y is 1, so renormalization is a no-op up to float error; the
factor is still computed and checked against 1e-9.

Success accounting never needs the full Q-vector: a measurement y can only
recover the period when y lies within 1/2 of c*Q/rhat for some divisor
rhat of r (convergent denominators below N), so every contributing y sits
within 1 of a multiple of Q/r.  Enumerating those ~2r candidates and
scoring each with the closed form reproduces the full sum exactly, which
keeps Q = N^2 tractable at any toy size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .entropy import proximity_delta, proximity_holds_exact
from .errors import ParameterError
from .numerics import SeedStream, gcd, sieve_range, stream_uint

MAX_TOY_MODULUS = 1 << 20
MAX_DENSE_Q = 1 << 22


@dataclass
class ShorDistribution:
    n: int
    a: int
    r: int
    q_size: int
    probs: Optional[np.ndarray]
    success_prob: float
    success_prob_refined: float


@dataclass
class ComparisonRow:
    n: int
    p: int
    q: int
    delta: float
    angular_separation_num: int
    angular_separation_den: int
    mean_success_prob: float
    mean_success_prob_refined: float
    group: str


@dataclass
class ComparisonReport:
    bit_size: int
    gamma_close: float
    q_size: Optional[int]
    bases_per_modulus: int
    rows: list[ComparisonRow] = field(default_factory=list)

    def group_summary(self) -> dict:
        out = {}
        for group in ("close", "control"):
            rows = [r for r in self.rows if r.group == group]
            if not rows:
                continue
            out[group] = {
                "count": len(rows),
                "mean_delta": sum(r.delta for r in rows) / len(rows),
                "mean_success_prob": sum(r.mean_success_prob for r in rows) / len(rows),
                "mean_success_prob_refined": sum(r.mean_success_prob_refined for r in rows)
                / len(rows),
            }
        return out


def multiplicative_order(a: int, n: int) -> int:
    """Smallest r >= 1 with a^r == 1 (mod n), by iterated multiplication."""
    if n < 2 or n > MAX_TOY_MODULUS:
        raise ParameterError(f"modulus must lie in [2, 2^20]: {n}")
    if not 1 <= a < n:
        raise ParameterError(f"base must satisfy 1 <= a < n: {a}")
    if gcd(a, n) != 1:
        raise ParameterError(f"gcd({a}, {n}) != 1")
    x = a % n
    r = 1
    while x != 1:
        x = x * a % n
        r += 1
    return r


def default_q(n: int) -> int:
    """Smallest power of two >= n^2."""
    return 1 << (n * n - 1).bit_length()


def circuit_order_estimates(n: int) -> dict:
    """Closed-form circuit cost shapes for a k-bit modulus, constants set to 1.

    Reported for context only; nothing simulates at the gate level.
    """
    k = n.bit_length()
    log_k = math.log2(k) if k > 1 else 0.0
    loglog_k = math.log2(log_k) if log_k > 1 else 0.0
    return {
        "modulus_bits": k,
        "depth_symbolic": "k * log2(k) * log2(log2(k))",
        "depth_order": k * log_k * loglog_k,
        "width_symbolic": "k",
        "width_order": k,
    }


def _check_q(q_size: int) -> None:
    if q_size < 1 or q_size & (q_size - 1):
        raise ParameterError(f"Q must be a power of two: {q_size}")


def _abs_sin_pi(v: int, q_size: int) -> float:
    """|sin(pi * v / Q)| via integer folding into [0, Q/2].

    |sin(pi*x)| has period 1 and is symmetric about 1/2, so the argument
    never leaves [0, pi/2] and float sin keeps full relative precision
    even when Q is 2^40.
    """
    v %= q_size
    v = min(v, q_size - v)
    return math.sin(math.pi * v / q_size)


def _prob_at(y: int, r: int, q_size: int) -> float:
    """Closed-form probability of measuring y; exact in the degenerate branches."""
    m = -(-q_size // r)
    t = r * y % q_size
    if t == 0:
        return m / q_size
    if m * t % q_size == 0:
        return 0.0
    ratio = _abs_sin_pi(m * t, q_size) / _abs_sin_pi(t, q_size)
    return ratio * ratio / (q_size * m)


def measurement_distribution(r: int, q_size: int) -> np.ndarray:
    """Full probability vector over y in [0, Q); only for Q <= 2^22.

    The pre-normalization sum must land within 1e-9 of 1; the vector is
    then rescaled to sum to exactly 1.
    """
    _check_q(q_size)
    if not 1 <= r <= q_size:
        raise ParameterError(f"period must satisfy 1 <= r <= Q: {r}")
    if q_size > MAX_DENSE_Q:
        raise ParameterError(f"dense distribution capped at Q = 2^22, got {q_size}")

    m = -(-q_size // r)
    y = np.arange(q_size, dtype=np.int64)
    t = (np.int64(r) * y) % q_size
    probs = np.zeros(q_size, dtype=np.float64)
    peak = t == 0
    probs[peak] = m / q_size
    mt = np.int64(m) * t
    live = ~peak & (mt % q_size != 0)
    # fold into [0, Q/2] in integers: |sin(pi*x)| is 1-periodic, symmetric
    top = mt[live] % q_size
    top = np.minimum(top, q_size - top).astype(np.float64)
    tl = np.minimum(t[live], q_size - t[live]).astype(np.float64)
    ratio = np.sin(np.pi * top / q_size) / np.sin(np.pi * tl / q_size)
    probs[live] = ratio * ratio / (q_size * m)

    total = float(probs.sum())
    if abs(total - 1.0) >= 1e-9:
        raise ArithmeticError(f"distribution normalization drifted: sum = {total!r}")
    return probs / total


def recover_period(y: int, q_size: int, n: int) -> Optional[int]:
    """Continued-fraction post-processing of a measurement.

    Returns the smallest convergent denominator rhat < n of y/Q with
    |y/Q - c/rhat| <= 1/(2Q), or None.  Denominator 1 is rejected as a
    trivial period.  All comparisons are exact integer arithmetic.
    """
    if not 0 <= y < q_size:
        raise ParameterError(f"measurement must satisfy 0 <= y < Q: {y}")
    num, den = y, q_size
    # Convergent recurrence h_i = a_i*h_{i-1} + h_{i-2}, seeded with
    # (h_{-2}, h_{-1}) = (0, 1) and (k_{-2}, k_{-1}) = (1, 0).
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    while den:
        a_i = num // den
        num, den = den, num - a_i * den
        h_prev, h = h, a_i * h + h_prev
        k_prev, k = k, a_i * k + k_prev
        if k >= n:
            break
        # |y/Q - h/k| <= 1/(2Q)  <=>  2*|y*k - h*Q| <= k
        if k > 1 and 2 * abs(y * k - h * q_size) <= k:
            return k
    return None


def _refined_period(r_hat: int, a: int, n: int) -> Optional[int]:
    """First multiple r_hat*f (f <= log2 n) annihilated by a, if any."""
    limit = max(1, int(math.log2(n)))
    for f in range(1, limit + 1):
        if pow(a, r_hat * f, n) == 1:
            return r_hat * f
    return None


def _success_candidates(r: int, q_size: int):
    """Every y that could recover r sits within 1 of some c*Q/r; enumerate those."""
    seen = set()
    for c in range(r):
        center = c * q_size // r
        for y in (center - 1, center, center + 1, center + 2):
            if 0 <= y < q_size and y not in seen:
                seen.add(y)
                yield y


def shor_success_probability(
    n: int, a: int, q_size: Optional[int] = None, refine: bool = True
) -> float:
    """Probability that one measurement recovers the exact order of a mod n.

    Sums probs[y] over every y whose continued-fraction denominator equals
    r (after the small-factor refinement when enabled).  Equal to the full
    sum over all Q outcomes; see module docstring for why the sparse
    enumeration is lossless.
    """
    if a < 2:
        raise ParameterError(f"base must be >= 2: {a}")
    if q_size is None:
        q_size = default_q(n)
    _check_q(q_size)
    r = multiplicative_order(a, n)
    if r > q_size:
        raise ParameterError(f"Q = {q_size} cannot resolve period {r}")

    total = 0.0
    for y in _success_candidates(r, q_size):
        r_hat = recover_period(y, q_size, n)
        if r_hat is None:
            continue
        if refine:
            candidate = _refined_period(r_hat, a, n)
        else:
            candidate = r_hat
        if candidate == r:
            total += _prob_at(y, r, q_size)
    return total


def shor_distribution(n: int, a: int, q_size: Optional[int] = None) -> ShorDistribution:
    """Distribution summary for one (n, a); dense vector included when Q permits."""
    if q_size is None:
        q_size = default_q(n)
    r = multiplicative_order(a, n)
    probs = measurement_distribution(r, q_size) if q_size <= MAX_DENSE_Q else None
    return ShorDistribution(
        n=n,
        a=a,
        r=r,
        q_size=q_size,
        probs=probs,
        success_prob=shor_success_probability(n, a, q_size, refine=False),
        success_prob_refined=shor_success_probability(n, a, q_size, refine=True),
    )


def draw_bases(stream: SeedStream, n: int, count: int) -> list[int]:
    bases: list[int] = []
    seen = set()
    while len(bases) < count:
        a = 2 + stream_uint(stream, n - 3)
        if a in seen or gcd(a, n) != 1:
            continue
        seen.add(a)
        bases.append(a)
    return bases


def _sample_indices(stream: SeedStream, size: int, count: int) -> list[int]:
    pool = list(range(size))
    chosen = []
    for _ in range(count):
        idx = stream_uint(stream, len(pool))
        chosen.append(pool.pop(idx))
    return chosen


def compare_moduli(
    bit_size: int,
    n_pairs: int,
    gamma_close: float,
    stream: SeedStream,
    q_size: Optional[int] = None,
    bases_per_modulus: int = 20,
) -> ComparisonReport:
    """Success statistics for close prime pairs versus wide ("control") pairs.

    Close pairs are consecutive prime pairs with delta < gamma_close;
    control pairs are consecutive pairs whose delta lies in the top
    quartile for the size.  The report is data only: no direction is
    asserted.
    """
    if not 8 <= bit_size <= 20:
        raise ParameterError(f"bit_size must lie in [8, 20]: {bit_size}")
    if n_pairs < 1:
        raise ParameterError("n_pairs must be >= 1")
    if not 0 < gamma_close < 2:
        raise ParameterError(f"gamma_close must lie in (0, 2): {gamma_close}")
    close_gamma = Fraction(gamma_close).limit_denominator(1 << 32)

    # Population: every pair from a factor-8 band of primes whose product
    # has exactly bit_size bits, so both balanced and lopsided pairs occur.
    half = bit_size // 2
    primes = sieve_range(1 << (half - 1), 1 << (half + 2))
    candidates = []
    for i, p in enumerate(primes):
        for q in primes[i + 1 :]:
            n = p * q
            if n.bit_length() < bit_size:
                continue
            if n.bit_length() > bit_size:
                break
            candidates.append((p, q, float(proximity_delta(p, q))))

    close_pool = [c for c in candidates if proximity_holds_exact(c[0], c[1], close_gamma)]
    by_delta = sorted(candidates, key=lambda c: c[2])
    control_pool = by_delta[3 * len(by_delta) // 4 :]
    if len(close_pool) < n_pairs or len(control_pool) < n_pairs:
        raise ParameterError(
            f"insufficient prime pairs at {bit_size} bits: "
            f"{len(close_pool)} close / {len(control_pool)} control, need {n_pairs}"
        )

    report = ComparisonReport(
        bit_size=bit_size,
        gamma_close=gamma_close,
        q_size=q_size,
        bases_per_modulus=bases_per_modulus,
    )
    for group, pool in (("close", close_pool), ("control", control_pool)):
        picks = _sample_indices(stream, len(pool), n_pairs)
        for idx in sorted(picks):
            p, q, delta = pool[idx]
            n = p * q
            q_here = q_size if q_size is not None else default_q(n)
            bases = draw_bases(stream, n, bases_per_modulus)
            plain = [shor_success_probability(n, a, q_here, refine=False) for a in bases]
            refined = [shor_success_probability(n, a, q_here, refine=True) for a in bases]
            g = math.gcd(p - 1, q - 1)
            report.rows.append(
                ComparisonRow(
                    n=n,
                    p=p,
                    q=q,
                    delta=delta,
                    angular_separation_num=g,
                    angular_separation_den=(p - 1) * (q - 1),
                    mean_success_prob=sum(plain) / len(plain),
                    mean_success_prob_refined=sum(refined) / len(refined),
                    group=group,
                )
            )
    return report
