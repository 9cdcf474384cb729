"""Security metrics for a key or prime pair.

Quantum side: the exact minimal angular separation of period-finding
phases gcd(p-1, q-1) / ((p-1)(q-1)), the state distinguishability bound
2*exp(-(p-q)^2 / (8*min(p,q))), and order-of-magnitude cost estimates
(gamma^-2 * N measurements, gamma^-1 * k^1.5 operations, mutual
information 2*gamma, success probability 2^-H2).  Asymptotic estimates use
constant 1 and are labeled estimates; nothing here asserts a direction.

Classical side: exact Fermat-factoring iteration counts, the d^10 > N^3
private-exponent floor, and the |p-q|^4 > N gap comparison, all in exact
integer arithmetic.

The lattice embedding maps a residue to the coefficient vector
c[i] = floor(value * Re(zeta^i) / sqrt(N)) with zeta = exp(2*pi*i/m_root).
The real part is taken before flooring (flooring a complex number is
undefined); a "magnitude" mode flooring |value * zeta^i| / sqrt(N) exists
for comparison.  Angles with rational cosine (0, +-1/2, +-1) are evaluated
in exact integer arithmetic so sign-of-zero noise can never flip a floor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from mpmath import mp, mpf

from .entropy import h2_estimate
from .errors import ParameterError
from .keyfile import LoadedKey
from .keygen import KeyPair
from .numerics import is_probable_prime, isqrt

_RATIONAL_COS = {
    Fraction(0, 1): Fraction(1),
    Fraction(1, 6): Fraction(1, 2),
    Fraction(1, 4): Fraction(0),
    Fraction(1, 3): Fraction(-1, 2),
    Fraction(1, 2): Fraction(-1),
    Fraction(2, 3): Fraction(-1, 2),
    Fraction(3, 4): Fraction(0),
    Fraction(5, 6): Fraction(1, 2),
}


@dataclass
class QuantumReport:
    """Order estimates and exact quantities for one prime pair."""

    angular_separation: Fraction
    angular_bound: mpf  # gamma / sqrt(N)
    distinguishability_bound: mpf
    measurement_estimate: mpf  # gamma^-2 * N
    query_estimate: mpf  # gamma^-1
    quantum_ops_estimate: mpf  # gamma^-1 * k^1.5
    mutual_info_bound: mpf  # 2 * gamma
    succ_prob_bound: mpf  # 2^-H2
    fano_lower_bound: Optional[mpf] = None  # kappa * k * log2(k) / eps, when kappa given

    def to_dict(self) -> dict:
        def fmt(x):
            return None if x is None else mp.nstr(x, 24, strip_zeros=True)

        return {
            "angular_separation": f"{self.angular_separation.numerator}/{self.angular_separation.denominator}",
            "angular_bound": fmt(self.angular_bound),
            "distinguishability_bound": fmt(self.distinguishability_bound),
            "measurement_estimate": fmt(self.measurement_estimate),
            "query_estimate": fmt(self.query_estimate),
            "quantum_ops_estimate": fmt(self.quantum_ops_estimate),
            "mutual_info_bound": fmt(self.mutual_info_bound),
            "succ_prob_bound": fmt(self.succ_prob_bound),
            "fano_lower_bound": fmt(self.fano_lower_bound),
        }


# Classical factoring costs are quoted symbolically only; no constants are
# attached and nothing evaluates them.
GNFS_COST_SYMBOLIC = "L_N[1/3, cbrt(64/9)]"
ECM_COST_SYMBOLIC = "exp((sqrt(2) + o(1)) * sqrt(ln p * ln ln p))"


@dataclass
class ClassicalReport:
    """Classical attack posture; Fermat fields are None for multi-prime keys."""

    wiener_safe: bool
    fermat_applicable: bool
    fermat_iterations_exact: Optional[int]
    fermat_feasible: Optional[bool]
    gap_exceeds_quarter_root: Optional[bool]

    def to_dict(self) -> dict:
        return {
            "wiener_safe": self.wiener_safe,
            "fermat_applicable": self.fermat_applicable,
            "fermat_iterations_exact": (
                None if self.fermat_iterations_exact is None else hex(self.fermat_iterations_exact)
            ),
            "fermat_feasible": self.fermat_feasible,
            "gap_exceeds_quarter_root": self.gap_exceeds_quarter_root,
            "gnfs_cost_symbolic": GNFS_COST_SYMBOLIC,
            "ecm_cost_symbolic": ECM_COST_SYMBOLIC,
        }


@dataclass
class FermatResult:
    found: bool
    iterations: int
    factors: Optional[tuple[int, int]] = None


@dataclass
class LatticeEmbedding:
    n: int
    m_root: int
    coefficients: list[int]
    norm_of_difference: Optional[float] = None


def angular_separation(p: int, q: int) -> Fraction:
    """Minimum nonzero |s/(p-1) - t/(q-1)| = gcd(p-1, q-1) / ((p-1)(q-1))."""
    if p == q:
        raise ParameterError("primes must be distinct")
    for v in (p, q):
        if not is_probable_prime(v, 32):
            raise ParameterError(f"{v} is not prime")
    g = math.gcd(p - 1, q - 1)
    return Fraction(g, (p - 1) * (q - 1))


def distinguishability_bound(p: int, q: int) -> mpf:
    """Trace-distance bound 2*exp(-(p-q)^2 / (8*min(p,q)))."""
    if p == q:
        raise ParameterError("inputs must be distinct")
    with mp.workprec(96):
        return 2 * mp.exp(-mpf((p - q) ** 2) / (8 * min(p, q)))


def complexity_report(
    p: int,
    q: int,
    gamma: Fraction,
    k: Optional[int] = None,
    kappa: Optional[float] = None,
    eps_param: Optional[float] = None,
) -> QuantumReport:
    """All quantum-side metrics for the pair, asymptotic constants set to 1.

    fano_lower_bound is only filled when the caller supplies kappa (and a
    positive eps_param); no procedure computes kappa here.
    """
    n = p * q
    if k is None:
        k = n.bit_length()
    with mp.workprec(96):
        g = mpf(gamma.numerator) / mpf(gamma.denominator)
        fano = None
        if kappa is not None:
            if eps_param is None or eps_param <= 0:
                raise ParameterError("fano bound needs a positive eps_param")
            fano = mpf(kappa) * k * mp.log(k, 2) / mpf(eps_param)
        return QuantumReport(
            angular_separation=angular_separation(p, q),
            angular_bound=g / mp.sqrt(mpf(n)),
            distinguishability_bound=distinguishability_bound(p, q),
            measurement_estimate=mpf(n) / (g * g),
            query_estimate=1 / g,
            quantum_ops_estimate=mpf(k) ** mpf("1.5") / g,
            mutual_info_bound=2 * g,
            succ_prob_bound=mpf(2) ** (-h2_estimate(p, q)),
            fano_lower_bound=fano,
        )


def _ceil_sqrt(n: int) -> int:
    r = isqrt(n)
    return r if r * r == n else r + 1


def fermat_attack(n: int, max_iters: int) -> FermatResult:
    """Fermat factorization: x = ceil(sqrt(N)), x+1, ... until x^2 - N is square.

    Exhausting max_iters is a result, not an error.  For N = p*q the hit
    comes at iteration (p+q)/2 - ceil(sqrt(N)) + 1.
    """
    if max_iters < 1:
        raise ParameterError("max_iters must be >= 1")
    if n < 9 or n % 2 == 0:
        raise ParameterError("N must be odd and >= 9")
    x = _ceil_sqrt(n)
    for i in range(1, max_iters + 1):
        diff = x * x - n
        y = isqrt(diff)
        if y * y == diff:
            return FermatResult(found=True, iterations=i, factors=(x - y, x + y))
        x += 1
    return FermatResult(found=False, iterations=max_iters)


def fermat_iterations_analytic(p: int, q: int) -> int:
    """Iteration count at which fermat_attack(p*q) succeeds: (p+q)/2 - ceil(sqrt(N)) + 1."""
    return (p + q) // 2 - _ceil_sqrt(p * q) + 1


def classical_report(key: Union[KeyPair, LoadedKey], fermat_budget: int) -> ClassicalReport:
    """Classical attack posture of a key; exact integer comparisons throughout."""
    if fermat_budget < 1:
        raise ParameterError("fermat_budget must be >= 1")
    n, d = key.n, key.d
    wiener_safe = d**10 > n**3
    if len(key.primes) != 2:
        return ClassicalReport(
            wiener_safe=wiener_safe,
            fermat_applicable=False,
            fermat_iterations_exact=None,
            fermat_feasible=None,
            gap_exceeds_quarter_root=None,
        )
    p, q = key.primes
    iters = fermat_iterations_analytic(p, q)
    gap = abs(p - q)
    return ClassicalReport(
        wiener_safe=wiener_safe,
        fermat_applicable=True,
        fermat_iterations_exact=iters,
        fermat_feasible=iters <= fermat_budget,
        gap_exceeds_quarter_root=gap**4 > n,
    )


def _floor_scaled_inv_sqrt(a_num: int, b_den: int, n_value: int) -> int:
    """floor(a_num / (b_den * sqrt(n_value))) in exact integer arithmetic."""
    root = isqrt(n_value)
    if root * root == n_value:
        return a_num // (b_den * root)
    if a_num == 0:
        return 0
    mag = isqrt(a_num * a_num // (b_den * b_den * n_value))
    # a/(b*sqrt(n)) is irrational here, so there is no integer boundary case.
    return mag if a_num > 0 else -mag - 1


def lattice_embed(
    value: int,
    n_modulus: int,
    n: int,
    m_root: int,
    mode: str = "real",
    precision_bits: int = 128,
) -> LatticeEmbedding:
    """Coefficient vector floor(value * Re(zeta^i) / sqrt(N)), i = 0..n-1.

    Floors go toward -infinity.  mode="magnitude" floors
    |value * zeta^i| / sqrt(N) instead (constant across i since |zeta| = 1).
    """
    if not 1 <= value < n_modulus:
        raise ParameterError("value must satisfy 1 <= value < N")
    if n < 1 or m_root < 1:
        raise ParameterError("n and m_root must be >= 1")
    if mode not in ("real", "magnitude"):
        raise ParameterError(f"unknown mode {mode!r}")

    coeffs: list[int] = []
    with mp.workprec(precision_bits):
        root_n = mp.sqrt(mpf(n_modulus))
        for i in range(n):
            if mode == "magnitude":
                coeffs.append(int(mp.floor(mpf(value) / root_n)))
                continue
            turn = Fraction(i % m_root, m_root)
            rational = _RATIONAL_COS.get(turn)
            if rational is not None:
                coeffs.append(
                    _floor_scaled_inv_sqrt(
                        value * rational.numerator, rational.denominator, n_modulus
                    )
                )
            else:
                cos_i = mp.cos(2 * mp.pi * turn.numerator / turn.denominator)
                coeffs.append(int(mp.floor(mpf(value) * cos_i / root_n)))
    return LatticeEmbedding(n=n, m_root=m_root, coefficients=coeffs)


def embedding_difference(
    p: int, q: int, n_modulus: int, n: int, m_root: int, precision_bits: int = 128
) -> LatticeEmbedding:
    """Coefficient-wise psi(p) - psi(q) with its Euclidean norm attached."""
    emb_p = lattice_embed(p, n_modulus, n, m_root, precision_bits=precision_bits)
    emb_q = lattice_embed(q, n_modulus, n, m_root, precision_bits=precision_bits)
    diff = [a - b for a, b in zip(emb_p.coefficients, emb_q.coefficients)]
    norm = math.sqrt(sum(c * c for c in diff))
    return LatticeEmbedding(n=n, m_root=m_root, coefficients=diff, norm_of_difference=norm)


def embedding_gap_norm(
    p: int,
    q: int,
    n_modulus: int,
    n: int,
    m_root: int,
    gamma: Optional[Fraction] = None,
    precision_bits: int = 128,
) -> tuple[float, Optional[bool]]:
    """Euclidean norm of psi(p) - psi(q), and (when gamma given) whether it
    stays under gamma * sqrt(n).  The comparison is reported, not asserted."""
    diff = embedding_difference(p, q, n_modulus, n, m_root, precision_bits)
    within = None
    if gamma is not None:
        # norm < gamma*sqrt(n)  <=>  den^2 * norm^2 < num^2 * n, exactly.
        sq = sum(c * c for c in diff.coefficients)
        within = gamma.denominator**2 * sq < gamma.numerator**2 * n
    return diff.norm_of_difference, within
