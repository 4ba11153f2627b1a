"""Sine-product identities behind the eigenvalue inversion.

The product of all eigenvalues of the discretized operator reduces to the
constant 2**n (the Cartan-matrix sine formula).  Regrouping that product by
the odd part of each index collapses the reciprocal of a single eigenvalue
to n-1 sine-squared factors: with j = 2**m * i (i odd),

    8 / lambda_j = [ sin(pi/6)**m
                     * prod_{k=2..n-m} sin(|2**k - (i mod 2**(k+1))| / 2**(k+1) * pi) ]**2

which is what the rotation circuits realize on probability amplitudes.
Identity checks run in log-domain so n up to 14 stays stable.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .poisson import eigenvalue

LN2 = math.log(2.0)
MAX_IDENTITY_N = 14


@dataclass(frozen=True)
class OddFactorization:
    """j = 2**m * i with i odd and m maximal (the trailing-zero count)."""

    j: int
    m: int
    i: int


@dataclass(frozen=True)
class AngleSequence:
    """The n-1 rotation angles whose sine product squares to 8/lambda_j.

    angles[s] for s < m is the constant pi/6; angles[s] for s >= m carries
    k = n - s (so the list runs k = n-m down to 2 after the constants).
    """

    n: int
    j: int
    m: int
    angles: tuple[float, ...]


def odd_factor(j: int) -> OddFactorization:
    if j < 1:
        raise ValueError(f"index must be positive, got {j}")
    m = (j & -j).bit_length() - 1
    return OddFactorization(j=j, m=m, i=j >> m)


def _sine_arg(k: int, i: int) -> float:
    """|2**k - (i mod 2**(k+1))| / 2**(k+1) as a plain float in (0, 1/2]."""
    t = i % (1 << (k + 1))
    return abs((1 << k) - t) / (1 << (k + 1))


def inversion_angles(n: int, j: int) -> AngleSequence:
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not 1 <= j <= 2**n - 1:
        raise ValueError(f"j must be in [1, {2**n - 1}], got {j}")
    fac = odd_factor(j)
    angles = [math.pi / 6.0] * fac.m
    # empty for j = 2**(n-1), where m = n-1 and all entries are constants
    for k in range(n - fac.m, 1, -1):
        angles.append(_sine_arg(k, fac.i) * math.pi)
    return AngleSequence(n=n, j=j, m=fac.m, angles=tuple(angles))


def inversion_value(seq: AngleSequence) -> float:
    """(prod sin(angles))**2; equals 8/lambda_j for a valid sequence."""
    p = 1.0
    for a in seq.angles:
        p *= math.sin(a)
    return p * p


def inversion_identity_error(n: int) -> float:
    """Max over j of the relative error |value - 8/lambda_j| / (8/lambda_j)."""
    worst = 0.0
    for j in range(1, 2**n):
        target = 8.0 / eigenvalue(n, j)
        got = inversion_value(inversion_angles(n, j))
        worst = max(worst, abs(got - target) / target)
    return worst


def sine_formula_residual(n: int) -> float:
    """Log-domain residual of 2**(2**(n+1)-2) * prod_j sin^2(j pi / 2**(n+1)) = 2**n."""
    if not 1 <= n <= MAX_IDENTITY_N:
        raise ValueError(f"n must be in [1, {MAX_IDENTITY_N}], got {n}")
    denom = 1 << (n + 1)
    log_lhs = (denom - 2) * LN2
    for j in range(1, 2**n):
        log_lhs += 2.0 * math.log(math.sin(j * math.pi / denom))
    return abs(log_lhs - n * LN2)


def odd_layer_residual(n: int) -> float:
    """Log-domain residual of the odd-terms-per-layer regrouping.

    prod_{k=1..n} prod_{j=1..2**(k-1)} sin^2((2j-1) pi / 2**(k+1)) = 2**(n+2-2**(n+1))
    """
    if not 1 <= n <= MAX_IDENTITY_N:
        raise ValueError(f"n must be in [1, {MAX_IDENTITY_N}], got {n}")
    log_lhs = 0.0
    for k in range(1, n + 1):
        denom = 1 << (k + 1)
        for j in range(1, 2 ** (k - 1) + 1):
            log_lhs += 2.0 * math.log(math.sin((2 * j - 1) * math.pi / denom))
    log_rhs = (n + 2 - (1 << (n + 1))) * LN2
    return abs(log_lhs - log_rhs)


def angle_multiset_flat(n: int) -> Counter:
    """Angular coefficients j / 2**(n+1) of the flat product, as exact rationals."""
    return Counter(Fraction(j, 1 << (n + 1)) for j in range(1, 2**n))


def angle_multiset_layers(n: int) -> Counter:
    """Coefficients (2j-1) / 2**(k+1) from the per-layer odd terms."""
    out: Counter = Counter()
    for k in range(1, n + 1):
        for j in range(1, 2 ** (k - 1) + 1):
            out[Fraction(2 * j - 1, 1 << (k + 1))] += 1
    return out
