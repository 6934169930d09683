"""Log-Gamma, sphere areas and the biharmonic Gamma-ratio factor.

Everything here is pure float arithmetic; the Gamma ratios that enter the
sharp-constant formulas are kept in log space so arguments up to 10^4 stay
inside double range.
"""
from __future__ import annotations

import math

from .errors import DomainError

# Lanczos coefficients, g = 7, 9 terms.
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_LN_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_LN_PI = math.log(math.pi)


def log_gamma(x: float) -> float:
    """Natural log of Gamma(x) for x > 0.

    Raises DomainError for x <= 0 (the reflection branch below is only used
    internally for the 0 < x < 0.5 half).
    """
    if not x > 0.0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    if x < 0.5:
        # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return _LN_PI - math.log(math.sin(math.pi * x)) - log_gamma(1.0 - x)
    z = x - 1.0
    acc = _LANCZOS_COEFFS[0]
    for i, c in enumerate(_LANCZOS_COEFFS[1:], start=1):
        acc += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _LN_SQRT_2PI + (z + 0.5) * math.log(t) - t + math.log(acc)


def gamma(x: float) -> float:
    """Gamma(x) for x > 0."""
    return math.exp(log_gamma(x))


def sphere_area(N: int) -> float:
    """Surface measure of the unit sphere in R^N: 2 pi^{N/2} / Gamma(N/2)."""
    if N < 1:
        raise DomainError(f"sphere_area requires N >= 1, got {N}")
    return math.exp(math.log(2.0) + 0.5 * N * _LN_PI - log_gamma(0.5 * N))


def _log_gamma_ratio(M: float) -> float:
    """ln of Gamma(M/2)^2 / (2 Gamma(M))."""
    return 2.0 * log_gamma(0.5 * M) - math.log(2.0) - log_gamma(M)


def biharmonic_factor(M: float) -> float:
    """(M-4)(M-2)M(M+2) * [Gamma(M/2)^2 / (2 Gamma(M))]^{4/M} for M > 4.

    M = 4 gives 0 and is rejected so parameter bugs upstream do not get
    silently mapped to a vanishing constant.
    """
    if not M > 4.0:
        raise DomainError(f"biharmonic_factor requires M > 4, got {M}")
    poly = (M - 4.0) * (M - 2.0) * M * (M + 2.0)
    return poly * math.exp(_log_gamma_ratio(M) * 4.0 / M)
