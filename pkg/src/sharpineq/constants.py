"""Parameter records and closed-form constants.

All functions are cheap closed forms. Polynomial coefficient helpers
(`rellich_sobolev_coeffs`, `square_diff_coeffs`, `mode_gap_coeff`) avoid
float-only operations so they stay exact when fed `Fraction` arguments.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

from .errors import CertificateError, DomainError, ValidityError
from .specfun import biharmonic_factor, log_gamma, sphere_area

# ---------------------------------------------------------------------------
# parameter records


@dataclass(frozen=True)
class CknParams:
    """Weight pair (alpha, beta) of the fourth-order divergence-form setting.

    `singular=False` selects alpha-2 <= beta <= N alpha/(N-2); `singular=True`
    selects (N-4)/(N-2) alpha - 4 <= beta <= alpha-2.
    """

    N: int
    alpha: float
    beta: float
    singular: bool = False

    def __post_init__(self):
        if self.N < 5:
            raise DomainError(f"CknParams requires N >= 5, got N={self.N}")
        if not self.alpha > 2 - self.N:
            raise DomainError(
                f"CknParams requires alpha > 2-N = {2 - self.N}, got {self.alpha}")
        if self.singular:
            lo = (self.N - 4) / (self.N - 2) * self.alpha - 4
            hi = self.alpha - 2
            if not (lo <= self.beta <= hi):
                raise ValidityError(
                    f"singular range (N-4)/(N-2) alpha - 4 <= beta <= alpha-2 "
                    f"([{lo}, {hi}]) violated by beta={self.beta}")
        else:
            lo = self.alpha - 2
            hi = self.N * self.alpha / (self.N - 2)
            if not (lo <= self.beta <= hi):
                raise ValidityError(
                    f"range alpha-2 <= beta <= N alpha/(N-2) ([{lo}, {hi}]) "
                    f"violated by beta={self.beta}")


@dataclass(frozen=True)
class RsParams:
    """Parameters (gamma, mu) of the weighted Rellich–Sobolev remainder form."""

    N: int
    gamma: float
    mu: float

    def __post_init__(self):
        if self.N < 5:
            raise DomainError(f"RsParams requires N >= 5, got N={self.N}")
        if not -2 < self.gamma <= 0:
            raise ValidityError(f"RsParams requires -2 < gamma <= 0, got {self.gamma}")
        if not self.gamma < self.mu < self.N - 4:
            raise ValidityError(
                f"RsParams requires gamma < mu < N-4, got mu={self.mu}")

    @property
    def zeta(self) -> float:
        return (self.N - 4 - self.mu) / (self.N - 4 - self.gamma)

    @property
    def vartheta(self) -> float:
        return (self.gamma - self.mu) / 2


class SwCase(enum.Enum):
    DIAGONAL = "diagonal"
    T_SQUARED = "t2"


@dataclass(frozen=True)
class SwParams:
    """Double-weight kernel inequality parameters at kernel power N-2.

    DIAGONAL: a = b, t = r = 2N/(N+2-2b).  T_SQUARED: t = 2 with
    a = b(N-4+2b)/(N-2b) and r fixed by the exponent balance
    1/r + 1/t + (N-2+a+b)/N = 2.
    """

    N: int
    b: float
    case: SwCase = SwCase.DIAGONAL

    def __post_init__(self):
        if not 0 < self.b < 1:
            raise ValidityError(f"SwParams requires 0 < b < 1, got b={self.b}")
        n_min = 3 if self.case is SwCase.DIAGONAL else 5
        if self.N < n_min:
            raise DomainError(
                f"SwParams({self.case.value}) requires N >= {n_min}, got {self.N}")

    @property
    def lam(self) -> float:
        return float(self.N - 2)

    @property
    def a(self) -> float:
        if self.case is SwCase.DIAGONAL:
            return self.b
        return self.b * (self.N - 4 + 2 * self.b) / (self.N - 2 * self.b)

    @property
    def t(self) -> float:
        if self.case is SwCase.DIAGONAL:
            return 2 * self.N / (self.N + 2 - 2 * self.b)
        return 2.0

    @property
    def r(self) -> float:
        if self.case is SwCase.DIAGONAL:
            return 2 * self.N / (self.N + 2 - 2 * self.b)
        # from the balance; equals 2(N-2b)/(N+4-6b)
        inv = 2 - 1 / self.t - (self.N - 2 + self.a + self.b) / self.N
        return 1 / inv


@dataclass(frozen=True)
class WeakHrParams:
    """Parameters of the weak-form Hardy–Rellich comparison."""

    N: int
    a: float

    def __post_init__(self):
        if self.N < 1:
            raise DomainError(f"WeakHrParams requires N >= 1, got {self.N}")
        if not self.a < (self.N - 2) / 2:
            raise ValidityError(
                f"WeakHrParams requires a < (N-2)/2 = {(self.N - 2) / 2}, "
                f"got a={self.a}")

    @property
    def middle_range(self) -> bool:
        if self.N == 1:
            return self.a >= (-2 - math.sqrt(5.0)) / 2
        s = math.sqrt(self.N * self.N - 2 * self.N + 2)
        return (-2 - s) / 2 <= self.a <= (-2 + s) / 2


# ---------------------------------------------------------------------------
# exponents


def mode_eigenvalue(N: int, k: int):
    """Spherical Laplacian eigenvalue k(N-2+k) of the k-th harmonic band."""
    if k < 0:
        raise DomainError(f"mode index must be >= 0, got {k}")
    return k * (N - 2 + k)


def sobolev_exponent(N: int, gamma: float) -> float:
    """Critical exponent 2(N+gamma)/(N-4-gamma) of the pure-weight setting."""
    if gamma >= N - 4:
        raise DomainError(f"sobolev_exponent requires gamma < N-4, got {gamma}")
    return 2 * (N + gamma) / (N - 4 - gamma)


def ckn_exponent(N: int, alpha: float, beta: float) -> float:
    """Critical exponent 2(N+beta)/(N-4+2 alpha-beta) of the (alpha,beta) setting."""
    den = N - 4 + 2 * alpha - beta
    if den <= 0:
        raise DomainError(f"ckn_exponent requires N-4+2 alpha-beta > 0, got {den}")
    return 2 * (N + beta) / den


class SingularExponents(NamedTuple):
    xi: float
    bar_exp: float
    bar_beta: float


def singular_exponents(N: int, alpha: float, beta: float) -> SingularExponents:
    """Dual data of the singular range: (N+beta)(N+xi) = (N+2 alpha-beta-4)^2."""
    D = N + 2 * alpha - beta - 4
    if N + beta <= 0 or D <= 0:
        raise DomainError(
            f"singular_exponents requires N+beta > 0 and N+2 alpha-beta-4 > 0")
    xi = D * D / (N + beta) - N
    return SingularExponents(xi, 2 * (N + xi) / D, 2 * alpha - beta - 4)


# ---------------------------------------------------------------------------
# sharp constants


def bilaplacian_sharp(N: int, gamma: float) -> float:
    """Sharp constant of the pure-weight fourth-order embedding.

    (2/(2+gamma))^{2(2+gamma)/(N+gamma)-4} area^{2(2+gamma)/(N+gamma)}
    B(2(N+gamma)/(2+gamma)), B the biharmonic Gamma-ratio factor.
    """
    if N < 5:
        raise DomainError(f"bilaplacian_sharp requires N >= 5, got {N}")
    if not -2 < gamma <= 0:
        raise ValidityError(f"bilaplacian_sharp requires -2 < gamma <= 0, got {gamma}")
    e = 2 * (2 + gamma) / (N + gamma)
    return ((2 / (2 + gamma)) ** (e - 4) * sphere_area(N) ** e
            * biharmonic_factor(2 * (N + gamma) / (2 + gamma)))


def divform_sharp(N: int, alpha: float, beta: float) -> float:
    """Sharp constant of the divergence-form embedding, non-singular range."""
    CknParams(N, alpha, beta)
    q = 2 + beta - alpha
    e = 2 * q / (N + beta)
    return ((2 / q) ** (e - 4) * sphere_area(N) ** e
            * biharmonic_factor(2 * (N + beta) / q))


def singular_sharp(N: int, alpha: float, beta: float) -> float:
    """Sharp constant of the divergence-form embedding, singular range."""
    CknParams(N, alpha, beta, singular=True)
    q = alpha - beta - 2
    if q <= 0:
        raise DomainError("singular_sharp requires beta < alpha - 2")
    D = N + 2 * alpha - beta - 4
    e = 2 * q / D
    return ((2 / q) ** (e - 4) * sphere_area(N) ** e
            * biharmonic_factor(2 * D / q))


def extremal_normalizer(N: int, gamma: float) -> float:
    """Amplitude [(N-4-gamma)(N-2)(N+gamma)(N+2+2 gamma)]^{(N-4-gamma)/(4(2+gamma))}."""
    base = (N - 4 - gamma) * (N - 2) * (N + gamma) * (N + 2 + 2 * gamma)
    if base <= 0:
        raise DomainError("extremal_normalizer base must be positive")
    return base ** ((N - 4 - gamma) / (4 * (2 + gamma)))


def rellich_sobolev_coeffs(N, gamma, mu) -> Tuple[float, float]:
    """Coefficients (C1, C2) of the gradient and zero-order remainder terms.

    Exact under Fraction arithmetic (used by the rational identity checks).
    """
    d = mu - gamma
    w = N - 4 - gamma
    q = N * N - 4 * N + 8 + gamma * gamma + 4 * gamma
    c1 = q * d * (2 * w - d) / (2 * w * w)
    c2 = (q * d * d * (2 * w - d) ** 2 / (8 * w * w)
          - d * d * (2 * (N - 2) - d) ** 2 / 16
          - d * (2 * (N - 2) - d) * (N - 4 - mu) * (2 + gamma) / 4)
    return c1, c2


def rellich_sobolev_sharp(N: int, gamma: float, mu: float) -> float:
    """zeta^{3 + 2/exp} times the pure-weight sharp constant."""
    p = RsParams(N, gamma, mu)
    power = 3 + 2 / sobolev_exponent(N, gamma)
    return p.zeta ** power * bilaplacian_sharp(N, gamma)


def hardy_const(N: int, gamma: float) -> float:
    """((N-4-gamma)/2)^2, the weighted Hardy constant (N >= 3, gamma < N-4)."""
    if N < 3:
        raise DomainError(f"hardy_const requires N >= 3, got {N}")
    if gamma >= N - 4:
        raise ValidityError(f"hardy_const requires gamma < N-4, got {gamma}")
    return ((N - 4 - gamma) / 2) ** 2


def hardy_rellich_bracket(N: int) -> Tuple[float, float]:
    """Validity bracket of the weighted Hardy–Rellich constant."""
    s = 2 * math.sqrt(N * N - N + 1)
    return (-(N + 4) - s) / 3, min(N - 2.0, (-(N + 4) + s) / 3)


def hardy_rellich_const(N: int, gamma: float) -> float:
    """((N+gamma)/2)^2, valid on the bracket reported by hardy_rellich_bracket."""
    if N < 2:
        raise DomainError(f"hardy_rellich_const requires N >= 2, got {N}")
    lo, hi = hardy_rellich_bracket(N)
    if not lo <= gamma <= hi:
        raise ValidityError(
            f"hardy_rellich_const requires gamma in the bracket "
            f"[(-(N+4)-2 sqrt(N^2-N+1))/3, min(N-2, (-(N+4)+2 sqrt(N^2-N+1))/3)] "
            f"= [{lo}, {hi}], got gamma={gamma}")
    return ((N + gamma) / 2) ** 2


def combined_const(N: int, gamma: float) -> float:
    """(N^2-4N+8+gamma^2+4 gamma)/2, as hardy_const + hardy_rellich_const.

    Accepts the closed bracket -2 <= gamma <= 0 (the sharpness statement of
    the source inequality needs gamma > -2; the value itself is plain
    arithmetic at the endpoint).
    """
    if N < 5:
        raise DomainError(f"combined_const requires N >= 5, got {N}")
    if not -2 <= gamma <= 0:
        raise ValidityError(f"combined_const requires -2 <= gamma <= 0, got {gamma}")
    return hardy_const(N, gamma) + hardy_rellich_const(N, gamma)


def weighted_rellich_inf(N: int, a: float, k_max: int = 64) -> Tuple[float, int]:
    """inf_k (k + N/2 + a)^2 (k + (N-4)/2 - a)^2 over integer k >= 0.

    The quartic is eventually increasing; the scan is certified by requiring
    two successive increases past the argmin and a k_max beyond every
    stationary point and zero of the underlying parabola.
    """
    A = N / 2 + a
    B = (N - 4) / 2 - a
    guard = max(0.0, -A, -B, -(A + B) / 2) + 2
    if k_max < guard:
        raise CertificateError(
            f"k_max={k_max} cannot certify the infimum; need k_max >= {math.ceil(guard)}")
    vals = [((k + A) * (k + B)) ** 2 for k in range(k_max + 1)]
    k_star = min(range(k_max + 1), key=vals.__getitem__)
    if k_star + 2 > k_max or not (vals[k_star] <= vals[k_star + 1] <= vals[k_star + 2]):
        raise CertificateError(
            f"no two successive increases past argmin k={k_star}; enlarge k_max")
    return vals[k_star], k_star


def mode_ratio_limit(N: int, a: float, k: int) -> float:
    """(2/(N-4-2a))^2 (k + N/2 + a)^2 (k + (N-4)/2 - a)^2."""
    if a == (N - 4) / 2:
        raise DomainError("mode_ratio_limit is undefined at a = (N-4)/2")
    q = (k + N / 2 + a) * (k + (N - 4) / 2 - a)
    return (2 / (N - 4 - 2 * a)) ** 2 * q * q


def weak_hr_constant(N: int, a: float) -> float:
    """Best constant of the weak-form Hardy–Rellich comparison.

    Middle range: ((N+2a)/2)^2.  Outside: (2/(N-4-2a))^2 inf_k of the mode
    quartic.  a = (N-4)/2 (always middle range, where the unified formula
    degenerates) gives (N-2)^2.
    """
    p = WeakHrParams(N, a)
    if a == (N - 4) / 2:
        return float((N - 2) ** 2)
    if p.middle_range:
        return ((N + 2 * a) / 2) ** 2
    kmax = max(64, math.ceil(max(0.0, -(N / 2 + a), a - (N - 4) / 2)) + 8)
    inf_val, _ = weighted_rellich_inf(N, a, k_max=kmax)
    return (2 / (N - 4 - 2 * a)) ** 2 * inf_val


def square_diff_coeffs(N, mu, b1, b2, b3, b4):
    """(A1, A2) with
    A1 = b1^2-b3^2-(b1-b3)(N-2-mu)-2(b2-b4),
    A2 = b2^2-b4^2+(b2-b4)(N-3-mu)(N-4-mu)-(b1 b2-b3 b4)(N-4-mu).
    """
    a1 = b1 * b1 - b3 * b3 - (b1 - b3) * (N - 2 - mu) - 2 * (b2 - b4)
    a2 = (b2 * b2 - b4 * b4 + (b2 - b4) * (N - 3 - mu) * (N - 4 - mu)
          - (b1 * b2 - b3 * b4) * (N - 4 - mu))
    return a1, a2


def mode_gap_coeff(N, gamma, mu, k: int):
    """(1-zeta^2) { zeta^2 [c_k + (2+gamma)(N-4-gamma)] + [c_k - (2+gamma)^2] } c_k."""
    c = mode_eigenvalue(N, k)
    zeta2 = ((N - 4 - mu) / (N - 4 - gamma)) ** 2
    return (1 - zeta2) * (zeta2 * (c + (2 + gamma) * (N - 4 - gamma))
                          + (c - (2 + gamma) ** 2)) * c


# ---------------------------------------------------------------------------
# symmetry-region data


def felli_schneider_b(N: int, a: float) -> float:
    """First-order symmetry-breaking threshold b_FS(a), a < (N-2)/2."""
    ac = (N - 2) / 2
    if not a < ac:
        raise DomainError(f"felli_schneider_b requires a < (N-2)/2, got a={a}")
    return N * (ac - a) / (2 * math.sqrt((ac - a) ** 2 + N - 1)) + a - ac


def felli_schneider_beta(N: int, alpha: float) -> float:
    """Threshold curve beta_FS(alpha) = -N + sqrt(N^2 + alpha^2 + 2(N-2) alpha)."""
    if not alpha > 2 - N:
        raise DomainError(f"felli_schneider_beta requires alpha > 2-N, got {alpha}")
    return -N + math.sqrt(N * N + alpha * alpha + 2 * (N - 2) * alpha)


class Region(enum.Enum):
    SYMMETRY_PROVED = "SymmetryProved"
    SYMMETRY_BREAKING = "SymmetryBreaking"
    CONJECTURE_SYMMETRY = "ConjectureSymmetry"
    BOUNDARY = "Boundary"
    INVALID = "Invalid"


_REGION_TOL = 1e-12


def region_classify(N: int, alpha: float, beta: float) -> Region:
    """Classify (alpha, beta) against the symmetry picture of the non-singular range."""
    if N < 5:
        raise DomainError(f"region_classify requires N >= 5, got {N}")
    on_curve = (abs(alpha - (2 - N)) <= _REGION_TOL
                or abs(beta - (alpha - 2)) <= _REGION_TOL
                or abs(beta - N * alpha / (N - 2)) <= _REGION_TOL)
    if alpha > 0:
        on_curve = on_curve or abs(beta - felli_schneider_beta(N, alpha)) <= _REGION_TOL
    if on_curve:
        return Region.BOUNDARY
    if not (2 - N < alpha and alpha - 2 < beta <= N * alpha / (N - 2)):
        return Region.INVALID
    if alpha <= 0:
        return Region.SYMMETRY_PROVED
    if beta <= felli_schneider_beta(N, alpha):
        return Region.CONJECTURE_SYMMETRY
    return Region.SYMMETRY_BREAKING


# ---------------------------------------------------------------------------
# unweighted kernel inequality constants at general 0 < lambda < N


class HlsConstants(NamedTuple):
    c1: float
    c2: Optional[float]


def hls_second_constant(N: int, lam: float) -> float:
    """Sharp constant of the t = 2 endpoint; defined only for N < 2 lambda < 2N."""
    if not N < 2 * lam < 2 * N:
        raise DomainError(
            f"second constant requires N < 2 lambda < 2N, got lambda={lam}")
    log_c = (lam / 2 * math.log(math.pi)
             + log_gamma(N / 2 - lam / 2) - log_gamma(N - lam / 2)
             + 0.5 * (log_gamma(lam - N / 2) - log_gamma(1.5 * N - lam))
             + (-1 + lam / N) * (log_gamma(N / 2) - log_gamma(N)))
    return math.exp(log_c)


def hls_constants(N: int, lam: float) -> HlsConstants:
    """Sharp constants of the unweighted kernel inequality at power lambda.

    c1 is the diagonal (t = r) constant; c2 (t = 2) is None outside
    N < 2 lambda < 2N.
    """
    if not 0 < lam < N:
        raise DomainError(f"hls_constants requires 0 < lambda < N, got {lam}")
    log_c1 = (lam / 2 * math.log(math.pi)
              + log_gamma(N / 2 - lam / 2) - log_gamma(N - lam / 2)
              + (-1 + lam / N) * (log_gamma(N / 2) - log_gamma(N)))
    c1 = math.exp(log_c1)
    c2 = hls_second_constant(N, lam) if N < 2 * lam < 2 * N else None
    return HlsConstants(c1, c2)
