"""Change-of-variable maps tying the weighted fourth-order forms together.

Four maps: a pure power weight u = r^eta v (WeightCV), a radial power
substitution t = r^zeta with an amplitude shift (PowerCV), their
composition (DirectCV), and the reflection pairing the singular parameter
range with the plain one (KelvinEquiv).  Each map gets an exponent record
whose defining relations are rechecked on construction, a profile-level
apply, and quadrature checkers for the integral identities the maps rest
on.  Checkers return residuals; callers own the tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Tuple, Union

from .constants import (CknParams, mode_eigenvalue, rellich_sobolev_coeffs,
                        singular_exponents, square_diff_coeffs)
from .errors import DomainError, ValidityError
from .functionals import (_ONE, _abs_power_factor, _d1_factor, _integral,
                          _op_factor, _rs_validate, _value_factor)
from .profiles import (ModeFunction, PowerComposeProfile,
                       PowerWeightedProfile, RadialProfile)

Scalar = Union[int, float, Fraction]


# ---------------------------------------------------------------------------
# exponent maps


def eta_of(N: Scalar, alpha: Scalar, beta: Scalar) -> Scalar:
    """Weight exponent matching the divergence form with a plain-weight one.

    Exact under Fraction arithmetic; the rational identity checks rely on
    that.
    """
    den = 2 * (N - 2 + alpha)
    if den == 0:
        raise DomainError("eta_of requires N - 2 + alpha != 0")
    return -alpha * (N - 4 + 2 * alpha - beta) / den


def gamma_of(N: Scalar, alpha: Scalar, beta: Scalar) -> Scalar:
    """Plain weight exponent reached by the shift r^{eta_of(N, alpha, beta)}."""
    den = N - 2 + alpha
    if den == 0:
        raise DomainError("gamma_of requires N - 2 + alpha != 0")
    return (beta * (N - 2) - alpha * N) / den


def mu_of(N: Scalar, alpha: Scalar, gamma: Scalar) -> Scalar:
    """Translated weight exponent of the power substitution absorbing alpha."""
    if N == 2:
        raise DomainError("mu_of requires N != 2")
    return (N - 4 - gamma) * alpha / (2 - N) + gamma


# ---------------------------------------------------------------------------
# transform records


class TransformName(Enum):
    POWER_CV = "PowerCV"
    WEIGHT_CV = "WeightCV"
    KELVIN_EQUIV = "KelvinEquiv"
    DIRECT_CV = "DirectCV"


_REL_TOL = 1e-14


@dataclass(frozen=True)
class TransformRecord:
    """Exponent bookkeeping of one change of variables.

    Only the exponents the named map derives are set; construction rechecks
    their defining relations in cross-multiplied form (no division noise)
    at 1e-14 relative to the record's own magnitudes.
    """

    name: TransformName
    N: int
    alpha: Optional[float] = None
    beta: Optional[float] = None
    gamma: Optional[float] = None
    mu: Optional[float] = None
    eta: Optional[float] = None
    vartheta: Optional[float] = None
    zeta: Optional[float] = None
    bar_beta: Optional[float] = None
    xi: Optional[float] = None

    def __post_init__(self):
        try:
            relations = self._relations()
        except TypeError:
            raise ValidityError(
                f"{self.name.value} record is missing derived exponents"
            ) from None
        mag = max((abs(v) for v in (
            self.alpha, self.beta, self.gamma, self.mu, self.eta,
            self.vartheta, self.zeta, self.bar_beta, self.xi)
            if v is not None), default=1.0)
        for got, want in relations:
            slack = _REL_TOL * max(1.0, abs(got), abs(want), mag * mag)
            if not abs(got - want) <= slack:
                raise ValidityError(
                    f"{self.name.value} record violates a defining relation: "
                    f"{got!r} != {want!r}")

    def _relations(self):
        N = self.N
        if self.name is TransformName.POWER_CV:
            return ((2 * self.vartheta, self.gamma - self.mu),
                    (self.zeta * (N - 4 - self.gamma), N - 4 - self.mu))
        if self.name is TransformName.WEIGHT_CV:
            return ((self.gamma, self.beta - 2 * (self.alpha + self.eta)),
                    ((2 - N) * (self.mu - self.gamma),
                     (N - 4 - self.gamma) * self.alpha))
        if self.name is TransformName.KELVIN_EQUIV:
            return ((self.eta, 2 + self.beta - self.alpha),
                    (self.bar_beta, self.alpha - 2 - self.eta),
                    ((N + self.xi) * (N + self.beta),
                     (N + self.bar_beta) ** 2))
        return ((self.eta, -self.vartheta),
                (self.zeta * (N - 2), N - 2 + self.alpha),
                (self.gamma, self.beta - 2 * (self.alpha + self.eta)),
                ((2 - N) * (self.mu - self.gamma),
                 (N - 4 - self.gamma) * self.alpha),
                (self.zeta * (N - 4 - self.gamma), N - 4 - self.mu))


def power_cv_record(N: int, gamma: float, mu: float) -> TransformRecord:
    """Radial substitution t = r^zeta with the amplitude shift r^vartheta."""
    _rs_validate(N, gamma, mu)
    return TransformRecord(
        TransformName.POWER_CV, N, gamma=gamma, mu=mu,
        vartheta=(gamma - mu) / 2,
        zeta=(N - 4 - mu) / (N - 4 - gamma))


def weight_cv_record(N: int, alpha: float, beta: float) -> TransformRecord:
    """Power-weight shift u = r^eta v from (alpha, beta) to plain weights."""
    CknParams(N, alpha, beta)
    eta = eta_of(N, alpha, beta)
    gamma = gamma_of(N, alpha, beta)
    return TransformRecord(
        TransformName.WEIGHT_CV, N, alpha=alpha, beta=beta, eta=eta,
        gamma=gamma, mu=mu_of(N, alpha, gamma))


def kelvin_record(N: int, alpha: float, beta: float) -> TransformRecord:
    """Reflection u = r^eta v pairing a singular point with its plain dual."""
    CknParams(N, alpha, beta, singular=True)
    se = singular_exponents(N, alpha, beta)
    return TransformRecord(
        TransformName.KELVIN_EQUIV, N, alpha=alpha, beta=beta,
        eta=2 + beta - alpha, bar_beta=se.bar_beta, xi=se.xi)


def direct_cv_record(N: int, alpha: float, beta: float) -> TransformRecord:
    """Single-step substitution u(r) = w(r^zeta), zeta = 1 + alpha/(N-2)."""
    CknParams(N, alpha, beta)
    eta = eta_of(N, alpha, beta)
    gamma = gamma_of(N, alpha, beta)
    mu = mu_of(N, alpha, gamma)
    return TransformRecord(
        TransformName.DIRECT_CV, N, alpha=alpha, beta=beta, eta=eta,
        vartheta=(gamma - mu) / 2, zeta=1 + alpha / (N - 2),
        gamma=gamma, mu=mu)


# ---------------------------------------------------------------------------
# profile-level maps


def power_cv_profile(v: RadialProfile, N: int, gamma: float,
                     mu: float) -> RadialProfile:
    """r^vartheta v(r^zeta): the translated-weight profile of a plain one."""
    rec = power_cv_record(N, gamma, mu)
    return PowerWeightedProfile(PowerComposeProfile(v, rec.zeta),
                                rec.vartheta)


def weight_cv_profile(v: RadialProfile, N: int, alpha: float,
                      beta: float) -> RadialProfile:
    """r^eta v: the divergence-form profile matching a plain-weight one."""
    rec = weight_cv_record(N, alpha, beta)
    return PowerWeightedProfile(v, rec.eta)


def direct_cv_profile(w: RadialProfile, N: int, alpha: float,
                      beta: float) -> RadialProfile:
    """w(r^zeta): both steps of the composed substitution in one move."""
    rec = direct_cv_record(N, alpha, beta)
    return PowerComposeProfile(w, rec.zeta)


def kelvin_equiv(u: RadialProfile, N: int, alpha: float,
                 beta: float) -> Tuple[RadialProfile, float]:
    """Reflection partner of u: strips the weight r^eta, eta = 2+beta-alpha.

    Accepts beta on either side of the pairing (the singular range or its
    reflected plain range), so applying the map again at the returned
    bar_beta = 2 alpha - beta - 4 undoes it.
    """
    try:
        CknParams(N, alpha, beta, singular=True)
    except (DomainError, ValidityError):
        CknParams(N, alpha, beta)
    eta = 2 + beta - alpha
    return PowerWeightedProfile(u, -eta), 2 * alpha - beta - 4


# ---------------------------------------------------------------------------
# quadrature identity checkers


def power_cv_check(u: RadialProfile, N: int, gamma: float, mu: float,
                   tol: float = 1e-10) -> float:
    """Relative mismatch between the two sides of the substitution identity.

    Left: the mu-weighted square of the drift-adjusted radial operator on
    u.  Right: zeta^3 times the gamma-weighted square of the plain radial
    operator on w(t) = u(t^{1/zeta}).  The identity is a pointwise change
    of variables, equal for every mode-0 profile making either side
    finite; profiles too singular at the origin leave both sides divergent
    together and the quadrature layer raises instead of returning a
    number.
    """
    _rs_validate(N, gamma, mu)
    zeta = (N - 4 - mu) / (N - 4 - gamma)
    b1 = N - 1 - (N - 2) * (mu - gamma) / (N - 4 - gamma)
    op_u = _op_factor(u, b1, 0.0)
    lhs = _integral(op_u, op_u, N - 1 - mu, tol)
    w = PowerComposeProfile(u, 1 / zeta)
    op_w = _op_factor(w, N - 1.0, 0.0)
    rhs = zeta ** 3 * _integral(op_w, op_w, N - 1 - gamma, tol)
    return abs(lhs - rhs) / max(abs(rhs), 1e-300)


def kelvin_residuals(u: RadialProfile, N: int, alpha: float, beta: float,
                     tol: float = 1e-10) -> Tuple[float, float]:
    """(norm, form) residuals of the singular-range reflection on u.

    First: the dual-exponent critical norm of u against the plain critical
    norm of its partner at (alpha, bar_beta).  Second: the weighted square
    of the divergence-form operator on u against the partner's.  Both are
    relative to the larger side.
    """
    CknParams(N, alpha, beta, singular=True)
    se = singular_exponents(N, alpha, beta)
    v, bar_beta = kelvin_equiv(u, N, alpha, beta)
    norm_u = _integral(_abs_power_factor(u, se.bar_exp), _ONE,
                       N - 1 + se.xi, tol)
    norm_v = _integral(_abs_power_factor(v, se.bar_exp), _ONE,
                       N - 1 + bar_beta, tol)
    op_u = _op_factor(u, N - 1.0 + alpha, 0.0)
    op_v = _op_factor(v, N - 1.0 + alpha, 0.0)
    form_u = _integral(op_u, op_u, N - 1 + 2 * alpha - beta, tol)
    form_v = _integral(op_v, op_v, N - 1 + 2 * alpha - bar_beta, tol)
    return (abs(norm_u - norm_v) / max(abs(norm_u), abs(norm_v), 1e-300),
            abs(form_u - form_v) / max(abs(form_u), abs(form_v), 1e-300))


def identity_vecgm(N: Scalar, alpha: Scalar, beta: Scalar
                   ) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
    """Both coefficient identities behind the composed substitution, exactly.

    Returns (lhs1, rhs1, lhs2, rhs2) as Fractions: the first-order bracket
    coefficient of the substituted form against minus the gradient
    remainder coefficient, and the zero-order bracket against the
    zero-order remainder coefficient.  Inputs are taken as exact rationals.
    """
    N_f, a, b = Fraction(N), Fraction(alpha), Fraction(beta)
    if N_f - 2 + a == 0:
        raise DomainError("identity_vecgm requires N - 2 + alpha != 0")
    eta = eta_of(N_f, a, b)
    gamma = gamma_of(N_f, a, b)
    if N_f - 4 - gamma == 0:
        raise DomainError("identity_vecgm requires N - 4 - gamma != 0")
    mu = mu_of(N_f, a, gamma)
    c1, c2 = rellich_sobolev_coeffs(N_f, gamma, mu)
    edge = N_f + a + eta - 2
    lhs1 = (2 * eta + a) * (N_f + 2 * eta + a + gamma) - 2 * eta * edge
    lhs2 = (eta * edge) ** 2 - eta * edge * (N_f - 4 - gamma) * (
        2 * eta + a + gamma + 2)
    return lhs1, -c1, lhs2, c2


def identity_lemtle(N: int, mu: float, b1: float, b2: float, b3: float,
                    b4: float, f: RadialProfile, tol: float = 1e-10) -> float:
    """Residual of the exchange rule for a difference of squared operators.

    Integrating with weight r^{N-1-mu} over (0, inf),

      (f'' + b1 f'/r + b2 f/r^2)^2 - (f'' + b3 f'/r + b4 f/r^2)^2

    collapses to A1 int (f')^2 r^{N-3-mu} + A2 int f^2 r^{N-5-mu} with
    (A1, A2) from square_diff_coeffs.  Relative to the largest
    participating term, so coefficient pairs that agree report 0.
    """
    if mu >= N - 4:
        raise DomainError("identity_lemtle requires mu < N - 4")
    a1, a2 = square_diff_coeffs(N, mu, b1, b2, b3, b4)
    op_a = _op_factor(f, b1, b2)
    op_b = _op_factor(f, b3, b4)
    sq_a = _integral(op_a, op_a, N - 1 - mu, tol)
    sq_b = _integral(op_b, op_b, N - 1 - mu, tol)
    d1 = _d1_factor(f)
    val = _value_factor(f)
    grad = a1 * _integral(d1, d1, N - 3 - mu, tol) if a1 != 0 else 0.0
    zero = a2 * _integral(val, val, N - 5 - mu, tol) if a2 != 0 else 0.0
    scale = max(abs(sq_a), abs(sq_b), abs(grad), abs(zero), 1e-300)
    return abs(sq_a - sq_b - grad - zero) / scale


def identity_psny(k: int, f: RadialProfile, N: int, gamma: float,
                  tol: float = 1e-10) -> Tuple[float, float, float]:
    """Residuals of the three by-parts reductions of the mode cross terms.

    For the mode-k radial part f, with c = k(N-2+k), s = N-4-gamma,
    L f = f'' + (N-1) f'/r - c f/r^2 and the energy bracket
    [f] = int ((f')^2 + c f^2/r^2) r^{N-3-gamma}:

      1. int f f' r^{N-4-gamma}     = -(s/2) int f^2 r^{N-5-gamma}
      2. int f (Lf) r^{N-3-gamma}   = -(s (gamma+2)/2) int f^2 r^{N-5-gamma}
                                      - [f]
      3. int f' (Lf) r^{N-2-gamma}  = (s/2) [f]
                                      + (gamma+2) int (f')^2 r^{N-3-gamma}

    Each residual is relative to the largest term on its own line.
    """
    ModeFunction(k, f)
    if gamma >= N - 4:
        raise DomainError("identity_psny requires gamma < N - 4")
    c = float(mode_eigenvalue(N, k))
    s = N - 4 - gamma
    val = _value_factor(f)
    d1 = _d1_factor(f)
    op = _op_factor(f, N - 1.0, -c)
    zero = _integral(val, val, N - 5 - gamma, tol)
    grad = _integral(d1, d1, N - 3 - gamma, tol)
    bracket = grad + c * zero

    lhs1 = _integral(val, d1, N - 4 - gamma, tol)
    rhs1 = -s / 2 * zero
    lhs2 = _integral(val, op, N - 3 - gamma, tol)
    rhs2 = -s * (gamma + 2) / 2 * zero - bracket
    lhs3 = _integral(d1, op, N - 2 - gamma, tol)
    rhs3 = s / 2 * bracket + (gamma + 2) * grad

    def rel(lhs, rhs, *terms):
        scale = max(max(abs(t) for t in terms), 1e-300)
        return abs(lhs - rhs) / scale

    return (rel(lhs1, rhs1, lhs1, rhs1),
            rel(lhs2, rhs2, lhs2, rhs2, bracket),
            rel(lhs3, rhs3, lhs3, rhs3, s / 2 * bracket, (gamma + 2) * grad))
