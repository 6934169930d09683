"""Quadratic forms and Rayleigh quotients of the weighted fourth-order family.

Every public quantity is assembled from one-dimensional radial integrals.
Integrands are products of `_Factor` views of a profile (its value, a
derivative, or a second-order operator image), each carrying declared
endpoint exponents and, where the profile is exactly a power sum near an
end, closed-form head/tail descriptions.  When an endpoint margin is too
thin for the tanh-sinh layer, the power-law end is integrated analytically
and the numeric part runs on the masked middle.

Sphere-area factors are applied here, at quotient assembly, never inside
the 1D integrals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .constants import (
    CknParams,
    RsParams,
    SwParams,
    WeakHrParams,
    ckn_exponent,
    combined_const,
    hardy_const,
    mode_eigenvalue,
    mode_gap_coeff,
    rellich_sobolev_coeffs,
    singular_exponents,
    sobolev_exponent,
)
from .errors import DomainError
from .profiles import (
    AmplifiedProfile,
    ModeFunction,
    PowerWeightedProfile,
    RadialProfile,
    SumProfile,
)
from .quadrature import RadialIntegrand, integrate_radial, stein_weiss_double
from .specfun import sphere_area

PowerPairs = Tuple[Tuple[float, float], ...]

# Engage the analytic head/tail split below this endpoint margin.  The
# quadrature layer refuses margins under 0.08 outright; between that and
# this threshold it converges but slowly, and the closed form is exact.
_SPLIT_MARGIN = 0.5


# ---------------------------------------------------------------------------
# integrand factors


@dataclass(frozen=True)
class _Factor:
    """One multiplicand of a radial integrand, with integrability metadata.

    `head`/`tail` follow the profile conventions: an exact power-sum
    description on (0, head_end] / [tail_start, inf), () for identically
    zero, None for unavailable.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    zero_exp: float
    inf_exp: float
    knots: Tuple[float, ...]
    head: Optional[PowerPairs]
    head_end: float
    tail: Optional[PowerPairs]
    tail_start: float


_ONE = _Factor(lambda r: np.ones_like(np.asarray(r, dtype=float)),
               0.0, 0.0, (), ((1.0, 0.0),), 1.0, ((1.0, 0.0),), 1.0)


def _diff_pairs(pairs: Optional[PowerPairs]) -> Optional[PowerPairs]:
    if pairs is None:
        return None
    return tuple((c * e, e - 1) for c, e in pairs if c * e != 0)


def _value_factor(u: RadialProfile) -> _Factor:
    return _Factor(u.value, u.zero_exponents()[0], u.infinity_exponents()[0],
                   u.knots, u.power_head(), u.head_end(),
                   u.power_tail(), u.tail_start())


def _d1_factor(u: RadialProfile) -> _Factor:
    return _Factor(u.d1, u.zero_exponents()[1], u.infinity_exponents()[1],
                   u.knots, _diff_pairs(u.power_head()), u.head_end(),
                   _diff_pairs(u.power_tail()), u.tail_start())


def _d2_factor(u: RadialProfile) -> _Factor:
    return _Factor(u.d2, u.zero_exponents()[2], u.infinity_exponents()[2],
                   u.knots, _diff_pairs(_diff_pairs(u.power_head())),
                   u.head_end(), _diff_pairs(_diff_pairs(u.power_tail())),
                   u.tail_start())


def _op_factor(u: RadialProfile, P: float, Q: float) -> _Factor:
    """u'' + P u'/r + Q u/r^2, the shape of every second-order operator here."""
    z0, z1, z2 = u.zero_exponents()
    i0, i1, i2 = u.infinity_exponents()
    zs, infs = [z2], [i2]
    if P != 0:
        zs.append(z1 - 1)
        infs.append(i1 - 1)
    if Q != 0:
        zs.append(z0 - 2)
        infs.append(i0 - 2)

    def ev(r):
        r = np.asarray(r, dtype=float)
        out = u.d2(r)
        if P != 0:
            out = out + P * u.d1(r) / r
        if Q != 0:
            out = out + Q * u.value(r) / r ** 2
        return out

    def op_pairs(pairs):
        if pairs is None:
            return None
        out = []
        for c, e in pairs:
            co = c * (e * (e - 1) + P * e + Q)
            # algebraic ties (extremal exponents under their own operator)
            # cancel exactly in the bracket; keep float residue out of the
            # analytic-split divergence checks
            scale = abs(c) * (abs(e * (e - 1)) + abs(P * e) + abs(Q) + 1.0)
            if abs(co) > 1e-12 * scale:
                out.append((co, e - 2))
        return tuple(out)

    return _Factor(ev, min(zs), max(infs), u.knots,
                   op_pairs(u.power_head()), u.head_end(),
                   op_pairs(u.power_tail()), u.tail_start())


def _abs_power_factor(u: RadialProfile, p: float) -> _Factor:
    """|u|^p; head/tail survive only when they are a single power."""
    def single(pairs):
        if pairs is None:
            return None
        if len(pairs) == 0:
            return ()
        if len(pairs) == 1:
            c, e = pairs[0]
            return ((abs(c) ** p, e * p),)
        return None

    def ev(r):
        return np.abs(u.value(np.asarray(r, dtype=float))) ** p

    return _Factor(ev, u.zero_exponents()[0] * p, u.infinity_exponents()[0] * p,
                   u.knots, single(u.power_head()), u.head_end(),
                   single(u.power_tail()), u.tail_start())


def _integral(fx: _Factor, fy: _Factor, weight: float, tol: float = 1e-10) -> float:
    """integral_0^inf fx(r) fy(r) r^weight dr with analytic thin ends."""
    zero = fx.zero_exp + fy.zero_exp
    inf = fx.inf_exp + fy.inf_exp
    m0 = weight + zero + 1
    m1 = -(weight + inf) - 1
    analytic = 0.0

    tail_cut = None
    if m1 <= _SPLIT_MARGIN and fx.tail is not None and fy.tail is not None:
        tail_cut = max([fx.tail_start, fy.tail_start, 1.0]
                       + list(fx.knots) + list(fy.knots))
        for cx, ex in fx.tail:
            for cy, ey in fy.tail:
                E = ex + ey + weight
                if E + 1 >= -1e-12:
                    raise DomainError(
                        f"integral divergent at infinity: exact tail power "
                        f"r^{E} against dr")
                analytic += cx * cy * tail_cut ** (E + 1) / (-(E + 1))
    elif m1 <= 1e-9:
        raise DomainError(
            f"integral divergent at infinity (declared margin {m1:.3g})")

    head_cut = None
    if m0 <= _SPLIT_MARGIN and fx.head is not None and fy.head is not None:
        head_cut = min(fx.head_end, fy.head_end)
        if tail_cut is not None:
            head_cut = min(head_cut, tail_cut)
        for cx, ex in fx.head:
            for cy, ey in fy.head:
                E = ex + ey + weight
                if E + 1 <= 1e-12:
                    raise DomainError(
                        f"integral divergent at the origin: exact head power "
                        f"r^{E} against dr")
                analytic += cx * cy * head_cut ** (E + 1) / (E + 1)
    elif m0 <= 1e-9:
        raise DomainError(
            f"integral divergent at the origin (declared margin {m0:.3g})")

    if head_cut is None and tail_cut is None:
        def ev(r):
            r = np.asarray(r, dtype=float)
            return fx.eval(r) * fy.eval(r)
        knots = tuple(sorted({k for k in fx.knots + fy.knots if k > 0}))
        integrand = RadialIntegrand(ev, zero, inf, knots)
        return integrate_radial(integrand, weight, tol=tol).value

    lo = head_cut if head_cut is not None else 0.0
    hi = tail_cut if tail_cut is not None else math.inf
    safe = head_cut if head_cut is not None else tail_cut

    def ev(r):
        r = np.asarray(r, dtype=float)
        live = (r >= lo) & (r <= hi)
        if not live.any():
            return np.zeros(r.shape)
        rs = np.where(live, r, safe)
        return np.where(live, fx.eval(rs) * fy.eval(rs), 0.0)

    inner = [k for k in fx.knots + fy.knots if lo < k < hi]
    cuts = sorted({*inner, *(c for c in (head_cut, tail_cut) if c is not None)})
    integrand = RadialIntegrand(
        ev,
        math.inf if head_cut is not None else zero,
        -math.inf if tail_cut is not None else inf,
        tuple(cuts))
    return analytic + integrate_radial(integrand, weight, tol=tol).value


def _wrap(u: RadialProfile) -> RadialIntegrand:
    return RadialIntegrand(u.value, u.zero_exponents()[0],
                           u.infinity_exponents()[0], u.knots)


# ---------------------------------------------------------------------------
# breakdowns and norms


@dataclass(frozen=True)
class FormTerm:
    name: str
    coefficient: float
    integral: float


@dataclass(frozen=True)
class FormBreakdown:
    """Signed decomposition of a quadratic form into named integrals."""

    components: Tuple[FormTerm, ...]

    @property
    def total(self) -> float:
        return math.fsum(t.coefficient * t.integral for t in self.components)

    @property
    def scale(self) -> float:
        """Largest weighted component magnitude; residual yardstick."""
        return max((abs(t.coefficient * t.integral) for t in self.components),
                   default=0.0)

    def component(self, name: str) -> FormTerm:
        for t in self.components:
            if t.name == name:
                return t
        raise KeyError(name)


def lp_norm(f: RadialProfile, N: int, p: float, extra_power: float = 0.0,
            tol: float = 1e-10) -> float:
    """[sphere_area * integral |f|^p r^{N-1+extra_power} dr]^{1/p}."""
    if p <= 0:
        raise DomainError(f"lp_norm requires p > 0, got {p}")
    mass = _integral(_abs_power_factor(f, p), _ONE, N - 1 + extra_power, tol)
    return (sphere_area(N) * mass) ** (1 / p)


# ---------------------------------------------------------------------------
# Rayleigh quotients (mode-0 profiles only; the non-quadratic denominators
# have no closed sphere factor for k >= 1)


def ckn_quotient(u: RadialProfile, N: int, gamma: float,
                 tol: float = 1e-10) -> float:
    """Bilaplacian quotient with pure power weights r^{-gamma}, r^{gamma}."""
    p2 = sobolev_exponent(N, gamma)
    area = sphere_area(N)
    op = _op_factor(u, N - 1.0, 0.0)
    num = area * _integral(op, op, N - 1 - gamma, tol)
    den = area * _integral(_abs_power_factor(u, p2), _ONE, N - 1 + gamma, tol)
    return num / den ** (2 / p2)


def divform_quotient(u: RadialProfile, N: int, alpha: float, beta: float,
                     tol: float = 1e-10) -> float:
    """Divergence-form quotient on the non-singular (alpha, beta) range."""
    CknParams(N, alpha, beta)
    q = ckn_exponent(N, alpha, beta)
    area = sphere_area(N)
    op = _op_factor(u, N - 1.0 + alpha, 0.0)
    num = area * _integral(op, op, N - 1 + 2 * alpha - beta, tol)
    den = area * _integral(_abs_power_factor(u, q), _ONE, N - 1 + beta, tol)
    return num / den ** (2 / q)


def singular_quotient(u: RadialProfile, N: int, alpha: float, beta: float,
                      tol: float = 1e-10) -> float:
    """Divergence-form quotient on the singular range; dual-exponent norm."""
    CknParams(N, alpha, beta, singular=True)
    se = singular_exponents(N, alpha, beta)
    area = sphere_area(N)
    op = _op_factor(u, N - 1.0 + alpha, 0.0)
    num = area * _integral(op, op, N - 1 + 2 * alpha - beta, tol)
    den = area * _integral(_abs_power_factor(u, se.bar_exp), _ONE,
                           N - 1 + se.xi, tol)
    return num / den ** (2 / se.bar_exp)


def _rs_validate(N: int, gamma: float, mu: float) -> None:
    # mu == gamma is the degenerate no-remainder case (both coefficients
    # vanish identically); the params type requires mu > gamma
    if mu == gamma:
        if N < 5 or not -2 < gamma <= 0:
            raise DomainError(
                f"requires N >= 5 and -2 < gamma <= 0, got N={N}, {gamma}")
    else:
        RsParams(N, gamma, mu)


def rellich_sobolev_lhs(u: RadialProfile, N: int, gamma: float, mu: float,
                        tol: float = 1e-10) -> FormBreakdown:
    """Bilaplacian minus gradient plus zero-order form, gamma weights."""
    _rs_validate(N, gamma, mu)
    c1, c2 = rellich_sobolev_coeffs(N, gamma, mu)
    area = sphere_area(N)
    op = _op_factor(u, N - 1.0, 0.0)
    bilap = area * _integral(op, op, N - 1 - gamma, tol)
    grad = 0.0
    if c1 != 0:
        d1 = _d1_factor(u)
        grad = area * _integral(d1, d1, N - 3 - gamma, tol)
    zero = 0.0
    if c2 != 0:
        v = _value_factor(u)
        zero = area * _integral(v, v, N - 5 - gamma, tol)
    return FormBreakdown((
        FormTerm("bilaplacian_term", 1.0, bilap),
        FormTerm("gradient_term", -c1, grad),
        FormTerm("hardy_term", c2, zero),
    ))


def rellich_sobolev_quotient(u: RadialProfile, N: int, gamma: float,
                             mu: float, tol: float = 1e-10) -> float:
    """rellich_sobolev_lhs over the gamma-weighted critical norm."""
    num = rellich_sobolev_lhs(u, N, gamma, mu, tol).total
    p2 = sobolev_exponent(N, gamma)
    den = sphere_area(N) * _integral(_abs_power_factor(u, p2), _ONE,
                                     N - 1 + gamma, tol)
    return num / den ** (2 / p2)


# ---------------------------------------------------------------------------
# mode-k quadratic comparisons


def mode_comparison_forms(k: int, f: RadialProfile, N: int, gamma: float,
                          mu: float, tol: float = 1e-10) -> Tuple[float, float]:
    """(lhs, rhs) of the per-mode translated-weight comparison.

    lhs is the mu-weighted square of the translated operator on f; rhs is
    the gamma-weighted remainder form of w = r^vartheta f.  Equal at k = 0,
    strictly lhs < rhs for k >= 1.
    """
    params = RsParams(N, gamma, mu)
    ModeFunction(k, f)
    c = mode_eigenvalue(N, k)
    zeta, vartheta = params.zeta, params.vartheta

    b1 = N - 1 - (N - 2) * (mu - gamma) / (N - 4 - gamma)
    op_l = _op_factor(f, b1, -zeta ** 2 * c)
    lhs = _integral(op_l, op_l, N - 1 - mu, tol)

    w = PowerWeightedProfile(f, vartheta)
    c1, c2 = rellich_sobolev_coeffs(N, gamma, mu)
    op_r = _op_factor(w, N - 1.0, -float(c))
    bilap = _integral(op_r, op_r, N - 1 - gamma, tol)
    d1w = _d1_factor(w)
    vw = _value_factor(w)
    grad = _integral(d1w, d1w, N - 3 - gamma, tol)
    zero = _integral(vw, vw, N - 5 - gamma, tol)
    rhs = bilap - c1 * (grad + c * zero) + c2 * zero
    return lhs, rhs


def mode_gap_prediction(k: int, f: RadialProfile, N: int, gamma: float,
                        mu: float, tol: float = 1e-10) -> float:
    """Closed form for rhs - lhs of mode_comparison_forms."""
    params = RsParams(N, gamma, mu)
    ModeFunction(k, f)
    c = mode_eigenvalue(N, k)
    d1 = _d1_factor(f)
    v = _value_factor(f)
    grad = _integral(d1, d1, N - 3 - mu, tol)
    zero = _integral(v, v, N - 5 - mu, tol) if k > 0 else 0.0
    return (2 * (1 - params.zeta ** 2) * c * grad
            + mode_gap_coeff(N, gamma, mu, k) * zero)


def weak_hardy_rellich_ratio(k: int, f: RadialProfile, N: int, a: float,
                             tol: float = 1e-10) -> float:
    """Second-order over first-order mode form of the weak comparison."""
    WeakHrParams(N, a)
    ModeFunction(k, f)
    c = mode_eigenvalue(N, k)
    d1 = _d1_factor(f)
    den = _integral(d1, d1, N - 3 - 2 * a, tol)
    if den == 0:
        raise DomainError("degenerate input: first-derivative norm vanishes")
    d2 = _d2_factor(f)
    num = (_integral(d2, d2, N - 1 - 2 * a, tol)
           + ((1 + 2 * a) * (N - 1) + 2 * c) * den)
    c0 = c * (c + 2 * (1 + a) * (N - 4 - 2 * a))
    if c0 != 0:
        v = _value_factor(f)
        num += c0 * _integral(v, v, N - 5 - 2 * a, tol)
    return num / den


def divform_expansion(k: int, f: RadialProfile, N: int, alpha: float,
                      beta: float, tol: float = 1e-10) -> FormBreakdown:
    """Mode-wise expansion of the divergence-form square; total ~ 0.

    Components: the direct operator square (coefficient -1) against its
    bilaplacian + gradient + radial-gradient expansion.
    """
    ModeFunction(k, f)
    c = mode_eigenvalue(N, k)
    w2 = N - 1 + 2 * alpha - beta

    op_direct = _op_factor(f, N - 1.0 + alpha, -float(c))
    direct = _integral(op_direct, op_direct, w2, tol)

    op_lap = _op_factor(f, N - 1.0, -float(c))
    bilap = _integral(op_lap, op_lap, w2, tol)

    d1 = _d1_factor(f)
    grad_coeff = alpha * (N - 4 + 2 * alpha - beta)
    radial_coeff = alpha * (2 * beta - 3 * alpha + 4)
    d1_sq = 0.0
    if grad_coeff != 0 or radial_coeff != 0:
        d1_sq = _integral(d1, d1, w2 - 2, tol)
    grad = 0.0
    if grad_coeff != 0:
        grad = d1_sq
        if c != 0:
            v = _value_factor(f)
            grad += c * _integral(v, v, w2 - 4, tol)
    radial = d1_sq if radial_coeff != 0 else 0.0

    return FormBreakdown((
        FormTerm("direct_term", -1.0, direct),
        FormTerm("bilaplacian_term", 1.0, bilap),
        FormTerm("gradient_term", grad_coeff, grad),
        FormTerm("radial_gradient_term", radial_coeff, radial),
    ))


# ---------------------------------------------------------------------------
# scalar ratios and gaps


def hardy_ratio(f: RadialProfile, N: int, gamma: float,
                tol: float = 1e-10) -> float:
    """Weighted first-order Hardy quotient; sharp value hardy_const."""
    hardy_const(N, gamma)
    d1 = _d1_factor(f)
    v = _value_factor(f)
    num = _integral(d1, d1, N - 3 - gamma, tol)
    den = _integral(v, v, N - 5 - gamma, tol)
    if den == 0:
        raise DomainError("degenerate input: zero-order norm vanishes")
    return num / den


def hardy_rellich_ratio(u: RadialProfile, N: int, gamma: float,
                        tol: float = 1e-10) -> float:
    """Weighted Laplacian-over-gradient quotient."""
    op = _op_factor(u, N - 1.0, 0.0)
    d1 = _d1_factor(u)
    num = _integral(op, op, N - 1 - gamma, tol)
    den = _integral(d1, d1, N - 3 - gamma, tol)
    if den == 0:
        raise DomainError("degenerate input: first-derivative norm vanishes")
    return num / den


def combined_gap(u: RadialProfile, N: int, gamma: float,
                 tol: float = 1e-10) -> float:
    """Bilaplacian + squared-Hardy form minus its sharp gradient multiple.

    Strictly positive for nonzero admissible u; the sharp multiple is
    combined_const and is never attained.
    """
    const = combined_const(N, gamma)
    area = sphere_area(N)
    op = _op_factor(u, N - 1.0, 0.0)
    d1 = _d1_factor(u)
    v = _value_factor(u)
    bilap = _integral(op, op, N - 1 - gamma, tol)
    grad = _integral(d1, d1, N - 3 - gamma, tol)
    zero = _integral(v, v, N - 5 - gamma, tol)
    return area * (bilap + hardy_const(N, gamma) ** 2 * zero - const * grad)


# ---------------------------------------------------------------------------
# kernel quotient at the Newton exponent


def newton_kernel_quotient(f: RadialProfile, g: RadialProfile, N: int,
                           a: float, b: float, p_f: float, p_g: float,
                           tol: float = 1e-8) -> float:
    """Double kernel integral over the product of unweighted Lp norms."""
    num = stein_weiss_double(_wrap(f), _wrap(g), N, a, b, tol=tol).value
    return num / (lp_norm(f, N, p_f) * lp_norm(g, N, p_g))


def stein_weiss_quotient(f: RadialProfile, g: RadialProfile,
                         params: SwParams, tol: float = 1e-8) -> float:
    """Weighted kernel quotient at the parameter slice of `params`."""
    return newton_kernel_quotient(f, g, params.N, params.a, params.b,
                                  params.r, params.t, tol)


def newton_kernel_stationarity(f: RadialProfile, g: RadialProfile, N: int,
                               a: float, b: float, p_f: float, p_g: float,
                               bump: RadialProfile, delta: float = 2e-3,
                               tol: float = 1e-9) -> float:
    """|dQ/d(eps)| / Q at eps=0 for f -> f + eps*bump, Richardson slope.

    The bump is rescaled to match the Lp size of f, so `delta` measures a
    relative perturbation and slopes are comparable across inputs.
    """
    if delta <= 0:
        raise DomainError(f"stationarity step must be positive, got {delta}")
    amp = lp_norm(f, N, p_f) / lp_norm(bump, N, p_f)

    def quotient(eps: float) -> float:
        fp = SumProfile((f, AmplifiedProfile(bump, eps * amp))) if eps else f
        return newton_kernel_quotient(fp, g, N, a, b, p_f, p_g, tol)

    q0 = quotient(0.0)

    def slope(d: float) -> float:
        return (quotient(d) - quotient(-d)) / (2 * d)

    rich = (4 * slope(delta / 2) - slope(delta)) / 3
    return abs(rich) / abs(q0)


def stein_weiss_stationarity(f: RadialProfile, g: RadialProfile,
                             params: SwParams, bump: RadialProfile,
                             delta: float = 2e-3, tol: float = 1e-9) -> float:
    """Relative first-order slope of the quotient at (f, g) along bump."""
    return newton_kernel_stationarity(f, g, params.N, params.a, params.b,
                                      params.r, params.t, bump, delta, tol)
