"""Adaptive double-exponential quadrature for radial integrals.

One tanh-sinh rule on (0,1) underlies all one-dimensional integrals; pieces
of (0, inf) are mapped onto it affinely ([a,b]) or reciprocally ([b, inf)).
The double kernel integral uses a shared r = exp(sinh u) line grid so the
inner integrals come out of prefix sums.

Float range limits the reciprocal map: an endpoint margin m (integrand ~
x^{m-1}) leaves a truncated mass fraction of about (1e-308)^m, so margins
below ~0.08 cannot be integrated reliably in doubles.  Callers with exactly
power-law tails (the epsilon-indexed minimizing families) split those off
analytically; the integrator refuses thinner margins instead of silently
converging to a truncated value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np

from .errors import ConvergenceError, DomainError
from .specfun import sphere_area

_MAX_NODES = 1 << 20
_HALF_PI = math.pi / 2
_MIN_MARGIN = 0.08


@dataclass(frozen=True)
class QuadResult:
    value: float
    err_estimate: float
    evaluations: int

    def __post_init__(self):
        if self.err_estimate < 0 or self.evaluations <= 0:
            raise ValueError("QuadResult requires err_estimate >= 0 and evaluations > 0")


@dataclass(frozen=True)
class RadialIntegrand:
    """A function on (0, inf) with declared endpoint power behavior.

    `zero_exponent` z declares eval(r) = O(r^z) as r -> 0 (math.inf for a
    function vanishing identically near 0); `infinity_exponent` declares the
    decay power at infinity (-math.inf for functions vanishing identically,
    or faster than any power, at large r).  `knots` lists interior points
    where smoothness degrades; the integrator splits there.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    zero_exponent: float
    infinity_exponent: float
    knots: Tuple[float, ...] = field(default=())


@lru_cache(maxsize=64)
def _ts_level(level: int, window_key: int) -> Tuple[np.ndarray, np.ndarray]:
    """Tanh-sinh nodes (x, w) on (0,1) for one refinement level.

    Level 0 carries all nodes at spacing h = 1; level L > 0 only the new
    nodes at odd multiples of 2^-L.  window_key is ceil(8 * u_max).
    """
    u_max = window_key / 8.0
    h = 0.5 ** level
    if level == 0:
        u = np.arange(0, math.floor(u_max / h) + 1) * h
    else:
        u = np.arange(h, u_max + h / 2, 2 * h)
    v = _HALF_PI * np.sinh(u)
    small = 1.0 / (1.0 + np.exp(np.minimum(2 * v, 700.0)))   # 1 - x at +u
    big = 1.0 - small
    w = 0.5 * _HALF_PI * np.cosh(u) / np.cosh(v) ** 2
    if level == 0:
        x = np.concatenate([big, small[1:]])
        ww = np.concatenate([w, w[1:]])
    else:
        x = np.concatenate([big, small])
        ww = np.concatenate([w, w])
    keep = (x > 0) & (x < 1) & (ww > 0)
    return x[keep], ww[keep]


def _integrate_01(g: Callable[[np.ndarray], np.ndarray], tol: float,
                  margin: float, budget: int) -> Tuple[float, float, int]:
    """Tanh-sinh integral of g over (0,1); g may blow up algebraically at 0/1.

    `margin` is the worst endpoint integrability margin (1 for bounded
    integrands); it sets the truncation window.  Returns (value, err, evals).
    """
    u_max = min(math.asinh(42.0 / (math.pi * max(margin, 0.01))), 8.0)
    key = max(int(u_max * 8) + 1, 26)
    evals = 0
    total = 0.0
    prev = math.inf
    err = math.inf
    for level in range(15):
        x, w = _ts_level(level, key)
        if evals + x.size > budget:
            raise ConvergenceError(
                f"node budget exhausted at level {level}", best_estimate=total)
        h = 0.5 ** level
        vals = np.asarray(g(x), dtype=float)
        if not np.all(np.isfinite(vals)):
            bad = x[~np.isfinite(vals)]
            raise DomainError(f"integrand not finite at x={bad[:3]}")
        evals += x.size
        piece = float(np.dot(w, vals)) * h
        total = piece if level == 0 else 0.5 * prev + piece
        if level >= 2:
            err = abs(total - prev)
            if err <= tol * max(abs(total), 1e-300):
                return total, err, evals
        prev = total
    raise ConvergenceError(
        f"tanh-sinh stalled at err {err:g} (tol {tol:g})", best_estimate=total)


def integrate_radial(f: RadialIntegrand, power: float, tol: float = 1e-10) -> QuadResult:
    """integral_0^inf f(r) r^power dr with endpoint-singularity handling.

    Preconditions power + zero_exponent > -1 and power + infinity_exponent < -1
    are enforced on the declared exponents; the declarations themselves are
    spot-checked against log-slopes at r = 1e-8 and 1e8.
    """
    z = f.zero_exponent
    i = f.infinity_exponent
    m0 = (power + z + 1) if math.isfinite(z) else math.inf
    m1 = (-(power + i) - 1) if math.isfinite(i) else math.inf
    if not m0 > 1e-9:
        raise DomainError(f"divergent at 0: power+zero_exponent = {power + z} <= -1")
    if not m1 > 1e-9:
        raise DomainError(
            f"divergent at infinity: power+infinity_exponent = {power + i} >= -1")
    if m0 < _MIN_MARGIN or m1 < _MIN_MARGIN:
        raise ConvergenceError(
            f"endpoint margin below {_MIN_MARGIN}: float-range truncation would "
            f"dominate; split the power-law end off analytically")
    _spot_check(f, power)

    cuts = sorted({float(k) for k in f.knots if k > 0}) or [1.0]
    total = 0.0
    err = 0.0
    evals = 0
    budget = _MAX_NODES

    def add(gfun, margin):
        nonlocal total, err, evals, budget
        v, e, n = _integrate_01(gfun, tol, margin, budget)
        total += v
        err += e
        evals += n
        budget -= n

    c0 = cuts[0]

    def g_left(x, c=c0):
        return _weighted(f, c * x, power, c)

    add(g_left, min(m0, 1.0))

    for a, b in zip(cuts[:-1], cuts[1:]):
        def g_mid(x, a=a, b=b):
            return _weighted(f, a + (b - a) * x, power, b - a)
        add(g_mid, 1.0)

    c1 = cuts[-1]

    def g_right(x, c=c1):
        return _weighted(f, c / x, power, c / (x * x))

    add(g_right, min(m1, 1.0))
    return QuadResult(total, err, evals)


def _weighted(f: RadialIntegrand, r, power: float, jac) -> np.ndarray:
    """f(r) r^power jac, with exact zeros of f short-circuiting the weight.

    A convergent product underflows the value side to exact 0 long before
    r^power can overflow (the margin bounds the net exponent), so masking
    on v == 0 loses nothing and keeps 0 * inf out of the nodes.
    """
    v = np.asarray(f.eval(r), dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        out = v * r ** power * jac
    return np.where(v == 0.0, 0.0, out)


def _spot_check(f: RadialIntegrand, power: float) -> None:
    """Verify the declared exponents bound the log-slopes near 0 and infinity.

    A slope shallower than declared is harmless while the slope measured at
    the probe still clears the margin the truncation window was sized for
    (capped at 1, matching _piece_margins); slow power-law crossovers sit in
    that regime long after the integral is truncation-safe.  Only a shortfall
    below that sizing margin gets rejected.
    """
    if math.isfinite(f.zero_exponent):
        v = np.asarray(f.eval(np.array([1e-8, 2e-8])), dtype=float)
        if v[0] != 0 and v[1] != 0:
            slope = math.log2(abs(v[1] / v[0]))
            sized = min(power + f.zero_exponent + 1.0, 1.0)
            if slope < f.zero_exponent - 0.5 and power + slope + 1.0 < sized:
                raise DomainError(
                    f"declared zero_exponent {f.zero_exponent} too optimistic: "
                    f"log-slope {slope:.3f} at r=1e-8")
    if math.isfinite(f.infinity_exponent):
        v = np.asarray(f.eval(np.array([1e8, 2e8])), dtype=float)
        if v[0] != 0 and v[1] != 0:
            slope = math.log2(abs(v[1] / v[0]))
            sized = min(-(power + f.infinity_exponent) - 1.0, 1.0)
            if slope > f.infinity_exponent + 0.5 and -(power + slope) - 1.0 < sized:
                raise DomainError(
                    f"declared infinity_exponent {f.infinity_exponent} too "
                    f"optimistic: log-slope {slope:.3f} at r=1e8")


# ---------------------------------------------------------------------------
# Newton potential


def newton_potential(g: RadialIntegrand, N: int, tol: float = 1e-11) -> RadialIntegrand:
    """Radial Newton potential r^{2-N} int_0^r g s^{N-1} ds + int_r^inf g s ds.

    Solves -u'' - (N-1)/r u' = (N-2) g in the radial sense.
    """
    if N < 3:
        raise DomainError(f"newton_potential requires N >= 3, got {N}")
    zg, ig = g.zero_exponent, g.infinity_exponent
    if math.isfinite(zg) and not zg > -2:
        raise DomainError("newton_potential requires zero_exponent > -2")
    if math.isfinite(ig) and not ig < -2:
        raise DomainError("newton_potential requires infinity_exponent < -2")
    knots = tuple(sorted({float(k) for k in g.knots if k > 0}))
    # beyond these radii the t-substitutions push all mass into an
    # unresolvable corner of the rule; switch to log pieces off cached bases
    r_hi = 4.0 * max(knots + (1.0,))
    r_lo = 0.25 * min(knots + (1.0,))
    cache: dict = {}

    def near_mass(r: float) -> float:
        """int_0^r g(s) s^{N-1} ds = r^N int_0^1 g(rt) t^{N-1} dt, knot-split."""
        lo = 0.0
        acc = 0.0
        for hi in sorted({k / r for k in knots if k < r} | {1.0}):
            span = hi - lo
            def h1(x, lo=lo, span=span):
                t = lo + span * x
                return g.eval(r * t) * t ** (N - 1) * span
            m = min(zg + N, 1.0) if (lo == 0.0 and math.isfinite(zg)) else 1.0
            v, _, _ = _integrate_01(h1, tol, m, _MAX_NODES)
            acc += v
            lo = hi
        return acc * r ** N

    def far_mass(r: float) -> float:
        """int_r^inf g(s) s ds = r^2 int_0^1 g(r/x) x^{-3} dx, knot-split."""
        lo = 0.0
        acc = 0.0
        for hi in sorted({r / k for k in knots if k > r} | {1.0}):
            span = hi - lo
            def h2(x, lo=lo, span=span):
                t = lo + span * x
                return g.eval(r / t) * t ** -3.0 * span
            m = min(-ig - 2, 1.0) if (lo == 0.0 and math.isfinite(ig)) else 1.0
            v, _, _ = _integrate_01(h2, tol, m, _MAX_NODES)
            acc += v
            lo = hi
        return acc * r * r

    def log_piece(a: float, b: float, w: float) -> float:
        """int_a^b g(s) s^w ds via s = a exp(yL); smooth exponential in y."""
        L = math.log(b / a)
        def h(y):
            s = a * np.exp(y * L)
            return g.eval(s) * s ** (w + 1)
        v, _, _ = _integrate_01(h, tol, 1.0, _MAX_NODES)
        return v * L

    def eval_one(r: float) -> float:
        if r <= r_hi:
            P = near_mass(r)
        else:
            if "P_hi" not in cache:
                cache["P_hi"] = near_mass(r_hi)
            P = cache["P_hi"] + log_piece(r_hi, r, N - 1.0)
        if r >= r_lo:
            Q = far_mass(r)
        else:
            if "Q_lo" not in cache:
                cache["Q_lo"] = far_mass(r_lo)
            Q = cache["Q_lo"] + log_piece(r, r_lo, 1.0)
        return r ** (2.0 - N) * P + Q

    def potential(r):
        arr = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.array([eval_one(x) for x in arr])
        return out if np.ndim(r) else out[0]

    inf_exp = max(2 - N, ig + 2) if math.isfinite(ig) else float(2 - N)
    return RadialIntegrand(eval=potential, zero_exponent=0.0,
                           infinity_exponent=inf_exp, knots=knots)


# ---------------------------------------------------------------------------
# double kernel integral


def stein_weiss_double(f: RadialIntegrand, g: RadialIntegrand, N: int,
                       a: float, b: float, tol: float = 1e-8) -> QuadResult:
    """area(N)^2 double integral of f(r) g(s) r^{N-1-a} s^{N-1-b} max(r,s)^{2-N}.

    This is the spherical reduction of the kernel-power-(N-2) double form.
    Each refinement level costs O(n): the inner integrals are prefix sums
    with Euler-Maclaurin endpoint corrections on a shared exp(sinh u) grid.
    """
    if N < 3:
        raise DomainError(f"stein_weiss_double requires N >= 3, got {N}")
    margins = []
    if math.isfinite(f.zero_exponent):
        margins.append(f.zero_exponent + N - a)    # f r^{N-1-a}, kernel -> const
    if math.isfinite(g.zero_exponent):
        margins.append(g.zero_exponent + N - b)
    if math.isfinite(f.infinity_exponent):
        margins.append(-(f.infinity_exponent + 2 - a))   # f r^{N-1-a} r^{2-N}
    if math.isfinite(g.infinity_exponent):
        margins.append(-(g.infinity_exponent + 2 - b))
    # joint r ~ s shells: dyadic mass scales like R^{zf+zg+N+2-a-b} at 0 and
    # R^{if+ig+N+2-a-b} at infinity
    if math.isfinite(f.zero_exponent) and math.isfinite(g.zero_exponent):
        margins.append(f.zero_exponent + g.zero_exponent + N + 2 - a - b)
    if math.isfinite(f.infinity_exponent) and math.isfinite(g.infinity_exponent):
        margins.append(-(f.infinity_exponent + g.infinity_exponent + N + 2 - a - b))
    margin = min(margins) if margins else 1.0
    if margin <= 0:
        raise DomainError(
            f"double integral divergent: worst endpoint margin {margin:g} <= 0")
    # the grid spans r = exp(+-S); powers up to ~N+2 must stay in float range
    S = min(44.0 / max(margin, 1e-9), 660.0 / (N + 2))
    if margin * S < 25.0:
        raise DomainError(
            f"double integral margin {margin:g} too thin for float-range grid")
    u_max = math.asinh(S)

    def level_value(n: int) -> float:
        u = np.linspace(-u_max, u_max, n)
        h = u[1] - u[0]
        r = np.exp(np.sinh(u))
        jac = np.cosh(u) * r
        fv = np.asarray(f.eval(r), dtype=float)
        gv = np.asarray(g.eval(r), dtype=float)
        fi = fv * r ** (N - 1 - a) * jac
        gi_in = gv * r ** (N - 1 - b) * jac      # P(r) = int_0^r
        gi_out = gv * r ** (1 - b) * jac         # Q(r) = int_r^inf
        P = _em_prefix(gi_in, h)
        Q = _em_suffix(gi_out, h)
        inner = r ** (2 - N) * P + Q
        wt = np.ones(n)
        wt[0] = wt[-1] = 0.5
        return float(np.dot(wt, fi * inner)) * h

    evals = 0
    n = 257
    prev = math.nan
    value = math.nan
    err = math.inf
    while evals <= _MAX_NODES:
        value = level_value(n)
        evals += 2 * n
        if not math.isnan(prev):
            err = abs(value - prev)
            if err <= tol * max(abs(value), 1e-300):
                area = sphere_area(N)
                return QuadResult(area * area * value, area * area * err, evals)
        prev = value
        n = 2 * n - 1
    raise ConvergenceError(
        f"double integral did not reach tol={tol}; err {err:g}",
        best_estimate=sphere_area(N) ** 2 * value)


def _em_prefix(y: np.ndarray, h: float) -> np.ndarray:
    """Trapezoid prefix integrals with Euler-Maclaurin endpoint corrections.

    The grid is wide enough that the integrand and its derivatives vanish at
    the ends, so only the moving-endpoint corrections survive; they lift the
    prefix accuracy to O(h^6).
    """
    t = np.concatenate([[0.0], np.cumsum((y[1:] + y[:-1]) * 0.5)]) * h
    d1, d3 = _edge_derivatives(y, h)
    return t - h * h / 12 * d1 + h ** 4 / 720 * d3


def _em_suffix(y: np.ndarray, h: float) -> np.ndarray:
    """Suffix counterpart of _em_prefix, accumulated from the right.

    Summing tailward keeps the rounding error relative to the local suffix
    value; the algebraically equal total-minus-prefix form carries absolute
    noise at the scale of the total, which a heavy first-slot weight in
    stein_weiss_double amplifies past any tolerance.
    """
    steps = (y[1:] + y[:-1]) * 0.5
    t = np.concatenate([np.cumsum(steps[::-1])[::-1], [0.0]]) * h
    d1, d3 = _edge_derivatives(y, h)
    return t + h * h / 12 * d1 - h ** 4 / 720 * d3


def _edge_derivatives(y: np.ndarray, h: float):
    d1 = np.zeros_like(y)
    d1[2:-2] = (y[:-4] - 8 * y[1:-3] + 8 * y[3:-1] - y[4:]) / (12 * h)
    d3 = np.zeros_like(y)
    d3[2:-2] = (-y[:-4] + 2 * y[1:-3] - 2 * y[3:-1] + y[4:]) / (2 * h ** 3)
    return d1, d3
