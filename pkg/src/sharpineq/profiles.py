"""Radial trial profiles: explicit minimizers and synthetic test functions.

Every profile carries analytic value/d1/d2, declared endpoint exponents for
the quadrature layer, and (where the function is exactly a power beyond its
last knot) a `power_tail` description so thin-margin tail integrals can be
split off analytically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from .constants import (
    RsParams,
    SwCase,
    SwParams,
    extremal_normalizer,
    singular_exponents,
)
from .errors import DomainError
from .quadrature import _MAX_NODES, _integrate_01

PowerPairs = Tuple[Tuple[float, float], ...]


class RadialProfile:
    """Base interface: vectorized value/d1/d2 plus integrability metadata.

    `zero_exponents()` returns conservative lower bounds (z0, z1, z2) with
    value = O(r^{z0}) etc. near 0 (math.inf when identically zero there);
    `infinity_exponents()` returns upper bounds on the decay powers.
    `power_tail()` returns ((coeff, exponent), ...) when the value equals
    that power sum exactly for r >= tail_start(), else None.
    """

    knots: Tuple[float, ...] = ()

    def value(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def d1(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def d2(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def zero_exponents(self) -> Tuple[float, float, float]:
        raise NotImplementedError

    def infinity_exponents(self) -> Tuple[float, float, float]:
        raise NotImplementedError

    def power_tail(self) -> Optional[PowerPairs]:
        return None

    def tail_start(self) -> float:
        return max(self.knots) if self.knots else 1.0

    def power_head(self) -> Optional[PowerPairs]:
        """Exact power-sum description on (0, head_end()], if one exists.

        An empty tuple means identically zero there; None means no finite
        power sum represents the profile near the origin.
        """
        return None

    def head_end(self) -> float:
        return min(self.knots) if self.knots else 1.0


@dataclass(frozen=True)
class PowerTailProfile(RadialProfile):
    """amplitude * r^{-shift} (offset + r^{power})^{-outer}.

    The closed-form minimizers of all the embedding quotients have this
    shape (or are short sums of it).  decay = shift + power*outer is the
    total decay rate at infinity.
    """

    amplitude: float
    shift: float
    offset: float
    power: float
    outer: float
    knots: Tuple[float, ...] = field(default=(), init=False)

    def __post_init__(self):
        if self.offset <= 0 or self.power <= 0:
            raise DomainError("PowerTailProfile requires offset > 0 and power > 0")
        if self.amplitude == 0:
            raise DomainError("PowerTailProfile requires a nonzero amplitude")

    @property
    def decay(self) -> float:
        return self.shift + self.power * self.outer

    def _w_list(self, r, order: int):
        """[(c+r^q)^{-p} and its first `order` r-derivatives].

        w^{(k)} = sum_j a_{kj} r^{jq-k} (c+r^q)^{-p-j}; the table follows from
        d/dr[r^{jq-k}(c+y)^{-p-j}] = (jq-k) r^{jq-k-1}(c+y)^{-p-j}
                                     - (p+j) q r^{(j+1)q-k-1}(c+y)^{-p-j-1}.
        """
        p, q, c = self.outer, self.power, self.offset
        y = r ** self.power
        coeffs = [{0: 1.0}]
        for k in range(order):
            nxt: dict = {}
            for j, co in coeffs[k].items():
                if j * q - k != 0:
                    nxt[j] = nxt.get(j, 0.0) + co * (j * q - k)
                nxt[j + 1] = nxt.get(j + 1, 0.0) - co * (p + j) * q
            coeffs.append(nxt)
        out = []
        for k, table in enumerate(coeffs):
            acc = 0.0
            for j, co in table.items():
                acc = acc + co * r ** (j * q - k) * (c + y) ** (-p - j)
            out.append(acc)
        return out

    def _w(self, r):
        return tuple(self._w_list(r, 2))

    def value(self, r):
        w = self._w_list(r, 0)[0]
        return self.amplitude * r ** -self.shift * w

    def d1(self, r):
        s = self.shift
        w, w1, _ = self._w(r)
        return self.amplitude * (-s * r ** (-s - 1) * w + r ** -s * w1)

    def d2(self, r):
        s = self.shift
        w, w1, w2 = self._w(r)
        return self.amplitude * (s * (s + 1) * r ** (-s - 2) * w
                                 - 2 * s * r ** (-s - 1) * w1 + r ** -s * w2)

    def deriv(self, r, n: int):
        """Exact n-th derivative via Leibniz over r^{-shift} * w(r)."""
        s = self.shift
        ws = self._w_list(r, n)
        acc = 0.0
        for m in range(n + 1):
            pre = 1.0
            for i in range(m):
                pre *= -s - i
            acc = acc + math.comb(n, m) * pre * r ** (-s - m) * ws[n - m]
        return self.amplitude * acc

    def zero_exponents(self):
        s, q = self.shift, self.power
        if s == 0:
            return 0.0, q - 1, q - 2
        return -s, -s - 1, -s - 2

    def infinity_exponents(self):
        d = self.decay
        return -d, -d - 1, -d - 2


@dataclass(frozen=True)
class SumProfile(RadialProfile):
    members: Tuple[RadialProfile, ...]

    def __post_init__(self):
        if not self.members:
            raise DomainError("SumProfile requires at least one member")
        ks = sorted({k for m in self.members for k in m.knots})
        object.__setattr__(self, "knots", tuple(ks))

    def value(self, r):
        return sum(m.value(r) for m in self.members)

    def d1(self, r):
        return sum(m.d1(r) for m in self.members)

    def d2(self, r):
        return sum(m.d2(r) for m in self.members)

    def zero_exponents(self):
        triples = [m.zero_exponents() for m in self.members]
        return tuple(min(t[j] for t in triples) for j in range(3))

    def infinity_exponents(self):
        triples = [m.infinity_exponents() for m in self.members]
        return tuple(max(t[j] for t in triples) for j in range(3))

    def power_tail(self):
        pairs = []
        for m in self.members:
            t = m.power_tail()
            if t is None:
                return None
            pairs.extend(t)
        return tuple(pairs)

    def tail_start(self):
        return max(m.tail_start() for m in self.members)

    def power_head(self):
        pairs = []
        for m in self.members:
            h = m.power_head()
            if h is None:
                return None
            pairs.extend(h)
        return tuple(pairs)

    def head_end(self):
        return min(m.head_end() for m in self.members)


@dataclass(frozen=True)
class ScaledProfile(RadialProfile):
    """lam^degree * base(lam * r): the dilation orbit of a profile."""

    base: RadialProfile
    lam: float
    degree: float

    def __post_init__(self):
        if self.lam <= 0:
            raise DomainError("ScaledProfile requires lam > 0")
        object.__setattr__(self, "knots",
                           tuple(k / self.lam for k in self.base.knots))

    def value(self, r):
        return self.lam ** self.degree * self.base.value(self.lam * r)

    def d1(self, r):
        return self.lam ** (self.degree + 1) * self.base.d1(self.lam * r)

    def d2(self, r):
        return self.lam ** (self.degree + 2) * self.base.d2(self.lam * r)

    def zero_exponents(self):
        return self.base.zero_exponents()

    def infinity_exponents(self):
        return self.base.infinity_exponents()

    def power_tail(self):
        t = self.base.power_tail()
        if t is None:
            return None
        return tuple((c * self.lam ** (self.degree + e), e) for c, e in t)

    def tail_start(self):
        return self.base.tail_start() / self.lam

    def power_head(self):
        h = self.base.power_head()
        if h is None:
            return None
        return tuple((c * self.lam ** (self.degree + e), e) for c, e in h)

    def head_end(self):
        return self.base.head_end() / self.lam


@dataclass(frozen=True)
class AmplifiedProfile(RadialProfile):
    """factor * base(r), for perturbation sums like f + delta*bump."""

    base: RadialProfile
    factor: float

    def __post_init__(self):
        if self.factor == 0:
            raise DomainError("AmplifiedProfile requires a nonzero factor")
        object.__setattr__(self, "knots", self.base.knots)

    def value(self, r):
        return self.factor * self.base.value(r)

    def d1(self, r):
        return self.factor * self.base.d1(r)

    def d2(self, r):
        return self.factor * self.base.d2(r)

    def zero_exponents(self):
        return self.base.zero_exponents()

    def infinity_exponents(self):
        return self.base.infinity_exponents()

    def power_tail(self):
        t = self.base.power_tail()
        if t is None:
            return None
        return tuple((self.factor * c, e) for c, e in t)

    def tail_start(self):
        return self.base.tail_start()

    def power_head(self):
        h = self.base.power_head()
        if h is None:
            return None
        return tuple((self.factor * c, e) for c, e in h)

    def head_end(self):
        return self.base.head_end()


@dataclass(frozen=True)
class PowerWeightedProfile(RadialProfile):
    """r^{theta} * base(r), for the weight-shifted quadratic forms."""

    base: RadialProfile
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "knots", self.base.knots)

    def value(self, r):
        return r ** self.theta * self.base.value(r)

    def d1(self, r):
        t = self.theta
        return t * r ** (t - 1) * self.base.value(r) + r ** t * self.base.d1(r)

    def d2(self, r):
        t = self.theta
        return (t * (t - 1) * r ** (t - 2) * self.base.value(r)
                + 2 * t * r ** (t - 1) * self.base.d1(r)
                + r ** t * self.base.d2(r))

    def zero_exponents(self):
        z0, z1, z2 = self.base.zero_exponents()
        t = self.theta
        if self.theta == 0:
            return z0, z1, z2
        return z0 + t, min(z0 + t - 1, z1 + t), min(z0 + t - 2, z1 + t - 1, z2 + t)

    def infinity_exponents(self):
        i0, i1, i2 = self.base.infinity_exponents()
        t = self.theta
        if self.theta == 0:
            return i0, i1, i2
        return i0 + t, max(i0 + t - 1, i1 + t), max(i0 + t - 2, i1 + t - 1, i2 + t)

    def power_tail(self):
        t = self.base.power_tail()
        if t is None:
            return None
        return tuple((c, e + self.theta) for c, e in t)

    def tail_start(self):
        return self.base.tail_start()

    def power_head(self):
        h = self.base.power_head()
        if h is None:
            return None
        return tuple((c, e + self.theta) for c, e in h)

    def head_end(self):
        return self.base.head_end()


@dataclass(frozen=True)
class PowerComposeProfile(RadialProfile):
    """base(r^{zeta}): the radial power change of variables t = r^{zeta}."""

    base: RadialProfile
    zeta: float

    def __post_init__(self):
        if self.zeta <= 0:
            raise DomainError("PowerComposeProfile requires zeta > 0")
        object.__setattr__(self, "knots",
                           tuple(k ** (1 / self.zeta) for k in self.base.knots))

    def _t(self, r):
        return np.asarray(r, dtype=float) ** self.zeta

    def value(self, r):
        return self.base.value(self._t(r))

    def d1(self, r):
        z = self.zeta
        r = np.asarray(r, dtype=float)
        return z * r ** (z - 1) * self.base.d1(self._t(r))

    def d2(self, r):
        z = self.zeta
        r = np.asarray(r, dtype=float)
        t = self._t(r)
        return (z * (z - 1) * r ** (z - 2) * self.base.d1(t)
                + z * z * r ** (2 * z - 2) * self.base.d2(t))

    def zero_exponents(self):
        z0, z1, z2 = self.base.zero_exponents()
        z = self.zeta
        return (z * z0, z * (z1 + 1) - 1,
                min(z * (z1 + 1) - 2, z * (z2 + 2) - 2))

    def infinity_exponents(self):
        i0, i1, i2 = self.base.infinity_exponents()
        z = self.zeta
        return (z * i0, z * (i1 + 1) - 1,
                max(z * (i1 + 1) - 2, z * (i2 + 2) - 2))

    def power_tail(self):
        t = self.base.power_tail()
        if t is None:
            return None
        return tuple((c, e * self.zeta) for c, e in t)

    def tail_start(self):
        return self.base.tail_start() ** (1 / self.zeta)

    def power_head(self):
        h = self.base.power_head()
        if h is None:
            return None
        return tuple((c, e * self.zeta) for c, e in h)

    def head_end(self):
        return self.base.head_end() ** (1 / self.zeta)


@dataclass(frozen=True)
class ModeFunction:
    """u = f(r) Y_k(sigma) with a unit-normalized spherical harmonic.

    For k >= 1 the radial part must vanish at the origin at declared order
    at least k, or the represented u is not smooth.
    """

    k: int
    radial: RadialProfile

    def __post_init__(self):
        if self.k < 0 or self.k != int(self.k):
            raise DomainError("mode index k must be a nonnegative integer")
        if self.k >= 1 and self.radial.zero_exponents()[0] < self.k:
            raise DomainError(
                "mode k >= 1 needs a radial part with declared origin order >= k")

    def eigenvalue(self, N: int) -> float:
        return float(self.k * (N - 2 + self.k))


@dataclass(frozen=True)
class GaussBump(RadialProfile):
    """exp(-((r-center)/width)^2): generic smooth localized test function."""

    center: float
    width: float

    def __post_init__(self):
        if self.width <= 0:
            raise DomainError("GaussBump requires width > 0")

    def _t(self, r):
        return (r - self.center) / self.width

    def value(self, r):
        return np.exp(-self._t(r) ** 2)

    def d1(self, r):
        return -2 * self._t(r) / self.width * self.value(r)

    def d2(self, r):
        t = self._t(r)
        return (4 * t * t - 2) / self.width ** 2 * self.value(r)

    def zero_exponents(self):
        return 0.0, 0.0, 0.0

    def infinity_exponents(self):
        return -math.inf, -math.inf, -math.inf


def _cutoff_sde(t: np.ndarray):
    """(S, S', S'') of the C^inf step S = 1/(1+exp(1/t - 1/(1-t))) on [0,1]."""
    t = np.asarray(t, dtype=float)
    s = np.zeros_like(t)
    s1 = np.zeros_like(t)
    s2 = np.zeros_like(t)
    inner = (t > 0) & (t < 1)
    ti = t[inner]
    e = np.clip(1 / ti - 1 / (1 - ti), -700, 700)
    S = 1 / (1 + np.exp(e))
    e1 = -1 / ti ** 2 - 1 / (1 - ti) ** 2
    e2 = 2 / ti ** 3 - 2 / (1 - ti) ** 3
    S1 = -S * (1 - S) * e1
    S2 = -(S1 * (1 - 2 * S) * e1 + S * (1 - S) * e2)
    s[inner] = S
    s1[inner] = S1
    s2[inner] = S2
    s[t >= 1] = 1.0
    return s, s1, s2


@dataclass(frozen=True)
class SmoothCutoff(RadialProfile):
    """C^inf rise from 0 (r <= lo) to 1 (r >= hi)."""

    lo: float = 1.0
    hi: float = 2.0

    def __post_init__(self):
        if not 0 < self.lo < self.hi:
            raise DomainError("SmoothCutoff requires 0 < lo < hi")
        object.__setattr__(self, "knots", (self.lo, self.hi))

    def _t(self, r):
        return (np.asarray(r, dtype=float) - self.lo) / (self.hi - self.lo)

    def value(self, r):
        return _cutoff_sde(self._t(r))[0]

    def d1(self, r):
        return _cutoff_sde(self._t(r))[1] / (self.hi - self.lo)

    def d2(self, r):
        return _cutoff_sde(self._t(r))[2] / (self.hi - self.lo) ** 2

    def zero_exponents(self):
        return math.inf, math.inf, math.inf

    def infinity_exponents(self):
        return 0.0, -math.inf, -math.inf

    def power_tail(self):
        return ((1.0, 0.0),)

    def power_head(self):
        return ()


@dataclass(frozen=True)
class PowerCut(RadialProfile):
    """r^{-sigma-eps} cut to zero below r = 1; sigma = (N-4-2a)/2.

    The near-minimizing family of the weak-form comparison: letting eps -> 0
    drives the mode ratio to its sharp limit.
    """

    N: int
    a: float
    eps: float

    def __post_init__(self):
        if self.eps <= 0:
            raise DomainError("PowerCut requires eps > 0")
        object.__setattr__(self, "knots", (1.0, 2.0))

    @property
    def exponent(self) -> float:
        return -(self.N - 4 - 2 * self.a) / 2 - self.eps

    def _parts(self, r):
        cut = SmoothCutoff(1.0, 2.0)
        return cut.value(r), cut.d1(r), cut.d2(r)

    def value(self, r):
        r = np.asarray(r, dtype=float)
        g, _, _ = self._parts(r)
        return np.where(g > 0, r, 1.0) ** self.exponent * g

    def d1(self, r):
        r = np.asarray(r, dtype=float)
        e = self.exponent
        g, g1, _ = self._parts(r)
        live = (g > 0) | (g1 != 0)
        rs = np.where(live, r, 1.0)
        return (e * rs ** (e - 1) * g + rs ** e * g1) * live

    def d2(self, r):
        r = np.asarray(r, dtype=float)
        e = self.exponent
        g, g1, g2 = self._parts(r)
        live = (g > 0) | (g1 != 0) | (g2 != 0)
        rs = np.where(live, r, 1.0)
        return (e * (e - 1) * rs ** (e - 2) * g + 2 * e * rs ** (e - 1) * g1
                + rs ** e * g2) * live

    def zero_exponents(self):
        return math.inf, math.inf, math.inf

    def infinity_exponents(self):
        e = self.exponent
        return e, e - 1, e - 2

    def power_tail(self):
        return ((1.0, self.exponent),)

    def power_head(self):
        return ()


@dataclass(frozen=True)
class TailIntegral(RadialProfile):
    """f(r) = int_r^inf s^{-1-eps} g(s) ds with g the standard cutoff.

    Constant near the origin, exactly r^{-eps}/eps beyond r = 2; its first
    derivative -r^{-1-eps} g(r) is closed-form everywhere.
    """

    eps: float

    def __post_init__(self):
        if self.eps <= 0:
            raise DomainError("TailIntegral requires eps > 0")
        object.__setattr__(self, "knots", (1.0, 2.0))

    def _cut(self):
        return SmoothCutoff(1.0, 2.0)

    @lru_cache(maxsize=None)
    def _mid_mass(self, r: float) -> float:
        # int_1^r s^{-1-eps} g(s) ds for r in [1, 2]
        cut = self._cut()
        def h(x, r=r):
            s = 1.0 + (r - 1.0) * x
            return s ** (-1 - self.eps) * cut.value(s) * (r - 1.0)
        if r <= 1.0:
            return 0.0
        v, _, _ = _integrate_01(h, 1e-13, 1.0, _MAX_NODES)
        return v

    @property
    def _plateau(self) -> float:
        return self._mid_mass(2.0) + 2.0 ** -self.eps / self.eps

    def value(self, r):
        r = np.asarray(r, dtype=float)
        out = np.empty_like(r)
        lo = r <= 1.0
        hi = r >= 2.0
        mid = ~lo & ~hi
        out[lo] = self._plateau
        out[hi] = r[hi] ** -self.eps / self.eps
        out[mid] = [self._plateau - self._mid_mass(float(x)) for x in r[mid]]
        return out

    def d1(self, r):
        r = np.asarray(r, dtype=float)
        return -(r ** (-1 - self.eps)) * self._cut().value(r)

    def d2(self, r):
        r = np.asarray(r, dtype=float)
        cut = self._cut()
        return ((1 + self.eps) * r ** (-2 - self.eps) * cut.value(r)
                - r ** (-1 - self.eps) * cut.d1(r))

    def zero_exponents(self):
        return 0.0, math.inf, math.inf

    def infinity_exponents(self):
        return -self.eps, -1 - self.eps, -2 - self.eps

    def power_tail(self):
        return ((1.0 / self.eps, -self.eps),)

    def power_head(self):
        return ((self._plateau, 0.0),)


# ---------------------------------------------------------------------------
# closed-form minimizers


def ckn_extremal(N: int, gamma: float, offset: float = 1.0,
                 amplitude: Optional[float] = None) -> PowerTailProfile:
    """Minimizer (offset + r^{2+gamma})^{-(N-4-gamma)/(2+gamma)} of the
    pure-weight quotient; the default amplitude satisfies the unnormalized
    Euler-Lagrange equation (offset = 1 is the canonical normalizer; other
    offsets are its dilates, so the amplitude picks up the matching power)."""
    if amplitude is None:
        amplitude = (extremal_normalizer(N, gamma)
                     * offset ** ((N - 4 - gamma) / (2 * (2 + gamma))))
    return PowerTailProfile(amplitude, 0.0, offset, 2 + gamma,
                            (N - 4 - gamma) / (2 + gamma))


def div_extremal(N: int, alpha: float, beta: float, offset: float = 1.0,
                 amplitude: float = 1.0) -> PowerTailProfile:
    """Minimizer (offset + r^{2+beta-alpha})^{-(N-4+2 alpha-beta)/(2+beta-alpha)}."""
    q = 2 + beta - alpha
    if q <= 0:
        raise DomainError("div_extremal requires beta > alpha - 2")
    return PowerTailProfile(amplitude, 0.0, offset, q, (N - 4 + 2 * alpha - beta) / q)


def rs_extremal(N: int, gamma: float, mu: float, offset: float = 1.0,
                amplitude: Optional[float] = None) -> PowerTailProfile:
    """Minimizer r^{-(mu-gamma)/2} (offset + r^{(2+gamma) zeta})^{-(N-4-gamma)/(2+gamma)}
    of the remainder quotient (the zeta-compressed, power-shifted pure-weight one)."""
    p = RsParams(N, gamma, mu)
    if amplitude is None:
        amplitude = (extremal_normalizer(N, gamma)
                     * offset ** ((N - 4 - gamma) / (2 * (2 + gamma))))
    return PowerTailProfile(amplitude, (mu - gamma) / 2, offset,
                            (2 + gamma) * p.zeta, (N - 4 - gamma) / (2 + gamma))


def singular_extremal(N: int, alpha: float, beta: float, offset: float = 1.0,
                      amplitude: float = 1.0) -> PowerTailProfile:
    """Singular-range minimizer r^{-(alpha-beta-2)} (offset + r^{alpha-beta-2})^{-(N+beta)/(alpha-beta-2)}."""
    q = alpha - beta - 2
    if q <= 0:
        raise DomainError("singular_extremal requires beta < alpha - 2")
    singular_exponents(N, alpha, beta)
    return PowerTailProfile(amplitude, q, offset, q, (N + beta) / q)


def scale(profile: RadialProfile, lam: float,
          degree: Optional[float] = None) -> ScaledProfile:
    """Dilation lam^degree * profile(lam r).

    Without an explicit degree, uses the profile's natural homogeneity
    (half its declared decay rate), which for the pure-weight minimizer is
    (N-4-gamma)/2.  Profiles without power decay need degree passed.
    """
    if lam <= 0:
        raise DomainError("scale requires lam > 0")
    if degree is None:
        decay = -profile.infinity_exponents()[0]
        if not math.isfinite(decay):
            raise DomainError(
                "profile has no power decay; pass an explicit degree")
        degree = decay / 2
    return ScaledProfile(profile, lam, degree)


def sw_extremal_pair(params: SwParams, offset: float = 1.0
                     ) -> Tuple[RadialProfile, RadialProfile]:
    """The optimizing pair (f, g) of the double-weight kernel quotient."""
    N, b = params.N, params.b
    if params.case is SwCase.DIAGONAL:
        den = N - 2 * (1 - b)
        f = PowerTailProfile(1.0, b * (N + 2 * (1 - b)) / den, offset,
                             2 * (N - 2) * (1 - b) / den,
                             (N + 2 * (1 - b)) / (2 * (1 - b)))
        return f, f
    # t = 2 endpoint: g is the kernel image of f and splits into two terms
    f = PowerTailProfile(1.0, b * (N + 4 - 6 * b) / (N - 2 * b), offset,
                         2 - 2 * b, (N + 4 - 6 * b) / (2 - 2 * b))
    outer = (N - 2 * b) / (2 - 2 * b)
    g = SumProfile((
        PowerTailProfile((N - 2 * b) * offset, b, offset, 2 - 2 * b, outer),
        PowerTailProfile(2 - 2 * b, 3 * b - 2, offset, 2 - 2 * b, outer),
    ))
    return f, g


# ---------------------------------------------------------------------------
# derived radial operators


def radial_laplacian(profile: RadialProfile, N: int):
    """Vectorized r -> value of u'' + (N-1) u'/r."""
    def lap(r):
        r = np.asarray(r, dtype=float)
        return profile.d2(r) + (N - 1) / r * profile.d1(r)
    return lap


def weighted_bilaplacian(profile: RadialProfile, N: int, gamma: float):
    """Vectorized r -> Delta(r^{-gamma} Delta u)(r).

    Exact for the power-tail family (which carries every derivative order);
    otherwise the two extra derivative orders come from Richardson-
    extrapolated central differences of the analytic d1/d2.
    """
    if not -2 < gamma <= 0:
        raise DomainError("weighted_bilaplacian requires -2 < gamma <= 0")

    if isinstance(profile, PowerTailProfile):
        def op_exact(r):
            r = np.asarray(r, dtype=float)
            if np.any(r <= 0):
                raise DomainError("radii must be positive")
            u1, u2, u3, u4 = (profile.deriv(r, n) for n in (1, 2, 3, 4))
            lap = u2 + (N - 1) / r * u1
            lap1 = u3 + (N - 1) * (u2 / r - u1 / r ** 2)
            lap2 = u4 + (N - 1) * (u3 / r - 2 * u2 / r ** 2 + 2 * u1 / r ** 3)
            # z = r^{-gamma} lap; Delta z = z'' + (N-1) z'/r
            z1 = r ** -gamma * (lap1 - gamma * lap / r)
            z2 = r ** -gamma * (lap2 - 2 * gamma * lap1 / r
                                + gamma * (gamma + 1) * lap / r ** 2)
            return z2 + (N - 1) / r * z1
        return op_exact

    lap = radial_laplacian(profile, N)

    def z(r):
        return r ** -gamma * lap(r)

    def op(r):
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0):
            raise DomainError("differentiation stencil leaves (0, inf)")
        h = 0.004 * r
        def d1_at(step):
            return (z(r + step) - z(r - step)) / (2 * step)
        def d2_at(step):
            return (z(r + step) - 2 * z(r) + z(r - step)) / step ** 2
        z1 = (4 * d1_at(h / 2) - d1_at(h)) / 3
        z2 = (4 * d2_at(h / 2) - d2_at(h)) / 3
        return z2 + (N - 1) / r * z1

    return op


def el_residual(N: int, gamma: float, radii, offset: float = 1.0) -> np.ndarray:
    """Relative residual of Delta(r^{-gamma} Delta U) = r^{gamma} U^{q}.

    U is the canonically normalized pure-weight minimizer and
    q = (N+4+3 gamma)/(N-4-gamma); all four derivatives are exact.
    """
    U = ckn_extremal(N, gamma, offset)
    q = (N + 4 + 3 * gamma) / (N - 4 - gamma)
    r = np.atleast_1d(np.asarray(radii, dtype=float))
    lhs = weighted_bilaplacian(U, N, gamma)(r)
    rhs = r ** gamma * U.value(r) ** q
    return np.abs(lhs - rhs) / np.maximum(np.abs(lhs), np.abs(rhs))
