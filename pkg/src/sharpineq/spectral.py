"""Banded quadratic forms of the radial mode problems on a log grid.

Operators act on nodal values of phi(s) = f(e^s), the profile read in log
radius.  Radial measures r^p dr become exponential factors e^{(p+1)s} ds,
derivatives follow f'(r) = phi'/r and f''(r) = (phi'' - phi')/r^2, and each
1/r^2 of a mode Laplacian cancels against the Jacobian, so every family
reduces to a single exponential weight per row.  Both ends are clamped: the
two outermost nodes on each side carry phi = 0, which keeps discrete minima
on the safe side of the continuum infima.
"""

import enum
import math
from dataclasses import dataclass
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.linalg import LinAlgError, solve_banded

from .constants import (RsParams, WeakHrParams, hardy_const, mode_eigenvalue,
                        rellich_sobolev_coeffs)
from .errors import (ConfigError, ConvergenceError, DomainError,
                     NumericalError, ValidityError)

_REFINE_SLACK = 1e-10
_EDGE_DEPTH = 2.0
_EDGE_FRACTION = 1e-8
_WIDEN_PAD = 6.0
_MAX_WIDEN = 3
_CONV_REL = 1e-6

FormMatrix = Union[np.ndarray, sp.spmatrix]


@dataclass(frozen=True)
class Grid1D:
    """Uniform log-radius window s in [s_min, s_max] with n nodes."""

    s_min: float
    s_max: float
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.s_min) and math.isfinite(self.s_max)
                and self.s_min < self.s_max):
            raise ValidityError(
                f"Grid1D requires s_min < s_max, got [{self.s_min}, {self.s_max}]")
        if not isinstance(self.n, int) or self.n < 16:
            raise ValidityError(f"Grid1D requires integer n >= 16, got {self.n}")

    @property
    def h(self) -> float:
        return (self.s_max - self.s_min) / (self.n - 1)

    def nodes(self) -> np.ndarray:
        return np.linspace(self.s_min, self.s_max, self.n)

    def widened(self, pad_left: float, pad_right: float) -> "Grid1D":
        """Extend the window keeping the spacing (node count grows)."""
        h = self.h
        lo = self.s_min - pad_left
        n = self.n + round(pad_left / h) + round(pad_right / h)
        return Grid1D(lo, lo + h * (n - 1), n)


class SpectralFamily(enum.Enum):
    WEAK_HR = "WeakHR"
    WEIGHTED_RELLICH = "WeightedRellich"
    HARDY_RELLICH_RATIO = "HardyRellichRatio"
    SHRI_GAP = "ShriGap"
    MODE_CKN = "ModeCkn"


_REQUIRED_KEYS = {
    SpectralFamily.WEAK_HR: ("N", "a"),
    SpectralFamily.WEIGHTED_RELLICH: ("N", "a"),
    SpectralFamily.HARDY_RELLICH_RATIO: ("N", "gamma"),
    SpectralFamily.SHRI_GAP: ("N", "gamma"),
    SpectralFamily.MODE_CKN: ("N", "gamma", "mu"),
}


@dataclass(frozen=True)
class ModeMinResult:
    """Per-mode minimum of a form pencil together with its grid history.

    refinement_ratios lists the minimum on successively finer grids over the
    same window, coarse first; clamping makes the sequence non-increasing up
    to a small slack, which the constructor enforces.
    """

    k: int
    min_ratio: float
    grid: Grid1D
    refinement_ratios: Tuple[float, ...]
    converged: bool

    def __post_init__(self):
        seq = self.refinement_ratios
        for a, b in zip(seq, seq[1:]):
            if b > a + _REFINE_SLACK * max(1.0, abs(a)):
                raise ValidityError(
                    f"refinement ratios must not increase: {a} -> {b} at mode {self.k}")


def _default_grid() -> Grid1D:
    return Grid1D(-12.0, 12.0, 2000)


def _coerce_family(family) -> SpectralFamily:
    if isinstance(family, SpectralFamily):
        return family
    try:
        return SpectralFamily(family)
    except ValueError:
        raise ConfigError(f"unknown spectral family {family!r}") from None


def _hrr_window(N: int) -> Tuple[float, float]:
    # validity bracket of the Laplacian-over-gradient comparison
    s = math.sqrt(N * N - N + 1)
    return (-(N + 4) - 2 * s) / 3, min(N - 2.0, (-(N + 4) + 2 * s) / 3)


def _difference_ops(grid: Grid1D):
    # Unknowns exclude the two clamped nodes per side, but operator rows
    # cover the whole grid with phi extended by zero: dropping the rows at
    # the clamped nodes spawns spurious edge modes below the continuum.
    n = grid.n
    h = grid.h
    offs = [-2, -1, 0, 1, 2]
    d1 = sp.diags([1.0, -8.0, 0.0, 8.0, -1.0], offs, shape=(n, n)) / (12 * h)
    d2 = sp.diags([-1.0, 16.0, -30.0, 16.0, -1.0], offs, shape=(n, n)) / (12 * h * h)
    return d1.tocsr(), d2.tocsr()


def _weight(grid: Grid1D, exponent: float) -> np.ndarray:
    w = np.full(grid.n, grid.h)
    w[0] = w[-1] = grid.h / 2
    return w * np.exp(exponent * grid.nodes())


def _sym(M) -> sp.csr_matrix:
    return ((M + M.T) * 0.5).tocsr()


def _quad_form(op, w: np.ndarray) -> sp.csr_matrix:
    return _sym(op.T @ sp.diags(w) @ op)


def assemble_forms(family, k: int, params: Mapping[str, float],
                   grid: Optional[Grid1D] = None):
    """Banded symmetric pair (A, B) of a mode-k form ratio on the grid.

    A and B are quadratic forms in the interior nodal values of phi; the
    pencil minimum of (A, B) discretizes the family's per-mode infimum.
    Family selects the pair:

    WeakHR            int (D f_k)^2 r^{N-1-2a}  over  int (f')^2 r^{N-3-2a}
    WeightedRellich   same numerator            over  int f^2 r^{N-5-2a}
    HardyRellichRatio int (D f_k)^2 r^{N-1-g}   over  the mode gradient form
    ShriGap           numerator plus the squared Hardy zero-order term
    ModeCkn           reduced-weight comparison: right over left mode form

    with D f_k = f'' + (N-1) f'/r - c_k f/r^2 and c_k = k(N-2+k).
    """
    fam = _coerce_family(family)
    if not isinstance(k, (int, np.integer)):
        raise ConfigError(f"mode index must be an integer, got {k!r}")
    k = int(k)
    need = _REQUIRED_KEYS[fam]
    if set(params) != set(need):
        raise ConfigError(
            f"{fam.value} expects parameters {need}, got {tuple(sorted(params))}")
    grid = grid if grid is not None else _default_grid()
    if not isinstance(grid, Grid1D):
        raise ConfigError(f"grid must be a Grid1D, got {type(grid).__name__}")
    c = float(mode_eigenvalue(int(params["N"]), k))
    N = int(params["N"])
    d1f, d2f = _difference_ops(grid)
    eye = sp.identity(grid.n, format="csr")
    lap = (d2f + (N - 2) * d1f - c * eye)[:, 2:-2]
    d1 = d1f[:, 2:-2]

    if fam in (SpectralFamily.WEAK_HR, SpectralFamily.WEIGHTED_RELLICH):
        p = WeakHrParams(N, float(params["a"]))
        w = _weight(grid, N - 4 - 2 * p.a)
        A = _quad_form(lap, w)
        if fam is SpectralFamily.WEAK_HR:
            return A, _quad_form(d1, w)
        return A, _sym(sp.diags(w[2:-2]))

    if fam in (SpectralFamily.HARDY_RELLICH_RATIO, SpectralFamily.SHRI_GAP):
        gamma = float(params["gamma"])
        if fam is SpectralFamily.SHRI_GAP:
            if N < 5 or not -2 < gamma <= 0:
                raise ValidityError(
                    f"ShriGap requires N >= 5 and -2 < gamma <= 0, got ({N}, {gamma})")
        else:
            lo, hi = _hrr_window(N)
            if not lo <= gamma <= hi:
                raise ValidityError(
                    f"HardyRellichRatio requires gamma in [{lo}, {hi}], got {gamma}")
        w = _weight(grid, N - 4 - gamma)
        B = _sym(_quad_form(d1, w) + c * sp.diags(w[2:-2]))
        A = _quad_form(lap, w)
        if fam is SpectralFamily.SHRI_GAP:
            A = _sym(A + hardy_const(N, gamma) ** 2 * sp.diags(w[2:-2]))
        return A, B

    # ModeCkn: the reduced-weight drift square (left) against the
    # three-term bilaplacian combination it is compared with (right).
    rs = RsParams(N, float(params["gamma"]), float(params["mu"]))
    gamma, mu = rs.gamma, rs.mu
    c1, c2 = (float(v) for v in rellich_sobolev_coeffs(N, gamma, mu))
    b1 = N - 1 - (N - 2) * (mu - gamma) / (N - 4 - gamma)
    drift = (d2f + (b1 - 1) * d1f - rs.zeta ** 2 * c * eye)[:, 2:-2]
    B = _quad_form(drift, _weight(grid, N - 4 - mu))
    wg = _weight(grid, N - 4 - gamma)
    right = (_quad_form(lap, wg) - c1 * (_quad_form(d1, wg) + c * sp.diags(wg[2:-2]))
             + c2 * sp.diags(wg[2:-2]))
    shift = sp.diags(np.exp(rs.vartheta * grid.nodes()[2:-2]))
    return _sym(shift @ right @ shift), _sym(B)


# ---------------------------------------------------------------------------
# pencil minimum


def _inf_norm(M) -> float:
    return float(abs(M).sum(axis=1).max()) if M.nnz else 0.0


def _to_banded(M: sp.csr_matrix) -> Tuple[int, np.ndarray]:
    coo = M.tocoo()
    if coo.nnz == 0:
        raise NumericalError("cannot factor an identically zero pencil")
    bw = int(np.max(np.abs(coo.row - coo.col)))
    ab = np.zeros((2 * bw + 1, M.shape[0]))
    ab[bw + coo.row - coo.col, coo.col] = coo.data
    return bw, ab


def _upper_banded(M: sp.csr_matrix) -> np.ndarray:
    coo = M.tocoo()
    if coo.nnz == 0:
        raise NumericalError("cannot factor an identically zero pencil")
    keep = coo.row <= coo.col
    bw = int(np.max(coo.col[keep] - coo.row[keep]))
    ab = np.zeros((bw + 1, M.shape[0]))
    ab[bw + coo.row[keep] - coo.col[keep], coo.col[keep]] = coo.data[keep]
    return ab


def _chol_factor(M: sp.csr_matrix) -> Optional[np.ndarray]:
    try:
        return cholesky_banded(_upper_banded(M), check_finite=False)
    except LinAlgError:
        return None


def _solve_shifted(A, B, sigma: float, rhs: np.ndarray,
                   scale: float) -> np.ndarray:
    tried = []
    shift = sigma
    for attempt in range(4):
        tried.append(shift)
        bw, ab = _to_banded((A - shift * B).tocsr())
        try:
            return solve_banded((bw, bw), ab, rhs, check_finite=False)
        except LinAlgError:
            shift = sigma - scale * 10.0 ** (attempt - 10)
    raise NumericalError(
        f"banded factorization broke down; shifts tried: {tried}")


def _start_vector(n: int) -> np.ndarray:
    i = np.arange(1, n + 1)
    return np.sin(math.pi * i / (n + 1)) ** 2


def _pd_floor(A, B, scale: float) -> Tuple[float, Optional[np.ndarray]]:
    """A shift sigma with A - sigma B positive definite, with its factor."""
    tried = []
    sigma = 0.0
    for attempt in range(8):
        tried.append(sigma)
        f = _chol_factor((A - sigma * B).tocsr() if sigma else A)
        if f is not None:
            return sigma, f
        sigma = -scale * 10.0 ** (attempt - 13)
    raise NumericalError(
        f"no positive-definite shift found below the pencil; tried {tried}")


def _min_pair(A: FormMatrix, B: FormMatrix, tol: float = 1e-10,
              deflate: Iterable[np.ndarray] = (),
              max_iter: int = 3000) -> Tuple[float, np.ndarray]:
    """Smallest pencil eigenvalue of A x = lambda B x with its eigenvector.

    The eigenvalue is bracketed first: A - sigma B admits a banded Cholesky
    factorization exactly when sigma lies below the whole pencil, so
    bisection on factorization success certifies the minimum independently
    of the starting vector.  Inverse iteration from just below the bracket
    then separates the eigenvector even inside clusters.  Convergence is
    declared at backward residual
    |A x - lambda B x| / ((|A| + |lambda| |B|) |x|) <= tol.
    """
    A = sp.csr_matrix(A)
    B = sp.csr_matrix(B)
    anorm, bnorm = _inf_norm(A), _inf_norm(B)
    if anorm == 0.0 or bnorm == 0.0:
        raise NumericalError("pencil has an identically zero side")
    scale = anorm / bnorm

    basis = []
    for v in deflate:
        w = np.asarray(v, dtype=float).copy()
        for b in basis:
            w -= b * (b @ (B @ w))
        nb = w @ (B @ w)
        if nb > 0:
            basis.append(w / math.sqrt(nb))

    def project(y):
        for b in basis:
            y -= b * (b @ (B @ y))
        return y

    def polish(x, solve, lam_guess):
        lam = lam_guess
        for _ in range(max_iter):
            y = project(solve(B @ x))
            nb = y @ (B @ y)
            x = y / math.sqrt(nb) if nb > 0 else y / np.linalg.norm(y)
            ax, bx = A @ x, B @ x
            lam = (x @ ax) / (x @ bx)
            res = np.linalg.norm(ax - lam * bx) / (
                (anorm + abs(lam) * bnorm) * np.linalg.norm(x))
            if res <= tol:
                return lam, x
        raise ConvergenceError(
            f"pencil iteration stalled above residual {tol}", best_estimate=lam)

    lo, _ = _pd_floor(A, B, scale)
    x0 = project(_start_vector(A.shape[0]).copy())
    nb0 = x0 @ (B @ x0)
    if not nb0 > 0:
        raise NumericalError("starting vector has no mass in the B metric")
    x0 = x0 / math.sqrt(nb0)

    if not basis:
        # certified bisection for the pencil minimum
        hi = float(x0 @ (A @ x0))
        while hi <= lo:
            hi = lo + max(abs(lo), 1.0) * 1e-8
        for _ in range(200):
            if hi - lo <= 1e-14 * max(1.0, abs(hi)):
                break
            mid = 0.5 * (lo + hi)
            if _chol_factor((A - mid * B).tocsr()) is not None:
                lo = mid
            else:
                hi = mid
        sigma = lo - 2.0 * max(hi - lo, 1e-15 * max(1.0, abs(lo)))
        factor = _chol_factor((A - sigma * B).tocsr())
        if factor is None:
            sigma, factor = _pd_floor(A, B, scale)
        return polish(x0, lambda r: cho_solve_banded((factor, False), r,
                                                     check_finite=False), hi)

    # deflated query: fixed-shift iteration from below the full pencil
    factor = _chol_factor((A - lo * B).tocsr()) if lo else _chol_factor(A)
    if factor is not None:
        solve = lambda r: cho_solve_banded((factor, False), r, check_finite=False)
    else:
        solve = lambda r: _solve_shifted(A, B, lo, r, scale)
    return polish(x0, solve, float(x0 @ (A @ x0)))


def min_ratio(A: FormMatrix, B: FormMatrix, tol: float = 1e-10,
              deflate: Iterable[np.ndarray] = ()) -> float:
    """Smallest lambda with A x = lambda B x; see _min_pair for the method.

    Vectors passed in deflate are projected away in the B inner product, so
    the returned value is the pencil minimum over their B-orthogonal
    complement (the second eigenvalue, given the first eigenvector).
    """
    return _min_pair(A, B, tol=tol, deflate=deflate)[0]


# ---------------------------------------------------------------------------
# mode scans


def _edge_fractions(x: np.ndarray, s: np.ndarray,
                    wexp: float) -> Tuple[float, float]:
    # minimizer mass in the form's own measure, stabilized against overflow
    expo = wexp * s
    dens = np.exp(expo - expo.max()) * x * x
    tot = dens.sum()
    left = dens[s <= s[0] + _EDGE_DEPTH].sum()
    right = dens[s >= s[-1] - _EDGE_DEPTH].sum()
    return left / tot, right / tot


def _ladder(n: int) -> List[int]:
    return sorted({max(251, n // 4), max(251, n // 2), n})


def _scan(family: SpectralFamily, params: Mapping[str, float], wexp: float,
          k_max: int, grid: Grid1D) -> List[ModeMinResult]:
    results = []
    for k in range(k_max + 1):
        g = grid
        lam, vec = 0.0, None
        mass_ok = False
        for round_ in range(_MAX_WIDEN + 1):
            lam, vec = _min_pair(*assemble_forms(family, k, params, g))
            lf, rf = _edge_fractions(vec, g.nodes()[2:-2], wexp)
            pads = (_WIDEN_PAD if lf >= _EDGE_FRACTION else 0.0,
                    _WIDEN_PAD if rf >= _EDGE_FRACTION else 0.0)
            if pads == (0.0, 0.0):
                mass_ok = True
                break
            if round_ == _MAX_WIDEN:
                break
            g = g.widened(*pads)
        ratios = []
        for n in _ladder(g.n):
            if n == g.n:
                ratios.append(lam)
            else:
                sub = Grid1D(g.s_min, g.s_max, n)
                ratios.append(min_ratio(*assemble_forms(family, k, params, sub)))
        settled = (len(ratios) >= 2
                   and abs(ratios[-1] - ratios[-2]) <= _CONV_REL * max(1.0, abs(ratios[-1])))
        results.append(ModeMinResult(k, ratios[-1], g, tuple(ratios),
                                     mass_ok and settled))
    return results


def weak_hr_mode_scan(N: int, a: float, k_max: int = 6,
                      grid: Optional[Grid1D] = None) -> List[ModeMinResult]:
    """Per-mode minima of the second-order over radial-gradient comparison.

    The window is widened (spacing kept) while the minimizer leaves more
    than a 1e-8 mass fraction within two log units of either end, up to
    three rounds; `converged` records whether that criterion and grid
    refinement both settled.
    """
    p = WeakHrParams(N, a)
    if k_max < 0:
        raise DomainError(f"k_max must be >= 0, got {k_max}")
    grid = grid if grid is not None else _default_grid()
    return _scan(SpectralFamily.WEAK_HR, {"N": N, "a": a},
                 N - 4 - 2 * p.a, k_max, grid)


def rellich_mode_scan(N: int, a: float, k_max: int = 6,
                      grid: Optional[Grid1D] = None) -> List[ModeMinResult]:
    """Per-mode minima of the second-order over zero-order comparison."""
    p = WeakHrParams(N, a)
    if k_max < 0:
        raise DomainError(f"k_max must be >= 0, got {k_max}")
    grid = grid if grid is not None else _default_grid()
    return _scan(SpectralFamily.WEIGHTED_RELLICH, {"N": N, "a": a},
                 N - 4 - 2 * p.a, k_max, grid)
