"""Closed-form sharp constants and parameter records."""
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from sharpineq.constants import (
    CknParams,
    HlsConstants,
    Region,
    RsParams,
    SwCase,
    SwParams,
    WeakHrParams,
    bilaplacian_sharp,
    ckn_exponent,
    combined_const,
    divform_sharp,
    extremal_normalizer,
    felli_schneider_b,
    felli_schneider_beta,
    hardy_const,
    hardy_rellich_bracket,
    hardy_rellich_const,
    hls_constants,
    hls_second_constant,
    mode_eigenvalue,
    mode_gap_coeff,
    mode_ratio_limit,
    region_classify,
    rellich_sobolev_coeffs,
    rellich_sobolev_sharp,
    singular_exponents,
    singular_sharp,
    sobolev_exponent,
    square_diff_coeffs,
    weak_hr_constant,
    weighted_rellich_inf,
)
from sharpineq.errors import CertificateError, DomainError, ValidityError
from sharpineq.specfun import gamma, log_gamma

# 50-digit reference values, rounded to 17 significant digits
BILAPLACIAN_REF = {
    (5, -1.5): 22.252790780023802,
    (5, -1.0): 52.029717401406517,
    (5, -0.5): 84.972863513907527,
    (5, 0.0): 102.38327344058293,
    (6, -1.5): 51.282192681917385,
    (6, -1.0): 107.93098193843387,
    (6, -0.5): 178.95855662642615,
    (6, 0.0): 247.28444736616021,
    (7, -1.5): 100.86281685879632,
    (7, -1.0): 191.94390437567888,
    (7, -0.5): 307.19948312625988,
    (7, 0.0): 431.53266467865956,
    (9, -1.5): 290.99021606413978,
    (9, -1.0): 468.61069348411661,
    (9, -0.5): 680.38042192252653,
    (9, 0.0): 913.53384477999401,
}

RS_SHARP_REF = [
    (5, -1.0, 0.0, 4.5988207497192827),
    (6, -0.5, 1.2, 3.4935790554999562),
    (7, 0.0, 2.0, 9.9808923879047383),
]

DIVFORM_REF = [
    (6, -2.0, -3.0, 24.533724492776098),
    (5, -0.5, -1.2, 48.248364075072786),
    (7, -1.0, -2.5, 52.022975851325867),
]

SINGULAR_REF = [
    (6, 0.0, -4.0, 247.28444736616021),
    (5, -0.5, -3.0, 14.006438516299449),
]

HLS_C1_REF = [(3, 1.0, 2.2940107035415990), (5, 3.0, 5.3306309611655744),
              (6, 4.0, 6.4396991501604220)]
HLS_C2_REF = [(5, 3.0, 2.0808652575452775), (6, 4.0, 1.3144980845772919),
              (7, 5.0, 0.90977386238400669)]


# ---------------------------------------------------------------------------
# parameter records


def test_ckn_params_ranges():
    CknParams(6, -1.0, -2.0)
    with pytest.raises(DomainError):
        CknParams(4, 0.0, 0.0)
    with pytest.raises(DomainError):
        CknParams(6, -4.0, -5.0)
    with pytest.raises(ValidityError):
        CknParams(6, -1.0, -3.5)          # below alpha - 2
    with pytest.raises(ValidityError):
        CknParams(6, -1.0, -1.0)          # above N alpha/(N-2)
    CknParams(6, 0.0, -4.0, singular=True)
    with pytest.raises(ValidityError):
        CknParams(6, 0.0, -1.0, singular=True)


def test_rs_params():
    p = RsParams(5, -1.0, 0.0)
    assert p.zeta == pytest.approx((5 - 4 - 0) / (5 - 4 + 1))
    assert p.vartheta == pytest.approx(-0.5)
    with pytest.raises(ValidityError):
        RsParams(5, -2.5, 0.0)
    with pytest.raises(ValidityError):
        RsParams(5, -1.0, 1.5)            # mu >= N-4
    with pytest.raises(ValidityError):
        RsParams(5, -1.0, -1.5)           # mu <= gamma
    with pytest.raises(DomainError):
        RsParams(4, -1.0, -0.5)


def test_sw_params_diagonal():
    p = SwParams(5, 0.5)
    assert p.case is SwCase.DIAGONAL
    assert p.lam == 3.0
    assert p.a == 0.5
    assert p.t == pytest.approx(10 / 6)
    assert p.r == pytest.approx(10 / 6)
    with pytest.raises(ValidityError):
        SwParams(5, 0.0)
    with pytest.raises(ValidityError):
        SwParams(5, 1.0)


def test_sw_params_t2():
    p = SwParams(5, 0.5, SwCase.T_SQUARED)
    assert p.t == 2.0
    assert p.a == pytest.approx(0.5 * (5 - 4 + 1) / (5 - 1))
    # balance closed form r = 2(N-2b)/(N+4-6b)
    assert p.r == pytest.approx(2 * (5 - 1) / (5 + 4 - 3))
    with pytest.raises(DomainError):
        SwParams(4, 0.5, SwCase.T_SQUARED)


@given(st.integers(min_value=5, max_value=12),
       st.floats(min_value=1e-3, max_value=1 - 1e-3))
def test_sw_t2_balance(N, b):
    # 1/r + 1/t + (N-2+a+b)/N = 2 must hold with the closed form
    p = SwParams(N, b, SwCase.T_SQUARED)
    closed = 2 * (N - 2 * b) / (N + 4 - 6 * b)
    assert p.r == pytest.approx(closed, rel=1e-12)
    assert 1 / p.r + 1 / p.t + (N - 2 + p.a + p.b) / N == pytest.approx(2.0, abs=1e-12)


def test_weak_hr_params():
    assert WeakHrParams(5, 0.0).middle_range
    assert WeakHrParams(5, 0.25).middle_range
    assert not WeakHrParams(5, -4.0).middle_range
    assert WeakHrParams(6, -3.0).middle_range   # constant 0 there, still middle
    with pytest.raises(ValidityError):
        WeakHrParams(5, 1.5)
    # N = 1 keeps only the lower root condition
    assert WeakHrParams(1, -1.0).middle_range
    assert not WeakHrParams(1, -3.0).middle_range


# ---------------------------------------------------------------------------
# exponents


def test_mode_eigenvalue():
    assert mode_eigenvalue(5, 0) == 0
    assert mode_eigenvalue(5, 1) == 4
    assert mode_eigenvalue(6, 2) == 12
    with pytest.raises(DomainError):
        mode_eigenvalue(5, -1)


def test_sobolev_exponent():
    assert sobolev_exponent(5, 0.0) == pytest.approx(10.0)
    assert sobolev_exponent(6, -1.0) == pytest.approx(10 / 3)
    with pytest.raises(DomainError):
        sobolev_exponent(5, 1.0)


def test_ckn_exponent():
    assert ckn_exponent(6, 0.0, 0.0) == pytest.approx(6.0)
    assert ckn_exponent(6, -1.0, -2.0) == pytest.approx(4.0)
    with pytest.raises(DomainError):
        ckn_exponent(5, -2.0, 1.0)


def test_singular_exponents():
    se = singular_exponents(6, 0.0, -4.0)
    assert se.xi == pytest.approx(12.0)
    assert se.bar_beta == pytest.approx(0.0)
    assert se.bar_exp == pytest.approx(2 * (6 + 12) / 6)
    # duality relation (N+beta)(N+xi) = (N+2 alpha-beta-4)^2
    for N, alpha, beta in [(5, -0.5, -3.0), (7, 1.0, -2.0), (9, 0.5, -3.7)]:
        se = singular_exponents(N, alpha, beta)
        D = N + 2 * alpha - beta - 4
        assert (N + beta) * (N + se.xi) == pytest.approx(D * D, rel=1e-12)


# ---------------------------------------------------------------------------
# sharp constants


@pytest.mark.parametrize("key,ref", sorted(BILAPLACIAN_REF.items()))
def test_bilaplacian_sharp_reference(key, ref):
    N, g = key
    assert bilaplacian_sharp(N, g) == pytest.approx(ref, rel=1e-13)


@pytest.mark.parametrize("N", [5, 6, 7, 9])
def test_bilaplacian_sharp_unweighted_classical(N):
    # gamma = 0 must match pi^2 (N-4)(N-2)N(N+2) [Gamma(N/2)/Gamma(N)]^{4/N}
    classical = (math.pi ** 2 * (N - 4) * (N - 2) * N * (N + 2)
                 * math.exp((log_gamma(N / 2) - log_gamma(N)) * 4 / N))
    assert bilaplacian_sharp(N, 0.0) == pytest.approx(classical, rel=1e-13)


def test_bilaplacian_sharp_validation():
    with pytest.raises(DomainError):
        bilaplacian_sharp(4, 0.0)
    with pytest.raises(ValidityError):
        bilaplacian_sharp(5, 0.5)
    with pytest.raises(ValidityError):
        bilaplacian_sharp(5, -2.0)


@pytest.mark.parametrize("N,g,mu,ref", RS_SHARP_REF)
def test_rellich_sobolev_sharp_reference(N, g, mu, ref):
    assert rellich_sobolev_sharp(N, g, mu) == pytest.approx(ref, rel=1e-13)


def test_rellich_sobolev_sharp_mu_to_gamma_limit():
    # zeta -> 1 recovers the pure-weight constant
    assert rellich_sobolev_sharp(6, -1.0, -1.0 + 1e-12) == pytest.approx(
        bilaplacian_sharp(6, -1.0), rel=1e-9)


@pytest.mark.parametrize("N,alpha,beta,ref", DIVFORM_REF)
def test_divform_sharp_reference(N, alpha, beta, ref):
    assert divform_sharp(N, alpha, beta) == pytest.approx(ref, rel=1e-13)


def test_divform_sharp_pure_weight_slice():
    # alpha = 0 row of the divergence family is the pure-weight family
    for N, g in [(5, -1.0), (6, -0.5), (7, -1.5)]:
        assert divform_sharp(N, 0.0, g) == pytest.approx(
            bilaplacian_sharp(N, g), rel=1e-13)


@pytest.mark.parametrize("N,alpha,beta,ref", SINGULAR_REF)
def test_singular_sharp_reference(N, alpha, beta, ref):
    assert singular_sharp(N, alpha, beta) == pytest.approx(ref, rel=1e-13)


def test_singular_dual_is_divform():
    # S_singular(alpha, beta) = S_div(alpha, bar_beta) exactly as written
    for N, alpha, beta in [(6, 0.0, -4.0), (5, -0.5, -3.0), (7, 1.0, -2.0)]:
        bb = singular_exponents(N, alpha, beta).bar_beta
        assert singular_sharp(N, alpha, beta) == pytest.approx(
            divform_sharp(N, alpha, bb), rel=1e-13)


def test_extremal_normalizer():
    N, g = 5, -1.0
    val = ((N - 4 - g) * (N - 2) * (N + g) * (N + 2 + 2 * g)) ** ((N - 4 - g) / (4 * (2 + g)))
    assert extremal_normalizer(N, g) == pytest.approx(val, rel=1e-14)


def test_rellich_sobolev_coeffs_exact_gamma_zero():
    # at gamma = 0 the coefficients collapse to the stated rational forms
    N, mu = Fraction(7), Fraction(3, 2)
    c1, c2 = rellich_sobolev_coeffs(N, Fraction(0), mu)
    w = N - 4
    c1_ref = Fraction(N * N - 4 * N + 8, 2 * w * w) * mu * (2 * w - mu)
    c2_ref = (Fraction(N * N, 16 * w * w) * (mu * (2 * w - mu)) ** 2
              - Fraction(N - 2, 2) * mu * (2 * w - mu))
    assert c1 == c1_ref
    assert c2 == c2_ref


def test_hardy_const():
    assert hardy_const(5, -1.0) == pytest.approx(1.0)
    assert hardy_const(6, 0.0) == pytest.approx(1.0)
    assert hardy_const(9, -2.0) == pytest.approx(12.25)
    with pytest.raises(ValidityError):
        hardy_const(5, 1.5)


def test_hardy_rellich_const():
    assert hardy_rellich_const(5, 0.0) == pytest.approx(6.25)
    assert hardy_rellich_const(6, -1.0) == pytest.approx(6.25)
    lo, hi = hardy_rellich_bracket(5)
    assert lo < -2 < 0 < hi
    with pytest.raises(ValidityError):
        hardy_rellich_const(5, hi + 0.1)


def test_combined_const():
    for N in (5, 6, 7, 9):
        for g in (-2.0, -1.5, -1.0, -0.5, 0.0):
            direct = (N * N - 4 * N + 8 + g * g + 4 * g) / 2
            assert combined_const(N, g) == pytest.approx(direct, rel=1e-14)
    with pytest.raises(ValidityError):
        combined_const(5, 0.5)
    with pytest.raises(ValidityError):
        combined_const(5, -2.1)


WEIGHTED_RELLICH_REF = [
    (5, 2.0, 121 / 16, 1),
    (5, 0.0, 25 / 16, 0),
    (6, -3.0, 0.0, 0),
    (5, 0.25, 121 / 256, 0),
    (5, -4.0, 121 / 16, 1),
    (7, 1.5, 0.0, 0),
]


@pytest.mark.parametrize("N,a,ref,k_ref", WEIGHTED_RELLICH_REF)
def test_weighted_rellich_inf_reference(N, a, ref, k_ref):
    val, k = weighted_rellich_inf(N, a)
    assert val == pytest.approx(ref, abs=1e-13)
    assert k == k_ref


def test_weighted_rellich_inf_certificate():
    with pytest.raises(CertificateError):
        weighted_rellich_inf(5, -80.0, k_max=64)
    # large k_max certifies the far-out minimum
    val, k = weighted_rellich_inf(5, -80.0, k_max=200)
    assert k > 64
    assert val >= 0


def test_mode_ratio_limit():
    assert mode_ratio_limit(5, 0.0, 0) == pytest.approx(4 * (5 / 2) ** 2 * (1 / 2) ** 2 / 1)
    with pytest.raises(DomainError):
        mode_ratio_limit(5, 0.5, 1)


WEAK_HR_REF = [
    (3, 0.0, 2.25),
    (4, 0.0, 4.0),
    (5, 0.0, 6.25),
    (5, 0.25, 7.5625),
    (6, -3.0, 0.0),
    (5, -4.0, 121 / 324),
    (5, 0.5, 9.0),
]


@pytest.mark.parametrize("N,a,ref", WEAK_HR_REF)
def test_weak_hr_constant_reference(N, a, ref):
    assert weak_hr_constant(N, a) == pytest.approx(ref, abs=1e-13)


def test_weak_hr_degenerate_point_continuity():
    # a = (N-4)/2 is inside the middle range and both formulas agree there
    N = 5
    a = (N - 4) / 2
    assert weak_hr_constant(N, a) == (N - 2) ** 2
    assert weak_hr_constant(N, a - 1e-9) == pytest.approx((N - 2) ** 2, rel=1e-7)


def test_square_diff_coeffs_fraction_exact():
    N, mu = Fraction(6), Fraction(1, 3)
    b = [Fraction(2), Fraction(-1, 2), Fraction(3), Fraction(5, 7)]
    a1, a2 = square_diff_coeffs(N, mu, *b)
    assert isinstance(a1, Fraction) and isinstance(a2, Fraction)
    w = N - 4 - mu
    assert a1 == b[0] ** 2 - b[2] ** 2 - (b[0] - b[2]) * (N - 2 - mu) - 2 * (b[1] - b[3])
    assert a2 == (b[1] ** 2 - b[3] ** 2 + (b[1] - b[3]) * (N - 3 - mu) * w
                  - (b[0] * b[1] - b[2] * b[3]) * w)


@given(st.integers(min_value=5, max_value=10),
       st.sampled_from([-1.9, -1.5, -1.0, -0.5, 0.0]),
       st.integers(min_value=1, max_value=64))
def test_mode_gap_coeff_positive(N, gamma, k):
    for j in range(1, 11):
        mu = gamma + j * (N - 4 - gamma) / 11
        assert mode_gap_coeff(N, gamma, mu, k) > 0


def test_mode_gap_coeff_zero_cases():
    # k = 0 and mu = gamma both kill the gap
    assert mode_gap_coeff(6, -1.0, 0.5, 0) == 0
    assert mode_gap_coeff(6, -1.0, -1.0, 3) == 0


# ---------------------------------------------------------------------------
# symmetry-region data


def test_felli_schneider_consistency():
    # the first-order threshold b_FS and the beta-curve describe the same
    # locus under alpha = -2a, beta = -b tau, tau = 2N/(N-2(1+a-b))
    N, a = 5, -1.0
    b = felli_schneider_b(N, a)
    tau = 2 * N / (N - 2 * (1 + a - b))
    ref = 1.4031242374328487    # = -5 + sqrt(41), frozen from the 50-digit run
    assert -b * tau == pytest.approx(ref, rel=1e-14)
    assert felli_schneider_beta(N, -2 * a) == pytest.approx(ref, rel=1e-14)


@given(st.integers(min_value=5, max_value=10),
       st.floats(min_value=-3.0, max_value=-1e-3))
def test_felli_schneider_map(N, a):
    b = felli_schneider_b(N, a)
    tau = 2 * N / (N - 2 * (1 + a - b))
    assert felli_schneider_beta(N, -2 * a) == pytest.approx(-b * tau, rel=1e-10)


def test_region_classify():
    assert region_classify(6, -1.0, -1.6) is Region.SYMMETRY_PROVED
    assert region_classify(6, 0.5, -1.0) is Region.CONJECTURE_SYMMETRY
    b_fs = felli_schneider_beta(6, 2.0)
    assert region_classify(6, 2.0, b_fs + 0.1) is Region.SYMMETRY_BREAKING
    assert region_classify(6, 2.0, b_fs) is Region.BOUNDARY
    assert region_classify(6, 2.0, b_fs - 0.1) is Region.CONJECTURE_SYMMETRY
    assert region_classify(6, -1.0, -3.5) is Region.INVALID
    assert region_classify(6, -1.0, -3.0) is Region.BOUNDARY   # beta = alpha - 2
    assert region_classify(6, -1.0, -1.5) is Region.BOUNDARY   # beta = N alpha/(N-2)
    assert region_classify(6, -4.0, -5.0) is Region.BOUNDARY   # alpha = 2 - N
    with pytest.raises(DomainError):
        region_classify(4, 0.0, 0.0)


# ---------------------------------------------------------------------------
# unweighted kernel constants


@pytest.mark.parametrize("N,lam,ref", HLS_C1_REF)
def test_hls_c1_reference(N, lam, ref):
    assert hls_constants(N, lam).c1 == pytest.approx(ref, rel=1e-13)


@pytest.mark.parametrize("N,lam,ref", HLS_C2_REF)
def test_hls_c2_reference(N, lam, ref):
    assert hls_constants(N, lam).c2 == pytest.approx(ref, rel=1e-13)
    assert hls_second_constant(N, lam) == pytest.approx(ref, rel=1e-13)


def test_hls_c2_outside_bracket():
    assert hls_constants(3, 1.0).c2 is None
    assert hls_constants(6, 2.5).c2 is None
    with pytest.raises(DomainError):
        hls_second_constant(3, 1.0)


def test_hls_c1_closed_form_cross_check():
    # lambda = N-2: c1 = pi^{(N-2)/2} Gamma(1)/Gamma(N/2+1) [Gamma(N/2)/Gamma(N)]^{-2/N}
    N = 5
    lam = N - 2.0
    direct = (math.pi ** (lam / 2) * gamma(N / 2 - lam / 2) / gamma(N - lam / 2)
              * math.exp((log_gamma(N / 2) - log_gamma(N)) * (-1 + lam / N)))
    assert hls_constants(N, lam).c1 == pytest.approx(direct, rel=1e-13)


def test_hls_domain():
    with pytest.raises(DomainError):
        hls_constants(5, 0.0)
    with pytest.raises(DomainError):
        hls_constants(5, 5.0)
