"""Modular form constructors against classical values and direct products."""

import cmath
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

import qschwarz as qz
from qschwarz.forms import (EtaQuotientSpec, FormSpec, GEN_S, GEN_T, IDENTITY,
                            UnimodularMatrix, character_chi, character_index,
                            eta_multiplier, eta_multiplier_index, kronecker,
                            reduce_to_fundamental, sigma_power, word_matrix)
from qschwarz.series import EXACT, float_mode


# ---------------------------------------------------------------------------
# eta and the Eisenstein family


def brute_eta_q_coefficients(n_max):
    """prod_{k>=1} (1 - q^k) by naive polynomial multiplication."""
    coeffs = {0: Fraction(1)}
    for k in range(1, n_max + 1):
        new = dict(coeffs)
        for e, c in coeffs.items():
            if e + k <= n_max:
                new[e + k] = new.get(e + k, Fraction(0)) - c
        coeffs = new
    return coeffs


def test_eta_series_matches_naive_product():
    n_max = 40
    ref = brute_eta_q_coefficients(n_max)
    eta = qz.eta_series(24 * n_max + 2)
    assert eta.lead == 1
    for m in range(n_max + 1):
        assert eta.coefficient(24 * m + 1) == ref.get(m, 0)


def test_eta24_is_delta_with_classical_tau_values():
    delta = qz.eta_series(24 * 6 + 1) ** 24
    expect = {1: 1, 2: -24, 3: 252, 4: -1472, 5: 4830, 6: -6048}
    for m, t in expect.items():
        assert delta.q_coefficient(m) == t
    assert (delta - qz.delta_series(delta.trunc)).is_zero


def test_eisenstein_classical_coefficients():
    e2 = qz.eisenstein_series(2, 24 * 4 + 1)
    e4 = qz.eisenstein_series(4, 24 * 4 + 1)
    e6 = qz.eisenstein_series(6, 24 * 4 + 1)
    assert [e2.q_coefficient(m) for m in range(4)] == [1, -24, -72, -96]
    assert [e4.q_coefficient(m) for m in range(4)] == [1, 240, 2160, 6720]
    assert [e6.q_coefficient(m) for m in range(4)] == [1, -504, -16632, -122976]


def test_sigma_power_small_values():
    assert sigma_power(1, 6) == 1 + 2 + 3 + 6
    assert sigma_power(3, 4) == 1 + 8 + 64
    assert sigma_power(5, 1) == 1


def test_discriminant_identity_e4_cubed_minus_e6_squared():
    t = 24 * 20
    e4 = qz.eisenstein_series(4, t)
    e6 = qz.eisenstein_series(6, t)
    delta = qz.delta_series(t)
    assert ((e4 ** 3 - e6 ** 2) - 1728 * delta).is_zero


def test_ramanujan_derivative_identities():
    t = 24 * 16
    e2 = qz.eisenstein_series(2, t)
    e4 = qz.eisenstein_series(4, t)
    e6 = qz.eisenstein_series(6, t)
    assert (e2.theta() - (e2 * e2 - e4) * Fraction(1, 12)).is_zero
    assert (e4.theta() - (e2 * e4 - e6) * Fraction(1, 3)).is_zero
    assert (e6.theta() - (e2 * e6 - e4 * e4) * Fraction(1, 2)).is_zero


def test_j_series_normalization():
    j = qz.j_series(24 * 6)
    assert j.lead == -24
    assert j.coefficient(-24) == Fraction(1, 1728)
    assert j.q_coefficient(0) == Fraction(744, 1728)
    # theta_j constructed independently as -E4^2 E6 / (1728 Delta)
    tj = qz.theta_j_series(24 * 6)
    assert (j.theta().truncate(tj.trunc) - tj).is_zero


def test_eta_series_grid_scaling():
    # eta(2 tau) on grid 24: exponents 2*(24m+1)
    s = qz.eta_series(120, EXACT, grid=24, scale=Fraction(2))
    assert s.lead == 2
    assert s.coefficient(2) == 1
    assert s.coefficient(2 * 25) == -1  # first pentagonal term q^(2*(1+24)/24)


# ---------------------------------------------------------------------------
# weight-2 forms and the ODE solution


def test_weight2_form_n0_is_eta4():
    f = qz.weight2_form_series(FormSpec(0), 24 * 8)
    eta4 = qz.eta_series(24 * 8 - 3) ** 4
    assert (f - eta4.truncate(f.trunc)).is_zero


def test_ode_solution_n0_is_eta_minus2():
    y = qz.ode_solution_series(FormSpec(0), 24 * 6)
    eta2 = qz.eta_series(24 * 6 + 10) ** 2
    prod = y * eta2
    assert prod.coefficient(0) == 1
    assert all(prod.coefficient(e) == 0 for e in range(1, prod.trunc))


def test_weight2_form_leading_exponent_and_pole_factor():
    spec = FormSpec(1, (Fraction(4, 7),))
    f = qz.weight2_form_series(spec, spec.lead_exponent + 24 * 3)
    assert f.lead == 52
    assert f.leading_coefficient == 1728 ** 2
    # multiplying back by (J - x)^2 must recover eta^4
    j = qz.j_series(f.trunc - 28)
    recovered = f * (j - Fraction(4, 7)) ** 2
    eta4 = qz.eta_series(recovered.trunc) ** 4
    assert ((recovered - eta4.truncate(recovered.trunc))).is_zero


def test_form_spec_validation():
    with pytest.raises(ValueError):
        FormSpec(1, (Fraction(3, 2),))
    with pytest.raises(ValueError):
        FormSpec(2, (Fraction(2, 3), Fraction(1, 3)))
    with pytest.raises(ValueError):
        FormSpec(2, (Fraction(1, 3),))
    spec = FormSpec(2, (Fraction(1, 5), Fraction(6, 7)))
    assert spec.r == Fraction(25, 6)
    assert spec.lead_exponent == 100


# ---------------------------------------------------------------------------
# kronecker symbol and the eta multiplier


def test_kronecker_euler_criterion_on_odd_primes():
    for p in (3, 5, 7, 11, 13, 17):
        for a in range(p):
            euler = pow(a, (p - 1) // 2, p)
            expect = -1 if euler == p - 1 else euler
            assert kronecker(a, p) == expect, (a, p)


def test_kronecker_bottom_two_and_special_cases():
    # (a/2) is the second supplement pattern
    assert [kronecker(a, 2) for a in (1, 3, 5, 7)] == [1, -1, -1, 1]
    assert kronecker(4, 2) == 0
    assert kronecker(7, 1) == 1
    assert kronecker(0, 1) == 1
    assert kronecker(-1, 5) == 1
    assert kronecker(-1, 3) == -1


@given(st.integers(-40, 40), st.integers(1, 40), st.integers(1, 40))
def test_kronecker_multiplicative_in_bottom(a, m, n):
    assert kronecker(a, m * n) == kronecker(a, m) * kronecker(a, n)


def test_multiplier_on_generators():
    # T shifts the q^(1/24) prefactor; S gives the classical e^(-i pi/4)
    assert eta_multiplier_index(GEN_T) == 1
    assert eta_multiplier(GEN_S) == pytest.approx(cmath.exp(-1j * math.pi / 4))
    assert character_index(GEN_T) == 1
    assert character_chi(GEN_T) == pytest.approx(cmath.exp(1j * math.pi / 3))
    assert character_chi(GEN_S) == pytest.approx(-1.0)


def test_multiplier_is_cocycle_on_random_words():
    rng = random.Random(7)
    tau = 0.23 + 0.9j
    for gamma in qz.random_words(rng, 60, 6):
        v = eta_multiplier(gamma)
        lhs = qz.eta_eval(gamma.apply(tau))
        rhs = v * gamma.cocycle(tau) ** 0.5 * qz.eta_eval(tau)
        assert abs(lhs - rhs) < 1e-12 * abs(rhs)


def test_eta_eval_matches_series_evaluation():
    eta = qz.eta_series(24 * 40).to_float()
    for tau in (0.9j, 0.3 + 1.2j, -0.45 + 0.8j):
        got = qz.eta_eval(tau)
        ref = eta.eval_at(tau, floor=0.5).value
        assert abs(got - ref) < 1e-12 * abs(ref)


# ---------------------------------------------------------------------------
# matrices and reduction


def test_matrix_identities():
    assert (GEN_S @ GEN_S).entries() == (-1, 0, 0, -1)
    st_cubed = word_matrix("STSTST")
    assert st_cubed.entries() == (-1, 0, 0, -1)
    assert word_matrix("Tt").entries() == IDENTITY.entries()
    g = word_matrix("TTSt")
    gi = g.inverse()
    assert (g @ gi).entries() == IDENTITY.entries()


def test_matrix_determinant_enforced():
    with pytest.raises(ValueError):
        UnimodularMatrix(1, 1, 1, 1)


def test_apply_and_cocycle():
    g = word_matrix("TST")
    tau = 0.37 + 1.9j
    a, b, c, d = g.entries()
    assert g.apply(tau) == pytest.approx((a * tau + b) / (c * tau + d))
    assert g.cocycle(tau) == pytest.approx(c * tau + d)


@given(st.floats(-8, 8), st.floats(0.05, 8))
def test_reduce_to_fundamental_lands_in_domain(re, im):
    tau = complex(re, im)
    g, z = reduce_to_fundamental(tau)
    assert abs(z.real) <= 0.5 + 1e-9
    assert abs(z) >= 1 - 1e-9
    assert g.apply(tau) == pytest.approx(z, abs=1e-9)


def test_transform_check_wrong_multiplier_fails():
    eta4 = (qz.eta_series(24 * 30) ** 4).to_float()
    rep = qz.transform_check(eta4, 2, character_chi(GEN_T), GEN_T,
                             [0.2 + 1.1j, 1.3j, -0.4 + 1.6j])
    assert rep.passed
    wrong = qz.transform_check(eta4, 2, -character_chi(GEN_T), GEN_T,
                               [0.2 + 1.1j, 1.3j, -0.4 + 1.6j])
    assert not wrong.passed


# ---------------------------------------------------------------------------
# eta quotients


def test_eta_quotient_parse_roundtrip():
    qs = EtaQuotientSpec.parse("eta(1/2)^8/eta(1)^4")
    assert qs.factors == ((Fraction(1, 2), 8), (Fraction(1), -4))
    assert qs.weight == 2
    qs2 = EtaQuotientSpec.parse(str(qs))
    assert qs2 == qs
    with pytest.raises(ValueError):
        EtaQuotientSpec.parse("eta(0)^2")
    with pytest.raises(ValueError):
        EtaQuotientSpec.parse("zeta(1)^2")


def test_eta_quotient_trivial_cases():
    qs = EtaQuotientSpec(((Fraction(1), 4),))
    s = qz.eta_quotient_series(qs, 6)
    eta4 = qz.eta_series(s.trunc) ** 4
    assert (s - eta4.truncate(s.trunc)).is_zero


def test_eta_quotient_fractional_scale_grid():
    # eta(tau/3)^6 / eta(tau)^2 has exponents on multiples of 1/24 only
    qs = EtaQuotientSpec.parse("eta(1/3)^6/eta(1)^2")
    s = qz.eta_quotient_series(qs, 6)
    assert s.grid == 24
    assert not s.is_zero
    assert s.lead == 0


def test_eta_quotient_grid_coarsens_when_possible():
    # leading q-power of eta(n tau)^2 eta(tau/n)^2 is (n^2+1)/(12 n)
    for n, grid in ((2, 24), (3, 72), (4, 48), (6, 72)):
        text = f"eta({n})^2*eta(1/{n})^2"
        s = qz.eta_quotient_series(EtaQuotientSpec.parse(text), 8)
        assert s.grid == grid, text
        assert Fraction(s.lead, s.grid) == Fraction(n * n + 1, 12 * n), text
