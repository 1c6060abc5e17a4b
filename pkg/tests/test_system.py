"""Residue system: residuals, Jacobian, Newton solver, polynomials."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

import qschwarz as qz
from qschwarz.system import (REPORTED_POLYNOMIALS, ResidueSystem, SolveError,
                             certify_polynomial, compare_with_reported,
                             default_init, jacobian, polynomial_from_roots,
                             rationalize_coefficients, refine, residual, solve)

REFERENCE_XS = {
    1: [4 / 7],
    2: [0.18710348071816338, 0.8655280982292051],
    3: [0.0887301134367895, 0.5229219469388046, 0.9367350363985995],
    4: [0.05128926149335579, 0.32868492960473905, 0.7030036924944028, 0.9635337443144791],
}


# ---------------------------------------------------------------------------
# residual and Jacobian


def test_residual_hand_values_n1():
    s = ResidueSystem(1)
    assert residual(s, [Fraction(1, 2)]) == [-2]
    assert residual(s, [Fraction(4, 7)]) == [0]


def test_residual_hand_values_n2():
    s = ResidueSystem(2)
    x = [Fraction(1, 4), Fraction(3, 4)]
    # direct arithmetic: a/(1-x) - b/x - c/(x - other)
    r0 = Fraction(3) / Fraction(3, 4) - Fraction(4) / Fraction(1, 4) - Fraction(12) / Fraction(-1, 2)
    r1 = Fraction(3) / Fraction(1, 4) - Fraction(4) / Fraction(3, 4) - Fraction(12) / Fraction(1, 2)
    assert residual(s, x) == [r0, r1]


def test_residual_rejects_degenerate_points():
    s = ResidueSystem(2)
    with pytest.raises(ZeroDivisionError):
        residual(s, [Fraction(0), Fraction(1, 2)])
    with pytest.raises(ZeroDivisionError):
        residual(s, [Fraction(1, 3), Fraction(1, 3)])
    with pytest.raises(ValueError):
        residual(s, [Fraction(1, 3)])


def test_jacobian_matches_finite_differences():
    s = ResidueSystem(3)
    xs = [0.11, 0.45, 0.83]
    jac = jacobian(s, xs)
    h = 1e-7
    for j in range(3):
        bumped = list(xs)
        bumped[j] += h
        fd = [(a - b) / h for a, b in zip(residual(s, bumped), residual(s, xs))]
        for i in range(3):
            assert jac[i][j] == pytest.approx(fd[i], rel=2e-5, abs=1e-4)


def test_jacobian_symmetric_offdiagonal_and_dominant():
    s = ResidueSystem(4)
    xs = REFERENCE_XS[4]
    jac = jacobian(s, xs)
    for i in range(4):
        for j in range(4):
            if i != j:
                assert jac[i][j] == pytest.approx(jac[j][i], rel=1e-12)
        off = sum(abs(jac[i][j]) for j in range(4) if j != i)
        assert jac[i][i] > off  # strict dominance margin at the solution


# ---------------------------------------------------------------------------
# solver


def test_solve_n1_through_n4_match_reference():
    for n, ref in REFERENCE_XS.items():
        sol = solve(ResidueSystem(n), tol=1e-13)
        assert sol.converged
        assert sol.residual_norm < 1e-12
        for got, want in zip(sol.xs, ref):
            assert got == pytest.approx(want, abs=1e-10)


def test_solve_n1_exact_value():
    sol = solve(ResidueSystem(1), tol=1e-14)
    assert abs(sol.xs[0] - 4 / 7) < 1e-14


def test_solve_n0_trivial():
    sol = solve(ResidueSystem(0))
    assert sol.xs == ()
    assert sol.residual_norm == 0.0


def test_solve_high_precision():
    sol = solve(ResidueSystem(2), bits=240, tol=1e-60)
    assert sol.residual_norm < 1e-60
    assert float(sol.xs[0]) == pytest.approx(REFERENCE_XS[2][0], abs=1e-12)


def test_refine_reaches_target_precision():
    rough = solve(ResidueSystem(3), tol=1e-12)
    polished = refine(ResidueSystem(3), rough.xs, 280)
    assert polished.residual_norm < 2.0 ** (-250)


def test_solve_rejects_bad_start():
    with pytest.raises(SolveError):
        solve(ResidueSystem(2), init=[0.9, 0.1])
    with pytest.raises(SolveError):
        solve(ResidueSystem(2), init=[-0.5, 0.5])


def test_solve_unattainable_tolerance_reports_best():
    with pytest.raises(SolveError) as exc_info:
        solve(ResidueSystem(2), tol=1e-30)
    last = exc_info.value.last
    assert last is not None
    assert not last.converged
    assert last.residual_norm < 1e-10  # the iterate itself is still good


def test_solve_n10_default_init():
    sol = solve(ResidueSystem(10), tol=1e-10)
    assert sol.residual_norm < 1e-10
    assert all(a < b for a, b in zip(sol.xs, sol.xs[1:]))


def test_trace_records_monotone_tail():
    trace = []
    solve(ResidueSystem(3), tol=1e-12, trace=trace)
    assert len(trace) >= 3
    # Newton doubles digits eventually: the last step must crush the residual
    assert trace[-1] < trace[0]


@given(st.integers(1, 3),
       st.fractions(min_value=Fraction(1, 2), max_value=20),
       st.fractions(min_value=Fraction(1, 2), max_value=20),
       st.fractions(min_value=Fraction(1, 2), max_value=20))
def test_solver_handles_generic_positive_parameters(n, a, b, c):
    # electrostatic equilibrium exists and is unique for positive weights
    sol = solve(ResidueSystem(n, a, b, c), tol=1e-9)
    assert sol.residual_norm < 1e-9
    assert all(0 < x < 1 for x in sol.xs)
    assert all(p < q for p, q in zip(sol.xs, sol.xs[1:]))


# ---------------------------------------------------------------------------
# polynomial reconstruction and certification


def test_polynomial_from_roots_exact():
    coeffs = polynomial_from_roots([Fraction(1, 2), Fraction(1, 3)])
    assert coeffs == [Fraction(1), Fraction(-5, 6), Fraction(1, 6)]
    assert polynomial_from_roots([]) == [Fraction(1)]


def test_polynomial_from_roots_matches_elementary_symmetric():
    roots = [Fraction(1, 7), Fraction(2, 5), Fraction(3, 4)]
    c = polynomial_from_roots(roots)
    e1 = sum(roots)
    e2 = roots[0] * roots[1] + roots[0] * roots[2] + roots[1] * roots[2]
    e3 = roots[0] * roots[1] * roots[2]
    assert c == [1, -e1, e2, -e3]


def test_rationalize_finds_small_denominators():
    monic = polynomial_from_roots(solve(ResidueSystem(2), tol=1e-13).xs)
    rat = rationalize_coefficients(monic)
    assert rat == [Fraction(1), Fraction(-20, 19), Fraction(40, 247)]


def test_certify_accepts_true_polynomial_and_rejects_perturbed():
    s = ResidueSystem(2)
    good = [Fraction(1), Fraction(-20, 19), Fraction(40, 247)]
    cert = certify_polynomial(good, s)
    assert cert["ok"]
    assert cert["root_residual_sup"] < 1e-30
    bad = [Fraction(1), Fraction(-20, 19), Fraction(41, 247)]
    cert = certify_polynomial(bad, s)
    assert not cert["ok"]


def test_certified_polynomials_n3_n4():
    for n, want in {
        3: [Fraction(1), Fraction(-48, 31), Fraction(96, 155), Fraction(-128, 2945)],
        4: [Fraction(1), Fraction(-504680, 246605), Fraction(327360, 246605),
            Fraction(-70400, 246605), Fraction(2816, 246605)],
    }.items():
        sys_n = ResidueSystem(n)
        polished = refine(sys_n, solve(sys_n, tol=1e-12).xs, 300)
        rat = rationalize_coefficients(polynomial_from_roots(polished.xs))
        assert rat == want
        assert certify_polynomial(rat, sys_n)["ok"]


def test_compare_with_reported_structure():
    # n=3 agrees with the archived table; n=2 and n=4 do not
    sys3 = ResidueSystem(3)
    rat3 = rationalize_coefficients(
        polynomial_from_roots(refine(sys3, solve(sys3).xs, 300).xs))
    diff3 = compare_with_reported(3, rat3)
    assert diff3["match"]

    sys2 = ResidueSystem(2)
    rat2 = rationalize_coefficients(
        polynomial_from_roots(refine(sys2, solve(sys2).xs, 300).xs))
    diff2 = compare_with_reported(2, rat2)
    assert not diff2["match"]
    by_degree = {row["degree"]: row for row in diff2["coefficients"]}
    assert by_degree[2]["match"] and by_degree[1]["match"]
    assert not by_degree[0]["match"]

    assert compare_with_reported(1, [Fraction(1), Fraction(-4, 7)]) is None
    assert set(REPORTED_POLYNOMIALS) == {2, 3, 4}


def test_default_init_is_ordered_interior():
    for n in (1, 2, 5, 10):
        init = default_init(n)
        assert all(0 < x < 1 for x in init)
        assert all(a < b for a, b in zip(init, init[1:]))
