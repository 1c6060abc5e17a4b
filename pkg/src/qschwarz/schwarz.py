"""Schwarzian and second-order-ODE identities as truncated-series statements.

For h with h' = f the Schwarzian {h, tau} equals (2*pi*i)**2 * S_hat(f)
where, writing theta = q d/dq and g = theta(f)/f,

    S_hat(f) = theta(g) - g**2 / 2.

The two identities verified here, for the weight-2 form f with pole data
spec and r = (12n+1)/6:

    schwarzian:  S_hat(f) = -(r**2/2) * E4          ({h,tau} = 2 pi^2 r^2 E4)
    ode:         theta(theta(y)) = (r**2/4) * E4 * y,   y = eta**-2 prod (J - x_i)

both coefficient-wise through a requested q-order.  In exact mode (n = 0,
or rational pole data like x = 4/7 at n = 1) the deviation must be the
zero series.  In float mode the pole at Im tau just under 1 makes the
series coefficients grow like 2**(9.07*m) at q**m, and the identity is a
cancellation between terms of that size, so the working precision must
scale with the order: recommended_bits provides the schedule and the
pole data is re-polished to matching accuracy before expanding.

A deliberately wrong x (one that leaves the residue system unsolved)
shows up twice: the precondition flag trips, and the deviation series
picks up the predicted simple poles and fails loudly.  Reports carry
both signals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import system
from .forms import (FormSpec, eisenstein_series, ode_solution_series,
                    weight2_form_series)
from .reporting import VerificationReport
from .series import EXACT, FLOAT64, CoeffMode, LaurentSeries, float_mode

PRECONDITION_TOL = 1e-8


@dataclass(frozen=True)
class SchwarzTarget:
    """Constants of the two identities for a given n."""

    n: int
    r: Fraction
    normalized_constant: Fraction  # -(r**2)/2, coefficient of E4 in S_hat
    ode_constant: Fraction  # r**2/4

    @classmethod
    def from_spec(cls, spec: FormSpec) -> "SchwarzTarget":
        r = spec.r
        return cls(spec.n, r, -(r ** 2) / 2, r ** 2 / 4)


def recommended_bits(order: int) -> int:
    """Working precision for float-mode verification through q**order.

    Coefficients of the pole-bearing pipelines grow at up to
    2*pi/ln 2 = 9.07 bits per q-order (pole approaching Im tau = 1), and
    the identities cancel that growth, so precision must outrun it.
    """
    return 160 + math.ceil(9.1 * order)


def _resolve(spec: FormSpec, order, mode):
    if mode is None:
        if spec.is_exact:
            mode = EXACT
        else:
            mode = float_mode(recommended_bits(order if order is not None else 100))
    if order is None:
        order = 25 if mode.is_exact else 100
    return order, mode


def _prepared_xs(spec: FormSpec, mode: CoeffMode, refine_xs: bool):
    """Pole data in the working arithmetic, polished to working precision.

    Returns (spec, precondition_ok, residual_sup).  Refinement starts
    from the given xs, so a point that does not solve the system stays
    unsolved and is reported, not silently repaired: Newton is only
    applied when the start is already inside the basin (residual below
    a loose threshold).
    """
    if spec.n == 0:
        return spec, True, 0.0
    sys = system.ResidueSystem(spec.n)
    if mode.is_exact:
        res = system.residual(sys, list(spec.xs))
        sup = max(abs(v) for v in res)
        return spec, sup == 0, float(sup)
    rough = max(abs(float(v)) for v in system.residual(sys, [float(x) for x in spec.xs]))
    if refine_xs and rough < 1e-3 and mode.precision > 53:
        polished = system.refine(sys, spec.xs, mode.precision)
        spec = FormSpec(spec.n, polished.xs)
        sup = polished.residual_norm
    else:
        sup = rough
    return spec, sup < PRECONDITION_TOL, float(sup)


def schwarzian_normalized(f: LaurentSeries) -> LaurentSeries:
    """S_hat(f) = theta(g) - g**2/2 with g = theta(f)/f; equals {h,tau}/(2*pi*i)**2."""
    if f.is_zero:
        raise ValueError("Schwarzian of (the primitive of) the zero series")
    g = f.theta() * f.recip()
    half = Fraction(1, 2) if f.mode.is_exact else f.mode.coerce(0.5)
    return g.theta() - (g * g) * half


def _deviation_through(dev: LaurentSeries, t_goal: int):
    """Max |coefficient| of dev over exponents <= t_goal, plus a sanity check
    that the truncation bookkeeping actually covers the requested range."""
    if dev.trunc <= t_goal:
        raise ArithmeticError(
            f"internal truncation slack error: deviation valid to {dev.trunc}, need > {t_goal}"
        )
    if dev.mode.is_exact:
        worst = Fraction(0)
        for e, c in dev.terms():
            if e <= t_goal and abs(c) > worst:
                worst = abs(c)
        return worst
    worst = 0.0
    for e, c in dev.terms():
        if e <= t_goal:
            a = abs(c)
            if a > worst:
                worst = a
    return float(worst)


def verify_schwarzian(spec: FormSpec, *, order: int | None = None,
                      mode: CoeffMode | None = None, tolerance=None,
                      refine_xs: bool = True) -> VerificationReport:
    """Check S_hat(f) + (r**2/2) E4 = 0 coefficient-wise through q**order."""
    order, mode = _resolve(spec, order, mode)
    spec, pre_ok, res_sup = _prepared_xs(spec, mode, refine_xs)
    target = SchwarzTarget.from_spec(spec)
    t_goal = 24 * order
    v = t_goal + spec.lead_exponent + 26
    f = weight2_form_series(spec, v, mode)
    e4 = eisenstein_series(4, t_goal + 2, mode)
    with mode.workprec():
        const = target.r ** 2 / 2 if mode.is_exact else mode.coerce(target.r ** 2) / 2
        dev = schwarzian_normalized(f) + e4 * const
    worst = _deviation_through(dev, t_goal)
    if tolerance is None:
        tolerance = Fraction(0) if mode.is_exact else 1e-8
    passed = pre_ok and (worst == 0 if mode.is_exact and tolerance == 0
                         else worst <= tolerance)
    return VerificationReport(
        identity=f"schwarzian(f_{spec.n}) = -(r^2/2) E4",
        passed=bool(passed),
        max_abs_deviation=worst,
        tolerance=tolerance,
        mode=mode.describe(),
        checked_count=order + 1,
        trunc=t_goal,
        precondition_ok=pre_ok,
        details={
            "n": spec.n,
            "r": str(target.r),
            "normalized_constant": str(target.normalized_constant),
            "system_residual_sup": res_sup,
            "lead_exponent": spec.lead_exponent,
        },
    )


def verify_ode(spec: FormSpec, *, order: int | None = None,
               mode: CoeffMode | None = None, tolerance=None,
               refine_xs: bool = True) -> VerificationReport:
    """Check theta(theta(y)) - (r**2/4) E4 y = 0 coefficient-wise through q**order."""
    order, mode = _resolve(spec, order, mode)
    spec, pre_ok, res_sup = _prepared_xs(spec, mode, refine_xs)
    target = SchwarzTarget.from_spec(spec)
    t_goal = 24 * order
    y = ode_solution_series(spec, t_goal + 1, mode)
    e4 = eisenstein_series(4, t_goal + 24 * spec.n + 4, mode)
    with mode.workprec():
        const = target.ode_constant if mode.is_exact else mode.coerce(target.ode_constant)
        dev = y.theta().theta() - e4 * y * const
    worst = _deviation_through(dev, t_goal)
    if tolerance is None:
        tolerance = Fraction(0) if mode.is_exact else 1e-8
    passed = pre_ok and (worst == 0 if mode.is_exact and tolerance == 0
                         else worst <= tolerance)
    return VerificationReport(
        identity=f"theta^2(y_{spec.n}) = (r^2/4) E4 y_{spec.n}",
        passed=bool(passed),
        max_abs_deviation=worst,
        tolerance=tolerance,
        mode=mode.describe(),
        checked_count=order + 1,
        trunc=t_goal,
        precondition_ok=pre_ok,
        details={
            "n": spec.n,
            "r": str(target.r),
            "ode_constant": str(target.ode_constant),
            "system_residual_sup": res_sup,
        },
    )


def frobenius_leading_check(spec: FormSpec, *, order: int = 6) -> VerificationReport:
    """Leading-exponent law: f and h = integral of f both start at t**(4+48n),
    i.e. h ~ q**r with non-integral r = (12n+1)/6."""
    mode = FLOAT64
    expected = spec.lead_exponent
    f = weight2_form_series(spec, expected + 24 * order, mode)
    h = f.integrate_tau()
    q_exp = Fraction(h.lead, 24)
    ok = (f.lead == expected and h.lead == expected
          and not mode.is_zero(h.leading_coefficient)
          and q_exp == spec.r and spec.r.denominator != 1)
    return VerificationReport(
        identity=f"leading exponents of f_{spec.n} and its primitive",
        passed=bool(ok),
        max_abs_deviation=abs(f.lead - expected) + abs(h.lead - expected),
        tolerance=0,
        mode=mode.describe(),
        checked_count=2,
        details={
            "expected_t_exponent": expected,
            "f_lead": f.lead,
            "h_lead": h.lead,
            "h_q_exponent": str(q_exp),
            "r": str(spec.r),
        },
    )
