"""The residue system and its solver.

For n points 0 < x_1 < ... < x_n < 1 the system is

    f_i(x) = a/(1 - x_i) - b/x_i - sum_{j != i} c/(x_i - x_j) = 0,

with (a, b, c) = (3, 4, 12) in the application: f_i is, up to a positive
local factor, the residue of the weight-2 form at the pole over x_i, so
solving the system kills every residue at once.

The Jacobian is symmetric with off-diagonal entries -c/(x_i - x_j)**2
and diagonal a/(1-x_i)**2 + b/x_i**2 + sum_j c/(x_i - x_j)**2; the
diagonal-dominance margin on each row is a/(1-x_i)**2 + b/x_i**2 > 0, so
the matrix is positive definite on the ordered simplex and damped Newton
steps are well posed.  (Differentiating f_i makes the off-diagonal sign
negative; a finite-difference check in the test suite pins this down.)

Everything here is arithmetic-generic: Fractions, floats and mpmath
big floats all work, which is how the n=1 solution 4/7 stays exact and
how solutions get polished to hundreds of bits for the high-order
series verifications.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np


class SolveError(RuntimeError):
    """Newton iteration failed; carries the last iterate for diagnosis."""

    def __init__(self, message: str, last: "SolutionVector | None" = None):
        super().__init__(message)
        self.last = last


@dataclass(frozen=True)
class ResidueSystem:
    n: int
    a: object = Fraction(3)
    b: object = Fraction(4)
    c: object = Fraction(12)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if not (self.a > 0 and self.b > 0 and self.c > 0):
            raise ValueError("a, b, c must be positive")


@dataclass(frozen=True)
class SolutionVector:
    xs: tuple
    residual_norm: float
    iterations: int
    bits: int
    converged: bool = True


def _in_simplex(xs) -> bool:
    prev = 0
    for x in xs:
        if not (prev < x < 1):
            return False
        prev = x
    return True


def _abc_like(sys: ResidueSystem, xs):
    """a, b, c coerced so Fraction constants divide cleanly by mpf coordinates."""
    if any(isinstance(x, (mpmath.mpf, mpmath.mpc)) for x in xs):
        return _to_mp(sys.a), _to_mp(sys.b), _to_mp(sys.c)
    return sys.a, sys.b, sys.c


def residual(sys: ResidueSystem, xs):
    """The n residual values f_i; arithmetic follows the type of xs entries."""
    xs = list(xs)
    if len(xs) != sys.n:
        raise ValueError(f"expected {sys.n} coordinates, got {len(xs)}")
    for x in xs:
        if x == 0 or x == 1:
            raise ZeroDivisionError("residual undefined at a simplex face")
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            if xs[i] == xs[j]:
                raise ZeroDivisionError("residual undefined on a collision hyperplane")
    a, b, c = _abc_like(sys, xs)
    out = []
    for i, xi in enumerate(xs):
        v = a / (1 - xi) - b / xi
        for j, xj in enumerate(xs):
            if j != i:
                v = v - c / (xi - xj)
        out.append(v)
    return out


def jacobian(sys: ResidueSystem, xs):
    """Symmetric Jacobian of the residual as a list of rows."""
    xs = list(xs)
    n = len(xs)
    a, b, c = _abc_like(sys, xs)
    rows = [[0] * n for _ in range(n)]
    for i, xi in enumerate(xs):
        diag = a / (1 - xi) ** 2 + b / xi ** 2
        for j, xj in enumerate(xs):
            if j != i:
                od = c / (xi - xj) ** 2
                rows[i][j] = -od
                diag = diag + od
        rows[i][i] = diag
    return rows


def default_init(n: int) -> tuple:
    """Equispaced interior points; a solution exists in the open cube, so
    starting well inside the simplex keeps the damped steps feasible."""
    return tuple(Fraction(i + 1, n + 1) for i in range(n))


def _sup(vs) -> float:
    return max((abs(float(v)) for v in vs), default=0.0)


def solve(sys: ResidueSystem, init=None, *, tol: float = 1e-12,
          max_iter: int = 80, bits: int = 53, trace=None) -> SolutionVector:
    """Damped Newton on the ordered simplex.

    Full steps are halved until the iterate stays in the simplex and the
    sup-norm of the residual decreases.  With bits > 53 the whole
    iteration runs in mpmath arithmetic at that precision.  Pass a list
    as `trace` to collect the residual sup-norm per accepted iterate.
    """
    if sys.n == 0:
        return SolutionVector((), 0.0, 0, bits)
    if bits > 53:
        return _solve_mp(sys, init, tol=tol, max_iter=max_iter, bits=bits,
                         trace=trace)
    xs = np.array([float(x) for x in (init if init is not None else default_init(sys.n))])
    if not _in_simplex(xs):
        raise SolveError(f"initial point {xs.tolist()} outside the ordered simplex")
    res = np.array([float(v) for v in residual(sys, xs.tolist())])
    if trace is not None:
        trace.append(_sup(res))
    best = SolutionVector(tuple(xs.tolist()), _sup(res), 0, bits, converged=False)
    for it in range(1, max_iter + 1):
        if _sup(res) < tol:
            return SolutionVector(tuple(xs.tolist()), _sup(res), it - 1, bits)
        jac = np.array([[float(v) for v in row] for row in jacobian(sys, xs.tolist())])
        step = np.linalg.solve(jac, -res)
        lam = 1.0
        for _ in range(50):
            cand = xs + lam * step
            if _in_simplex(cand):
                cres = np.array([float(v) for v in residual(sys, cand.tolist())])
                if _sup(cres) < _sup(res):
                    xs, res = cand, cres
                    if trace is not None:
                        trace.append(_sup(res))
                    break
            lam *= 0.5
        else:
            raise SolveError(
                f"line search collapsed at residual {_sup(res):.3e} (n={sys.n}, tol={tol:g}); "
                "the target tolerance is below the attainable floor at this precision",
                last=best,
            )
        if _sup(res) < best.residual_norm:
            best = SolutionVector(tuple(xs.tolist()), _sup(res), it, bits, converged=False)
    if _sup(res) < tol:
        return SolutionVector(tuple(xs.tolist()), _sup(res), max_iter, bits)
    raise SolveError(f"no convergence in {max_iter} iterations (n={sys.n})", last=best)


def _to_mp(x) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def _solve_mp(sys: ResidueSystem, init, *, tol, max_iter, bits,
              trace=None) -> SolutionVector:
    with mpmath.workprec(bits + 12):
        xs = [_to_mp(x) for x in (init if init is not None else
                                  [Fraction(i + 1, sys.n + 1) for i in range(sys.n)])]
        if not _in_simplex(xs):
            raise SolveError("initial point outside the ordered simplex")
        res = residual(sys, xs)
        if trace is not None:
            trace.append(_sup(res))
        for it in range(1, max_iter + 1):
            if _sup(res) < tol:
                return SolutionVector(tuple(xs), _sup(res), it - 1, bits)
            jac = mpmath.matrix(jacobian(sys, xs))
            step = mpmath.lu_solve(jac, [-v for v in res])
            lam = mpmath.mpf(1)
            for _ in range(60):
                cand = [x + lam * s for x, s in zip(xs, step)]
                if _in_simplex(cand):
                    cres = residual(sys, cand)
                    if _sup(cres) < _sup(res):
                        xs, res = cand, cres
                        if trace is not None:
                            trace.append(_sup(res))
                        break
                lam /= 2
            else:
                raise SolveError(
                    f"line search collapsed at residual {_sup(res):.3e} (bits={bits})",
                    last=SolutionVector(tuple(xs), _sup(res), it, bits, converged=False),
                )
        if _sup(res) < tol:
            return SolutionVector(tuple(xs), _sup(res), max_iter, bits)
        raise SolveError(f"no convergence in {max_iter} iterations (bits={bits})",
                         last=SolutionVector(tuple(xs), _sup(res), max_iter, bits, False))


def refine(sys: ResidueSystem, xs, bits: int, max_iter: int = 60) -> SolutionVector:
    """Polish an approximate solution to roughly full precision at `bits`.

    Plain Newton (no damping; the start is assumed close) with target
    residual 2**(-bits + 24).
    """
    if sys.n == 0:
        return SolutionVector((), 0.0, 0, bits)
    tol = 2.0 ** (-bits + 24) or 5e-324  # guard the float underflow at huge bit counts
    with mpmath.workprec(bits + 12):
        cur = [_to_mp(x) for x in xs]
        for it in range(1, max_iter + 1):
            res = residual(sys, cur)
            if _sup(res) < tol:
                return SolutionVector(tuple(cur), _sup(res), it - 1, bits)
            jac = mpmath.matrix(jacobian(sys, cur))
            step = mpmath.lu_solve(jac, [-v for v in res])
            cur = [x + s for x, s in zip(cur, step)]
            if not _in_simplex(cur):
                raise SolveError("refinement left the ordered simplex",
                                 last=SolutionVector(tuple(cur), _sup(res), it, bits, False))
    raise SolveError(f"refinement did not reach 2^-{bits - 24} in {max_iter} steps",
                     last=SolutionVector(tuple(cur), _sup(residual(sys, cur)), max_iter,
                                         bits, False))


# ---------------------------------------------------------------------------
# polynomial reconstruction


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, mpmath.mpf):
        if not mpmath.isfinite(x):
            raise ValueError("cannot convert non-finite mpf to Fraction")
        sign, man, exp, _ = x._mpf_
        v = Fraction(man) * Fraction(2) ** exp
        return -v if sign else v
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def polynomial_from_roots(xs) -> list[Fraction]:
    """Monic polynomial with the given roots, coefficients descending, exact.

    Inputs are converted to Fractions first (floats and mpf convert
    exactly), so the elementary-symmetric recursion loses nothing.
    """
    coeffs = [Fraction(1)]
    for x in xs:
        r = _to_fraction(x)
        new = coeffs + [Fraction(0)]
        for i in range(1, len(new)):
            new[i] = new[i] - r * coeffs[i - 1]
        coeffs = new
    return coeffs


def rationalize_coefficients(coeffs, max_denominator: int = 10 ** 6) -> list[Fraction]:
    """Best rational approximations (continued fractions via limit_denominator)."""
    return [_to_fraction(c).limit_denominator(max_denominator) for c in coeffs]


def certify_polynomial(rat_coeffs, sys: ResidueSystem, *, dps: int = 60,
                       residual_tol: float = 1e-9) -> dict:
    """Resubstitution certificate for a rationalized solution polynomial.

    Solves the polynomial to high precision, checks the roots are n
    distinct reals in (0,1), and reports the sup norm of the system
    residual at those roots.
    """
    n = sys.n
    with mpmath.workdps(dps):
        poly = [mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator) for c in rat_coeffs]
        roots = [mpmath.mpc(r) for r in mpmath.polyroots(poly, maxsteps=200, extraprec=120)]
        imag_tol = mpmath.mpf(10) ** (-dps + 10)
        real_roots = sorted(r.real for r in roots if abs(r.imag) < imag_tol)
        ok_shape = (len(real_roots) == n
                    and all(0 < r < 1 for r in real_roots)
                    and all(a < b for a, b in zip(real_roots, real_roots[1:])))
        root_residual = None
        if ok_shape:
            root_residual = _sup(residual(sys, list(real_roots)))
        return {
            "ok": bool(ok_shape and root_residual is not None and root_residual < residual_tol),
            "n_real_roots_in_01": len(real_roots),
            "root_residual_sup": root_residual,
            "roots": [float(r) for r in real_roots],
            "residual_tol": residual_tol,
        }


# ---------------------------------------------------------------------------
# previously reported polynomials (for the structured diff; never overwritten)

REPORTED_POLYNOMIALS: dict[int, list[Fraction]] = {
    2: [Fraction(247), Fraction(-260), Fraction(4)],
    3: [Fraction(31), Fraction(-48), Fraction(96, 5), Fraction(-128, 95)],
    4: [Fraction(1233), Fraction(-25234), Fraction(16368), Fraction(-3520), Fraction(704, 5)],
}


def compare_with_reported(n: int, monic_coeffs) -> dict | None:
    """Structured per-coefficient diff of a computed monic polynomial against
    the previously reported one for the same n (normalized to monic).

    Returns None when no reported polynomial exists for this n.
    """
    if n not in REPORTED_POLYNOMIALS:
        return None
    reported = REPORTED_POLYNOMIALS[n]
    lead = reported[0]
    reported_monic = [c / lead for c in reported]
    ours = [_to_fraction(c) for c in monic_coeffs]
    rows = []
    all_match = True
    for k, (c_ours, c_rep) in enumerate(zip(ours, reported_monic)):
        match = c_ours == c_rep
        all_match = all_match and match
        rows.append({
            "degree": len(ours) - 1 - k,
            "computed": str(c_ours),
            "reported_monic": str(c_rep),
            "match": match,
        })
    return {
        "n": n,
        "reported_raw": [str(c) for c in reported],
        "match": all_match,
        "coefficients": rows,
    }
