"""Point-evaluation layer: residues at the poles, periods, representation.

Series identities live in `schwarz`; this module checks the same
structures analytically.  The pole over x sits at the arc point
w = e^{i theta}, theta in [pi/2, 2pi/3], where the Klein invariant runs
monotonically 1 -> 0 along the arc (asserted numerically, not assumed).
The pole-bearing forms are evaluated pointwise as

    f(tau) = eta(tau)**4 / prod_i (J(tau) - x_i)**2

because their q-series stop converging below the pole band; eta comes
from its defining product, J from its (everywhere-convergent) series.
Points with very low imaginary part are pulled into the fundamental
domain by an S/T word and mapped back through the weight-2
transformation law.

Residues are trapezoid contour integrals on small circles (spectrally
accurate; accepted only after agreement under node doubling).  Period
integrals follow straight segments when they clear every pole of the
form's group orbit, otherwise climb over the pole band on a polyline.
The triangular representation attached to h = integral of f from i is

    rho(gamma) = [[1, omega_gamma], [0, chi(gamma^{-1})]],
    omega_gamma = integral of f from gamma^{-1} i to i,

and the homomorphism property of rho is exactly the twisted cocycle law
of the periods.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import system
from .forms import (FormSpec, UnimodularMatrix, character_chi, eta_eval,
                    j_series, reduce_to_fundamental, theta_j_series)
from .reporting import VerificationReport
from .series import FLOAT64, LaurentSeries

TWO_PI_I = 2j * math.pi


class QuadratureError(ArithmeticError):
    """Contour or path quadrature failed to stabilize under refinement."""


class PathError(ValueError):
    """No pole-safe integration path could be constructed."""


# ---------------------------------------------------------------------------
# fast pointwise evaluation of cached series


class _SeriesPointEval:
    """Vectorized evaluator sum c_e exp(2 pi i tau e / grid) for a fixed series."""

    def __init__(self, s: LaurentSeries):
        es, cs = [], []
        for e, c in s.terms():
            es.append(e)
            cs.append(complex(c))
        self.exps = np.array(es, dtype=float) / s.grid
        self.coeffs = np.array(cs, dtype=complex)

    def __call__(self, tau: complex) -> complex:
        return complex(np.dot(self.coeffs, np.exp(TWO_PI_I * tau * self.exps)))


@lru_cache(maxsize=8)
def _j_eval(order: int) -> _SeriesPointEval:
    return _SeriesPointEval(j_series(24 * order, FLOAT64))


@lru_cache(maxsize=8)
def _theta_j_eval(order: int) -> _SeriesPointEval:
    return _SeriesPointEval(theta_j_series(24 * order, FLOAT64))


# ---------------------------------------------------------------------------
# inverting J on the fundamental arc


@dataclass(frozen=True)
class ArcPoint:
    theta: float
    tau: complex
    j_value: float


def _assert_arc_sane(j, n_samples: int = 50):
    thetas = np.linspace(math.pi / 2, 2 * math.pi / 3, n_samples)
    vals = [j(cmath.exp(1j * t)) for t in thetas]
    worst_im = max(abs(v.imag) for v in vals)
    if worst_im > 1e-8:
        raise ArithmeticError(
            f"J not numerically real on the arc (|Im| up to {worst_im:.2e}); "
            "evaluation truncation too low"
        )
    reals = [v.real for v in vals]
    if any(a <= b for a, b in zip(reals, reals[1:])):
        raise ArithmeticError("J not strictly decreasing along the sampled arc")


def invert_j_on_arc(x: float, *, order: int = 80, tol: float = 1e-12) -> ArcPoint:
    """Arc point w = e^{i theta} with J(w) = x, for 0 < x < 1, by bisection."""
    x = float(x)
    if not (0.0 < x < 1.0):
        raise ValueError(f"x = {x} outside (0,1); J on the open arc takes values there")
    j = _j_eval(order)
    _assert_arc_sane(j)
    lo, hi = math.pi / 2, 2 * math.pi / 3  # J: 1 -> 0, decreasing
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if j(cmath.exp(1j * mid)).real > x:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol * 1e-2:
            break
    theta = 0.5 * (lo + hi)
    w = cmath.exp(1j * theta)
    jw = j(w)
    if abs(jw - x) > 1e-10:
        raise ArithmeticError(f"arc inversion stalled: |J(w) - x| = {abs(jw - x):.2e}")
    return ArcPoint(theta, w, jw.real)


# ---------------------------------------------------------------------------
# pointwise form evaluation


class FormEvaluator:
    """Pointwise f(tau) = eta**4 / prod (J - x_i)**2 for one pole spec.

    Direct evaluation needs Im tau >= im_direct (default 0.25, where the
    cached J series is still well converged); lower points are reduced
    into the fundamental domain and mapped back through the weight-2 law
    f(g tau) = chi(g) (c tau + d)**2 f(tau).
    """

    def __init__(self, spec: FormSpec, j_order: int = 120, im_direct: float = 0.25):
        self.spec = spec
        self.xs = [float(x) for x in spec.xs]
        self.im_direct = im_direct
        self._j = _j_eval(j_order)
        self._tj = _theta_j_eval(j_order)

    def j(self, tau: complex) -> complex:
        return self._j(tau)

    def j_prime(self, tau: complex) -> complex:
        """dJ/dtau = 2 pi i theta(J)."""
        return TWO_PI_I * self._tj(tau)

    def eta4(self, tau: complex) -> complex:
        return eta_eval(tau) ** 4

    def _direct(self, tau: complex) -> complex:
        v = self.eta4(tau)
        if self.xs:
            jv = self._j(tau)
            den = 1.0 + 0j
            for x in self.xs:
                den *= (jv - x) ** 2
            v /= den
        return v

    def value(self, tau: complex, allow_reduce: bool = True) -> complex:
        tau = complex(tau)
        if tau.imag <= 0:
            raise ValueError("evaluation point below the real axis")
        if tau.imag >= self.im_direct or not allow_reduce:
            return self._direct(tau)
        g, z = reduce_to_fundamental(tau)
        cz = g.cocycle(tau)
        return self._direct(z) / (character_chi(g) * cz * cz)

    __call__ = value

    def arc_poles(self) -> list[ArcPoint]:
        return [invert_j_on_arc(x) for x in self.xs]

    def pole_orbit(self, re_range=(-2.5, 2.5), im_floor: float = 0.2) -> list[complex]:
        """Group translates of the poles with Im above im_floor, Re in range.

        Im(g w) = Im w / |c w + d|**2, so only small (c, d) rows can clear
        the floor; translates T^k then sweep the real range.
        """
        base = [p.tau for p in self.arc_poles()]
        pts: list[complex] = []
        for c in range(-3, 4):
            for d in range(-3, 4):
                if math.gcd(c, d) != 1:
                    continue
                # complete (c, d) to a determinant-1 matrix
                g0, s, t = _egcd(c, d)
                a, b = t, -s  # a*d - b*c = t*d + s*c = gcd = 1
                try:
                    g = UnimodularMatrix(a, b, c, d)
                except ValueError:
                    continue
                for w in base:
                    z = g.apply(w)
                    if z.imag < im_floor:
                        continue
                    k0 = math.ceil(re_range[0] - z.real)
                    k1 = math.floor(re_range[1] - z.real)
                    for k in range(k0, k1 + 1):
                        pts.append(z + k)
        out: list[complex] = []
        for p in pts:
            if all(abs(p - q) > 1e-9 for q in out):
                out.append(p)
        return out


def _egcd(a: int, b: int):
    """(g, s, t) with s*a + t*b = g = gcd(a, b)."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        qt = old_r // r
        old_r, r = r, old_r - qt * r
        old_s, s = s, old_s - qt * s
        old_t, t = t, old_t - qt * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _as_callable(f):
    if isinstance(f, LaurentSeries):
        series = f
        return lambda z: series.eval_at(z, floor=0.05).value
    return f


# ---------------------------------------------------------------------------
# contour integrals around a point


def _circle_sum(f, w: complex, radius: float, m: int, k: int) -> complex:
    """(1/2 pi i) * closed integral of f(tau) (tau - w)**(k-1) by m-point trapezoid."""
    total = 0j
    for idx in range(m):
        phi = 2.0 * math.pi * idx / m
        e = cmath.exp(1j * phi)
        total += f(w + radius * e) * e ** k
    return total * radius ** k / m


def contour_residue(f, w: complex, radius: float = 0.02, samples: int = 256,
                    *, tol: float = 1e-9, max_doublings: int = 6) -> complex:
    """Residue of f at w by trapezoid quadrature with node-doubling acceptance."""
    func = _as_callable(f)
    m = samples
    prev = _circle_sum(func, w, radius, m, 1)
    for _ in range(max_doublings):
        m *= 2
        cur = _circle_sum(func, w, radius, m, 1)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise QuadratureError(
        f"residue quadrature at w={w} did not stabilize below {tol} by M={m}"
    )


def laurent_tail_coefficient(f, w: complex, k: int, radius: float = 0.02,
                             samples: int = 512) -> complex:
    """Coefficient a_{-k} of the Laurent expansion of f at w."""
    return _circle_sum(_as_callable(f), w, radius, samples, k)


def pole_order_check(f, w: complex, radius: float = 0.02, samples: int = 512,
                     *, max_order: int = 4, rel: float = 1e-6) -> int:
    """Order of the pole of f at w (0 when f is regular there).

    Compares each principal coefficient's contribution on the circle,
    |a_{-k}|/radius**k, against the largest contribution present
    (including the regular part); tiny relative contributions are noise.
    """
    func = _as_callable(f)
    sup_f = max(abs(func(w + radius * cmath.exp(2j * math.pi * t / 64)))
                for t in range(64))
    contrib = {}
    for k in range(1, max_order + 1):
        a = _circle_sum(func, w, radius, samples, k)
        contrib[k] = abs(a) / radius ** k
    scale = max(sup_f, *contrib.values())
    if scale == 0:
        return 0
    order = 0
    for k, s in contrib.items():
        if s > rel * scale:
            order = k
    return order


# ---------------------------------------------------------------------------
# residues predicted by the algebraic bracket


def residue_bracket(spec: FormSpec, i: int):
    """The bracket 3/(1-x_i) - 4/x_i - sum_j 12/(x_i - x_j): literally the
    residue-system residual entry, evaluated by the same code path."""
    sys = system.ResidueSystem(spec.n, Fraction(3), Fraction(4), Fraction(12))
    return system.residual(sys, list(spec.xs))[i]


def predicted_residue(spec: FormSpec, i: int,
                      evaluator: FormEvaluator | None = None) -> complex:
    """Full residue h_i(w_i)/(6 J'(w_i)) * bracket at the i-th pole.

    h_i is f with the (J - x_i)**2 factor removed, so it is regular at w_i.
    """
    ev = evaluator or FormEvaluator(spec)
    w = invert_j_on_arc(float(spec.xs[i])).tau
    jv = ev.j(w)
    h_i = ev.eta4(w)
    for jdx, x in enumerate(ev.xs):
        if jdx != i:
            h_i /= (jv - x) ** 2
    bracket = float(residue_bracket(spec, i))
    return h_i / (6.0 * ev.j_prime(w)) * bracket


# ---------------------------------------------------------------------------
# path integration


@lru_cache(maxsize=16)
def _gl_nodes(n: int):
    xs, ws = np.polynomial.legendre.leggauss(n)
    return xs, ws


def _segment_quad(f, a: complex, b: complex, n: int) -> complex:
    xs, ws = _gl_nodes(n)
    mid, half = (a + b) / 2.0, (b - a) / 2.0
    total = 0j
    for x, w in zip(xs, ws):
        total += w * f(mid + half * x)
    return total * half


def _adaptive_segment(f, a: complex, b: complex, tol: float, depth: int = 0) -> complex:
    coarse = _segment_quad(f, a, b, 48)
    fine = _segment_quad(f, a, b, 96)
    if abs(fine - coarse) <= tol * (1.0 + abs(fine)):
        return fine
    if depth >= 10:
        raise QuadratureError(f"segment [{a}, {b}] did not converge at depth {depth}")
    mid = (a + b) / 2.0
    return (_adaptive_segment(f, a, mid, tol / 1.4, depth + 1)
            + _adaptive_segment(f, mid, b, tol / 1.4, depth + 1))


def integrate_polyline(f, points, tol: float = 1e-10) -> complex:
    total = 0j
    for a, b in zip(points, points[1:]):
        if a != b:
            total += _adaptive_segment(f, complex(a), complex(b), tol)
    return total


def _seg_point_dist(a: complex, b: complex, p: complex) -> float:
    ab = b - a
    denom = abs(ab) ** 2
    if denom == 0:
        return abs(p - a)
    t = ((p - a) * ab.conjugate()).real / denom
    t = min(1.0, max(0.0, t))
    return abs(p - (a + t * ab))


def _clear(a: complex, b: complex, obstacles, clearance: float) -> bool:
    return all(_seg_point_dist(a, b, p) >= clearance for p in obstacles)


def safe_polyline(a: complex, b: complex, obstacles, clearance: float = 0.05,
                  roof: float = 1.35) -> list[complex]:
    """A path from a to b keeping `clearance` from every obstacle.

    Straight if possible; otherwise climb over the pole band (all
    obstacles here have Im <= 1.02) along verticals, shifting a blocked
    vertical sideways in small steps.
    """
    a, b = complex(a), complex(b)
    obstacles = list(obstacles)
    if _clear(a, b, obstacles, clearance):
        return [a, b]
    height = max(roof, a.imag + 0.1, b.imag + 0.1)

    def vertical(p: complex) -> list[complex] | None:
        # from p straight up to the roof, shifting Re if boxed in
        for shift in (0.0, 0.06, -0.06, 0.12, -0.12, 0.2, -0.2):
            foot = complex(p.real + shift, p.imag)
            top = complex(p.real + shift, height)
            if shift != 0.0 and not _clear(p, foot, obstacles, clearance):
                continue
            if _clear(foot, top, obstacles, clearance):
                legs = [p] if shift == 0.0 else [p, foot]
                return legs + [top]
        return None

    up = vertical(a)
    down = vertical(b)
    if up is None or down is None:
        raise PathError(f"no pole-safe path between {a} and {b}")
    if not _clear(up[-1], down[-1], obstacles, clearance):
        raise PathError(f"roof segment blocked between {a} and {b}")
    return up + list(reversed(down))


def period_omega(f, gamma: UnimodularMatrix, *, obstacles=(),
                 basepoint: complex = 1j, tol: float = 1e-10,
                 clearance: float = 0.05) -> complex:
    """omega_gamma = integral of f from gamma^{-1} basepoint to basepoint."""
    start = gamma.inverse().apply(basepoint)
    if abs(start - basepoint) < 1e-15:
        return 0j
    path = safe_polyline(start, basepoint, obstacles, clearance)
    return integrate_polyline(_as_callable(f), path, tol)


def antiderivative_value(f, tau: complex, *, obstacles=(), basepoint: complex = 1j,
                         tol: float = 1e-10, clearance: float = 0.05) -> complex:
    """h(tau) = integral of f from the basepoint (default i, so h(i) = 0)."""
    path = safe_polyline(basepoint, tau, obstacles, clearance)
    return integrate_polyline(_as_callable(f), path, tol)


# ---------------------------------------------------------------------------
# the triangular representation


@dataclass(frozen=True)
class RhoMatrix:
    """rho(gamma) = [[1, omega], [0, chi(gamma^{-1})]]; det = chi(gamma^{-1})."""

    omega: complex
    chi_inverse: complex

    def as_array(self) -> np.ndarray:
        return np.array([[1.0 + 0j, self.omega], [0j, self.chi_inverse]])


def rho_matrix(spec: FormSpec, gamma: UnimodularMatrix, *,
               evaluator: FormEvaluator | None = None, obstacles=None,
               tol: float = 1e-10) -> RhoMatrix:
    ev = evaluator or FormEvaluator(spec)
    if obstacles is None:
        obstacles = ev.pole_orbit() if spec.n else ()
    omega = period_omega(ev, gamma, obstacles=obstacles, tol=tol)
    return RhoMatrix(omega, character_chi(gamma.inverse()))


def rho_homomorphism_check(spec: FormSpec, pairs, *, tol: float = 1e-6,
                           quad_tol: float = 1e-10) -> VerificationReport:
    """Max-norm deviation of rho(alpha beta) - rho(alpha) rho(beta) over pairs."""
    ev = FormEvaluator(spec)
    obstacles = ev.pole_orbit() if spec.n else ()
    worst = 0.0
    count = 0
    for alpha, beta in pairs:
        left = rho_matrix(spec, alpha @ beta, evaluator=ev, obstacles=obstacles,
                          tol=quad_tol).as_array()
        right = (rho_matrix(spec, alpha, evaluator=ev, obstacles=obstacles,
                            tol=quad_tol).as_array()
                 @ rho_matrix(spec, beta, evaluator=ev, obstacles=obstacles,
                              tol=quad_tol).as_array())
        worst = max(worst, float(np.max(np.abs(left - right))))
        count += 1
    return VerificationReport(
        identity=f"rho is a homomorphism (n={spec.n})",
        passed=worst < tol,
        max_abs_deviation=worst,
        tolerance=tol,
        mode="pointwise",
        checked_count=count,
    )


def equivariance_check(spec: FormSpec, gamma: UnimodularMatrix, samples, *,
                       tol: float = 1e-6, quad_tol: float = 1e-10) -> VerificationReport:
    """h(gamma tau) - chi(gamma) h(tau) is tau-independent and equals chi(gamma) omega_gamma.

    Reports the larger of the sample spread and the mismatch with the
    period prediction.
    """
    samples = [complex(s) for s in samples]
    if len(samples) < 3:
        raise ValueError("need at least 3 samples")
    ev = FormEvaluator(spec)
    obstacles = ev.pole_orbit() if spec.n else ()
    chi = character_chi(gamma)
    consts = []
    for tau in samples:
        h_tau = antiderivative_value(ev, tau, obstacles=obstacles, tol=quad_tol)
        h_img = antiderivative_value(ev, gamma.apply(tau), obstacles=obstacles,
                                     tol=quad_tol)
        consts.append(h_img - chi * h_tau)
    spread = max(abs(c1 - c2) for c1 in consts for c2 in consts)
    omega = period_omega(ev, gamma, obstacles=obstacles, tol=quad_tol)
    predicted = chi * omega
    mean = sum(consts) / len(consts)
    mismatch = abs(mean - predicted)
    worst = max(spread, mismatch)
    return VerificationReport(
        identity=f"equivariance constant under {gamma} (n={spec.n})",
        passed=worst < tol,
        max_abs_deviation=worst,
        tolerance=tol,
        mode="pointwise",
        checked_count=len(samples),
        details={"constant": mean, "predicted": predicted, "spread": spread},
    )
