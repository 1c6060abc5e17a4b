"""Constructors for the classical modular objects and the pole-bearing forms.

Series side: eta (pentagonal expansion, optionally with a rational scale
on tau), the Eisenstein series E2/E4/E6 (divisor sums), delta = eta**24,
the normalized Klein invariant J = E4**3/(1728*delta) fixed by J(i) = 1
and J(rho) = 0, its logarithmic companion theta(J) = -E4**2*E6/(1728*delta),
the weight-2 forms with prescribed double poles

    f = eta**4 / prod_i (J - x_i)**2,      lead exponent 4 + 48n,

and the associated second-order-ODE solutions y = eta**-2 * prod_i (J - x_i).

Transformation side: the eta multiplier v(gamma) as an exact 24th root of
unity, the genuine character chi = v**4 (a 6th root of unity), unimodular
matrices with the S/T generators, fundamental-domain reduction, a direct
product evaluator for eta, and a generic pointwise transformation-law
checker.

J's normalization divides the classical E4**3/delta by 1728; the variant
without the cube does not satisfy J(i) = 1 and is not used.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .reporting import VerificationReport
from .series import EXACT, CoeffMode, GridMismatchError, LaurentSeries, SeriesError

# ---------------------------------------------------------------------------
# number-theoretic helpers


def sigma_power(k: int, n: int) -> int:
    """Divisor power sum sigma_k(n) for n >= 1."""
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d ** k
            e = n // d
            if e != d:
                total += e ** k
        d += 1
    return total


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n), extending the Jacobi symbol to all integers."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -sign
    # factor powers of two out of n; (a|2) = 0, 1, -1 for a even, +-1 mod 8, +-3 mod 8
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            sign = -sign
    a %= n
    # Jacobi reciprocity loop on odd n > 0
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a %= n
    return sign if n == 1 else 0


def pentagonal_terms(limit_t: int):
    """Yield (T_k, sign) with T_k = k(3k-1)/2 < limit_t, k = 0, 1, -1, 2, ..."""
    k = 0
    while True:
        emitted = False
        for kk in ((k,) if k == 0 else (k, -k)):
            t = kk * (3 * kk - 1) // 2
            if t < limit_t:
                yield t, -1 if kk % 2 else 1
                emitted = True
        if not emitted and k > 0:
            return
        k += 1


# ---------------------------------------------------------------------------
# q-series constructors


@lru_cache(maxsize=64)
def eta_series(trunc: int, mode: CoeffMode = EXACT, grid: int = 24,
               scale: Fraction = Fraction(1)) -> LaurentSeries:
    """eta(scale*tau) = q**(scale/24) prod (1 - q**(scale*m)) on the given grid.

    Exponents grid*scale*(1+24*T_k)/24 must be integers; callers pick the
    grid accordingly (grid=24, scale=1 is the plain t-grid eta).
    """
    scale = Fraction(scale)
    num = grid * scale.numerator
    den = 24 * scale.denominator
    terms = {}
    # largest T with exponent < trunc
    limit_t = max(1, (trunc * den) // num)
    for t, sign in pentagonal_terms(limit_t + 2):
        e_num = num * (1 + 24 * t)
        if e_num % den:
            raise GridMismatchError(
                f"eta scale {scale} does not land on grid {grid} (exponent {e_num}/{den})"
            )
        e = e_num // den
        if e < trunc:
            terms[e] = sign
    return LaurentSeries.from_terms(terms, mode, trunc, grid)


_EIS_CONST = {2: -24, 4: 240, 6: -504}
_EIS_POWER = {2: 1, 4: 3, 6: 5}


@lru_cache(maxsize=64)
def eisenstein_series(k: int, trunc: int, mode: CoeffMode = EXACT,
                      grid: int = 24) -> LaurentSeries:
    """E_k = 1 + const * sum sigma_{k-1}(m) q**m for k in {2, 4, 6}."""
    if k not in _EIS_CONST:
        raise ValueError(f"unsupported Eisenstein weight {k}")
    c, p = _EIS_CONST[k], _EIS_POWER[k]
    terms = {0: 1}
    m = 1
    while m * grid < trunc:
        terms[m * grid] = c * sigma_power(p, m)
        m += 1
    return LaurentSeries.from_terms(terms, mode, trunc, grid)


@lru_cache(maxsize=32)
def delta_series(trunc: int, mode: CoeffMode = EXACT) -> LaurentSeries:
    """Discriminant delta = eta**24, lead exponent 24 (i.e. q**1)."""
    return eta_series(trunc - 23, mode) ** 24


@lru_cache(maxsize=32)
def j_series(trunc: int, mode: CoeffMode = EXACT) -> LaurentSeries:
    """Normalized Klein invariant J = E4**3 / (1728*delta); J(i)=1, J(rho)=0."""
    e4 = eisenstein_series(4, trunc + 24, mode)
    dlt = delta_series(trunc + 48, mode)
    return (e4 ** 3) * (dlt * 1728).recip()


@lru_cache(maxsize=32)
def theta_j_series(trunc: int, mode: CoeffMode = EXACT) -> LaurentSeries:
    """theta_q J = -E4**2 * E6 / (1728*delta) (logarithmic-derivative form)."""
    e4 = eisenstein_series(4, trunc + 24, mode)
    e6 = eisenstein_series(6, trunc + 24, mode)
    dlt = delta_series(trunc + 48, mode)
    return -(e4 ** 2) * e6 * (dlt * 1728).recip()


# ---------------------------------------------------------------------------
# pole data


@dataclass(frozen=True)
class FormSpec:
    """Pole data for the weight-2 form: n points 0 < x_1 < ... < x_n < 1.

    xs entries may be Fractions (exact pipelines) or floats/mpf (numeric
    pipelines).  r = (12n+1)/6 is the Frobenius exponent scale; the
    Schwarzian constant is s = 2*pi**2*r**2, handled as r**2 downstream.
    """

    n: int
    xs: tuple = ()

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        xs = tuple(self.xs)
        if len(xs) != self.n:
            raise ValueError(f"expected {self.n} pole values, got {len(xs)}")
        for x in xs:
            if not (0 < x < 1):
                raise ValueError(f"pole value {x} outside (0,1)")
        for x, y in zip(xs, xs[1:]):
            if not (x < y):
                raise ValueError("pole values must be strictly increasing")
        object.__setattr__(self, "xs", xs)

    @property
    def r(self) -> Fraction:
        return Fraction(12 * self.n + 1, 6)

    @property
    def s_over_2pi2(self) -> Fraction:
        return self.r ** 2

    @property
    def is_exact(self) -> bool:
        return all(isinstance(x, (Fraction, int)) for x in self.xs)

    @property
    def lead_exponent(self) -> int:
        return 4 + 48 * self.n


def weight2_form_series(spec: FormSpec, trunc: int,
                        mode: CoeffMode = EXACT) -> LaurentSeries:
    """f = eta**4 / prod (J - x_i)**2, valid through exponent trunc.

    Lead exponent 4 + 48n: each factor (J - x_i)**-2 contributes t**48.
    """
    n = spec.n
    eta4 = eta_series(trunc - 48 * n - 3, mode) ** 4
    if n == 0:
        return eta4
    j = j_series(trunc - 28 - 48 * n, mode)
    prod = None
    with mode.workprec():
        for x in spec.xs:
            factor = (j - mode.coerce(x)) ** 2
            prod = factor if prod is None else prod * factor
    return eta4 * prod.recip()


def ode_solution_series(spec: FormSpec, trunc: int,
                        mode: CoeffMode = EXACT) -> LaurentSeries:
    """y = eta**-2 * prod (J - x_i), the Frobenius solution with lead -(24n+2)."""
    n = spec.n
    eta2 = eta_series(trunc + 24 * n + 3, mode) ** 2
    y = eta2.recip()
    if n == 0:
        return y.truncate(trunc)
    j = j_series(trunc + 24 * n - 22, mode)
    with mode.workprec():
        for x in spec.xs:
            y = y * (j - mode.coerce(x))
    return y.truncate(trunc)


# ---------------------------------------------------------------------------
# eta quotients


@dataclass(frozen=True)
class EtaQuotientSpec:
    """prod_i eta(scale_i * tau)**power_i with positive rational scales."""

    factors: tuple  # of (Fraction scale, int power)

    def __post_init__(self):
        fs = []
        for scale, power in self.factors:
            scale = Fraction(scale)
            if scale <= 0:
                raise ValueError("eta argument scales must be positive")
            fs.append((scale, int(power)))
        object.__setattr__(self, "factors", tuple(fs))

    @property
    def weight(self) -> Fraction:
        return Fraction(sum(p for _, p in self.factors), 2)

    @classmethod
    def parse(cls, text: str) -> "EtaQuotientSpec":
        """Parse compact strings like "eta(1/2)^8/eta(1)^4" or "eta(2)^2*eta(1/2)^2"."""
        import re

        factors = []
        pos = 0
        sign = 1
        text = text.replace(" ", "")
        pat = re.compile(r"eta\(([0-9]+(?:/[0-9]+)?)\)(?:\^(-?[0-9]+))?")
        while pos < len(text):
            if text[pos] in "*/":
                sign = -1 if text[pos] == "/" else 1
                pos += 1
                continue
            m = pat.match(text, pos)
            if not m:
                raise ValueError(f"cannot parse eta quotient at ...{text[pos:]!r}")
            power = int(m.group(2)) if m.group(2) else 1
            factors.append((Fraction(m.group(1)), sign * power))
            pos = m.end()
        if not factors:
            raise ValueError("empty eta quotient")
        return cls(tuple(factors))

    def __str__(self) -> str:
        parts = []
        for scale, power in self.factors:
            parts.append(f"eta({scale})^{power}")
        return "*".join(parts)


def eta_quotient_series(qspec: EtaQuotientSpec, q_order: int,
                        mode: CoeffMode = EXACT) -> LaurentSeries:
    """Expand an eta quotient through q**q_order.

    The working grid is the coarsest refinement of the t-grid on which
    every factor has integer exponents (grid = 24 * lcm of the scale
    denominators); the result is reduced back to the coarsest grid that
    is a multiple of 24 and still holds every exponent.
    """
    lcm_den = 1
    for scale, _ in qspec.factors:
        lcm_den = math.lcm(lcm_den, scale.denominator)
    grid = 24 * lcm_den
    if grid > 20000:
        raise GridMismatchError(f"grid refinement {grid} too fine; scales {qspec.factors}")
    trunc = (q_order + 1) * grid
    out = None
    for scale, power in qspec.factors:
        base = eta_series(trunc, mode, grid, scale)
        fac = base ** power if power >= 0 else (base ** (-power)).recip()
        out = fac if out is None else out * fac
    return _coarsen_grid(out)


def _coarsen_grid(s: LaurentSeries) -> LaurentSeries:
    """Shrink the grid to the smallest multiple of 24 holding all exponents."""
    if s.grid % 24 or s.is_zero:
        return s
    # d must divide grid/24 so the reduced grid stays a multiple of 24
    d = s.grid // 24
    for e, _ in s.terms():
        d = math.gcd(d, e)
        if d == 1:
            break
    if d <= 1:
        return s
    terms = {e // d: c for e, c in s.terms()}
    new_trunc = s.trunc if s.trunc == math.inf else -(-int(s.trunc) // d)
    return LaurentSeries.from_terms(terms, s.mode, new_trunc, s.grid // d)


# ---------------------------------------------------------------------------
# modular group plumbing


@dataclass(frozen=True)
class UnimodularMatrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self.entries()} is not 1")

    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, other: "UnimodularMatrix") -> "UnimodularMatrix":
        return UnimodularMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "UnimodularMatrix":
        return UnimodularMatrix(self.d, -self.b, -self.c, self.a)

    def apply(self, tau: complex) -> complex:
        return (self.a * tau + self.b) / (self.c * tau + self.d)

    def cocycle(self, tau: complex) -> complex:
        return self.c * tau + self.d

    def __str__(self) -> str:
        return f"[{self.a},{self.b};{self.c},{self.d}]"


IDENTITY = UnimodularMatrix(1, 0, 0, 1)
GEN_S = UnimodularMatrix(0, -1, 1, 0)
GEN_T = UnimodularMatrix(1, 1, 0, 1)


def word_matrix(word: str) -> UnimodularMatrix:
    """Product of generators from a string over 'S', 'T', 't' (t = T inverse)."""
    out = IDENTITY
    for ch in word:
        if ch == "S":
            out = out @ GEN_S
        elif ch == "T":
            out = out @ GEN_T
        elif ch == "t":
            out = out @ GEN_T.inverse()
        else:
            raise ValueError(f"unknown generator {ch!r}")
    return out


def random_words(rng, count: int, max_len: int) -> list[UnimodularMatrix]:
    """Random nontrivial words over S, T, T^-1 of length <= max_len."""
    out = []
    while len(out) < count:
        length = rng.randrange(1, max_len + 1)
        word = "".join(rng.choice("STt") for _ in range(length))
        m = word_matrix(word)
        if m != IDENTITY:
            out.append(m)
    return out


def reduce_to_fundamental(tau: complex, max_steps: int = 200):
    """Return (gamma, tau') with gamma.apply(tau) = tau' in the fundamental domain.

    Standard S/T reduction; tau' satisfies |Re tau'| <= 1/2 + eps and
    |tau'| >= 1 - eps, hence Im tau' >= 0.86.
    """
    g = IDENTITY
    z = complex(tau)
    for _ in range(max_steps):
        k = round(z.real)
        if k:
            z = z - k
            g = UnimodularMatrix(1, -k, 0, 1) @ g
        if abs(z) < 1.0 - 1e-14:
            z = -1 / z
            g = GEN_S @ g
        else:
            return g, z
    raise ArithmeticError(f"fundamental-domain reduction did not settle for tau={tau}")


# ---------------------------------------------------------------------------
# eta multiplier and character


def eta_multiplier_index(gamma: UnimodularMatrix) -> int:
    """v(gamma) as an exact 24th root of unity: returns m with v = exp(pi*i*m/12).

    Piecewise classical formulas; the even-c branch carries -3cd (not -3c)
    in the exponent and a sign correction for c < 0 < -d, both validated
    against direct evaluation of eta on random group elements.
    """
    a, b, c, d = gamma.entries()
    if c == 0:
        # gamma = +-(1 b; 0 1)
        if d > 0:
            return b % 24
        return (-b - 6) % 24
    if c % 2:
        kr = kronecker(d, abs(c))
        m = (a + d) * c - b * d * (c * c - 1) - 3 * c
    else:
        kr = kronecker(c, abs(d))
        m = (a + d) * c - b * d * (c * c - 1) - 3 * c * d + 3 * d - 3
        if c < 0 and d < 0:
            kr = -kr
    if kr == 0:
        raise ArithmeticError(f"degenerate Kronecker symbol for {gamma}")
    if kr == -1:
        m += 12
    return m % 24


def eta_multiplier(gamma: UnimodularMatrix) -> complex:
    """Multiplier system of eta: eta(gamma tau) = v(gamma) (c tau + d)**(1/2) eta(tau)."""
    return cmath.exp(1j * math.pi * eta_multiplier_index(gamma) / 12)


def character_index(gamma: UnimodularMatrix) -> int:
    """chi = v**4 as a 6th root of unity: returns k with chi = exp(2*pi*i*k/6)."""
    return eta_multiplier_index(gamma) % 6


def character_chi(gamma: UnimodularMatrix) -> complex:
    """The weight-2 character chi(gamma) = v(gamma)**4; chi(T) = exp(pi*i/3)."""
    return cmath.exp(2j * math.pi * character_index(gamma) / 6)


# ---------------------------------------------------------------------------
# pointwise evaluation and transformation checks


def eta_eval(tau: complex, tol: float = 1e-15, max_terms: int = 500_000) -> complex:
    """Dedekind eta by the defining product, adaptively truncated.

    Works for any Im tau > 0; the number of factors grows like
    1/Im(tau), so very low points are slow but exact.
    """
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError("eta is defined on the upper half-plane")
    q = cmath.exp(2j * math.pi * tau)
    aq = abs(q)
    if aq >= 1.0:
        raise ValueError("|q| >= 1")
    # tail of log-product bounded by |q|**(N+1)/(1-|q|)
    n_terms = int(math.log(tol * (1.0 - aq)) / math.log(aq)) + 1 if aq > 0 else 1
    if n_terms > max_terms:
        raise ValueError(f"eta product needs {n_terms} factors at Im tau = {tau.imag}")
    prod = 1.0 + 0j
    qn = 1.0 + 0j
    for _ in range(max(n_terms, 8)):
        qn *= q
        prod *= 1.0 - qn
    return cmath.exp(2j * math.pi * tau / 24) * prod


def transform_check(form, weight, multiplier: complex, gamma: UnimodularMatrix,
                    samples, rel_tol: float = 1e-9,
                    identity: str | None = None) -> VerificationReport:
    """Check form(gamma tau) = multiplier * (c tau + d)**weight * form(tau).

    form is a LaurentSeries (evaluated by its own eval_at) or any callable
    on the upper half-plane.  Deviations are relative to |form(tau)|.
    """
    samples = [complex(s) for s in samples]
    if isinstance(form, LaurentSeries):
        series = form
        f = lambda z: series.eval_at(z).value
    else:
        f = form
    w_int = None
    if isinstance(weight, int) or (isinstance(weight, Fraction) and weight.denominator == 1):
        w_int = int(weight)
    worst = 0.0
    for tau in samples:
        tau = complex(tau)
        base = f(tau)
        if base == 0:
            raise SeriesError(f"form vanishes at sample {tau}; relative check impossible")
        cz = gamma.cocycle(tau)
        aut = cz ** w_int if w_int is not None else cz ** float(weight)
        dev = abs(f(gamma.apply(tau)) - multiplier * aut * base) / abs(base)
        worst = max(worst, dev)
    name = identity or f"transform weight {weight} under {gamma}"
    return VerificationReport(
        identity=name,
        passed=worst < rel_tol,
        max_abs_deviation=worst,
        tolerance=rel_tol,
        mode="pointwise",
        checked_count=len(samples),
        details={"gamma": list(gamma.entries()), "multiplier": multiplier},
    )
