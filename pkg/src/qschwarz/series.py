"""Truncated Laurent series on a refined power grid of the nome.

Every q-expansion in this package is a finite sum  sum_e c_e u^e  where
u**grid = q = exp(2*pi*i*tau).  The default grid is 24, i.e. u = t with
t**24 = q, which turns every fractional exponent that occurs here
(q**(1/24) for eta, q**(1/6) for eta**4, ...) into an integer exponent,
so plain integer-indexed convolution implements multiplication.  Eta
quotients with scaled arguments may need a finer grid; those series carry
grid = 48, 72, ... and refuse to mix with series on a different grid.

A series knows how far it can be trusted: coefficients are determined
for every exponent e < trunc and unknown from trunc on.  Arithmetic
propagates the bound pessimistically,

    add:    trunc = min(Ta, Tb)
    mul:    trunc = min(la + Tb, lb + Ta)        (l = leading exponent)
    recip:  trunc = Ta - 2*la

so a reported coefficient is never contaminated by unknown tail terms.

Coefficients live in one of two modes: exact Fraction arithmetic, or
floating point at a chosen precision (53 bits = machine doubles, more
via mpmath).  Modes never mix silently; converting is explicit.
"""

from __future__ import annotations

import cmath
import math
from contextlib import nullcontext
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple

import mpmath


class SeriesError(Exception):
    """Base class for series arithmetic failures."""


class ModeMismatchError(SeriesError):
    """Operands (or a scalar) do not share a coefficient mode."""


class GridMismatchError(SeriesError):
    """Operands live on different refinements of the q-power grid."""


class InversionError(SeriesError):
    """Reciprocal is not representable (zero series, or untruncated)."""


class PrimitiveError(SeriesError):
    """No series antiderivative exists (constant term integrates to log q)."""


class TailBoundError(SeriesError):
    """Point evaluation cannot certify the requested tail bound."""


_MP_GUARD_BITS = 12


@dataclass(frozen=True)
class CoeffMode:
    """Coefficient arithmetic: 'exact' Fractions or floats at `precision` bits.

    precision is meaningful only for kind='float'; 53 means native
    complex/float arithmetic, anything larger switches to mpmath.
    """

    kind: str
    precision: int = 0

    def __post_init__(self):
        if self.kind not in ("exact", "float"):
            raise ValueError(f"unknown coefficient mode kind {self.kind!r}")
        if self.kind == "float" and self.precision < 53:
            raise ValueError("float mode needs precision >= 53 bits")

    @property
    def is_exact(self) -> bool:
        return self.kind == "exact"

    @property
    def is_bigfloat(self) -> bool:
        return self.kind == "float" and self.precision > 53

    def workprec(self):
        """Context manager pinning mpmath precision for big-float work."""
        if self.is_bigfloat:
            return mpmath.workprec(self.precision + _MP_GUARD_BITS)
        return nullcontext()

    def coerce(self, value):
        """Bring a scalar into this mode's arithmetic, or raise ModeMismatchError."""
        if self.kind == "exact":
            if isinstance(value, Fraction):
                return value
            if isinstance(value, int):
                return Fraction(value)
            raise ModeMismatchError(
                f"exact mode takes int/Fraction coefficients, not {type(value).__name__}"
            )
        if self.precision == 53:
            if isinstance(value, complex):
                return value if value.imag != 0.0 else value.real
            if isinstance(value, (int, float, Fraction)):
                return float(value)
            if isinstance(value, mpmath.mpf):
                return float(value)
            if isinstance(value, mpmath.mpc):
                return complex(value)
            raise ModeMismatchError(f"cannot coerce {type(value).__name__} to float mode")
        with self.workprec():
            if isinstance(value, Fraction):
                return mpmath.mpf(value.numerator) / value.denominator
            if isinstance(value, (int, float, mpmath.mpf)):
                return mpmath.mpf(value)
            if isinstance(value, complex):
                if value.imag == 0.0:
                    return mpmath.mpf(value.real)
                return mpmath.mpc(value)
            if isinstance(value, mpmath.mpc):
                return value
        raise ModeMismatchError(f"cannot coerce {type(value).__name__} to float mode")

    @property
    def zero_eps(self):
        """Threshold below which a float coefficient is treated as numerical dust.

        Deliberately far below any meaningful deviation this package
        measures, so genuine small coefficients are never stripped.
        """
        if self.kind == "exact":
            return 0
        if self.precision == 53:
            return 1e-300
        return mpmath.mpf(2) ** (8 - self.precision)

    def is_zero(self, value) -> bool:
        if self.kind == "exact":
            return value == 0
        return abs(value) < self.zero_eps

    def describe(self) -> str:
        return "exact" if self.kind == "exact" else f"float{self.precision}"


EXACT = CoeffMode("exact")
FLOAT64 = CoeffMode("float", 53)


def float_mode(bits: int = 53) -> CoeffMode:
    return CoeffMode("float", bits)


class EvalResult(NamedTuple):
    value: complex
    tail_bound: float


def _is_unbounded(trunc) -> bool:
    return trunc == math.inf


@dataclass(frozen=True)
class LaurentSeries:
    """Immutable truncated Laurent series; see module docstring for semantics.

    coeffs[k] is the coefficient of u**(lead + k).  Exponents between the
    stored range and trunc are known to be zero; exponents >= trunc are
    unknown.  trunc == math.inf means the series is known in full
    (constants, monomials, finite products of such).
    """

    mode: CoeffMode
    lead: int
    coeffs: tuple
    trunc: float  # int, or math.inf
    grid: int = 24

    def __post_init__(self):
        if self.grid < 1:
            raise ValueError("grid must be a positive integer")
        cs = list(self.coeffs)
        lead = self.lead
        while cs and self.mode.is_zero(cs[0]):
            cs.pop(0)
            lead += 1
        while cs and self.mode.is_zero(cs[-1]):
            cs.pop()
        if cs and not _is_unbounded(self.trunc) and lead + len(cs) > self.trunc:
            raise ValueError("stored coefficients extend past the truncation bound")
        if not cs:
            lead = 0
        object.__setattr__(self, "lead", lead)
        object.__setattr__(self, "coeffs", tuple(cs))

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def zero(cls, mode: CoeffMode, trunc=math.inf, grid: int = 24) -> "LaurentSeries":
        return cls(mode, 0, (), trunc, grid)

    @classmethod
    def const(cls, value, mode: CoeffMode, trunc=math.inf, grid: int = 24) -> "LaurentSeries":
        return cls(mode, 0, (mode.coerce(value),), trunc, grid)

    @classmethod
    def monomial(cls, value, exp: int, mode: CoeffMode, trunc=math.inf,
                 grid: int = 24) -> "LaurentSeries":
        return cls(mode, exp, (mode.coerce(value),), trunc, grid)

    @classmethod
    def from_terms(cls, terms, mode: CoeffMode, trunc, grid: int = 24) -> "LaurentSeries":
        """Build from {exponent: coefficient} or an iterable of (e, c) pairs."""
        items = terms.items() if hasattr(terms, "items") else list(terms)
        with mode.workprec():
            items = [(int(e), mode.coerce(c)) for e, c in items]
            if not items:
                return cls.zero(mode, trunc, grid)
            lo = min(e for e, _ in items)
            hi = max(e for e, _ in items)
            cs = [mode.coerce(0)] * (hi - lo + 1)
            for e, c in items:
                cs[e - lo] = cs[e - lo] + c
        return cls(mode, lo, tuple(cs), trunc, grid)

    # ------------------------------------------------------------------
    # structure

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def nnz(self) -> int:
        return sum(1 for c in self.coeffs if not self.mode.is_zero(c))

    @property
    def leading_coefficient(self):
        if self.is_zero:
            raise ValueError("zero series has no leading coefficient")
        return self.coeffs[0]

    def coefficient(self, e: int):
        """Coefficient of u**e; raises if e is beyond the truncation bound."""
        if not _is_unbounded(self.trunc) and e >= self.trunc:
            raise SeriesError(f"exponent {e} is beyond truncation {self.trunc}")
        k = e - self.lead
        if self.is_zero or k < 0 or k >= len(self.coeffs):
            return self.mode.coerce(0)
        return self.coeffs[k]

    def q_coefficient(self, m: int):
        """Coefficient of q**m (exponent m*grid on the internal grid)."""
        return self.coefficient(m * self.grid)

    def terms(self) -> Iterator[tuple[int, object]]:
        for k, c in enumerate(self.coeffs):
            if not self.mode.is_zero(c):
                yield self.lead + k, c

    def truncate(self, new_trunc) -> "LaurentSeries":
        t = min(self.trunc, new_trunc)
        if _is_unbounded(t):
            return self
        t = int(t)
        cs = self.coeffs[: max(0, t - self.lead)]
        return LaurentSeries(self.mode, self.lead, cs, t, self.grid)

    def to_float(self, bits: int = 53) -> "LaurentSeries":
        target = float_mode(bits)
        cs = tuple(target.coerce(c) for c in self.coeffs)
        return LaurentSeries(target, self.lead, cs, self.trunc, self.grid)

    def max_abs_coefficient(self, through: int | None = None) -> float:
        """Largest |coefficient| over exponents <= through (all stored if None)."""
        best = 0.0
        for e, c in self.terms():
            if through is not None and e > through:
                break
            a = float(abs(c))
            if a > best:
                best = a
        return best

    # ------------------------------------------------------------------
    # arithmetic

    def _check_compat(self, other: "LaurentSeries"):
        if self.mode != other.mode:
            raise ModeMismatchError(
                f"mixed coefficient modes {self.mode.describe()} / {other.mode.describe()}"
            )
        if self.grid != other.grid:
            raise GridMismatchError(f"mixed grids {self.grid} / {other.grid}")

    def _effective_lead(self) -> float:
        # for truncation bookkeeping a zero series behaves like a series
        # whose (unknown) leading exponent is at least trunc
        return self.lead if self.coeffs else self.trunc

    def __add__(self, other) -> "LaurentSeries":
        if not isinstance(other, LaurentSeries):
            other = self._promote_scalar(other)
        self._check_compat(other)
        t = min(self.trunc, other.trunc)
        terms = {}
        for e, c in self.terms():
            if e < t:
                terms[e] = c
        for e, c in other.terms():
            if e < t:
                terms[e] = terms.get(e, 0) + c
        with self.mode.workprec():
            return LaurentSeries.from_terms(terms, self.mode, t, self.grid)

    def __radd__(self, other) -> "LaurentSeries":
        return self.__add__(other)

    def __neg__(self) -> "LaurentSeries":
        return LaurentSeries(self.mode, self.lead, tuple(-c for c in self.coeffs),
                             self.trunc, self.grid)

    def __sub__(self, other) -> "LaurentSeries":
        if not isinstance(other, LaurentSeries):
            other = self._promote_scalar(other)
        return self.__add__(-other)

    def __rsub__(self, other) -> "LaurentSeries":
        return (-self).__add__(other)

    def _promote_scalar(self, value) -> "LaurentSeries":
        return LaurentSeries.const(self.mode.coerce(value), self.mode, grid=self.grid)

    def __mul__(self, other) -> "LaurentSeries":
        if not isinstance(other, LaurentSeries):
            c = self.mode.coerce(other)
            with self.mode.workprec():
                return LaurentSeries(self.mode, self.lead,
                                     tuple(c * x for x in self.coeffs),
                                     self.trunc, self.grid)
        self._check_compat(other)
        t = min(self._effective_lead() + other.trunc,
                other._effective_lead() + self.trunc)
        if self.is_zero or other.is_zero:
            return LaurentSeries.zero(self.mode, t, self.grid)
        a = [(e, c) for e, c in self.terms()]
        b = [(e, c) for e, c in other.terms()]
        out = {}
        with self.mode.workprec():
            for ea, ca in a:
                for eb, cb in b:
                    e = ea + eb
                    if e < t:
                        prev = out.get(e)
                        out[e] = ca * cb if prev is None else prev + ca * cb
            return LaurentSeries.from_terms(out, self.mode, t, self.grid)

    def __rmul__(self, other) -> "LaurentSeries":
        return self.__mul__(other)

    def __pow__(self, k: int) -> "LaurentSeries":
        if not isinstance(k, int):
            raise TypeError("series powers must be integers")
        if k < 0:
            return (self ** (-k)).recip()
        if k == 0:
            return LaurentSeries.const(1, self.mode, grid=self.grid)
        base, result = self, None
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def recip(self) -> "LaurentSeries":
        """Multiplicative inverse to the propagated truncation bound."""
        if self.is_zero:
            raise InversionError("reciprocal of the zero series")
        if _is_unbounded(self.trunc):
            if len(self.coeffs) == 1:
                with self.mode.workprec():
                    inv = 1 / self.coeffs[0] if not self.mode.is_exact else \
                        Fraction(1) / self.coeffs[0]
                return LaurentSeries(self.mode, -self.lead, (inv,), math.inf, self.grid)
            raise InversionError("reciprocal of an untruncated non-monomial series")
        l = self.lead
        t = int(self.trunc) - 2 * l
        slots = int(self.trunc) - l  # coefficients of u**(-l) ... u**(-l + slots - 1)
        b = self.coeffs
        nz = [(j, bj) for j, bj in enumerate(b) if j and not self.mode.is_zero(bj)]
        out = [None] * slots
        with self.mode.workprec():
            b0 = b[0]
            inv0 = Fraction(1) / b0 if self.mode.is_exact else 1 / b0
            out[0] = inv0
            for k in range(1, slots):
                s = None
                for j, bj in nz:
                    if j > k:
                        break
                    rk = out[k - j]
                    if rk is not None and not self.mode.is_zero(rk):
                        s = bj * rk if s is None else s + bj * rk
                if s is not None:
                    out[k] = -s * inv0
            zero = self.mode.coerce(0)
            cs = tuple(zero if c is None else c for c in out)
        return LaurentSeries(self.mode, -l, cs, t, self.grid)

    # ------------------------------------------------------------------
    # calculus on the grid

    def theta(self) -> "LaurentSeries":
        """theta_q = q d/dq; multiplies the u**e coefficient by e/grid."""
        g = self.grid
        out = {}
        with self.mode.workprec():
            for e, c in self.terms():
                if e == 0:
                    continue
                if self.mode.is_exact:
                    out[e] = c * Fraction(e, g)
                else:
                    out[e] = c * self.mode.coerce(e) / g
        return LaurentSeries.from_terms(out, self.mode, self.trunc, self.grid)

    def integrate_tau(self) -> "LaurentSeries":
        """Antiderivative in tau: u**e picks up grid/(2*pi*i*e).

        Float modes only (the factor is transcendental); a constant term
        has no series antiderivative and raises PrimitiveError.
        """
        if self.mode.is_exact:
            raise ModeMismatchError("tau-antiderivative needs a float mode (factor 2*pi*i)")
        out = {}
        with self.mode.workprec():
            if self.mode.is_bigfloat:
                two_pi_i = 2j * mpmath.pi
            else:
                two_pi_i = 2j * math.pi
            for e, c in self.terms():
                if e == 0:
                    raise PrimitiveError("constant term integrates to a logarithm, not a series")
                out[e] = c * self.grid / (two_pi_i * e)
        return LaurentSeries.from_terms(out, self.mode, self.trunc, self.grid)

    # ------------------------------------------------------------------
    # evaluation

    def eval_at(self, tau: complex, floor: float = 0.5) -> EvalResult:
        """Evaluate at a point of the upper half-plane.

        Returns the partial sum plus a heuristic bound on the dropped
        tail, extrapolated from the growth of the last stored
        coefficients.  Callers that need certified accuracy must check
        tail_bound themselves; TailBoundError is raised only when the
        extrapolated tail fails to converge at all.
        """
        tau = complex(tau)
        if tau.imag < floor:
            raise SeriesError(f"evaluation point Im tau = {tau.imag} below floor {floor}")
        w = cmath.exp(2j * math.pi * tau / self.grid)
        if self.is_zero:
            return EvalResult(0j, 0.0)
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * w + complex(c)
        value = acc * w ** self.lead
        if _is_unbounded(self.trunc):
            return EvalResult(value, 0.0)
        tail = self._tail_estimate(abs(w))
        return EvalResult(value, tail)

    def _tail_estimate(self, aw: float) -> float:
        pts = [(e, float(abs(c))) for e, c in self.terms()]
        pts = pts[-6:]
        if not pts:
            return aw ** float(self.trunc)
        rho = 1.0
        for (e1, a1), (e2, a2) in zip(pts, pts[1:]):
            if a1 > 0 and a2 > 0:
                r = (a2 / a1) ** (1.0 / (e2 - e1))
                rho = max(rho, r)
        e_last, a_last = pts[-1]
        ratio = rho * aw
        if ratio >= 1.0:
            raise TailBoundError(
                f"coefficient growth {rho:.3g} defeats |u| = {aw:.3g}; tail does not converge"
            )
        first = a_last * rho ** (float(self.trunc) - e_last) * aw ** float(self.trunc)
        return first / (1.0 - ratio)

    # ------------------------------------------------------------------
    # presentation / serialization

    def dump(self) -> dict:
        """Series dump record: header plus one (exponent, value-string) per term."""
        return {
            "mode": self.mode.describe(),
            "grid": self.grid,
            "lead": self.lead if not self.is_zero else None,
            "trunc": "inf" if _is_unbounded(self.trunc) else int(self.trunc),
            "terms": [[e, _coeff_str(c, self.mode)] for e, c in self.terms()],
        }

    def __repr__(self) -> str:
        t = "inf" if _is_unbounded(self.trunc) else str(int(self.trunc))
        if self.is_zero:
            return f"<LaurentSeries 0 mode={self.mode.describe()} trunc={t} grid={self.grid}>"
        return (f"<LaurentSeries lead={self.lead} nnz={self.nnz} "
                f"mode={self.mode.describe()} trunc={t} grid={self.grid}>")


def _coeff_str(c, mode: CoeffMode) -> str:
    if mode.is_exact:
        return str(c)  # Fraction renders as "num/den" or plain integer
    if mode.is_bigfloat:
        dps = mpmath.libmp.prec_to_dps(mode.precision) + 3
        if isinstance(c, mpmath.mpc):
            return mpmath.nstr(c, dps)
        return mpmath.nstr(mpmath.mpf(c), dps)
    if isinstance(c, complex):
        return repr(c)
    return repr(float(c))


def parse_coeff(text: str, mode: CoeffMode):
    """Inverse of the dump coefficient format, good enough for round trips."""
    if mode.is_exact:
        return Fraction(text)
    if mode.is_bigfloat:
        with mode.workprec():
            return mpmath.mpmathify(text)
    return complex(text) if "j" in text or "(" in text else float(text)


def load_series(doc: dict) -> LaurentSeries:
    mode_txt = doc["mode"]
    if mode_txt == "exact":
        mode = EXACT
    elif mode_txt.startswith("float"):
        mode = float_mode(int(mode_txt[5:]))
    else:
        raise ValueError(f"unknown mode tag {mode_txt!r}")
    trunc = math.inf if doc["trunc"] == "inf" else int(doc["trunc"])
    terms = {int(e): parse_coeff(v, mode) for e, v in doc["terms"]}
    return LaurentSeries.from_terms(terms, mode, trunc, int(doc.get("grid", 24)))
