"""Uniform result record for every identity / property verification.

All checks in this package (series identities, transformation laws,
residue closure, representation properties) funnel their outcome through
VerificationReport so the CLI, the test suite, and the acceptance runner
read one shape.  pass requires both the measured deviation to sit under
the declared tolerance and any stated precondition to hold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath


def deviation_str(value) -> str:
    """Render a deviation: exact zeros as "0", rationals as "num/den"."""
    if isinstance(value, Fraction) or isinstance(value, int):
        return str(value)
    if isinstance(value, (mpmath.mpf, mpmath.mpc)):
        return mpmath.nstr(value, 8)
    return repr(float(value))


@dataclass
class VerificationReport:
    identity: str
    passed: bool
    max_abs_deviation: object  # Fraction (exact mode) or float
    tolerance: object  # 0 for exact checks, float otherwise
    mode: str
    checked_count: int
    trunc: object = None  # exponent bound the check ran through, if series-based
    precondition_ok: bool = True
    details: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        doc = {
            "identity": self.identity,
            "pass": bool(self.passed),
            "max_abs_deviation": deviation_str(self.max_abs_deviation),
            "tolerance": deviation_str(self.tolerance),
            "mode": self.mode,
            "checked_count": self.checked_count,
            "precondition_ok": bool(self.precondition_ok),
        }
        if self.trunc is not None:
            doc["trunc"] = self.trunc
        if self.details:
            doc["details"] = {k: _jsonable(v) for k, v in self.details.items()}
        return doc

    def summary_line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        dev = deviation_str(self.max_abs_deviation)
        return f"{tag} {self.identity} [mode={self.mode}] max|dev|={dev} tol={deviation_str(self.tolerance)}"


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (mpmath.mpf,)):
        return float(v)
    if isinstance(v, (mpmath.mpc,)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v
