"""Command-line entry point.

Subcommands
    solve         solve the residue system, reconstruct + certify polynomials
    expand        print a q-expansion in the series dump format
    verify        schwarzian | ode identity checks (exact or float mode)
    residue       contour residues / pole orders at the arc poles
    equivariance  sample-independence of the equivariance constant
    report-all    run every acceptance criterion, emit one JSON summary

All subcommands print a single JSON document to stdout (tables and logs
go to stderr) so scripted use and tests consume the same artifact.
Exit codes: 0 ok, 2 bad configuration, 3 numerical failure, 4 a
verification ran and failed.

A JSON config file (--config) supplies defaults; explicit flags win.
Solving caches to QSCHWARZ_CACHE_DIR (default .qschwarz-cache) keyed by
(n, a, b, c, bits); hits are re-verified by one residual evaluation.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import mpmath

from . import analytic, forms, schwarz, system
from .forms import (EtaQuotientSpec, FormSpec, GEN_S, GEN_T, UnimodularMatrix,
                    character_chi, eisenstein_series, eta_eval, eta_multiplier,
                    eta_quotient_series, eta_series, random_words, word_matrix)
from .series import EXACT, CoeffMode, float_mode

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VERIFICATION = 4


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# small parsing helpers


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except ValueError as exc:
        raise ConfigError(f"cannot parse rational {text!r}") from exc


def _parse_gamma(text: str) -> UnimodularMatrix:
    if all(ch in "STt" for ch in text):
        return word_matrix(text)
    try:
        a, b, c, d = (int(p) for p in text.split(","))
        return UnimodularMatrix(a, b, c, d)
    except Exception as exc:
        raise ConfigError(f"cannot parse gamma {text!r}: use a word over S/T/t "
                          "or four comma-separated integers") from exc


def _parse_mode(mode: str, bits, order: int) -> CoeffMode:
    if mode == "exact":
        return EXACT
    if mode == "float":
        if bits in (None, "auto"):
            return float_mode(schwarz.recommended_bits(order))
        return float_mode(int(bits))
    raise ConfigError(f"unknown mode {mode!r}")


def _spec_from_args(n: int, xs_texts, auto_solve: bool, *, exact: bool,
                    bits: int = 53) -> FormSpec:
    if n == 0:
        return FormSpec(0, ())
    if xs_texts:
        xs = tuple(_parse_fraction(t) for t in xs_texts)
        if not exact:
            xs = tuple(float(x) for x in xs)
        return FormSpec(n, xs)
    if not auto_solve:
        raise ConfigError("give --xs values or --auto-solve")
    sysdef = system.ResidueSystem(n)
    sol = system.solve(sysdef, tol=1e-12)
    if exact:
        rat = tuple(Fraction(x).limit_denominator(10 ** 6) for x in sol.xs)
        res = system.residual(sysdef, list(rat))
        if any(v != 0 for v in res):
            raise ConfigError(
                f"n={n} solution does not rationalize exactly; exact mode needs "
                "rational pole data (use --mode float)"
            )
        return FormSpec(n, rat)
    if bits > 53:
        sol = system.refine(sysdef, sol.xs, bits)
    return FormSpec(n, sol.xs)


def _emit(doc: dict, args) -> None:
    text = json.dumps(doc, indent=getattr(args, "indent", 2))
    print(text)
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(text + "\n")


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------------------
# solve


def _cache_dir() -> Path:
    return Path(os.environ.get("QSCHWARZ_CACHE_DIR", ".qschwarz-cache"))


def _xs_to_strings(xs, bits: int = 53) -> list[str]:
    dps = mpmath.libmp.prec_to_dps(max(bits, 53)) + 3
    out = []
    for x in xs:
        if isinstance(x, mpmath.mpf):
            out.append(mpmath.nstr(x, dps, strip_zeros=False))
        else:
            out.append(repr(float(x)))
    return out


def cmd_solve(args) -> tuple[int, dict]:
    sysdef = system.ResidueSystem(args.n, _parse_fraction(args.a),
                                  _parse_fraction(args.b), _parse_fraction(args.c))
    init = tuple(_parse_fraction(t) for t in args.init) if args.init else None
    cache_key = f"solve_n{args.n}_a{args.a}_b{args.b}_c{args.c}_bits{args.bits}.json"
    cache_path = _cache_dir() / cache_key
    cache_hit = False
    sol = None
    if not args.no_cache and init is None and cache_path.exists():
        try:
            doc = json.loads(cache_path.read_text())
            with mpmath.workprec(args.bits + 12):
                xs = [mpmath.mpf(t) if args.bits > 53 else float(t)
                      for t in doc["xs"]]
                res = system.residual(sysdef, xs) if xs else []
                ok = max((abs(float(v)) for v in res), default=0.0) < 10 * args.tol
            if ok and len(xs) == args.n:
                sol = system.SolutionVector(tuple(xs), doc["residual_norm"],
                                            doc["iterations"], args.bits)
                cache_hit = True
        except Exception:
            sol = None
    if sol is None:
        sol = system.solve(sysdef, init, tol=args.tol, max_iter=args.max_iter,
                           bits=args.bits)
    monic = system.polynomial_from_roots(sol.xs)
    rational = system.rationalize_coefficients(monic, args.max_denominator)
    cert = (system.certify_polynomial(rational, sysdef) if args.n else
            {"ok": True, "roots": [], "root_residual_sup": 0.0})
    doc = {
        "n": args.n,
        "a": str(sysdef.a), "b": str(sysdef.b), "c": str(sysdef.c),
        "bits": args.bits,
        "xs": _xs_to_strings(sol.xs, args.bits),
        "xs_float": [float(x) for x in sol.xs],
        "residual_norm": float(sol.residual_norm),
        "iterations": sol.iterations,
        "cache_hit": cache_hit,
        "poly": {
            "monic_coeffs": [str(c) for c in monic],
            "float_coeffs": [float(c) for c in monic],
            "rational_coeffs": [str(c) for c in rational],
            "certification": cert,
        },
    }
    diff = system.compare_with_reported(args.n, rational)
    if diff is not None:
        doc["reported_diff"] = diff
    if not args.no_cache and init is None and not cache_hit:
        try:
            _cache_dir().mkdir(parents=True, exist_ok=True)
            cache_path.write_text(json.dumps({
                "xs": _xs_to_strings(sol.xs, args.bits),
                "residual_norm": float(sol.residual_norm),
                "iterations": sol.iterations,
            }))
        except OSError:
            pass
    return EXIT_OK, doc


# ---------------------------------------------------------------------------
# expand


def cmd_expand(args) -> tuple[int, dict]:
    order = args.order
    mode = _parse_mode(args.mode, args.bits, order)
    if args.eta_quotient:
        qs = EtaQuotientSpec.parse(args.eta_quotient)
        s = eta_quotient_series(qs, order, mode)
        doc = s.dump()
        doc["form"] = str(qs)
        return EXIT_OK, doc
    name = args.form
    t = 24 * order + 1
    if name == "eta":
        s = eta_series(t, mode)
    elif name == "eta4":
        s = eta_series(t - 3, mode) ** 4
    elif name == "delta":
        s = forms.delta_series(t + 24, mode)
    elif name in ("e2", "e4", "e6"):
        s = eisenstein_series(int(name[1]), t, mode)
    elif name == "j":
        s = forms.j_series(t - 24, mode)
    elif name == "theta-j":
        s = forms.theta_j_series(t - 24, mode)
    elif name in ("f", "y"):
        exact = mode.is_exact
        spec = _spec_from_args(args.n, args.xs, args.auto_solve, exact=exact,
                               bits=mode.precision or 53)
        if name == "f":
            s = forms.weight2_form_series(spec, 24 * order + spec.lead_exponent + 1, mode)
        else:
            s = forms.ode_solution_series(spec, 24 * order + 1, mode)
    else:
        raise ConfigError(f"unknown form {name!r}")
    doc = s.dump()
    doc["form"] = name
    return EXIT_OK, doc


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> tuple[int, dict]:
    mode_name = args.mode or ("exact" if args.n == 0 else "float")
    order = args.order if args.order is not None else (25 if mode_name == "exact" else 100)
    mode = _parse_mode(mode_name, args.bits, order)
    spec = _spec_from_args(args.n, args.xs, args.auto_solve, exact=mode.is_exact,
                           bits=mode.precision or 53)
    if args.which == "schwarzian":
        rep = schwarz.verify_schwarzian(spec, order=order, mode=mode,
                                        tolerance=args.tolerance)
    else:
        rep = schwarz.verify_ode(spec, order=order, mode=mode,
                                 tolerance=args.tolerance)
    doc = rep.to_json_dict()
    doc["xs"] = [str(x) for x in spec.xs]
    _log(rep.summary_line())
    return (EXIT_OK if rep.passed else EXIT_VERIFICATION), doc


# ---------------------------------------------------------------------------
# residue


def _separated_radius(ws: list[complex], radius: float) -> float:
    if len(ws) < 2:
        return radius
    sep = min(abs(a - b) for i, a in enumerate(ws) for b in ws[i + 1:])
    while 4 * radius >= sep:
        radius /= 2
    return radius


def cmd_residue(args) -> tuple[int, dict]:
    spec = _spec_from_args(args.n, args.xs, args.auto_solve, exact=False)
    ev = analytic.FormEvaluator(spec)
    arcs = ev.arc_poles()
    radius = _separated_radius([p.tau for p in arcs], args.radius)
    indices = range(spec.n) if args.index is None else [args.index]
    poles = []
    all_small, all_order2 = True, True
    for i in indices:
        p = arcs[i]
        res = analytic.contour_residue(ev, p.tau, radius, args.samples)
        order = analytic.pole_order_check(ev, p.tau, radius, max(args.samples, 512))
        bracket = analytic.residue_bracket(spec, i)
        predicted = analytic.predicted_residue(spec, i, ev)
        poles.append({
            "i": i,
            "x": float(spec.xs[i]),
            "theta": p.theta,
            "w": [p.tau.real, p.tau.imag],
            "j_inversion_error": abs(ev.j(p.tau) - float(spec.xs[i])),
            "abs_residue": abs(res),
            "pole_order": order,
            "bracket": float(bracket),
            "abs_predicted_residue": abs(predicted),
            "contour_vs_predicted": abs(res - predicted),
        })
        all_small = all_small and abs(res) < args.tol
        all_order2 = all_order2 and order == 2
    doc = {
        "n": spec.n,
        "radius": radius,
        "samples": args.samples,
        "expect": args.expect,
        "tol": args.tol,
        "poles": poles,
    }
    if args.expect == "zero":
        ok = all_small and all_order2
    else:
        ok = all(p["abs_residue"] > args.tol for p in poles)
    doc["pass"] = ok
    return (EXIT_OK if ok else EXIT_VERIFICATION), doc


# ---------------------------------------------------------------------------
# equivariance


DEFAULT_TAUS = ("1j", "1+2j", "3j")


def cmd_equivariance(args) -> tuple[int, dict]:
    spec = _spec_from_args(args.n, args.xs, args.auto_solve, exact=False)
    gamma = _parse_gamma(args.gamma)
    texts = []
    for t in (args.tau or DEFAULT_TAUS):
        texts.extend(p for p in t.split(",") if p)
    try:
        taus = [complex(t.strip()) for t in texts]
    except ValueError as exc:
        raise ConfigError(f"bad --tau sample: {exc}") from exc
    rep = analytic.equivariance_check(spec, gamma, taus, tol=args.tol)
    doc = rep.to_json_dict()
    doc["gamma"] = list(gamma.entries())
    doc["samples"] = [[t.real, t.imag] for t in taus]
    _log(rep.summary_line())
    return (EXIT_OK if rep.passed else EXIT_VERIFICATION), doc


# ---------------------------------------------------------------------------
# the acceptance suite


def _crit(cid: int, name: str, ok: bool, **details) -> dict:
    return {"id": cid, "name": name, "pass": bool(ok), "details": details}


def criterion_1_base_case() -> dict:
    r1 = schwarz.verify_schwarzian(FormSpec(0), order=25, mode=EXACT)
    r2 = schwarz.verify_ode(FormSpec(0), order=25, mode=EXACT)
    return _crit(1, "exact base case: schwarzian(eta^4) and theta^2(eta^-2) through q^25",
                 r1.passed and r2.passed,
                 schwarzian=r1.to_json_dict(), ode=r2.to_json_dict())


def criterion_2_ramanujan() -> dict:
    t = 24 * 51
    e2 = eisenstein_series(2, t)
    e4 = eisenstein_series(4, t)
    dev = e2.theta() - (e2 * e2 - e4) * Fraction(1, 12)
    worst = max((abs(c) for e, c in dev.terms() if e <= 24 * 50), default=Fraction(0))
    return _crit(2, "theta(E2) = (E2^2 - E4)/12 exactly through q^50", worst == 0,
                 max_abs_deviation=str(worst))


def criterion_3_n1() -> dict:
    sol = system.solve(system.ResidueSystem(1), tol=1e-13)
    err = abs(sol.xs[0] - 4.0 / 7.0)
    spec = FormSpec(1, (Fraction(4, 7),))
    r1 = schwarz.verify_schwarzian(spec, order=25, mode=EXACT)
    r2 = schwarz.verify_ode(spec, order=25, mode=EXACT)
    ok = err < 1e-12 and r1.passed and r2.passed
    return _crit(3, "n=1: solver finds 4/7; exact identities through q^25", ok,
                 solver_error=err, schwarzian=r1.to_json_dict(), ode=r2.to_json_dict())


def criterion_4_n234(n_max: int = 4, order: int = 100) -> dict:
    rows = []
    ok = True
    for n in range(2, min(n_max, 4) + 1):
        sol = system.solve(system.ResidueSystem(n), tol=1e-12)
        spec = FormSpec(n, sol.xs)
        mode = float_mode(schwarz.recommended_bits(order))
        r1 = schwarz.verify_schwarzian(spec, order=order, mode=mode)
        r2 = schwarz.verify_ode(spec, order=order, mode=mode)
        monic = system.polynomial_from_roots(
            system.refine(system.ResidueSystem(n), sol.xs, 280).xs)
        rational = system.rationalize_coefficients(monic)
        cert = system.certify_polynomial(rational, system.ResidueSystem(n))
        diff = system.compare_with_reported(n, rational)
        row_ok = (sol.residual_norm < 1e-12 and r1.passed and r2.passed
                  and cert["ok"] and diff is not None)
        ok = ok and row_ok
        rows.append({
            "n": n, "pass": row_ok,
            "residual_norm": sol.residual_norm,
            "schwarzian": r1.to_json_dict(), "ode": r2.to_json_dict(),
            "rational_coeffs": [str(c) for c in rational],
            "certification": cert,
            "reported_diff": diff,
        })
    return _crit(4, f"n=2..4: solve, float identities through q^{order}, certified polynomials",
                 ok, rows=rows)


def criterion_5_leading(n_max: int = 4) -> dict:
    rows, ok = [], True
    for n in range(0, min(n_max, 4) + 1):
        spec = _solved_spec(n)
        rep = schwarz.frobenius_leading_check(spec)
        ok = ok and rep.passed
        rows.append(rep.to_json_dict())
    return _crit(5, "leading exponents 4+48n for f and its primitive; r non-integral",
                 ok, rows=rows)


def criterion_6_residues(n_max: int = 4) -> dict:
    rows, ok = [], True
    for n in range(1, min(n_max, 4) + 1):
        spec = _solved_spec(n)
        ev = analytic.FormEvaluator(spec)
        arcs = ev.arc_poles()
        radius = _separated_radius([p.tau for p in arcs], 0.02)
        for i, p in enumerate(arcs):
            inv_err = abs(ev.j(p.tau) - float(spec.xs[i]))
            res = analytic.contour_residue(ev, p.tau, radius)
            order = analytic.pole_order_check(ev, p.tau, radius)
            row_ok = inv_err < 1e-10 and abs(res) < 1e-6 and order == 2
            ok = ok and row_ok
            rows.append({"n": n, "i": i, "pass": row_ok, "inv_err": inv_err,
                         "abs_residue": abs(res), "pole_order": order})
    control = FormSpec(1, (0.5,))
    ev = analytic.FormEvaluator(control)
    w = analytic.invert_j_on_arc(0.5).tau
    res = analytic.contour_residue(ev, w, 0.02)
    ok = ok and abs(res) > 1e-3
    rows.append({"negative_control_x": 0.5, "abs_residue": abs(res),
                 "pass": abs(res) > 1e-3})
    return _crit(6, "arc poles: inversion, vanishing residues, double poles, negative control",
                 ok, rows=rows)


def criterion_7_modularity() -> dict:
    samples = [0.31 + 1.22j, -0.18 + 1.37j, 0.07 + 1.49j]
    rows, ok = [], True
    for n in (0, 1, 2):
        spec = _solved_spec(n)
        ev = analytic.FormEvaluator(spec)
        direct = lambda z: ev.value(z, allow_reduce=False)
        for gamma in (GEN_T, GEN_S):
            rep = forms.transform_check(direct, 2, character_chi(gamma), gamma,
                                        samples, rel_tol=1e-6,
                                        identity=f"f_{n} weight-2 law under {gamma}")
            ok = ok and rep.passed
            rows.append(rep.to_json_dict())
    rng = random.Random(20240817)
    worst = 0.0
    tau0 = 0.313 + 1.177j
    base = eta_eval(tau0)
    for gamma in random_words(rng, 100, 6):
        v = eta_multiplier(gamma)
        lhs = eta_eval(gamma.apply(tau0))
        rhs = v * gamma.cocycle(tau0) ** 0.5 * base
        worst = max(worst, abs(lhs - rhs) / abs(base))
    ok = ok and worst < 1e-9
    rows.append({"eta_multiplier_random_gammas": 100, "max_rel_dev": worst,
                 "pass": worst < 1e-9})
    return _crit(7, "weight-2 laws under T and S (n<=2); eta multiplier on random gammas",
                 ok, rows=rows)


def criterion_8_representation() -> dict:
    rng = random.Random(41)
    words = random_words(rng, 50, 4)
    pairs = list(zip(words[:25], words[25:]))
    rep = analytic.rho_homomorphism_check(FormSpec(0), pairs, tol=1e-6)
    rows = [rep.to_json_dict()]
    ok = rep.passed
    t_samples = [1j, 1 + 2j, 3j]
    s_samples = [0.3 + 1.4j, -0.2 + 1.6j, 0.1 + 1.9j]
    for n in (0, 1):
        spec = _solved_spec(n)
        for gamma, samples in ((GEN_T, t_samples), (GEN_S, s_samples)):
            r = analytic.equivariance_check(spec, gamma, samples, tol=1e-6)
            ok = ok and r.passed
            rows.append(r.to_json_dict())
    return _crit(8, "rho homomorphism on 25 random pairs (n=0); equivariance constants (n=0,1)",
                 ok, rows=rows)


def criterion_9_eta_quotients() -> dict:
    rows, ok = [], True
    for n in (2, 3, 4, 6):
        fams = []
        if n % 2 == 0:
            fams.append(("family1", EtaQuotientSpec(((Fraction(1, n), 8), (Fraction(2, n), -4)))))
        if n % 3 == 0:
            fams.append(("family2", EtaQuotientSpec(((Fraction(1, n), 6), (Fraction(3, n), -2)))))
        fams.append(("family3", EtaQuotientSpec(((Fraction(n), 2), (Fraction(1, n), 2)))))
        for label, qs in fams:
            s = eta_quotient_series(qs, 12)
            holo = s.is_zero or s.lead >= 0
            ok = ok and holo
            rows.append({"n": n, "family": label, "spec": str(qs), "grid": s.grid,
                         "lead": None if s.is_zero else s.lead, "holomorphic": holo,
                         "pass": holo})
    qs1 = EtaQuotientSpec(((Fraction(1), 2), (Fraction(1), 2)))
    s1 = eta_quotient_series(qs1, 12)
    eta4 = eta_series(s1.trunc) ** 4
    same = (s1 - eta4.truncate(s1.trunc)).is_zero
    ok = ok and same
    rows.append({"n": 1, "family": "family3", "equals_eta4": same, "pass": same})
    return _crit(9, "eta-quotient families expand holomorphically; family 3 at n=1 is eta^4",
                 ok, rows=rows)


def criterion_10_scalability() -> dict:
    sysdef = system.ResidueSystem(10)
    sol = system.solve(sysdef, tol=1e-10)
    ok = sol.residual_norm < 1e-10
    rng = random.Random(1009)
    agree = True
    restarts = 0
    attempts = 0
    while restarts < 20 and attempts < 40:
        attempts += 1
        init = sorted(rng.uniform(0.01, 0.99) for _ in range(10))
        if any(abs(a - b) < 1e-3 for a, b in zip(init, init[1:])):
            continue
        try:
            other = system.solve(sysdef, init, tol=1e-10)
        except system.SolveError:
            continue
        restarts += 1
        diff = max(abs(a - b) for a, b in zip(sol.xs, other.xs))
        agree = agree and diff < 1e-9
    ok = ok and agree and restarts == 20
    return _crit(10, "n=10: converges from default init; 20-restart uniqueness probe",
                 ok, residual_norm=sol.residual_norm, iterations=sol.iterations,
                 restarts=restarts, attempts=attempts, agree=agree)


_SOLVED_CACHE: dict[int, FormSpec] = {}


def _solved_spec(n: int) -> FormSpec:
    if n == 0:
        return FormSpec(0, ())
    if n == 1:
        return FormSpec(1, (Fraction(4, 7),))
    if n not in _SOLVED_CACHE:
        sol = system.solve(system.ResidueSystem(n), tol=1e-12)
        _SOLVED_CACHE[n] = FormSpec(n, sol.xs)
    return _SOLVED_CACHE[n]


ALL_CRITERIA = {
    1: criterion_1_base_case,
    2: criterion_2_ramanujan,
    3: criterion_3_n1,
    4: criterion_4_n234,
    5: criterion_5_leading,
    6: criterion_6_residues,
    7: criterion_7_modularity,
    8: criterion_8_representation,
    9: criterion_9_eta_quotients,
    10: criterion_10_scalability,
}


def run_criterion(cid: int, n_max: int = 4) -> dict:
    fn = ALL_CRITERIA[cid]
    if cid in (4, 5, 6):
        return fn(n_max)
    return fn()


def cmd_report_all(args) -> tuple[int, dict]:
    criteria = []
    examples = []
    all_ok = True
    for cid in sorted(ALL_CRITERIA):
        t0 = time.monotonic()
        result = run_criterion(cid, args.n_max)
        dt = time.monotonic() - t0
        all_ok = all_ok and result["pass"]
        _log(f"[{'PASS' if result['pass'] else 'FAIL'}] criterion {cid}: "
             f"{result['name']} ({dt:.1f}s)")
        criteria.append(result)
    for n in range(1, min(args.n_max, 4) + 1):
        sol = system.solve(system.ResidueSystem(n), tol=1e-12)
        monic = system.polynomial_from_roots(
            system.refine(system.ResidueSystem(n), sol.xs, 280).xs)
        rational = system.rationalize_coefficients(monic)
        examples.append({
            "n": n,
            "xs": [float(x) for x in sol.xs],
            "monic_polynomial": [str(c) for c in rational],
            "reported_diff": system.compare_with_reported(n, rational),
        })
    doc = {"criteria": criteria, "examples_table": examples, "all_pass": all_ok}
    if args.plot:
        doc["plots"] = _write_plots(args.plot_dir)
    return (EXIT_OK if all_ok else EXIT_VERIFICATION), doc


def _write_plots(out_dir: str) -> list[str]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []

    spec = _solved_spec(1)
    ev = analytic.FormEvaluator(spec)
    re = np.linspace(-0.75, 0.75, 301)
    im = np.linspace(0.82, 1.6, 261)
    grid = np.empty((len(im), len(re)))
    for r_idx, y in enumerate(im):
        for c_idx, x in enumerate(re):
            grid[r_idx, c_idx] = math.log10(abs(ev.value(complex(x, y))) + 1e-30)
    fig, ax = plt.subplots(figsize=(7, 4.2))
    pc = ax.pcolormesh(re, im, grid, shading="auto", cmap="magma")
    fig.colorbar(pc, ax=ax, label="log10 |f_1|")
    ax.set_xlabel("Re tau")
    ax.set_ylabel("Im tau")
    ax.set_title("pole landscape of the n=1 form")
    p = out / "form_landscape.png"
    fig.savefig(p, dpi=130, bbox_inches="tight")
    plt.close(fig)
    paths.append(str(p))

    fig, ax = plt.subplots(figsize=(6, 4))
    for n in (2, 3, 4, 10):
        trace: list[float] = []
        system.solve(system.ResidueSystem(n), tol=1e-12 if n < 10 else 1e-10,
                     trace=trace)
        ax.semilogy(range(len(trace)), trace, marker="o", label=f"n={n}")
    ax.set_xlabel("Newton iteration")
    ax.set_ylabel("sup |residual|")
    ax.legend()
    ax.set_title("damped Newton convergence")
    p = out / "solver_convergence.png"
    fig.savefig(p, dpi=130, bbox_inches="tight")
    plt.close(fig)
    paths.append(str(p))
    return paths


# ---------------------------------------------------------------------------
# argument wiring


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS,
                        help="JSON file of default option values")
    common.add_argument("--out", default=argparse.SUPPRESS,
                        help="also write the JSON document to this path")
    common.add_argument("--indent", type=int, default=argparse.SUPPRESS)
    ap = argparse.ArgumentParser(prog="qschwarz", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter,
                                 parents=[common])
    sub = ap.add_subparsers(dest="command", required=True)
    ap._qschwarz_parsers = [ap]

    def add_parser(name, **kw):
        p = sub.add_parser(name, parents=[common], **kw)
        ap._qschwarz_parsers.append(p)
        return p

    p = add_parser("solve", help="solve the residue system")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", default="3")
    p.add_argument("--b", default="4")
    p.add_argument("--c", default="12")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--bits", type=int, default=53)
    p.add_argument("--max-iter", type=int, default=80)
    p.add_argument("--init", nargs="*", default=None)
    p.add_argument("--max-denominator", type=int, default=10 ** 6)
    p.add_argument("--no-cache", action="store_true")
    p.set_defaults(fn=cmd_solve)

    p = add_parser("expand", help="emit a q-expansion (series dump format)")
    p.add_argument("--form", default="eta",
                   choices=["eta", "eta4", "delta", "e2", "e4", "e6", "j", "theta-j",
                            "f", "y"])
    p.add_argument("--eta-quotient", help='e.g. "eta(1/2)^8/eta(1)^4"')
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--xs", nargs="*", default=None)
    p.add_argument("--auto-solve", action="store_true")
    p.add_argument("--order", type=int, default=10)
    p.add_argument("--mode", default="exact", choices=["exact", "float"])
    p.add_argument("--bits", default=None)
    p.set_defaults(fn=cmd_expand)

    p = add_parser("verify", help="series identity checks")
    p.add_argument("which", choices=["schwarzian", "ode"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--xs", nargs="*", default=None)
    p.add_argument("--auto-solve", action="store_true")
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--mode", default=None, choices=["exact", "float"])
    p.add_argument("--bits", default="auto")
    p.add_argument("--tolerance", type=float, default=None)
    p.set_defaults(fn=cmd_verify)

    p = add_parser("residue", help="contour residues at the arc poles")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--xs", nargs="*", default=None)
    p.add_argument("--auto-solve", action="store_true")
    p.add_argument("--radius", type=float, default=0.02)
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--index", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--expect", default="zero", choices=["zero", "nonzero"])
    p.set_defaults(fn=cmd_residue)

    p = add_parser("equivariance", help="equivariance constant checks")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--xs", nargs="*", default=None)
    p.add_argument("--auto-solve", action="store_true")
    p.add_argument("--gamma", default="T")
    p.add_argument("--tau", nargs="*", default=None)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(fn=cmd_equivariance)

    p = add_parser("report-all", help="run the complete acceptance suite")
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--plot", action="store_true")
    p.add_argument("--plot-dir", default="plots")
    p.set_defaults(fn=cmd_report_all)
    return ap


def _apply_config(ap: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    try:
        cfg = json.loads(Path(argv[idx + 1]).read_text())
    except (IndexError, OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"bad config file: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config file must hold a JSON object")
    # subcommand parsers start from a fresh namespace, so defaults must be
    # pushed into every parser, not just the root one
    defaults = {k.replace("-", "_"): v for k, v in cfg.items() if k != "fn"}
    for parser in getattr(ap, "_qschwarz_parsers", [ap]):
        parser.set_defaults(**defaults)
    return argv


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        argv = _apply_config(ap, argv)
        args = ap.parse_args(argv)
    except ConfigError as exc:
        _log(f"config error: {exc}")
        return EXIT_CONFIG
    try:
        code, doc = args.fn(args)
    except ConfigError as exc:
        _log(f"config error: {exc}")
        return EXIT_CONFIG
    except (system.SolveError, analytic.QuadratureError, analytic.PathError,
            ArithmeticError) as exc:
        _log(f"numerical failure: {exc}")
        return EXIT_NUMERICAL
    _emit(doc, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
