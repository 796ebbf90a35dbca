"""Command-line front end.

Exit codes: 0 success, 1 a verification check failed, 2 bad usage,
3 an internal or oracle failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import random
import sys
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from mpmath import mp

from . import coefficients as co
from . import expansions as ex
from . import integral_asym as ia
from . import oracle as orc
from . import stokes as st

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class Config:
    precision_digits: int = orc.DEFAULT_DIGITS
    truncation_policy: str = "optimal"
    output_format: str = "human"
    seed: int = 0
    tolerances: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | None, args) -> "Config":
        cfg = cls()
        if path:
            data = json.loads(Path(path).read_text())
            for key, value in data.items():
                if not hasattr(cfg, key):
                    raise UsageError(f"unknown config key {key!r}")
                setattr(cfg, key, value)
        if args.digits is not None:
            cfg.precision_digits = args.digits
        if args.format is not None:
            cfg.output_format = args.format
        if args.seed is not None:
            cfg.seed = args.seed
        return cfg

    def tol(self, name: str, default: float) -> float:
        return float(self.tolerances.get(name, default))


def _num(x, digits: int) -> str:
    return mp.nstr(x, digits, min_fixed=-mp.inf, max_fixed=mp.inf) if x is not None else ""


def _real(s: str):
    try:
        return mp.mpf(s)
    except (ValueError, TypeError):
        raise UsageError(f"not a number: {s!r}") from None


def _fraction_json(q: Fraction) -> dict:
    return {"decimal": mp.nstr(mp.mpf(q.numerator) / q.denominator, 30), "numerator": str(q.numerator),
            "denominator": str(q.denominator)}


def _emit(obj, cfg: Config, out) -> None:
    if cfg.output_format == "json":
        json.dump(obj, out, indent=2, sort_keys=True)
        out.write("\n")
    else:
        for key in sorted(obj):
            out.write(f"{key}: {obj[key]}\n")


# -- eval ---------------------------------------------------------------------

def cmd_eval(args, cfg: Config, out) -> int:
    fn = orc.FunctionId.parse(args.fn)
    digits = cfg.precision_digits
    with mp.workdps(digits + 10):
        x = _real(args.x)
        truncation = args.truncation or cfg.truncation_policy
        if truncation != "optimal":
            try:
                truncation = int(truncation)
            except ValueError:
                raise UsageError("--truncation takes 'optimal' or an integer") from None
        report = {"function": fn.value, "x": _num(x, digits)}
        asym = oracle_value = None
        if args.mode in ("asym", "both"):
            if x == 0:
                raise UsageError("asymptotic evaluation needs x != 0")
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ex.DomainWarning)
                asym = ex.evaluate_function(fn, x, truncation, digits=max(30, digits))
            report.update(value=_num(asym.value, digits), error_estimate=_num(asym.error_estimate, 6),
                          truncation_index=asym.truncation_index)
        if args.mode in ("oracle", "both"):
            oracle_value = orc.oracle_eval(fn, x, digits)
            report["oracle"] = _num(oracle_value, digits)
            if asym is None:
                report["value"] = report["oracle"]
        if asym is not None and oracle_value is not None:
            rel = abs(asym.value - oracle_value) / max(abs(oracle_value), mp.mpf(10) ** (-digits))
            report["rel_err"] = _num(rel, 6)
    if args.json:
        cfg.output_format = "json"
    if cfg.output_format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(sorted(report))
        w.writerow([report[k] for k in sorted(report)])
    else:
        _emit(report, cfg, out)
    return EXIT_OK


def cmd_oracle(args, cfg: Config, out) -> int:
    fn = orc.FunctionId.parse(args.fn)
    digits = cfg.precision_digits
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["function", "z_re", "z_im", "value_re", "value_im", "digits"])
    with mp.workdps(digits + 10):
        for zs in args.z:
            z = mp.mpc(complex(zs.replace("i", "j"))) if any(c in zs for c in "ij") else _real(zs)
            val = mp.mpc(orc.oracle_eval(fn, z, digits))
            z = mp.mpc(z)
            w.writerow([fn.value, _num(z.real, digits), _num(z.imag, digits),
                        _num(val.real, digits), _num(val.imag, digits), digits])
    return EXIT_OK


# -- coefficients -------------------------------------------------------------

def cmd_coefficients(args, cfg: Config, out) -> int:
    if args.max_index < 0 or args.max_index > co.MAX_INDEX:
        raise UsageError(f"max index must lie in 0..{co.MAX_INDEX}")
    try:
        rows = list(co.emit_rows(args.seq, args.max_index, k=args.k, m=args.m))
    except ValueError as err:
        raise UsageError(str(err)) from None
    if cfg.output_format == "json":
        json.dump([{"index": i, "numerator": str(n), "denominator": str(d)} for i, n, d in rows], out, indent=2)
        out.write("\n")
        return EXIT_OK
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["index", "numerator", "denominator"])
    for row in rows:
        w.writerow([str(v) for v in row])
    return EXIT_OK


# -- stokes -------------------------------------------------------------------

def cmd_stokes(args, cfg: Config, out) -> int:
    if args.z_abs <= 0:
        raise UsageError("--z-abs must be positive")
    z = st.PhasedComplex(args.z_abs, args.z_phase)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", st.NearStokesWarning)
        dec = st.path_decomposition(z)
        contours = dec.contours or {s.index: st.trace_contour(z, s) for s in st.saddle_points(z)}
    saddles = st.saddle_points(z)
    summary = {
        "saddles": [{"index": s.index, "t_re": s.t.real, "t_im": s.t.imag, "im_f": s.descent_constant,
                     "re_f": s.elevation} for s in saddles],
        "stokes_ray": st.is_stokes_ray(z.phase),
        "representation": dec.representation.value,
        "saddle_count_on_path": dec.saddle_count,
        "saddles_on_path": list(dec.saddles_on_path),
    }
    if args.emit:
        target = Path(args.emit)
        target.mkdir(parents=True, exist_ok=True)
        zc = complex(z)
        with open(target / "contours.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["contour_id", "saddle", "t_re", "t_im", "re_f", "im_f"])
            for cid, (idx, c) in enumerate(sorted(contours.items())):
                for t in c.points:
                    f = st.exponent(zc, t)
                    w.writerow([cid, idx, f"{t.real:.12g}", f"{t.imag:.12g}", f"{f.real:.12g}", f"{f.imag:.12g}"])
        (target / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    json.dump(summary, out, indent=2, sort_keys=True)
    out.write("\n")
    return EXIT_OK


# -- integral -----------------------------------------------------------------

_KERNELS = {
    "ai": (ia.expand_integral, orc.FunctionId.Ai),
    "ai1": (ia.expand_integral_ai1_kernel, orc.FunctionId.Ai1),
    "aiprime": (ia.expand_integral_aiprime_kernel, orc.FunctionId.AiPrime),
}


def _closed_form(expr: str, v):
    """Callable of y = x - v from an expression in x, v, y and mpmath names."""
    env = {name: getattr(mp, name) for name in ("sqrt", "exp", "log", "sin", "cos", "pi", "airyai", "cbrt")}
    code = compile(expr, "<closed_form>", "eval")
    vm = ia._mp(ia._frac(v))

    def h(y):
        return eval(code, {"__builtins__": {}}, {**env, "x": vm + y, "v": vm, "y": y})

    return h


def cmd_integral(args, cfg: Config, out) -> int:
    try:
        data = json.loads(Path(args.coeffs).read_text())
    except (OSError, json.JSONDecodeError) as err:
        raise UsageError(f"cannot read coefficients: {err}") from None
    if "f" not in data:
        raise UsageError("coefficient file needs an 'f' object")
    v = ia._frac(args.v)
    h = ia.HalfIntegerSeries.from_json(data, v)
    expand, kernel = _KERNELS[args.kernel]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = expand(h, v, args.levels, route=args.route)
    digits = min(cfg.precision_digits, 30)
    report = {
        "kernel": args.kernel,
        "v": str(v),
        "route": res.route,
        "total": _num(res.total, digits),
        "nonoscillatory_sum": _num(res.nonoscillatory_sum, digits),
        "oscillatory_value": _num(res.oscillatory_value, digits),
        "basis_breakdown": {k: _num(val, digits) for k, val in res.basis_breakdown.items()},
        "terms_used": res.terms_used,
        "warnings": res.warnings + [str(w.message) for w in caught],
        "convergence_check": h.convergence_check(),
        "derivatives_at_0": {str(3 * k): _fraction_json(h.derivative_at_zero(3 * k)) for k in range(args.levels)},
    }
    if data.get("closed_form"):
        q = orc.oracle_integral(kernel, _closed_form(data["closed_form"], v), ia._mp(v), digits=20)
        report["oracle"] = _num(q, 20)
        report["rel_err"] = _num(abs(res.total - q) / abs(q), 6)
    json.dump(report, out, indent=2, sort_keys=True)
    out.write("\n")
    return EXIT_OK


# -- verify -------------------------------------------------------------------

def _check(name: str, fn):
    try:
        ok, detail = fn()
    except Exception as err:  # a crashing check is a failed check
        ok, detail = False, f"{type(err).__name__}: {err}"
    return name, bool(ok), detail


def _suite_identities(cfg: Config, rng: random.Random):
    def conv():
        bad = [s for s in range(1, 26) if not co.check_identity_21(s)]
        return not bad, f"nonzero at s={bad}" if bad else "exact zero"

    def a_values():
        want = [Fraction(41, 72), Fraction(9241, 2**7 * 3**4), Fraction(25 * 203009, 2**10 * 3**7)]
        got = [co.coeff_a(n) for n in range(1, 4)]
        same = all(co.coeff_a(n) == co.coeff_a_sum_form(n) for n in range(12))
        return got == want and same, f"a_1..a_3 = {[str(q) for q in got]}"

    def g_values():
        want = [Fraction(-5, 24), Fraction(-205, 1152), Fraction(22715, 82944),
                Fraction(5 * 7 * 11 * 12769, 2**15 * 3**5)]
        got = [co.coeff_g(n) for n in range(1, 5)]
        return got == want, f"g_1..g_4 = {[str(q) for q in got]}"

    def e_closed():
        bad = [n for n in range(30) if co.coeff_e(n) != co.coeff_e_closed_form(n)]
        return not bad, "recurrence equals closed form for n < 30"

    def q_closed():
        bad = [(m, s) for m in range(7) for s in range(5) if co.coeff_Q(m, s) != co.coeff_Q_nested(m, s)]
        return not bad, "m <= 6, s <= 4"

    def c_gamma():
        bad = [n for n in range(40) if co.coeff_c(n) != co.coeff_c_gamma_form(n)]
        return not bad, "n < 40"

    def levels_table():
        v = Fraction(-7)
        ok = True
        for j, want in ((-1, 53), (1, 53), (3, 53), (5, 50), (7, 35)):
            lv = ia.build_levels(ia.HalfIntegerSeries(v, {j: 1}), 3)
            ok &= lv.odd[2][0] * v**6 * 16 / 3 == want
        for j, want in ((0, 40), (6, 36), (8, 24)):
            lv = ia.build_levels(ia.HalfIntegerSeries(v, {j: 1}), 3)
            ok &= lv.plus[2][0] * v**6 == want
        return ok, "level-2 odd and even tables"

    def direct_forms():
        v = Fraction(-9)
        h = ia.HalfIntegerSeries(v, {k: Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for k in range(-1, 16)})
        lv = ia.build_levels(h, 4)
        bad = [(k, m) for k in range(1, 4) for m in (0, 1)
               if ia.odd_coefficient_direct(k, m, h) != lv.odd[k][m]
               or ia.even_plus_direct(k, m, h) != lv.plus[k][m]
               or ia.even_coefficient_direct(k, m, h, lv.h_values)[0] != lv.full_even[k][m]]
        return not bad, f"closed forms vs iteration, random h (seed {cfg.seed})"

    return [
        _check("c-d convolution identity s=1..25", conv),
        _check("a_1..a_3 reference values and c-sum form", a_values),
        _check("g_1..g_4 reference values", g_values),
        _check("e_n recurrence equals closed form", e_closed),
        _check("Q closed form equals nested sums", q_closed),
        _check("c_n recurrence equals Gamma-ratio form", c_gamma),
        _check("level coefficient tables", levels_table),
        _check("R, T, Q closed forms equal level iteration", direct_forms),
    ]


def _suite_expansions(cfg: Config, rng: random.Random):
    checks = []
    factor = cfg.tol("expansions_factor", 2.0)
    for (fn, direction), e in sorted(ex.CATALOG.items(), key=lambda kv: (kv[0][0].value, kv[0][1].value)):
        def one(fn=fn, direction=direction, e=e):
            x = mp.mpf(10) if direction is ex.Direction.PLUS else mp.mpf(-10)
            with mp.workdps(40):
                val = ex.evaluate(e, x)
                ref = orc.oracle_eval(fn, x, 40)
                err = abs(val.value - ref)
            return err <= factor * val.error_estimate, f"err {mp.nstr(err, 3)} estimate {mp.nstr(val.error_estimate, 3)}"

        checks.append(_check(f"{fn.value} at {direction.value} |x|=10 within {factor}x estimate", one))

    def handbook():
        # the corrected power series against the old leading terms 7/96 x^-2 and -3/2 x^-2
        with mp.workdps(40):
            ratios = []
            for fn, x, old in (("GiPrime", 10, mp.mpf(7) / 96), ("HiPrime", -10, -mp.mpf(3) / 2)):
                ref = orc.oracle_eval(fn, x, 40)
                series = ex.evaluate_function(fn, x).value
                ratios.append(abs(ref - old / mp.mpf(x) ** 2) / abs(ref - series))
        return min(ratios) > 1e3, f"distance ratios {[mp.nstr(r, 3) for r in ratios]}"

    def remainder():
        worst = 0
        for v in (3, -5):
            ref = orc.oracle_eval("Ai1", v, 30)
            r = ex.ai1_exact_remainder(v, 2)
            worst = max(worst, abs(r.total - ref) / abs(ref))
        return worst < 1e-10, f"worst rel err {mp.nstr(worst, 3)}"

    checks.append(_check("Gi'(10), Hi'(-10) power series against handbook leading terms", handbook))
    checks.append(_check("Ai1 exact remainder identity", remainder))
    return checks


def _suite_stokes(cfg: Config, rng: random.Random):
    def topology():
        eps, counts = 1e-2, {}
        for phi in (0.0, 2 * math.pi / 3, -2 * math.pi / 3):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", st.NearStokesWarning)
                counts[phi] = tuple(st.path_decomposition(st.PhasedComplex(10, phi + d)).saddle_count
                                    for d in (-eps, eps))
        ok = counts[0.0] == (1, 2) and counts[2 * math.pi / 3] == (2, 1) and counts[-2 * math.pi / 3] == (1, 1)
        return ok, f"counts below/above: {list(counts.values())}"

    def residual():
        worst = mp.zero
        with mp.workdps(40):
            for _ in range(3):
                z = st.PhasedComplex(rng.uniform(1, 6), rng.uniform(-math.pi, math.pi))
                worst = max(worst, abs(st.connection_residual(z, 30)))
        return worst < 1e-25, f"max residual {mp.nstr(worst, 3)}"

    def assembly():
        with mp.workdps(40):
            z = st.PhasedComplex(10, math.pi)
            a = st.assemble_ai(z)
            err = abs(a.value - orc.oracle_eval("Ai", z.mp_value(), 30))
        return err <= 2 * a.error_estimate, f"err {mp.nstr(err, 3)} estimate {mp.nstr(a.error_estimate, 3)}"

    return [
        _check("saddle count changes across the Stokes rays", topology),
        _check("connection identity residual", residual),
        _check("two-series assembly of Ai on the negative axis", assembly),
    ]


def _suite_integrals(cfg: Config, rng: random.Random):
    def half_power():
        worst = 0
        for v in (-5, 0, 3):
            with mp.workdps(30):
                q = orc.oracle_integral("Ai", lambda y: 1 / mp.sqrt(y), v)
                t = mp.mpf(v) * mp.mpf(2) ** (-mp.mpf(2) / 3)
                ref = mp.mpf(2) ** (mp.mpf(2) / 3) * orc.oracle_eval("Ai", t, 30) ** 2
                worst = max(worst, abs(q - ref) / abs(ref))
        return worst < 1e-10, f"worst rel err {mp.nstr(worst, 3)}"

    def brackets():
        worst = 0
        with mp.workdps(40):
            for v in (-10, -20, -40):
                for which in (1, 2):
                    a, b = ia.bracket_oscillatory(which, v), ia.bracket_with_phi(which, v, 40)
                    worst = max(worst, abs(a.value - b.value) / (a.error + b.error))
        return worst <= 1, f"worst |difference| / combined estimate {mp.nstr(worst, 3)}"

    def expansion():
        h = ia.HalfIntegerSeries(-15, {-1: 1})
        with mp.workdps(30):
            q = orc.oracle_integral("Ai", h, -15)
            r = ia.expand_integral(h, K_outer=3)
            rel = abs(r.total - q) / abs(q)
        return rel < cfg.tol("integral_rel", 1e-4), f"rel err {mp.nstr(rel, 3)}"

    def routes():
        h = ia.HalfIntegerSeries(-20, {-1: 1, 1: Fraction(1, 3), 2: 1})
        a = ia.expand_integral(h, K_outer=3)
        b = ia.expand_integral(h, K_outer=3, route="levels")
        return abs(a.total - b.total) < 1e-8, f"difference {mp.nstr(abs(a.total - b.total), 3)}"

    def cancellation():
        bad = [n for n in range(40) if ia.w1_prime_coefficient(n) != ia.cancellation_coefficient(n)]
        return not bad, "w1' series equals the non-oscillatory Ai' kernel sum, n < 40"

    return [
        _check("half-power integral against 2^(2/3) Ai^2 at v=-5,0,3", half_power),
        _check("oscillatory brackets: Airy-product route vs w2 route", brackets),
        _check("integral expansion vs quadrature, v=-15", expansion),
        _check("resummed and level routes agree", routes),
        _check("Ai' kernel cancellation coefficients", cancellation),
    ]


SUITES = {
    "identities": _suite_identities,
    "expansions": _suite_expansions,
    "stokes": _suite_stokes,
    "integrals": _suite_integrals,
}


def cmd_verify(args, cfg: Config, out) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    rng = random.Random(cfg.seed)
    results = []
    for name in names:
        results.extend((name, *r) for r in SUITES[name](cfg, rng))
    out.write(f"1..{len(results)}\n")
    for i, (suite, check, ok, detail) in enumerate(results, 1):
        status = "PASS" if ok else "FAIL"
        out.write(f"{'ok' if ok else 'not ok'} {i} - {suite}: {check} {status} # {detail}\n")
    return EXIT_OK if all(r[2] for r in results) else EXIT_FAIL


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="airyasym", description="Airy-type function asymptotics and checks.")
    p.add_argument("--digits", type=int, help="working precision in decimal digits (default 50)")
    p.add_argument("--format", choices=("json", "csv", "human"), help="output format")
    p.add_argument("--seed", type=int, help="seed for randomized checks")
    p.add_argument("--config", help="JSON file with Config fields")
    p.add_argument("--emit-coefficients", nargs=2, metavar=("SEQ", "MAX_INDEX"),
                   help="dump a coefficient sequence as CSV and exit")
    p.add_argument("--oracle", nargs="+", metavar=("FN", "Z"), help="oracle CSV for one function at points Z")
    sub = p.add_subparsers(dest="command")

    e = sub.add_parser("eval", help="asymptotic and/or oracle value at real x")
    e.add_argument("--fn", required=True)
    e.add_argument("--x", required=True)
    e.add_argument("--mode", choices=("asym", "oracle", "both"), default="asym")
    e.add_argument("--truncation", help="'optimal' or number of terms")
    e.add_argument("--json", action="store_true")

    v = sub.add_parser("verify", help="run a verification suite (TAP output)")
    v.add_argument("suite", choices=(*SUITES, "all"))

    s = sub.add_parser("stokes", help="saddle contours and path decomposition")
    s.add_argument("--z-abs", type=float, required=True)
    s.add_argument("--z-phase", type=float, required=True)
    s.add_argument("--emit", help="directory for contours.csv and summary.json")

    i = sub.add_parser("integral", help="large -v expansion of an Airy-kernel integral")
    i.add_argument("--kernel", choices=tuple(_KERNELS), default="ai")
    i.add_argument("--coeffs", required=True, help="JSON file {\"f\": {...}, \"closed_form\": ...}")
    i.add_argument("--v", required=True)
    i.add_argument("--levels", type=int, default=4)
    i.add_argument("--route", choices=("resummed", "levels"), default="resummed")
    i.add_argument("--json", action="store_true")

    c = sub.add_parser("coefficients", help="exact coefficient table as CSV")
    c.add_argument("seq", choices=[s.value for s in co.SequenceId] + [s.value.lower() for s in co.SequenceId])
    c.add_argument("max_index", type=int)
    c.add_argument("--k", type=int, default=2)
    c.add_argument("--m", type=int, default=0)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = Config.load(args.config, args)
        if cfg.precision_digits < 5 or cfg.precision_digits > orc.MAX_DIGITS:
            raise UsageError(f"--digits must lie in 5..{orc.MAX_DIGITS}")
        if args.emit_coefficients:
            seq, top = args.emit_coefficients
            try:
                top = int(top)
            except ValueError:
                raise UsageError("MAX_INDEX must be an integer") from None
            args = argparse.Namespace(seq=seq, max_index=top, k=2, m=0)
            return cmd_coefficients(args, Config(output_format="csv"), out)
        if args.oracle:
            if len(args.oracle) < 2:
                raise UsageError("--oracle FN Z [Z ...]")
            return cmd_oracle(argparse.Namespace(fn=args.oracle[0], z=args.oracle[1:]), cfg, out)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        if getattr(args, "json", False):
            cfg.output_format = "json"
        handler = {"eval": cmd_eval, "verify": cmd_verify, "stokes": cmd_stokes,
                   "integral": cmd_integral, "coefficients": cmd_coefficients}[args.command]
        return handler(args, cfg, out)
    except (UsageError, ValueError, ex.NotInCatalogError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as err:
        print(f"internal error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
