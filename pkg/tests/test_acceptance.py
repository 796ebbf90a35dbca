"""Acceptance criteria 1 to 10.

Each ``criterion_N`` returns (passed, detail).  Under pytest every criterion
is one test and the terminal summary lists one PASS/FAIL line per
criterion; ``python3 tests/test_acceptance.py`` prints the same lines.
"""

import math
import random
import sys
import warnings
from fractions import Fraction

import pytest
from mpmath import mp

from airyasym import coefficients as co
from airyasym import expansions as ex
from airyasym import integral_asym as ia
from airyasym import oracle as orc
from airyasym import stokes as st
from airyasym.expansions import Direction, Kernel
from airyasym.oracle import FunctionId


def _fmt(x):
    return mp.nstr(x, 3)


def criterion_1():
    bad = [s for s in range(1, 26) if co.convolution_cd(s) != 0 or not co.check_identity_21(s)]
    return not bad, "exact zero for s = 1..25" if not bad else f"nonzero at s = {bad}"


# coefficient of f_j in v**(3k) f_{k,2m-1} and v**(3k) f+_{k,2m}, keyed (k, m)
ODD_REFERENCE = {
    (1, 0): {j: Fraction(3, 4) for j in (-1, 1, 3)},
    (1, 1): {j: Fraction(15, 4) for j in (-1, 1, 3, 5)},
    (2, 0): {-1: Fraction(159, 16), 1: Fraction(159, 16), 3: Fraction(159, 16), 5: Fraction(150, 16),
             7: Fraction(105, 16)},
    (2, 1): {-1: Fraction(1740, 16), 1: Fraction(1740, 16), 3: Fraction(1740, 16), 5: Fraction(1695, 16),
             7: Fraction(1470, 16), 9: Fraction(945, 16)},
}
PLUS_REFERENCE = {
    (1, 0): {0: 2, 2: 2, 4: 2},
    (1, 1): {0: 6, 2: 6, 4: 6, 6: 6},
    (2, 0): {0: 40, 2: 40, 4: 40, 6: 36, 8: 24},
    (2, 1): {0: 240, 2: 240, 4: 240, 6: 228, 8: 192, 10: 120},
    (3, 0): {0: 2240, 2: 2240, 4: 2240, 6: 2160, 8: 1920, 10: 1440, 12: 720},
    (3, 1): {0: 20160, 2: 20160, 4: 20160, 6: 19680, 8: 18240, 10: 15360, 12: 10800, 14: 5040},
}


def criterion_2():
    problems = []
    a_want = [Fraction(41, 2**3 * 3**2), Fraction(9241, 2**7 * 3**4), Fraction(5**2 * 203009, 2**10 * 3**7)]
    if [co.coeff_a(n) for n in (1, 2, 3)] != a_want:
        problems.append("a_1..a_3")
    g_want = [Fraction(-5, 24), Fraction(-5 * 41, 2**7 * 3**2), Fraction(5 * 7 * 11 * 59, 2**10 * 3**4),
              Fraction(5 * 7 * 11 * 12769, 2**15 * 3**5)]
    if [co.coeff_g(n) for n in (1, 2, 3, 4)] != g_want:
        problems.append("g_1..g_4")
    if co.coeff_e(0) != 1:
        problems.append("e_0")
    v = Fraction(-7)
    for (k, m), row in ODD_REFERENCE.items():
        for j in range(-1, 12, 2):
            lv = ia.build_levels(ia.HalfIntegerSeries(v, {j: 1}), k + 1)
            if lv.odd[k][m] * v ** (3 * k) != row.get(j, 0):
                problems.append(f"odd level ({k},{m}) f_{j}")
    for (k, m), row in PLUS_REFERENCE.items():
        for j in range(0, 18, 2):
            lv = ia.build_levels(ia.HalfIntegerSeries(v, {j: 1}), k + 1)
            if lv.plus[k][m] * v ** (3 * k) != row.get(j, 0):
                problems.append(f"even level ({k},{m}) f_{j}")
    if any(co.coeff_Q(m, s) != co.coeff_Q_nested(m, s) for m in range(7) for s in range(5)):
        problems.append("Q closed form")
    return not problems, "all exact" if not problems else f"mismatch: {problems}"


def criterion_3():
    worst_ratio, worst_rel, failures = 0, 0, []
    for (fn, direction), e in ex.CATALOG.items():
        oscillating = any(c.kernel is not Kernel.PurePower for c in e.components)
        for modulus in (6, 10, 20):
            digits = ex.working_digits(modulus)
            with mp.workdps(digits + 10):
                x = mp.mpf(modulus) if direction is Direction.PLUS else -mp.mpf(modulus)
                val = ex.evaluate(e, x, digits=digits)
                ref = orc.oracle_eval(fn, x, digits)
                err = abs(val.value - ref)
                ratio = err / val.error_estimate if val.error_estimate else (0 if err == 0 else mp.inf)
                worst_ratio = max(worst_ratio, ratio)
                if ratio > 2:
                    failures.append(f"{fn.value}{direction.value}{modulus}")
                if modulus == 20 and oscillating:
                    rel = err / abs(ref)
                    worst_rel = max(worst_rel, rel)
                    if rel >= 1e-6:
                        failures.append(f"{fn.value}{direction.value} rel")
    detail = f"{len(ex.CATALOG)} expansions, worst err/estimate {_fmt(worst_ratio)}, worst rel err at 20 {_fmt(worst_rel)}"
    return not failures, detail if not failures else f"{detail}; failing {failures}"


def criterion_4():
    # distances of the true values to the two competing leading terms at |x| = 10
    with mp.workdps(40):
        gp = orc.oracle_eval(FunctionId.GiPrime, 10, 40)
        hp = orc.oracle_eval(FunctionId.HiPrime, -10, 40)
        g_ratio = abs(gp - mp.mpf(7) / 9600) / abs(gp + mp.mpf(1) / 100)
        h_ratio = abs(hp + mp.mpf(3) / 200) / abs(hp - mp.mpf(1) / 100)
    detail = (f"Gi'(10) = {mp.nstr(gp, 10)}, distance ratio {_fmt(g_ratio)}; "
              f"Hi'(-10) = {mp.nstr(hp, 10)}, distance ratio {_fmt(h_ratio)}; required > 1e3")
    return g_ratio > 1e3 and h_ratio > 1e3, detail


def criterion_5():
    worst = 0
    for v in (3, -5, -10):
        ref = orc.oracle_eval(FunctionId.Ai1, v, 30)
        for n in (0, 2, 5):
            worst = max(worst, abs(ex.ai1_exact_remainder(v, n).total - ref) / abs(ref))
    for v in (-5, -20):
        ref = 2 * orc.integral_power_ai(3, v)
        for n in (0, 2):
            worst = max(worst, abs(ex.integral_power_ai_remainder(v, n).total - ref) / abs(ref))
    return worst < 1e-10, f"worst rel err {_fmt(worst)}"


def criterion_6():
    worst = 0
    with mp.workdps(30):
        for v in (-5, 0, 3):
            q = orc.oracle_integral("Ai", lambda y: 1 / mp.sqrt(y), v)
            t = mp.mpf(v) * mp.mpf(2) ** (-mp.mpf(2) / 3)
            ref = mp.mpf(2) ** (mp.mpf(2) / 3) * orc.oracle_eval("Ai", t, 30) ** 2
            worst = max(worst, abs(q - ref) / abs(ref))
    return worst < 1e-10, f"worst rel err {_fmt(worst)}"


VALLEYS = (math.pi / 2, -5 * math.pi / 6, -math.pi / 6)


def criterion_7():
    problems = []
    eps = 1e-2
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", st.NearStokesWarning)
        changes = {}
        for phi in (0.0, 2 * math.pi / 3, -2 * math.pi / 3, math.pi / 3, -math.pi / 3, math.pi / 2):
            below, above = (st.path_decomposition(st.PhasedComplex(10, phi + d)).saddle_count for d in (-eps, eps))
            changes[phi] = (below, above)
    # the count changes across 0 and 2 pi/3; across -2 pi/3 the active line is off the path
    if changes[0.0] != (1, 2) or changes[2 * math.pi / 3] != (2, 1):
        problems.append("no 1<->2 change on an active Stokes ray")
    if any(b != a for phi, (b, a) in changes.items() if phi not in (0.0, 2 * math.pi / 3)):
        problems.append("count changes away from an active Stokes ray")
    worst_angle = 0.0
    for phi in (-2.5, -1.2, -0.4, 0.7, 1.4, 2.9):
        z = st.PhasedComplex(10, phi)
        for s in st.saddle_points(z):
            for angle in st.trace_contour(z, s).end_directions:
                gap = min(abs((angle - d + math.pi) % (2 * math.pi) - math.pi) for d in VALLEYS)
                worst_angle = max(worst_angle, gap)
    if worst_angle >= 1e-3:
        problems.append("end direction")
    rng = random.Random(2024)
    worst_res = mp.zero
    with mp.workdps(40):
        for _ in range(5):
            z = st.PhasedComplex(rng.uniform(1, 6), rng.uniform(-math.pi, math.pi))
            worst_res = max(worst_res, abs(st.connection_residual(z, 30)))
    if worst_res >= 1e-25:
        problems.append("connection residual")
    detail = (f"counts {changes[0.0]} at 0, {changes[2 * math.pi / 3]} at 2pi/3, "
              f"{changes[-2 * math.pi / 3]} at -2pi/3; worst end angle {worst_angle:.1e}; "
              f"worst residual {_fmt(worst_res)}")
    return not problems, detail if not problems else f"{detail}; {problems}"


def criterion_8():
    worst = 0
    with mp.workdps(40):
        for phi in (math.pi, -math.pi):
            z = st.PhasedComplex(10, phi)
            a = st.assemble_ai(z)
            worst = max(worst, abs(a.value - orc.oracle_eval("Ai", z.mp_value(), 30)) / a.error_estimate)
        for phi in (-math.pi / 2, math.pi / 3):
            z = st.PhasedComplex(10, phi)
            w = st.assemble_w(z)
            worst = max(worst, abs(w.value - st.oracle_w(z)) / w.error_estimate)
    return worst <= 2, f"worst err/estimate {_fmt(worst)}"


# reference leading rationals, keyed (kind, power of -v); signs converted from powers of v
REFERENCE_BRACKETS = {
    1: {("sin", 3): Fraction(1, 24), ("sin", 6): Fraction(-3115, 20736),
        ("cos", Fraction(3, 2)): Fraction(-1, 2), ("cos", Fraction(9, 2)): Fraction(-35, 1728),
        ("cos", Fraction(15, 2)): Fraction(535535, 995328)},
    2: {("sin", 0): Fraction(-1), ("sin", 3): Fraction(1, 288), ("sin", 6): Fraction(-137305, 497664),
        ("cos", Fraction(3, 2)): Fraction(-1, 24), ("cos", Fraction(9, 2)): Fraction(-665, 10368)},
}


def criterion_9():
    worst = 0
    with mp.workdps(40):
        for v in (-10, -20, -40):
            for which in (1, 2):
                a, b = ia.bracket_oscillatory(which, v), ia.bracket_with_phi(which, v, 40)
                worst = max(worst, abs(a.value - b.value) / (a.error + b.error))
    mismatched = []
    for which, table in REFERENCE_BRACKETS.items():
        series = ia.bracket_series(which, 6)
        for (kind, p), want in table.items():
            got = series.coefficient(kind, p)
            if got != want:
                mismatched.append(f"bracket {which} {kind} (-v)^-{p}: computed {got}, reference {want}")
    routes_ok = worst <= 1
    detail = f"routes agree, worst diff/estimate {_fmt(worst)}" if routes_ok else f"routes differ ({_fmt(worst)})"
    if mismatched:
        detail += "; rational mismatches: " + "; ".join(mismatched)
    return routes_ok and not mismatched, detail


CASES = ({-1: 1}, {0: 1}, {1: 1})
KERNELS = (("Ai", ia.expand_integral), ("Ai1", ia.expand_integral_ai1_kernel),
           ("AiPrime", ia.expand_integral_aiprime_kernel))


def _rel_err(kernel, expand, f, v):
    h = ia.HalfIntegerSeries(v, f)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ia.DivergenceWarning)
        r = expand(h, v, 3)
    q = orc.oracle_integral(kernel, h, mp.mpf(v), digits=20)
    return abs(r.total - q) / abs(q)


QUADRATURE_FLOOR = 1e-15


def criterion_10():
    problems, worst, exact_cases = [], 0, []
    with mp.workdps(30):
        for kernel, expand in KERNELS:
            for f in CASES:
                rel = _rel_err(kernel, expand, f, -15)
                worst = max(worst, rel)
                if rel >= 1e-4:
                    problems.append(f"{kernel} {f} rel err {_fmt(rel)}")
                errs = [_rel_err(kernel, expand, f, v) for v in (-10, -20, -40)]
                if max(errs) < QUADRATURE_FLOOR:
                    # the expansion is exact here; the numbers are quadrature noise
                    exact_cases.append(f"{kernel} {f}")
                elif not errs[0] > errs[1] > errs[2]:
                    problems.append(f"{kernel} {f} not decreasing: {[_fmt(e) for e in errs]}")
        exact_worst = 0
        for v in (-7, -15, -30):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ia.DivergenceWarning)
                r = ia.expand_integral_aiprime_kernel(ia.HalfIntegerSeries(v, {-1: 1}), K=3)
            t = mp.mpf(v) * mp.mpf(2) ** (-mp.mpf(2) / 3)
            ai, aip = orc.ai_and_derivative(t, 30)
            exact = 2 * mp.sqrt(-mp.mpf(v)) * ai * aip
            exact_worst = max(exact_worst, abs(r.total - exact) / abs(exact))
        if exact_worst >= 1e-10:
            problems.append(f"closed-form case rel err {_fmt(exact_worst)}")
    detail = (f"worst rel err at v=-15 {_fmt(worst)}, closed-form case {_fmt(exact_worst)}, errors fall with |v|"
              f" (exact to quadrature accuracy: {exact_cases})")
    return not problems, detail if not problems else f"{detail}; {problems}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def line(n, ok, detail):
    return f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


@pytest.mark.parametrize("n", range(1, 11))
def test_criterion(n, record_property):
    with mp.workdps(30):
        ok, detail = CRITERIA[n - 1]()
    text = line(n, ok, detail)
    record_property("acceptance", text)
    print(text)
    assert ok, text


if __name__ == "__main__":
    results = []
    for n, fn in enumerate(CRITERIA, 1):
        with mp.workdps(30):
            ok, detail = fn()
        results.append(ok)
        print(line(n, ok, detail), flush=True)
    sys.exit(0 if all(results) else 1)
