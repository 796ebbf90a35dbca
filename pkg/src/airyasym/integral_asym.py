"""Large negative v behaviour of integral_v^inf K(x) h(x, v) dx for K = Ai, Ai1, Ai'.

``h`` is given by its expansion about x = v in half-integer powers,

    h(x) = sum_{k >= -1} f_k * u**(k/2),   u = (x - v)/(-v),

held by :class:`HalfIntegerSeries`.  With rational ``f_k`` and ``v`` all
coefficient algebra (levels, closed forms, derivatives at x = 0) is exact;
floating point enters only when the special-function values are combined.

Two assemblies are provided.  ``route="resummed"`` (the default) sums the
non-oscillatory part as h^{(3k)}(0)/(3k)!!! and uses purely oscillatory
brackets built from the w2 series.  ``route="levels"`` keeps the level
values h_k(0) and the raw Airy products; the two must agree to the order
retained.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from mpmath import mp

from . import coefficients as co
from .expansions import Direction, catalog, evaluate
from .oracle import FunctionId, ai_and_derivative, integral_power_ai

HALF = Fraction(1, 2)


class InsufficientOrderError(ValueError):
    pass


class DivergenceWarning(UserWarning):
    pass


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(str(x))


def _mp(x):
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


def falling(a: Fraction, n: int) -> Fraction:
    out = Fraction(1)
    for i in range(n):
        out *= a - i
    return out


# -- the input series ---------------------------------------------------------

@dataclass
class HalfIntegerSeries:
    """h = sum_k f[k] * ((x - v)/(-v))**(k/2), k >= -1, plus its derivatives at x = 0.

    ``derivs`` maps j to h^{(j)}(0).  For a series built from a finite
    coefficient list they follow by term-wise differentiation; for the
    iterated functions h_k they come from the level recursion, because the
    expansions of h_k about x = v only just reach x = 0.
    """

    v: Fraction
    f: dict[int, Fraction]
    derivs: dict[int, Fraction] = field(default_factory=dict)
    exact_derivatives: bool = True

    def __post_init__(self):
        self.v = _frac(self.v)
        if self.v >= 0:
            raise ValueError("v must be negative")
        self.f = {int(k): _frac(c) for k, c in self.f.items() if _frac(c) != 0}
        if any(k < -1 for k in self.f):
            raise ValueError("indices start at -1")

    @classmethod
    def from_coefficients(cls, v, f: Mapping) -> "HalfIntegerSeries":
        return cls(_frac(v), dict(f))

    @classmethod
    def from_json(cls, text_or_obj, v) -> "HalfIntegerSeries":
        obj = json.loads(text_or_obj) if isinstance(text_or_obj, str) else text_or_obj
        return cls(_frac(v), {int(k): _frac(c) for k, c in obj["f"].items()})

    @property
    def order(self) -> int:
        return max(self.f, default=-1)

    def coefficient(self, k: int) -> Fraction:
        return self.f.get(k, Fraction(0))

    def derivative_at_zero(self, n: int) -> Fraction:
        """h^{(n)}(0)."""
        if n in self.derivs:
            return self.derivs[n]
        if not self.exact_derivatives:
            raise InsufficientOrderError(f"h^({n})(0) not available at this level")
        w = -self.v
        value = sum((c * falling(Fraction(k, 2), n) for k, c in self.f.items()), Fraction(0)) / w**n
        self.derivs[n] = value
        return value

    @property
    def h_at_0(self) -> Fraction:
        return self.derivative_at_zero(0)

    def __call__(self, y):
        """h at x = v + y."""
        u = mp.mpf(y) / _mp(-self.v)
        return mp.fsum(_mp(c) * u ** (mp.mpf(k) / 2) for k, c in self.f.items())

    def closed_form(self):
        """Callable of x - v for the quadrature oracle."""
        return self.__call__

    def convergence_check(self, tol: float = 1e-3) -> bool:
        """True when the last retained term at x = 0 is small next to the sum."""
        if not self.f:
            return True
        total = abs(_mp(sum(self.f.values(), Fraction(0))))
        last = abs(_mp(self.f[self.order]))
        return last <= tol * max(total, mp.mpf(1)) or len(self.f) <= 3


def transform_tilde(h: HalfIntegerSeries) -> HalfIntegerSeries:
    """Coefficients of (h(x) - h(0))/x in the same half-integer basis, through the order of h.

    The exact expansion does not terminate; zero entries of ``h.f`` above
    its last nonzero one can be set to extend it.
    """
    h0 = h.h_at_0
    v = h.v
    out: dict[int, Fraction] = {}
    top = h.order
    odd = even = Fraction(0)
    for k in range(0, top // 2 + 2):
        odd += h.coefficient(2 * k - 1)
        even += h.coefficient(2 * k)
        if 2 * k - 1 <= top:
            out[2 * k - 1] = odd / v
        if 2 * k <= top:
            out[2 * k] = (even - h0) / v
    if h.exact_derivatives:
        for j in range(3 * 8 + 3):
            h.derivative_at_zero(j)
    derivs = {j - 1: d / j for j, d in h.derivs.items() if j >= 1}
    return HalfIntegerSeries(v, out, derivs, exact_derivatives=False)


def _next_derivatives(h: HalfIntegerSeries, f_m1: Fraction, f_1: Fraction, count: int) -> dict[int, Fraction]:
    """h_{k+1}^{(j)}(0) for j < count from h_k's derivatives and two coefficients."""
    v = h.v
    a = -Fraction(3, 4) * f_m1 / v**3
    b = (f_m1 + f_1) / (4 * v**3)
    out = {}
    for j in range(count):
        out[j] = (h.derivative_at_zero(j + 3) / (j + 3)
                  + (a * co.rising(Fraction(5, 2), j) + b * co.rising(Fraction(3, 2), j)) / v**j)
    return out


@dataclass
class Levels:
    """Per-level quantities needed by the assemblies, all exact."""

    v: Fraction
    odd: list[tuple[Fraction, Fraction]]  # (f_{k,-1}, f_{k,1})
    plus: list[tuple[Fraction, Fraction]]  # (f+_{k,0}, f+_{k,2})
    full_even: list[tuple[Fraction, Fraction]]  # (f_{k,0}, f_{k,2})
    h_values: list[Fraction]  # h_k(0)
    resummed: list[Fraction]  # h^{(3k)}(0)/(3k)!!!


def _plus_iterate(fe: dict[int, Fraction], v: Fraction) -> dict[int, Fraction]:
    """Even relation with the h(0) term dropped (it is carried by the Q part)."""
    top = max(fe, default=0)
    out = {}
    for m in range(0, (top - 4) // 2 + 1):
        s_even = sum((fe.get(2 * s, Fraction(0)) for s in range(m + 3)), Fraction(0))
        out[2 * m] = Fraction((m + 1) * (m + 2)) / v**3 * s_even
    return out


def build_levels(h: HalfIntegerSeries, levels: int) -> Levels:
    v = h.v
    need_order = 4 * levels + 2
    derivative_cap = 3 * levels + 3
    odd, plus, full, values, resummed = [], [], [], [], []
    current = HalfIntegerSeries(v, dict(h.f))
    for j in range(derivative_cap + 3 * levels + 3):
        current.derivative_at_zero(j)
    fe = {k: h.coefficient(k) for k in range(0, need_order + 1, 2)}
    padded = dict(current.f)
    for k in range(-1, need_order + 1):
        padded.setdefault(k, Fraction(0))
    current.f = padded
    for k in range(levels):
        odd.append((current.coefficient(-1), current.coefficient(1)))
        plus.append((fe.get(0, Fraction(0)), fe.get(2, Fraction(0))))
        full.append((current.coefficient(0), current.coefficient(2)))
        values.append(current.h_at_0)
        resummed.append(h.derivative_at_zero(3 * k) / co.triple_factorial(3 * k))
        if k + 1 < levels:
            current = iterate_h(current)
            fe = _plus_iterate(fe, v)
    return Levels(v, odd, plus, full, values, resummed)


def iterate_h(h: HalfIntegerSeries) -> HalfIntegerSeries:
    """The next level: coefficients from the two-term level relations, derivatives at 0 by recursion.

    Each level loses four orders of the coefficient list; missing entries
    of ``h`` count as zero.
    """
    v = h.v
    top = max(max(h.f, default=0), 3)
    h0 = h.h_at_0
    out: dict[int, Fraction] = {}
    for m in range(0, (top - 3) // 2 + 1):
        if 2 * m + 3 <= top:
            s_odd = sum((h.coefficient(2 * s - 1) for s in range(m + 3)), Fraction(0))
            out[2 * m - 1] = (m + HALF) * (m + Fraction(3, 2)) / v**3 * s_odd
        if 2 * m + 4 <= top:
            s_even = sum((h.coefficient(2 * s) for s in range(m + 3)), Fraction(0))
            out[2 * m] = Fraction((m + 1) * (m + 2)) / v**3 * (s_even - h0)
    if h.exact_derivatives:
        for j in range(3 * 8 + 3):
            h.derivative_at_zero(j)
    count = max(0, max(h.derivs) - 2)
    derivs = _next_derivatives(h, h.coefficient(-1), h.coefficient(1), count)
    nxt = HalfIntegerSeries(v, {}, derivs, exact_derivatives=False)
    nxt.f = out
    return nxt


def level_values_closed(h: HalfIntegerSeries, levels: Levels, k: int) -> Fraction:
    """h_k(0) from the original derivatives and the odd level coefficients."""
    if k == 0:
        return h.h_at_0
    v = h.v
    total = h.derivative_at_zero(3 * k) / co.triple_factorial(3 * k)
    for n in range(k):
        fm1, f1 = levels.odd[k - 1 - n]
        total += (-Fraction(3, 4) * fm1 * co.rising(Fraction(5, 2), 3 * n)
                  + (fm1 + f1) / 4 * co.rising(Fraction(3, 2), 3 * n)) / (co.triple_factorial(3 * n) * v ** (3 * n + 3))
    return total


def odd_coefficient_direct(k: int, m: int, h: HalfIntegerSeries) -> Fraction:
    """f_{k,2m-1} through the reversed nested sums R."""
    if k < 1:
        raise ValueError("k >= 1")
    v = h.v
    acc = sum((co.coeff_R(s, k, m) * h.coefficient(2 * s - 1) for s in range(m + 2 * k + 1)), Fraction(0))
    return (m + HALF) * (m + Fraction(3, 2)) / v ** (3 * k) * acc


def even_plus_direct(k: int, m: int, h: HalfIntegerSeries) -> Fraction:
    v = h.v
    acc = sum((co.coeff_T(s, k, m) * h.coefficient(2 * s) for s in range(m + 2 * k + 1)), Fraction(0))
    return Fraction((m + 1) * (m + 2)) / v ** (3 * k) * acc


def even_q_part(k: int, m: int, h_values: list[Fraction], v: Fraction) -> Fraction:
    """The part of f_{k,2m} that is linear in h_0(0), ..., h_{k-1}(0)."""
    return -sum((co.coeff_Q(m, s) * h_values[k - 1 - s] / v ** (3 * s) for s in range(k)), Fraction(0)) / v**3


def even_coefficient_direct(k: int, m: int, h: HalfIntegerSeries, h_values: list[Fraction] | None = None):
    """(f_{k,2m}, f+_{k,2m}): the full even coefficient and its f-only part."""
    if k < 1:
        raise ValueError("k >= 1")
    if h_values is None:
        h_values = build_levels(h, k).h_values
    plus = even_plus_direct(k, m, h)
    return even_q_part(k, m, h_values, h.v) + plus, plus


# -- special series -----------------------------------------------------------

def phi_a(v, a, N="optimal"):
    """sum_n (a)_{3n} / ((3n)!!! v**(3n)), truncated before its smallest term."""
    from .expansions import ValueWithError

    a = _frac(a)
    with mp.workdps(max(40, mp.dps + 10)):
        vm = _mp(_frac(v))
        terms = []
        best = 0
        limit = co.MAX_INDEX if N == "optimal" else int(N) + 1
        for n in range(limit):
            c = co.rising(a, 3 * n) / co.triple_factorial(3 * n)
            t = _mp(c) / vm ** (3 * n)
            terms.append(t)
            if N == "optimal":
                if abs(t) < abs(terms[best]):
                    best = n
                elif n > best + 4:
                    break
        keep = best if N == "optimal" else int(N)
        value = mp.fsum(terms[:keep])
        err = abs(terms[keep]) if keep < len(terms) else mp.zero
        return ValueWithError(value, keep, err)


class TrigSeries:
    """sum coeff * s**(-p) * {sin, cos}(2 zeta) with s = -x, zeta = (2/3) s**(3/2).

    Keys are (kind, p) with kind in {"sin", "cos"} and p a Fraction; values
    are exact.  ``pi_power`` tracks an overall pi**pi_power factor.
    """

    def __init__(self, terms=None, pi_power=0):
        self.terms: dict[tuple[str, Fraction], Fraction] = {}
        for key, c in (terms or {}).items():
            self._add(key, c)
        self.pi_power = pi_power

    def _add(self, key, c):
        if c:
            self.terms[key] = self.terms.get(key, Fraction(0)) + c
            if not self.terms[key]:
                del self.terms[key]

    @classmethod
    def w2(cls, n_terms: int) -> "TrigSeries":
        """The first ``n_terms`` terms of the oscillatory part of Ai**2 (times 1/pi)."""
        out = cls(pi_power=1)
        for m in range(n_terms):
            kind = "sin" if m % 2 == 0 else "cos"
            out._add((kind, Fraction(3 * m + 1, 2)), co.coeff_g(m) / 2)
        return out

    def derivative(self) -> "TrigSeries":
        out = TrigSeries(pi_power=self.pi_power)
        for (kind, p), c in self.terms.items():
            out._add((kind, p + 1), p * c)
            if kind == "sin":
                out._add(("cos", p - HALF), -2 * c)
            else:
                out._add(("sin", p - HALF), 2 * c)
        return out

    def times_power(self, q: Fraction) -> "TrigSeries":
        """Multiply by s**(-q)."""
        return TrigSeries({(k, p + q): c for (k, p), c in self.terms.items()}, self.pi_power)

    def scaled(self, c: Fraction, pi_shift: int = 0) -> "TrigSeries":
        return TrigSeries({key: c * val for key, val in self.terms.items()}, self.pi_power + pi_shift)

    def in_minus_v(self) -> "TrigSeries":
        """Substitute s = 2**(-2/3) (-v); the result has powers of (-v)."""
        out = TrigSeries(pi_power=self.pi_power)
        for (kind, p), c in self.terms.items():
            e = 2 * p / 3
            if e.denominator != 1:
                raise ValueError(f"power {p} does not give a rational factor")
            out._add((kind, p), c * Fraction(2) ** int(e))
        return out

    def coefficient(self, kind: str, p) -> Fraction:
        return self.terms.get((kind, _frac(p)), Fraction(0))

    def evaluate(self, s, zeta2=None):
        """Numerical value at s (zeta2 = 2 zeta may be supplied)."""
        s = mp.mpf(s)
        if zeta2 is None:
            zeta2 = 4 * s ** mp.mpf(1.5) / 3
        sn, cs = mp.sin(zeta2), mp.cos(zeta2)
        total = mp.fsum(_mp(c) * s ** (-_mp(p)) * (sn if k == "sin" else cs) for (k, p), c in self.terms.items())
        return total * mp.pi ** self.pi_power

    def envelope(self, s):
        s = mp.mpf(s)
        return mp.fsum(abs(_mp(c)) * s ** (-_mp(p)) for (k, p), c in self.terms.items()) * mp.pi ** self.pi_power


def _w2_terms_at(t) -> int:
    return evaluate(catalog(FunctionId.W2, Direction.MINUS), t).truncation_index


def bracket_series(which: int, n_terms: int) -> TrigSeries:
    """Oscillatory brackets as series in (-v) with trig arguments (2/3)(-v)**(3/2).

    which = 1: w2'(t) / (2 pi (-v)**(3/2)); which = 2: w2''(t) / (2 pi sqrt(-t)).
    """
    w = TrigSeries.w2(n_terms)
    if which == 1:
        d = w.derivative().in_minus_v()
        return d.times_power(Fraction(3, 2)).scaled(Fraction(1, 2), -1)
    if which == 2:
        d = w.derivative().derivative().times_power(HALF).in_minus_v()
        return d.scaled(Fraction(1, 2), -1)
    raise ValueError("which must be 1 or 2")


@dataclass
class BracketValue:
    value: object
    error: object
    terms: int


def bracket_oscillatory(which: int, v, n_terms=None) -> BracketValue:
    """Bracket value from the w2 series.

    The error is the first dropped w2 term plus a rounding floor at the
    working precision.
    """
    vm = _mp(_frac(v))
    t = vm * mp.mpf(2) ** (-mp.mpf(2) / 3)
    if n_terms is None:
        n_terms = _w2_terms_at(t)
    s = -vm
    zeta2 = 2 * s ** mp.mpf(1.5) / 3
    full = bracket_series(which, n_terms + 1)
    kept = bracket_series(which, n_terms)
    value = kept.evaluate(s, zeta2)
    dropped = TrigSeries({k: c - kept.terms.get(k, 0) for k, c in full.terms.items()}, full.pi_power)
    rounding = 10 * mp.eps * kept.envelope(s)
    return BracketValue(value, dropped.envelope(s) + rounding, n_terms)


def bracket_with_phi(which: int, v, digits: int = 30) -> BracketValue:
    """The same bracket from Airy products at t and the phi_a series.

    The error is the phi_a truncation plus a floor of 10**(2 - digits)
    relative to the larger part, for the oracle values.
    """
    vm = _mp(_frac(v))
    t = vm * mp.mpf(2) ** (-mp.mpf(2) / 3)
    ai, aip = ai_and_derivative(t, digits)
    if which == 1:
        ph = phi_a(v, Fraction(3, 2))
        product = ai * aip / (mp.pi * (-vm) ** mp.mpf(1.5))
        series = ph.value / (4 * vm**3)
        err = ph.error_estimate / abs(4 * vm**3)
    else:
        ph = phi_a(v, Fraction(5, 2))
        product = (t * ai * ai + aip * aip) / (mp.pi * mp.sqrt(-t))
        series = 3 * ph.value / (4 * vm**3)
        err = 3 * ph.error_estimate / abs(4 * vm**3)
    err += max(abs(product), abs(series)) * mp.mpf(10) ** (2 - digits)
    return BracketValue(product + series, err, ph.truncation_index)


# -- assembly -----------------------------------------------------------------

@dataclass
class IntegralExpansionResult:
    total: object
    nonoscillatory_sum: object
    oscillatory_value: object
    basis_breakdown: dict
    terms_used: dict
    level_contributions: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    route: str = "resummed"


def expand_integral(h: HalfIntegerSeries, v=None, K_outer: int = 4, route: str = "resummed",
                    digits: int = 30, stop_on_rise: bool = True) -> IntegralExpansionResult:
    """integral_v^inf Ai(x) h(x) dx summed over K_outer levels.

    The outer sum stops early if a level's contribution grows; a
    :class:`DivergenceWarning` is recorded in that case.
    """
    if v is not None and _frac(v) != h.v:
        raise ValueError("v disagrees with the series")
    v = h.v
    if v > -5:
        warnings.warn("v > -5: outside the range where the expansion is useful", DivergenceWarning, stacklevel=2)
    if K_outer < 1:
        raise ValueError("K_outer >= 1")
    lv = build_levels(h, K_outer)
    notes = []
    with mp.workdps(digits + 10):
        vm = _mp(v)
        ai_v, aip_v = ai_and_derivative(vm, digits + 5)
        contributions = []
        if route == "resummed":
            b1 = bracket_oscillatory(1, v)
            b2 = bracket_oscillatory(2, v)
            c_pi = c_b1 = c_b2 = c_aip = c_ai = mp.zero
            for k in range(K_outer):
                fm1, f1 = (_mp(x) for x in lv.odd[k])
                p0, p2 = (_mp(x) for x in lv.plus[k])
                r = _mp(lv.resummed[k])
                parts = (r, fm1 + f1, -fm1, -p0 / vm, -(p0 + p2) / vm**2)
                contrib = (mp.pi * (parts[0] + parts[1] * b1.value + parts[2] * b2.value)
                           + parts[3] * aip_v + parts[4] * ai_v)
                if stop_on_rise and len(contributions) >= 2 and abs(contrib) > abs(contributions[-1]) > 0:
                    notes.append(f"level {k} grew; outer sum stopped at {k} levels")
                    warnings.warn(notes[-1], DivergenceWarning, stacklevel=2)
                    break
                contributions.append(contrib)
                c_pi += parts[0]
                c_b1 += parts[1]
                c_b2 += parts[2]
                c_aip += parts[3]
                c_ai += parts[4]
            nonosc = mp.pi * c_pi
            osc = mp.pi * (c_b1 * b1.value + c_b2 * b2.value) + c_aip * aip_v + c_ai * ai_v
            breakdown = {"pi_term": c_pi, "w2p_bracket": c_b1, "w2pp_bracket": c_b2,
                         "Ai(v)": c_ai, "Ai'(v)": c_aip,
                         "w2p_bracket_value": b1.value, "w2pp_bracket_value": b2.value}
            used = {"levels": len(contributions), "w2_terms": b1.terms}
        elif route == "levels":
            t = vm * mp.mpf(2) ** (-mp.mpf(2) / 3)
            ai_t, aip_t = ai_and_derivative(t, digits + 5)
            tail = 2 * integral_power_ai(3, vm, digits)
            p1 = ai_t * aip_t / (-vm) ** mp.mpf(1.5)
            p2 = (t * ai_t**2 + aip_t**2) / mp.sqrt(-t)
            c_h = c_m1 = c_1 = c_0 = c_2 = mp.zero
            for k in range(K_outer):
                fm1, f1 = (_mp(x) for x in lv.odd[k])
                f0, f2 = (_mp(x) for x in lv.full_even[k])
                hk = _mp(lv.h_values[k])
                contrib = (hk * (mp.pi - tail) + fm1 * (p1 - p2) - f0 * (ai_v / vm**2 + aip_v / vm)
                           + f1 * p1 - f2 * ai_v / vm**2)
                if stop_on_rise and len(contributions) >= 2 and abs(contrib) > abs(contributions[-1]) > 0:
                    notes.append(f"level {k} grew; outer sum stopped at {k} levels")
                    warnings.warn(notes[-1], DivergenceWarning, stacklevel=2)
                    break
                contributions.append(contrib)
                c_h += hk
                c_m1 += fm1
                c_1 += f1
                c_0 += f0
                c_2 += f2
            nonosc = mp.pi * c_h
            osc = (-c_h * tail + c_m1 * (p1 - p2) - c_0 * (ai_v / vm**2 + aip_v / vm)
                   + c_1 * p1 - c_2 * ai_v / vm**2)
            breakdown = {"h_k(0)": c_h, "f_k,-1": c_m1, "f_k,1": c_1, "f_k,0": c_0, "f_k,2": c_2,
                         "Ai(v)": -c_0 / vm**2 - c_2 / vm**2, "Ai'(v)": -c_0 / vm}
            used = {"levels": len(contributions)}
        else:
            raise ValueError("route must be 'resummed' or 'levels'")
        total = nonosc + osc
    return IntegralExpansionResult(total, nonosc, osc, breakdown, used, contributions, notes, route)


def integrated_series(h: HalfIntegerSeries) -> HalfIntegerSeries:
    """g(x) = integral_v^x h, in the same basis."""
    w = -h.v
    return HalfIntegerSeries(h.v, {k + 2: c * w * Fraction(2, k + 2) for k, c in h.f.items()})


def expand_integral_ai1_kernel(h: HalfIntegerSeries, v=None, K: int = 4, **kw) -> IntegralExpansionResult:
    """integral_v^inf Ai1(x) h(x) dx = integral_v^inf Ai(x) g(x) dx."""
    return expand_integral(integrated_series(h), v, K, **kw)


def derivative_series(h: HalfIntegerSeries) -> HalfIntegerSeries:
    """phi'(x) where phi is h without its (x - v)**(-1/2) term."""
    w = -h.v
    return HalfIntegerSeries(h.v, {k - 2: c * Fraction(k, 2) / w for k, c in h.f.items() if k >= 1})


def expand_integral_aiprime_kernel(h: HalfIntegerSeries, v=None, K: int = 4, **kw) -> IntegralExpansionResult:
    """integral_v^inf Ai'(x) h(x) dx = 2 h_{-1} Ai(t)Ai'(t) - h_0 Ai(v) - integral Ai phi'."""
    vv = h.v
    digits = kw.get("digits", 30)
    inner = expand_integral(derivative_series(h), v, K, **kw)
    with mp.workdps(digits + 10):
        vm = _mp(vv)
        t = vm * mp.mpf(2) ** (-mp.mpf(2) / 3)
        ai_t, aip_t = ai_and_derivative(t, digits + 5)
        ai_v, _ = ai_and_derivative(vm, digits + 5)
        h_m1 = _mp(h.coefficient(-1)) * mp.sqrt(-vm)
        h_0 = _mp(h.coefficient(0))
        head = 2 * h_m1 * ai_t * aip_t - h_0 * ai_v
        total = head - inner.total
        n_terms = inner.terms_used.get("levels", K)
        nonosc = -mp.pi * mp.fsum(_mp(h.derivative_at_zero(3 * n + 1)) / co.triple_factorial(3 * n)
                                  for n in range(n_terms))
        breakdown = dict(inner.basis_breakdown)
        breakdown["2h_-1 Ai(t)Ai'(t)"] = 2 * h_m1 * ai_t * aip_t
        breakdown["-h_0 Ai(v)"] = -h_0 * ai_v
        return IntegralExpansionResult(total, nonosc, total - nonosc, breakdown, inner.terms_used,
                                       inner.level_contributions, inner.warnings, inner.route)


def w1_prime_coefficient(n: int) -> Fraction:
    """Coefficient of pi * (-v)**(-3n-3/2) in w1'(t), t = 2**(-2/3) v, from the e_n series."""
    return co.coeff_e(n) * (3 * n + HALF) * Fraction(2) ** (2 * n + 1) / 2


def cancellation_coefficient(n: int) -> Fraction:
    """(-1)**n (6n+1)!! / ((3n)!!! 2**(3n+1)): same power of (-v), from phi^{(3n+1)}(0)."""
    return Fraction((-1) ** n * co.double_factorial(6 * n + 1), co.triple_factorial(3 * n) * 2 ** (3 * n + 1))


def aiprime_cancellation(h: HalfIntegerSeries, n_terms: int = 8):
    """(h_{-1} w1'(t), the h_{-1} sum in the phi' non-oscillatory part, residual bound).

    The two are equal term by term; numerically their difference is limited
    by the first omitted term.
    """
    vm = _mp(h.v)
    h_m1 = _mp(h.coefficient(-1)) * mp.sqrt(-vm)
    a = mp.pi * h_m1 * mp.fsum(_mp(w1_prime_coefficient(n)) * (-vm) ** (-3 * n - mp.mpf(1.5)) for n in range(n_terms))
    b = mp.pi * h_m1 * mp.fsum(_mp(cancellation_coefficient(n)) * (-vm) ** (-3 * n - mp.mpf(1.5)) for n in range(n_terms))
    bound = abs(mp.pi * h_m1 * _mp(cancellation_coefficient(n_terms)) * (-vm) ** (-3 * n_terms - mp.mpf(1.5)))
    return a, b, bound
