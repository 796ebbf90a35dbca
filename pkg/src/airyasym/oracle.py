"""Convergent high-precision reference values.

All functions use the pi-scaled normalisation in which, for example,
``Ai(x) = integral_0^inf cos(x t + t**3/3) dt`` without the usual 1/pi.
Multiply by :data:`STANDARD_NORMALIZATION` to get handbook values.

Point values come from everywhere-convergent Maclaurin series of the
inhomogeneous Airy equation ``y'' - z y = r``; the working precision is
raised until the cancellation between series terms is covered.  Nothing in
this module uses an asymptotic expansion, so it can be used to test them.
"""

from __future__ import annotations

import enum
import math
from functools import lru_cache
from typing import Callable

import mpmath
from mpmath import mp

DEFAULT_DIGITS = 50
GUARD_DIGITS = 10
MAX_DIGITS = 200
MAX_ABS_Z = 100

with mpmath.workdps(MAX_DIGITS + 2 * GUARD_DIGITS):
    # multiply paper-normalised values by this to get the standard ones
    STANDARD_NORMALIZATION = 1 / mpmath.pi


class FunctionId(str, enum.Enum):
    Ai = "Ai"
    AiPrime = "AiPrime"
    Bi = "Bi"
    BiPrime = "BiPrime"
    Hi = "Hi"
    HiPrime = "HiPrime"
    Gi = "Gi"
    GiPrime = "GiPrime"
    Ai1 = "Ai1"
    AiSq = "AiSq"
    BiSq = "BiSq"
    W1 = "W1"
    W2 = "W2"
    W = "W"

    @classmethod
    def parse(cls, name: str) -> "FunctionId":
        key = name.replace("'", "Prime").replace("_", "").lower()
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ValueError(f"unknown function id {name!r}")


class PrecisionError(ArithmeticError):
    """The series did not reach the requested precision within its term cap."""


class QuadratureError(ArithmeticError):
    def __init__(self, message: str, estimate):
        super().__init__(f"{message} (achieved error estimate {mpmath.nstr(estimate, 5)})")
        self.estimate = estimate


def _check_domain(z, digits: int) -> None:
    if not 1 <= digits <= MAX_DIGITS:
        raise ValueError(f"digits must lie in [1, {MAX_DIGITS}], got {digits}")
    if abs(complex(z)) > MAX_ABS_Z:
        raise ValueError(f"|z| must not exceed {MAX_ABS_Z}")


# -- initial data -------------------------------------------------------------

_SOLUTIONS = ("airy_a", "airy_b", "scorer_h", "scorer_g")


def _initial_values(kind: str):
    """(y(0), y'(0), r) at the current precision for y'' - z y = r."""
    pi = mp.pi
    g13, g23 = mp.gamma(mp.mpf(1) / 3), mp.gamma(mp.mpf(2) / 3)
    ai0 = pi * mp.power(3, mp.mpf(-2) / 3) / g23
    ai1 = -pi * mp.power(3, mp.mpf(-1) / 3) / g13
    bi0 = pi * mp.power(3, mp.mpf(-1) / 6) / g23
    bi1 = pi * mp.power(3, mp.mpf(1) / 6) / g13
    hi0 = mp.power(3, mp.mpf(-2) / 3) * g13
    hi1 = mp.power(3, mp.mpf(-1) / 3) * g23
    if kind == "airy_a":
        return ai0, ai1, mp.zero
    if kind == "airy_b":
        return bi0, bi1, mp.zero
    if kind == "scorer_h":
        return hi0, hi1, mp.one
    if kind == "scorer_g":
        return bi0 - hi0, bi1 - hi1, -mp.one
    raise ValueError(kind)


def _series_pass(z, kind: str, wp: int, cap: int):
    """One pass of the Maclaurin sums at ``wp`` digits.

    Returns (value, derivative, integral_from_0, largest_term_magnitude).
    """
    with mp.workdps(wp):
        z = mp.mpmathify(z)
        y0, y1, r = _initial_values(kind)
        a = [y0, y1, r / 2]
        value = deriv = integ = mp.zero
        zpow_prev = mp.zero  # z**(n-1)
        zpow = mp.one
        tiny = mp.mpf(10) ** (-wp)
        biggest = mp.zero
        quiet = 0
        for n in range(cap):
            if n >= 3:
                a.append(a[n - 3] / (n * (n - 1)))
            t_val = a[n] * zpow
            t_der = n * a[n] * zpow_prev if n else mp.zero
            t_int = t_val * z / (n + 1)
            value += t_val
            deriv += t_der
            integ += t_int
            mag = max(abs(t_val), abs(t_der), abs(t_int))
            if mag > biggest:
                biggest = mag
            if n > 3 and mag <= tiny * biggest and n * n > abs(z) ** 3:
                quiet += 1
                if quiet >= 3:
                    return value, deriv, integ, biggest
            else:
                quiet = 0
            zpow_prev, zpow = zpow, zpow * z
    raise PrecisionError(f"Maclaurin series for {kind} did not settle within {cap} terms at z={z}")


def _term_cap(z, digits: int) -> int:
    # 10*digits alone is far too few once |z|**1.5 dominates the digit count
    return 10 * digits + int(8 * abs(complex(z)) ** 1.5) + 50


def _solve(z, kind: str, digits: int, want: str):
    """Value, derivative or integral of a basis solution to ``digits`` digits."""
    target = digits + GUARD_DIGITS
    growth = (2.0 / 3.0) * abs(complex(z)) ** 1.5 / math.log(10)
    wp = target + int(growth) + 5
    cap = _term_cap(z, digits)
    for _ in range(4):
        value, deriv, integ, biggest = _series_pass(z, kind, wp, cap)
        result = {"value": value, "deriv": deriv, "integral": integ}[want]
        with mp.workdps(wp):
            if result == 0:
                if z == 0:
                    return result
                lost = wp
            else:
                lost = float(mp.log10(biggest / abs(result))) if biggest else 0.0
        if wp - lost >= target:
            return result
        wp = int(target + lost + 10)
    raise PrecisionError(f"could not resolve {kind} at z={z} to {digits} digits")


def _basis(z, digits: int):
    return {
        "ai": lambda: _solve(z, "airy_a", digits, "value"),
        "aip": lambda: _solve(z, "airy_a", digits, "deriv"),
        "bi": lambda: _solve(z, "airy_b", digits, "value"),
        "bip": lambda: _solve(z, "airy_b", digits, "deriv"),
    }


def oracle_eval(f: FunctionId | str, z, digits: int = DEFAULT_DIGITS):
    """Reference value of ``f`` at real or complex ``z`` to ``digits`` digits.

    The result is an mpmath number rounded to ``digits`` significant digits
    (complex when ``z`` is complex or ``f`` is ``W``).
    """
    f = FunctionId.parse(f) if isinstance(f, str) else f
    _check_domain(z, digits)
    b = _basis(z, digits)
    if f is FunctionId.Ai:
        out = b["ai"]()
    elif f is FunctionId.AiPrime:
        out = b["aip"]()
    elif f is FunctionId.Bi:
        out = b["bi"]()
    elif f is FunctionId.BiPrime:
        out = b["bip"]()
    elif f is FunctionId.Hi:
        out = _solve(z, "scorer_h", digits, "value")
    elif f is FunctionId.HiPrime:
        out = _solve(z, "scorer_h", digits, "deriv")
    elif f is FunctionId.Gi:
        out = _solve(z, "scorer_g", digits, "value")
    elif f is FunctionId.GiPrime:
        out = _solve(z, "scorer_g", digits, "deriv")
    elif f is FunctionId.Ai1:
        with mp.workdps(digits + GUARD_DIGITS):
            # integral of Ai over [0, inf) is pi/3 in this normalisation
            out = mp.pi / 3 - _solve(z, "airy_a", digits + 5, "integral")
    else:
        with mp.workdps(digits + GUARD_DIGITS):
            ai, bi = b["ai"](), b["bi"]()
            if f is FunctionId.AiSq:
                out = ai * ai
            elif f is FunctionId.BiSq:
                out = bi * bi
            elif f is FunctionId.W1:
                out = (ai * ai + bi * bi) / 2
            elif f is FunctionId.W2:
                out = (ai * ai - bi * bi) / 2
            else:
                out = bi + 1j * ai
    with mp.workdps(digits):
        return +out


def oracle_wronskian(x, digits: int = DEFAULT_DIGITS):
    """Bi'(x)Ai(x) - Bi(x)Ai'(x); equals pi in this normalisation."""
    _check_domain(x, digits)
    b = _basis(x, digits + 5)
    with mp.workdps(digits + GUARD_DIGITS):
        w = b["bip"]() * b["ai"]() - b["bi"]() * b["aip"]()
    with mp.workdps(digits):
        return +w


def ai_and_derivative(x, digits: int = DEFAULT_DIGITS):
    b = _basis(x, digits)
    return b["ai"](), b["aip"]()


# -- quadrature ---------------------------------------------------------------

_LOW_ORDER = 15
_HIGH_ORDER = 30


@lru_cache(maxsize=None)
def _gauss_legendre(n: int, dps: int):
    with mp.workdps(dps):
        nodes, weights = mp.gauss_quadrature(n, "legendre")
        return tuple(nodes), tuple(weights)


class _LocalKernel:
    """Taylor polynomial of Ai (and its integral) about a panel centre.

    Coefficients follow from Ai'' = x Ai, so only Ai, Ai' (and Ai1 when
    needed) at the centre come from the Maclaurin oracle.
    """

    def __init__(self, kernel: FunctionId, center, radius, digits: int):
        self.kernel = kernel
        self.center = center
        dps = mp.dps
        ai, aip = ai_and_derivative(center, digits)
        b = [ai, aip, center * ai / 2]
        eps = mp.mpf(10) ** (-dps - 5)
        scale = abs(ai) + abs(aip) + eps
        r = max(radius, mp.mpf(10) ** -3)
        n = 2
        small = 0
        while n < 400:
            n += 1
            b.append((center * b[n - 2] + b[n - 3]) / (n * (n - 1)))
            if abs(b[n]) * r**n * (n + 1) < eps * scale:
                small += 1
                if small >= 3:
                    break
            else:
                small = 0
        self.b = b
        self.ai1_center = oracle_eval(FunctionId.Ai1, center, digits) if kernel is FunctionId.Ai1 else None

    def __call__(self, x):
        d = x - self.center
        b = self.b
        if self.kernel is FunctionId.Ai:
            acc = mp.zero
            for coef in reversed(b):
                acc = acc * d + coef
            return acc
        if self.kernel is FunctionId.AiPrime:
            acc = mp.zero
            for n in range(len(b) - 1, 0, -1):
                acc = acc * d + n * b[n]
            return acc
        acc = mp.zero
        for n in range(len(b) - 1, -1, -1):
            acc = acc * d + b[n] / (n + 1)
        return self.ai1_center - acc * d


def _gl(g: Callable, a, b, n: int):
    nodes, weights = _gauss_legendre(n, mp.dps)
    half, mid = (b - a) / 2, (b + a) / 2
    return half * mp.fsum(w * g(mid + half * t) for t, w in zip(nodes, weights))


def _adaptive(panels, build, tol_rel, max_depth: int = 12):
    """Adaptive bisection over ``panels`` with a low/high Gauss pair per panel.

    ``build(a, b)`` returns the integrand for panel [a, b] (it may prepare a
    local kernel expansion).  Returns (value, error_estimate).
    """
    work = []
    for a, b in panels:
        g = build(a, b)
        lo, hi = _gl(g, a, b, _LOW_ORDER), _gl(g, a, b, _HIGH_ORDER)
        work.append((a, b, hi, abs(hi - lo), 0))
    scale = mp.fsum(abs(w[2]) for w in work) or mp.one
    total_len = sum(abs(b - a) for a, b, *_ in work)
    done = []
    while work:
        a, b, val, err, depth = work.pop()
        allowed = tol_rel * scale * max(abs(b - a) / total_len, mp.mpf(10) ** -6)
        if err <= allowed or depth >= max_depth:
            done.append((val, err, err <= allowed))
            continue
        m = (a + b) / 2
        for lo_end, hi_end in ((a, m), (m, b)):
            g = build(lo_end, hi_end)
            lo, hi = _gl(g, lo_end, hi_end, _LOW_ORDER), _gl(g, lo_end, hi_end, _HIGH_ORDER)
            work.append((lo_end, hi_end, hi, abs(hi - lo), depth + 1))
    value = mp.fsum(v for v, _, _ in done)
    error = mp.fsum(e for _, e, _ in done)
    return value, error


def _split_oscillatory(a, b):
    """Breakpoints on [a, b] no longer than a quarter of the local Ai period."""
    points = [a]
    x = a
    while x < b:
        step = min(mp.one, mp.pi / (2 * mp.sqrt(abs(x)))) if x < 0 else mp.one
        x = min(x + step, b)
        points.append(x)
    return list(zip(points[:-1], points[1:]))


def _tail_end(start, h: Callable, v, digits: int):
    """Upper cut-off beyond which |Ai(x) h(x)| < 10**(-digits-5) (relative to O(1))."""
    threshold = mp.mpf(10) ** (-digits - 5)
    zeta = (digits + 5) * math.log(10)
    T = max(float(start) + 1, (1.5 * zeta) ** (2.0 / 3.0))
    for _ in range(50):
        ai = oracle_eval(FunctionId.Ai, T, 15)
        if abs(ai * h(mp.mpf(T) - v)) < threshold:
            return mp.mpf(T)
        T *= 1.15
    raise QuadratureError("integrand does not decay", mp.inf)


def oracle_integral(kernel: FunctionId | str, h: Callable, v, digits: int = 20):
    """integral_v^inf K(x) h(x - v) dx for K in {Ai, Ai', Ai1}.

    ``h`` is called with the distance ``y = x - v`` so that a
    ``y**-1/2`` endpoint singularity can be evaluated without cancellation.
    The head [v, v+1] always goes through x = v + u**2.
    """
    kernel = FunctionId.parse(kernel) if isinstance(kernel, str) else kernel
    if kernel not in (FunctionId.Ai, FunctionId.AiPrime, FunctionId.Ai1):
        raise ValueError("kernel must be Ai, AiPrime or Ai1")
    if v < -50:
        raise ValueError("v below the validated range (-50)")
    with mp.workdps(digits + 8):
        v = mp.mpf(v)
        tol = mp.mpf(10) ** (-digits)

        def build_head(u0, u1):
            x0, x1 = v + u0 * u0, v + u1 * u1
            k = _LocalKernel(kernel, (x0 + x1) / 2, (x1 - x0) / 2, digits + 5)
            return lambda u: k(v + u * u) * h(u * u) * 2 * u

        def build_body(a, b):
            k = _LocalKernel(kernel, (a + b) / 2, (b - a) / 2, digits + 5)
            return lambda x: k(x) * h(x - v)

        head, head_err = _adaptive([(mp.zero, mp.one)], build_head, tol)
        start = v + 1
        end = _tail_end(max(start, mp.zero), h, v, digits)
        body_panels = []
        if start < 0:
            body_panels += _split_oscillatory(start, mp.zero)
            body_panels += _split_oscillatory(mp.zero, end)
        else:
            body_panels += _split_oscillatory(start, end)
        body, body_err = _adaptive(body_panels, build_body, tol)
        value, error = head + body, head_err + body_err
        if error > 100 * tol * max(abs(value), mp.one):
            raise QuadratureError("tolerance not met", error)
    with mp.workdps(digits):
        return +value


def _power_tail(n: int, w, digits: int, scale=None):
    """integral_{-inf}^{w} x**-n Ai(x) dx for w << -1 by repeated integration by parts.

    Each step is exact; the loop stops once an explicit bound on the
    leftover integral, sup|Ai| * P * |w|**(1-n')/(n'-1), is below tolerance.
    Returns (value, bound) or None if the bound never gets small enough.
    """
    ai, aip = ai_and_derivative(w, digits + 5)
    sup_ai = 2 * mp.sqrt(mp.pi) * abs(w) ** mp.mpf(-0.25)
    tol = mp.mpf(10) ** (-digits - 3) * (mp.one if scale is None else scale)
    total = mp.zero
    prod = mp.one
    k = n
    best = None
    for _ in range(200):
        total += prod * (aip / w ** (k + 1) + (k + 1) * ai / w ** (k + 2))
        prod *= (k + 1) * (k + 2)
        k += 3
        bound = prod * sup_ai * abs(w) ** (1 - k) / (k - 1)
        if best is not None and bound > best[1]:
            break
        best = (total, bound)
        if bound < tol:
            return best
    return None


def integral_power_ai(n: int, v, digits: int = 20):
    """integral_v^inf x**-n Ai dx for v > 0, integral_{-inf}^v x**-n Ai dx for v < 0."""
    if v == 0:
        raise ValueError("v must be nonzero")
    with mp.workdps(digits + 8):
        v = mp.mpf(v)
        tol = mp.mpf(10) ** (-digits)

        def build(a, b):
            k = _LocalKernel(FunctionId.Ai, (a + b) / 2, (b - a) / 2, digits + 5)
            return lambda x: k(x) * x ** (-n)

        if v > 0:
            end = _tail_end(v, lambda y: (y + v) ** (-n), v, digits)
            value, error = _adaptive(_split_oscillatory(v, end), build, tol)
        else:
            X = max(mp.mpf(30), -v + 10)
            tail = None
            while X <= 100:
                body, error = _adaptive(_split_oscillatory(-X, v), build, tol)
                tail = _power_tail(n, -X, digits, max(abs(body), mp.mpf(10) ** (-2 * digits)))
                if tail is not None:
                    break
                X += 10
            if tail is None:
                raise QuadratureError("tail by parts did not converge", mp.inf)
            value = body + tail[0]
            error += tail[1]
        if error > 100 * tol * max(abs(value), mp.mpf(10) ** -30):
            raise QuadratureError("tolerance not met", error)
    with mp.workdps(digits):
        return +value


# -- contour integrals for w(z) ----------------------------------------------

# asymptotic directions of the three valleys of exp(-i(z t + t**3/3))
VALLEY_ANGLES = {1: math.pi / 2, 2: -5 * math.pi / 6, 3: -math.pi / 6}


def w_contour(i: int, j: int, z, digits: int = 30):
    """i * integral over C_ij of exp(-i(z t + t**3/3)) dt along straight valley rays.

    C_ij runs in from infinity in valley i, through 0, out to infinity in
    valley j.
    """
    with mp.workdps(digits + 15 + int(abs(complex(z)) ** 1.5)):
        z = mp.mpmathify(z)

        def ray(theta):
            e = mp.expj(theta)
            g = lambda r: mp.exp(-1j * (z * r * e + (r * e) ** 3 / 3)) * e
            rmax = 2 * mp.sqrt(abs(z)) + (3 * (digits + 20) * math.log(10)) ** (1.0 / 3.0) + 2
            pts = mp.linspace(0, rmax, 8)
            return mp.quad(g, pts)

        out = 1j * (ray(VALLEY_ANGLES[j]) - ray(VALLEY_ANGLES[i]))
    with mp.workdps(digits):
        return +out
