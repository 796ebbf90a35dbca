"""Catalogue and evaluation of the large-|x| asymptotic series.

Every expansion is a sum of at most two components.  A component is

    scale * pi**pi_power * base**prefactor_power * K * sum_n coeff(n) * u**n

where ``base`` is ``x`` or ``-x``, ``u`` is ``1/zeta`` or ``base**-3`` and
``K`` is the kernel (an exponential, a shifted trig pair, a doubled-angle
trig pair or 1).  For trig pairs even-index terms use ``kernel`` and
odd-index terms ``odd_kernel``.  Coefficients are exact fractions; floats
appear only in :func:`evaluate`.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple

from mpmath import mp

from . import coefficients as co
from .oracle import FunctionId, ai_and_derivative, integral_power_ai

MIN_ABS_X = 2


class Direction(str, enum.Enum):
    PLUS = "+inf"
    MINUS = "-inf"

    @classmethod
    def parse(cls, value) -> "Direction":
        if isinstance(value, Direction):
            return value
        text = str(value).strip().lower()
        if text in ("+inf", "+", "plus", "inf", "+infinity"):
            return cls.PLUS
        if text in ("-inf", "-", "minus", "-infinity"):
            return cls.MINUS
        raise ValueError(f"unknown direction {value!r}")


class Kernel(str, enum.Enum):
    ExpPlus = "ExpPlus"
    ExpMinus = "ExpMinus"
    CosShifted = "CosShifted"
    SinShifted = "SinShifted"
    Sin2Zeta = "Sin2Zeta"
    Cos2Zeta = "Cos2Zeta"
    PurePower = "PurePower"


class ZetaDef(str, enum.Enum):
    TWO_THIRDS_X = "(2/3)x^(3/2)"
    TWO_THIRDS_NEG_X = "(2/3)(-x)^(3/2)"
    # the same letter is used for half of this in the integral bookkeeping
    ONE_THIRD_NEG_V = "(1/3)(-v)^(3/2)"

    def at(self, x):
        if self is ZetaDef.TWO_THIRDS_X:
            return mp.mpf(2) / 3 * x ** mp.mpf(1.5)
        if self is ZetaDef.TWO_THIRDS_NEG_X:
            return mp.mpf(2) / 3 * (-x) ** mp.mpf(1.5)
        return (-x) ** mp.mpf(1.5) / 3


class Variable(str, enum.Enum):
    INVERSE_ZETA = "inverse_zeta"
    INVERSE_X_CUBED = "inverse_x_cubed"


class NotInCatalogError(KeyError):
    pass


class DomainWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SeriesComponent:
    kernel: Kernel
    coefficient: Callable[[int], Fraction]
    variable: Variable
    prefactor_power: Fraction
    base_sign: int = 1
    scale: Fraction = Fraction(1)
    pi_power: Fraction = Fraction(0)
    zeta_def: ZetaDef | None = None
    odd_kernel: Kernel | None = None
    sequence: str = ""
    sign_pattern: str = "+"

    def kernel_for(self, n: int) -> Kernel:
        if self.odd_kernel is not None and n % 2:
            return self.odd_kernel
        return self.kernel


@dataclass(frozen=True)
class AsymptoticExpansion:
    function_id: FunctionId
    direction: Direction
    components: tuple[SeriesComponent, ...]
    validity: str
    constant_pi: Fraction = Fraction(0)  # additive constant, in units of pi
    label: str = ""

    def __post_init__(self):
        if len(self.components) not in (1, 2):
            raise ValueError("an expansion has one or two components")


@dataclass
class ValueWithError:
    value: object
    truncation_index: int
    error_estimate: object
    component_indices: tuple[int, ...] = ()
    component_errors: tuple = ()

    def __float__(self):
        return float(self.value)


class LeadingTerm(NamedTuple):
    power: Fraction
    kernel: Kernel
    coefficient: Fraction
    pi_power: Fraction


# -- coefficient patterns -----------------------------------------------------

def _alternating(seq):
    return lambda n: (-1) ** n * seq(n)


def _pairs(seq, even_sign: int = 1, odd_sign: int = 1):
    """(-1)**(n//2) * seq(n), with an extra sign on even or odd members."""
    return lambda n: (-1) ** (n // 2) * (odd_sign if n % 2 else even_sign) * seq(n)


def _negated(seq):
    return lambda n: -seq(n)


def _w2_coefficient(n: int) -> Fraction:
    # g_n multiplies (-x)**(-3n/2) = (2/3 / zeta)**n
    return co.coeff_g(n) * Fraction(2, 3) ** n


F = Fraction
_SQRT_PI = F(1, 2)


def _exp_component(kernel, coeff, power, scale, seq, pattern):
    return SeriesComponent(kernel, coeff, Variable.INVERSE_ZETA, F(power), 1, F(scale), _SQRT_PI,
                           ZetaDef.TWO_THIRDS_X, sequence=seq, sign_pattern=pattern)


def _power_component(coeff, power, seq, pattern="+", base_sign=1, scale=1, pi_power=0):
    return SeriesComponent(Kernel.PurePower, coeff, Variable.INVERSE_X_CUBED, F(power), base_sign,
                           F(scale), F(pi_power), None, sequence=seq, sign_pattern=pattern)


def _pair_component(even_kernel, odd_kernel, coeff, power, seq, scale=1):
    return SeriesComponent(even_kernel, coeff, Variable.INVERSE_ZETA, F(power), -1, F(scale), _SQRT_PI,
                           ZetaDef.TWO_THIRDS_NEG_X, odd_kernel=odd_kernel, sequence=seq,
                           sign_pattern="alternating-pairs")


_P = co.power_series_coeff
_PD = co.power_series_deriv_coeff
_P_NAME = "(3n)!/(3^n n!)"
_PD_NAME = "(3n+1)!/(3^n n!)"

_PLUS, _MINUS = Direction.PLUS, Direction.MINUS
_K = Kernel

_ENTRIES = [
    AsymptoticExpansion(FunctionId.Hi, _MINUS, (
        _power_component(_negated(_P), -1, _P_NAME),
    ), "|ph(-z)| < 2pi/3", label="Hi, x -> -inf"),
    AsymptoticExpansion(FunctionId.Hi, _PLUS, (
        _exp_component(_K.ExpPlus, co.coeff_c, F(-1, 4), 1, "c", "+"),
        _power_component(_negated(_P), -1, _P_NAME),
    ), "x real", label="Hi, x -> +inf"),
    AsymptoticExpansion(FunctionId.Bi, _PLUS, (
        _exp_component(_K.ExpPlus, co.coeff_c, F(-1, 4), 1, "c", "+"),
    ), "x real", label="Bi, x -> +inf"),
    AsymptoticExpansion(FunctionId.Gi, _PLUS, (
        _power_component(_P, -1, _P_NAME),
    ), "x real", label="Gi, x -> +inf"),
    AsymptoticExpansion(FunctionId.Ai, _PLUS, (
        _exp_component(_K.ExpMinus, _alternating(co.coeff_c), F(-1, 4), F(1, 2), "c", "(-1)^n"),
    ), "|ph z| < pi", label="Ai, x -> +inf"),
    AsymptoticExpansion(FunctionId.Ai1, _PLUS, (
        _exp_component(_K.ExpMinus, _alternating(co.coeff_a), F(-3, 4), F(1, 2), "a", "(-1)^n"),
    ), "x real", label="Ai1, x -> +inf"),
    AsymptoticExpansion(FunctionId.HiPrime, _PLUS, (
        _exp_component(_K.ExpPlus, co.coeff_d, F(1, 4), 1, "d", "+"),
        _power_component(_PD, -2, _PD_NAME),
    ), "x real", label="Hi', x -> +inf"),
    AsymptoticExpansion(FunctionId.AiPrime, _PLUS, (
        _exp_component(_K.ExpMinus, _alternating(co.coeff_d), F(1, 4), F(-1, 2), "d", "(-1)^n"),
    ), "|ph z| < pi", label="Ai', x -> +inf"),
    AsymptoticExpansion(FunctionId.GiPrime, _PLUS, (
        _power_component(_negated(_PD), -2, _PD_NAME),
    ), "x real", label="Gi', x -> +inf"),
    AsymptoticExpansion(FunctionId.HiPrime, _MINUS, (
        _power_component(_PD, -2, _PD_NAME),
    ), "x real", label="Hi', x -> -inf"),
    AsymptoticExpansion(FunctionId.Ai1, _MINUS, (
        _pair_component(_K.CosShifted, _K.SinShifted, _pairs(co.coeff_a), F(-3, 4), "a", scale=-1),
    ), "x real", constant_pi=F(1), label="Ai1, x -> -inf"),
    AsymptoticExpansion(FunctionId.Gi, _MINUS, (
        _pair_component(_K.CosShifted, _K.SinShifted, _pairs(co.coeff_c), F(-1, 4), "c"),
        _power_component(_P, -1, _P_NAME),
    ), "x real", label="Gi, x -> -inf"),
    AsymptoticExpansion(FunctionId.GiPrime, _MINUS, (
        _pair_component(_K.SinShifted, _K.CosShifted, _pairs(co.coeff_d, odd_sign=-1), F(1, 4), "d"),
        _power_component(_negated(_PD), -2, _PD_NAME),
    ), "x real", label="Gi', x -> -inf"),
    AsymptoticExpansion(FunctionId.Ai, _MINUS, (
        _pair_component(_K.SinShifted, _K.CosShifted, _pairs(co.coeff_c, odd_sign=-1), F(-1, 4), "c"),
    ), "x real", label="Ai, x -> -inf"),
    AsymptoticExpansion(FunctionId.Bi, _MINUS, (
        _pair_component(_K.CosShifted, _K.SinShifted, _pairs(co.coeff_c), F(-1, 4), "c"),
    ), "x real", label="Bi, x -> -inf"),
    AsymptoticExpansion(FunctionId.W1, _MINUS, (
        _power_component(co.coeff_e, F(-1, 2), "e", "(-1)^n", base_sign=-1, scale=F(1, 2), pi_power=1),
    ), "x real", label="w1, x -> -inf"),
    AsymptoticExpansion(FunctionId.W2, _MINUS, (
        SeriesComponent(_K.Sin2Zeta, _w2_coefficient, Variable.INVERSE_ZETA, F(-1, 2), -1, F(1, 2), F(1),
                        ZetaDef.TWO_THIRDS_NEG_X, odd_kernel=_K.Cos2Zeta, sequence="g",
                        sign_pattern="+"),
    ), "x real", label="w2, x -> -inf"),
]

CATALOG: dict[tuple[FunctionId, Direction], AsymptoticExpansion] = {
    (e.function_id, e.direction): e for e in _ENTRIES
}


def catalog(f, direction) -> AsymptoticExpansion:
    f = FunctionId.parse(f) if isinstance(f, str) else f
    direction = Direction.parse(direction)
    try:
        return CATALOG[(f, direction)]
    except KeyError:
        raise NotInCatalogError(f"no catalogued expansion for {f.value} as x -> {direction.value}") from None


# -- evaluation ---------------------------------------------------------------

def working_digits(x, digits: int = 30) -> int:
    """Precision that resolves e**-zeta corrections next to e**zeta terms."""
    zeta = 2 / 3 * abs(float(x)) ** 1.5
    return digits + int(2 * zeta / math.log(10)) + 15


def _mpq(q: Fraction):
    return mp.mpf(q.numerator) / q.denominator


def _kernel_value(kernel: Kernel, zeta):
    if kernel is Kernel.ExpPlus:
        return mp.exp(zeta)
    if kernel is Kernel.ExpMinus:
        return mp.exp(-zeta)
    if kernel is Kernel.CosShifted:
        return mp.cos(zeta + mp.pi / 4)
    if kernel is Kernel.SinShifted:
        return mp.sin(zeta + mp.pi / 4)
    if kernel is Kernel.Sin2Zeta:
        return mp.sin(2 * zeta)
    if kernel is Kernel.Cos2Zeta:
        return mp.cos(2 * zeta)
    return mp.one


def _component_setup(c: SeriesComponent, x):
    base = x if c.base_sign > 0 else -x
    zeta = c.zeta_def.at(x) if c.zeta_def is not None else None
    if c.variable is Variable.INVERSE_ZETA:
        u = 1 / zeta
    else:
        u = base ** -3
    prefactor = _mpq(c.scale) * mp.pi ** _mpq(c.pi_power)
    if c.prefactor_power.denominator == 1:
        prefactor *= base ** int(c.prefactor_power)
    else:
        prefactor *= base ** _mpq(c.prefactor_power)
    if c.kernel in (Kernel.ExpPlus, Kernel.ExpMinus):
        prefactor *= _kernel_value(c.kernel, zeta)
    return prefactor, u, zeta


def _envelopes(c: SeriesComponent, u, limit: int):
    """Magnitudes |coeff(n) u**n| for n < limit, stopping well past the minimum."""
    out = []
    best = None
    absu = abs(u)
    power = mp.one
    for n in range(limit):
        coef = c.coefficient(n)
        mag = abs(_mpq(coef)) * power
        out.append(mag)
        if best is None or mag < out[best]:
            best = n
        elif n > best + 4 and mag > 4 * out[best]:
            break
        power *= absu
    return out, best


def _sum_component(c: SeriesComponent, x, truncation):
    prefactor, u, zeta = _component_setup(c, x)
    if truncation == "optimal":
        env, best = _envelopes(c, u, co.MAX_INDEX)
        keep = best
    else:
        keep = int(truncation)
        if keep < 0:
            raise ValueError("fixed truncation must be nonnegative")
        env, _ = _envelopes(c, u, keep + 1)
        while len(env) <= keep:  # envelope scan may stop early
            n = len(env)
            coef = c.coefficient(n)
            env.append(abs(_mpq(coef)) * abs(u) ** n)
    trig = c.kernel not in (Kernel.ExpPlus, Kernel.ExpMinus, Kernel.PurePower)
    if trig:
        even, odd = _kernel_value(c.kernel, zeta), _kernel_value(c.odd_kernel or c.kernel, zeta)
    total = mp.zero
    power = mp.one
    for n in range(keep):
        coef = c.coefficient(n)
        term = _mpq(coef) * power
        if trig:
            term *= odd if n % 2 else even
        total += term
        power *= u
    error = abs(prefactor) * env[keep]
    return prefactor * total, keep, error


def evaluate(e: AsymptoticExpansion, x, truncation="optimal", digits: int = 30) -> ValueWithError:
    """Sum ``e`` at real ``x`` with optimal or fixed (number of kept terms) truncation.

    Each component is truncated on its own; the error estimate is the sum of
    the first omitted terms (trig factors replaced by 1).
    """
    xf = float(x)
    if (xf > 0) != (e.direction is Direction.PLUS) or xf == 0:
        raise ValueError(f"x={x} lies on the wrong side for an expansion at {e.direction.value}")
    if abs(xf) < MIN_ABS_X:
        warnings.warn(f"|x| = {abs(xf)} is below the useful range {MIN_ABS_X}", DomainWarning, stacklevel=2)
    with mp.workdps(working_digits(x, digits)):
        xm = mp.mpf(x)
        value = mp.pi * _mpq(e.constant_pi)
        error = mp.zero
        indices, errors = [], []
        for c in e.components:
            part, keep, err = _sum_component(c, xm, truncation)
            value += part
            error += err
            indices.append(keep)
            errors.append(err)
        return ValueWithError(+value, indices[0], +error, tuple(indices), tuple(errors))


def evaluate_function(f, x, truncation="optimal", digits: int = 30) -> ValueWithError:
    direction = Direction.PLUS if float(x) > 0 else Direction.MINUS
    return evaluate(catalog(f, direction), x, truncation, digits)


def leading_term_exponent(f, direction) -> LeadingTerm:
    """Power of x (or -x), kernel and coefficient of the n = 0 term of the first component.

    Pure-power-only expansions report their single series; mixed ones
    report the component listed first (the dominant one).
    """
    c = catalog(f, direction).components[0]
    return LeadingTerm(c.prefactor_power, c.kernel, c.scale * c.coefficient(0), c.pi_power)


def power_leading_term(f, direction) -> LeadingTerm | None:
    """Leading term of the pure-power component, if the expansion has one."""
    for c in catalog(f, direction).components:
        if c.kernel is Kernel.PurePower and c.zeta_def is None and c.base_sign == 1:
            return LeadingTerm(c.prefactor_power, c.kernel, c.scale * c.coefficient(0), c.pi_power)
    return None


# -- exact remainder forms ----------------------------------------------------

@dataclass
class ExactRemainder:
    constant: object
    terms: list = field(default_factory=list)
    remainder: object = 0

    @property
    def total(self):
        return self.constant + mp.fsum(self.terms) + self.remainder


def ai1_exact_remainder(v, n: int, digits: int = 20) -> ExactRemainder:
    """Ai1(v) as n+1 integration-by-parts brackets plus the leftover integral.

    For v < 0 the leftover is subtracted (integration runs over (-inf, v]).
    """
    if v == 0:
        raise ValueError("v must be nonzero")
    if n < 0:
        raise ValueError("n must be nonnegative")
    with mp.workdps(digits + 10):
        v = mp.mpf(v)
        ai, aip = ai_and_derivative(v, digits + 10)
        terms = []
        for k in range(n + 1):
            a = _mpq(co.power_series_coeff(k))
            b = _mpq(co.power_series_deriv_coeff(k))
            terms.append(-(a * aip / v ** (3 * k + 1) + b * ai / v ** (3 * k + 2)))
        weight = mp.mpf(math.factorial(3 * n + 2)) / co.triple_factorial(3 * n)
        tail = weight * integral_power_ai(3 * n + 3, v, digits)
        if v > 0:
            return ExactRemainder(mp.zero, terms, tail)
        return ExactRemainder(+mp.pi, terms, -tail)


def integral_power_ai_remainder(v, n: int, digits: int = 20) -> ExactRemainder:
    """2 * integral_{-inf}^v x**-3 Ai dx split into two finite sums and a remainder."""
    if not v < -1:
        raise ValueError("v must be below -1")
    with mp.workdps(digits + 10):
        v = mp.mpf(v)
        ai, aip = ai_and_derivative(v, digits + 10)
        first = mp.zero
        second = mp.zero
        for s in range(n + 1):
            first += mp.mpf(math.factorial(3 * s + 2)) / co.triple_factorial(3 * s) / v ** (3 * s)
            second += mp.mpf(math.factorial(3 * s + 4)) / co.triple_factorial(3 * s + 3) / v ** (3 * s)
        terms = [aip / v**4 * first, ai / v**5 * second]
        weight = mp.mpf(math.factorial(3 * n + 5)) / co.triple_factorial(3 * n + 3)
        tail = weight * integral_power_ai(3 * n + 6, v, digits)
        return ExactRemainder(mp.zero, terms, tail)


def w_split(x, truncation="optimal", digits: int = 30) -> tuple[ValueWithError, ValueWithError]:
    """Nonoscillatory and oscillatory parts of Ai**2 for x <= -2."""
    if float(x) > -MIN_ABS_X:
        raise ValueError("w_split needs x <= -2")
    return (evaluate(catalog(FunctionId.W1, Direction.MINUS), x, truncation, digits),
            evaluate(catalog(FunctionId.W2, Direction.MINUS), x, truncation, digits))
