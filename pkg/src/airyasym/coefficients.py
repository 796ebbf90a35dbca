"""Exact rational coefficient sequences.

Every coefficient used by the expansions is produced here as a
:class:`fractions.Fraction`.  Gamma functions only ever appear as ratios
whose arguments differ by an integer, so they reduce to rising factorials
and nothing transcendental is materialised.
"""

from __future__ import annotations

import enum
import math
import threading
from fractions import Fraction
from typing import Callable, Hashable

MAX_INDEX = 512

Rational = Fraction


class SequenceId(str, enum.Enum):
    C = "C"
    D = "D"
    A = "A"
    E = "E"
    G = "G"
    Q = "Q"
    R = "R"
    T = "T"


class CoefficientTable:
    """Append-only memo table keyed by index tuples.

    Readers never lock; insertion is serialised so that two threads racing
    on the same key store the same value exactly once.
    """

    def __init__(self, sequence_id: SequenceId, max_index: int = MAX_INDEX):
        self.sequence_id = sequence_id
        self.max_index = max_index
        self._values: dict[tuple, Fraction] = {}
        self._lock = threading.Lock()

    def get(self, key: tuple, compute: Callable[[], Fraction]) -> Fraction:
        try:
            return self._values[key]
        except KeyError:
            pass
        if any(isinstance(k, int) and k > self.max_index for k in key):
            raise ValueError(
                f"index {key} exceeds the {self.sequence_id.value} table cap {self.max_index}"
            )
        value = compute()
        with self._lock:
            return self._values.setdefault(key, value)

    def __contains__(self, key: Hashable) -> bool:
        return key in self._values

    def __len__(self) -> int:
        return len(self._values)

    def snapshot(self) -> dict[tuple, Fraction]:
        return dict(self._values)

    def clear(self) -> None:
        with self._lock:
            self._values.clear()


TABLES: dict[SequenceId, CoefficientTable] = {s: CoefficientTable(s) for s in SequenceId}


def _check_index(n: int) -> None:
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"index must be a nonnegative integer, got {n!r}")


# -- elementary helpers -------------------------------------------------------


def double_factorial(n: int) -> int:
    """n!! with the convention (-1)!! = 0!! = 1."""
    if n < -1:
        raise ValueError("double factorial undefined below -1")
    result = 1
    while n > 1:
        result *= n
        n -= 2
    return result


def triple_factorial(n: int) -> int:
    """(3k)!!! = 3*6*...*3k = 3**k * k!, with 0!!! = 1."""
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"argument must be a nonnegative integer, got {n!r}")
    if n % 3:
        raise ValueError(f"triple factorial is only defined on multiples of 3, got {n}")
    k = n // 3
    return 3**k * math.factorial(k)


def rising(a: Fraction, n: int) -> Fraction:
    """Pochhammer symbol (a)_n = Gamma(a+n)/Gamma(a) for integer n >= 0."""
    a = Fraction(a)
    result = Fraction(1)
    for j in range(n):
        result *= a + j
    return result


def inv_factorial(n: int) -> Fraction:
    """1/n!, which vanishes for negative integers n."""
    if n < 0:
        return Fraction(0)
    return Fraction(1, math.factorial(n))


def _is_gamma_pole(x: Fraction) -> bool:
    return x.denominator == 1 and x <= 0


def gamma_ratio(x, y) -> Fraction:
    """Gamma(x)/Gamma(y) for rationals whose difference is an integer.

    A pole in the denominator makes the ratio vanish; a pole in the
    numerator alone is an error.
    """
    x, y = Fraction(x), Fraction(y)
    d = x - y
    if d.denominator != 1:
        raise ValueError(f"Gamma({x})/Gamma({y}) is not a rational ratio")
    if _is_gamma_pole(y):
        if _is_gamma_pole(x):
            # ratio of residues: Gamma(-a)/Gamma(-b) -> (-1)^(a-b) b!/a!
            a, b = int(-x), int(-y)
            return Fraction((-1) ** abs(a - b) * math.factorial(b), math.factorial(a))
        return Fraction(0)
    if _is_gamma_pole(x):
        raise ZeroDivisionError(f"Gamma({x}) is a pole")
    d = int(d)
    if d >= 0:
        return rising(y, d)
    return 1 / rising(x, -d)


# -- the sequences ------------------------------------------------------------


def coeff_c(n: int) -> Fraction:
    """Coefficient of zeta**-n in the Airy exponential series.

    Double-factorial form (6n-1)!!/(6**(3n) n! (2n-1)!!).
    """
    _check_index(n)

    def compute() -> Fraction:
        return Fraction(
            double_factorial(6 * n - 1),
            6 ** (3 * n) * math.factorial(n) * double_factorial(2 * n - 1),
        )

    return TABLES[SequenceId.C].get((n,), compute)


def coeff_c_gamma_form(n: int) -> Fraction:
    # Gamma(n+1/6)Gamma(n+5/6)/pi = 2 (1/6)_n (5/6)_n by reflection at 1/6.
    _check_index(n)
    return 2 * rising(Fraction(1, 6), n) * rising(Fraction(5, 6), n) / (2 ** (n + 1) * math.factorial(n))


def coeff_d(n: int) -> Fraction:
    _check_index(n)
    return TABLES[SequenceId.D].get(
        (n,), lambda: -Fraction(6 * n + 1, 6 * n - 1) * coeff_c(n)
    )


def coeff_a(n: int) -> Fraction:
    """Coefficients of the integrated Airy series, a_n = c_n + (n - 1/2) a_{n-1}."""
    _check_index(n)
    table = TABLES[SequenceId.A]
    value = table.get((0,), lambda: Fraction(1))
    for k in range(1, n + 1):
        value = table.get((k,), lambda k=k, prev=value: coeff_c(k) + (k - Fraction(1, 2)) * prev)
    return value


def coeff_a_sum_form(n: int) -> Fraction:
    """sum_k Gamma(n+1/2)/Gamma(k+1/2) c_k, the non-recursive route to a_n."""
    _check_index(n)
    half = Fraction(1, 2)
    return sum(gamma_ratio(n + half, k + half) * coeff_c(k) for k in range(n + 1))


def coeff_e(n: int) -> Fraction:
    """Coefficients of the nonoscillatory part of Ai**2 for negative argument."""
    _check_index(n)
    table = TABLES[SequenceId.E]
    value = table.get((0,), lambda: Fraction(1))
    for k in range(1, n + 1):
        value = table.get(
            (k,),
            lambda k=k, prev=value: -Fraction((6 * k - 1) * (6 * k - 3) * (6 * k - 5), 2**5 * 3 * k) * prev,
        )
    return value


def coeff_e_closed_form(n: int) -> Fraction:
    _check_index(n)
    return Fraction((-1) ** n * double_factorial(6 * n - 1), 2 ** (5 * n) * 3**n * math.factorial(n))


def coeff_g(n: int) -> Fraction:
    """Coefficients of the oscillatory part of Ai**2, from a two-term recurrence."""
    _check_index(n)
    table = TABLES[SequenceId.G]
    seeds = (Fraction(1), Fraction(-5, 24))
    if n < 2:
        return table.get((n,), lambda: seeds[n])
    g_prev2 = table.get((0,), lambda: seeds[0])
    g_prev = table.get((1,), lambda: seeds[1])
    for k in range(2, n + 1):
        def compute(k=k, a=g_prev2, b=g_prev):
            return (
                Fraction((3 * k - 5) * (3 * k - 3) * (3 * k - 1), 2**5 * 3 * k) * a
                + (-1) ** k * Fraction(27 * k * k - 27 * k + 5, 2**3 * 3 * k) * b
            )

        g_prev2, g_prev = g_prev, table.get((k,), compute)
    return g_prev


def power_series_coeff(n: int) -> Fraction:
    """(3n)!/(3**n n!), the late-term coefficients of the Scorer power series."""
    _check_index(n)
    return Fraction(math.factorial(3 * n), triple_factorial(3 * n))


def power_series_deriv_coeff(n: int) -> Fraction:
    _check_index(n)
    return Fraction(math.factorial(3 * n + 1), triple_factorial(3 * n))


def coeff_Q(m: int, s: int) -> Fraction:
    """(m+2+3s)!/((3s)!!! m!)."""
    _check_index(m)
    _check_index(s)
    return TABLES[SequenceId.Q].get(
        (m, s),
        lambda: Fraction(math.factorial(m + 2 + 3 * s), triple_factorial(3 * s) * math.factorial(m)),
    )


def _nested(weight: Callable[[int], Fraction], depth: int, upper: int, lower: Callable[[int], int]) -> Fraction:
    """sum_{n_depth=lower(depth)}^{upper} w(n_depth) * nested(depth-1, n_depth+2)."""
    if depth == 0:
        return Fraction(1)
    total = Fraction(0)
    for n in range(lower(depth), upper + 1):
        total += weight(n) * _nested(weight, depth - 1, n + 2, lower)
    return total


def coeff_Q_nested(m: int, s: int) -> Fraction:
    _check_index(m)
    _check_index(s)
    weight = lambda n: Fraction((n + 1) * (n + 2))
    return (m + 1) * (m + 2) * _nested(weight, s, m + 2, lambda i: 0)


def _lower_limit(s: int) -> Callable[[int], int]:
    return lambda i: max(0, s - 2 * i)


def coeff_R(s: int, k: int, m: int) -> Fraction:
    """Weight of f_{2s-1} in the level-k odd coefficient f_{k,2m-1}."""
    if k < 1:
        raise ValueError("k must be >= 1")
    _check_index(s)
    _check_index(m)
    if s > m + 2 * k:
        return Fraction(0)
    weight = lambda n: (n + Fraction(1, 2)) * (n + Fraction(3, 2))
    return TABLES[SequenceId.R].get(
        (s, k, m), lambda: _nested(weight, k - 1, m + 2, _lower_limit(s))
    )


def coeff_T(s: int, k: int, m: int) -> Fraction:
    """Weight of f_{2s} in the level-k even coefficient f+_{k,2m}."""
    if k < 1:
        raise ValueError("k must be >= 1")
    _check_index(s)
    _check_index(m)
    if s > m + 2 * k:
        return Fraction(0)
    weight = lambda n: Fraction((n + 1) * (n + 2))
    return TABLES[SequenceId.T].get(
        (s, k, m), lambda: _nested(weight, k - 1, m + 2, _lower_limit(s))
    )


# Closed forms for low levels, kept separate from the nested sums they check.


def _fact_ratio(a: int, b: int) -> Fraction:
    """a!/b! with 1/(negative)! = 0."""
    if a < 0:
        raise ValueError("numerator factorial of a negative integer")
    return math.factorial(a) * inv_factorial(b)


def coeff_T_closed(s: int, k: int, m: int) -> Fraction:
    if k == 1:
        return Fraction(1)
    if k == 2:
        return _fact_ratio(m + 5, m + 2) / 3 - _fact_ratio(s, s - 3) / 3
    if k == 3:
        return (
            _fact_ratio(m + 8, m + 2) / 18
            - _fact_ratio(s, s - 3) * _fact_ratio(m + 5, m + 2) / 9
            + _fact_ratio(s, s - 6) / 18
        )
    if k == 4:
        return (
            _fact_ratio(m + 11, m + 2) / 162
            - _fact_ratio(s, s - 3) * _fact_ratio(m + 8, m + 2) / 54
            + _fact_ratio(s, s - 6) * _fact_ratio(m + 5, m + 2) / 54
            - _fact_ratio(s, s - 9) / 162
        )
    raise NotImplementedError("closed forms are tabulated for k <= 4 only")


def _step(x: Fraction) -> int:
    return 1 if x > 0 else 0


def coeff_R_closed(s: int, k: int, m: int) -> Fraction:
    half = Fraction(1, 2)
    g = gamma_ratio
    if k == 1:
        return Fraction(1)
    if k == 2:
        return (
            g(m + Fraction(11, 2), m + Fraction(5, 2)) / 3
            + Fraction(1, 8)
            - _step(s - Fraction(5, 2)) * (g(s + half, s - Fraction(5, 2)) / 3 + Fraction(1, 8))
        )
    if k == 3:
        theta1 = _step(s - Fraction(5, 2))
        theta2 = _step(s - Fraction(9, 2))
        nine_ff = Fraction(double_factorial(9), 3 * 6 * 2**6)
        return (
            g(m + Fraction(17, 2), m + Fraction(5, 2)) / 18
            + g(m + Fraction(11, 2), m + Fraction(5, 2)) / 3
            * (Fraction(1, 8) - theta1 * (g(s + half, s - Fraction(5, 2)) / 3 + Fraction(1, 8)))
            + nine_ff
            + Fraction(1, 64)
            - theta1 * (g(s + half, s - Fraction(5, 2)) / 24 + Fraction(1, 64))
            + theta2
            * (
                g(s + half, s - Fraction(11, 2)) / 18
                + g(s + half, s - Fraction(5, 2)) / 24
                - nine_ff
            )
        )
    raise NotImplementedError("closed forms are tabulated for k <= 3 only")


def check_identity_21(s: int) -> bool:
    """True iff sum_{n=0}^{2s} (-1)^n c_n d_{2s-n} vanishes exactly."""
    if s < 1:
        raise ValueError("the convolution identity holds for s >= 1 only")
    return convolution_cd(s) == 0


def convolution_cd(s: int) -> Fraction:
    return sum((-1) ** n * coeff_c(n) * coeff_d(2 * s - n) for n in range(2 * s + 1))


def convolution_gamma_form(s: int) -> Fraction:
    """The same convolution with every Gamma product divided by Gamma(1/6)Gamma(5/6)."""
    sixth = Fraction(1, 6)
    total = Fraction(0)
    for k in range(2 * s + 1):
        term = (
            rising(sixth, k)
            * rising(5 * sixth, k)
            * gamma_ratio(2 * s - k - sixth, 5 * sixth)
            * gamma_ratio(2 * s - k + 7 * sixth, sixth)
        )
        total += (-1) ** k * term / (math.factorial(k) * math.factorial(2 * s - k))
    return total


def factorial_sum(m: int, p: int) -> Fraction:
    """sum_{n=0}^m (n+p)!/n! = (m+p+1)!/(m!(p+1)), both sides checked."""
    _check_index(m)
    _check_index(p)
    direct = sum(Fraction(math.factorial(n + p), math.factorial(n)) for n in range(m + 1))
    closed = Fraction(math.factorial(m + p + 1), math.factorial(m) * (p + 1))
    if direct != closed:
        raise ArithmeticError(f"factorial sum mismatch at m={m}, p={p}")
    return closed


def gamma_ratio_sum(n: int, a, b) -> Fraction:
    """sum_{k=0}^n Gamma(k+a)/Gamma(k+b) through its closed form."""
    _check_index(n)
    a, b = Fraction(a), Fraction(b)
    denom = a - b + 1
    if denom == 0:
        raise ZeroDivisionError("closed form needs a - b + 1 != 0")
    return gamma_ratio(n + a + 1, n + b) / denom - gamma_ratio(a, b - 1) / denom


def gamma_ratio_sum_direct(n: int, a, b) -> Fraction:
    return sum(gamma_ratio(k + Fraction(a), k + Fraction(b)) for k in range(n + 1))


_SEQUENCES: dict[SequenceId, Callable[..., Fraction]] = {
    SequenceId.C: coeff_c,
    SequenceId.D: coeff_d,
    SequenceId.A: coeff_a,
    SequenceId.E: coeff_e,
    SequenceId.G: coeff_g,
}


def sequence(seq: SequenceId | str) -> Callable[[int], Fraction]:
    """Single-index accessor for the one-parameter sequences."""
    seq = SequenceId(seq.upper() if isinstance(seq, str) else seq)
    try:
        return _SEQUENCES[seq]
    except KeyError:
        raise ValueError(f"sequence {seq.value} takes more than one index") from None


def emit_rows(seq: SequenceId | str, max_index: int, k: int = 2, m: int = 0):
    """Rows (index, numerator, denominator) for the CSV coefficient dump.

    Two-index Q rows are (m, s) with m running and s fixed at ``k``; R and T
    rows run over s at fixed level ``k`` and ``m``.
    """
    seq = SequenceId(seq.upper() if isinstance(seq, str) else seq)
    for i in range(max_index + 1):
        if seq is SequenceId.Q:
            value = coeff_Q(i, k)
        elif seq is SequenceId.R:
            value = coeff_R(i, k, m)
        elif seq is SequenceId.T:
            value = coeff_T(i, k, m)
        else:
            value = _SEQUENCES[seq](i)
        yield i, value.numerator, value.denominator
