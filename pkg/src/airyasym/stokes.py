"""Saddle-point geometry for w(z) = i * integral_C exp(-i(z t + t**3/3)) dt.

The exponent is f(t) = -i(z t + t**3/3) with saddles at t**2 = -z.  The
integration path runs from the valley at arg t = pi/2 (valley 1) to the one
at arg t = -pi/6 (valley 3); the third valley, arg t = -5pi/6, is valley 2.

Sector logic needs the phase of z as an extended real, so z is carried as a
:class:`PhasedComplex` and never reduced modulo 2pi behind the caller's back.
"""

from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass, field

from mpmath import mp

from . import coefficients as co
from .expansions import ValueWithError
from .oracle import oracle_eval

TWO_PI_3 = 2 * math.pi / 3
VALLEYS = {1: math.pi / 2, 2: -5 * math.pi / 6, 3: -math.pi / 6}
STOKES_TOL = 1e-9


class NearStokesWarning(UserWarning):
    """A traced contour ran into the other saddle."""


class DegenerateSaddleError(ValueError):
    """z = 0: the two saddles coalesce."""


class TracerError(ArithmeticError):
    pass


@dataclass(frozen=True)
class PhasedComplex:
    """Complex number with an explicit, unreduced phase."""

    modulus: float
    phase: float

    @classmethod
    def from_complex(cls, z) -> "PhasedComplex":
        z = complex(z)
        return cls(abs(z), cmath.phase(z))

    @classmethod
    def polar(cls, modulus, phase) -> "PhasedComplex":
        return cls(modulus, phase)

    def __complex__(self):
        return cmath.rect(float(self.modulus), float(self.phase))

    def rotate(self, angle: float) -> "PhasedComplex":
        return PhasedComplex(self.modulus, self.phase + angle)

    def power(self, a):
        """|z|**a * exp(i a phase) at the current mpmath precision."""
        a = mp.mpf(a)
        return mp.mpf(self.modulus) ** a * mp.expj(a * mp.mpf(self.phase))

    def mp_value(self):
        return mp.mpf(self.modulus) * mp.expj(mp.mpf(self.phase))


def _as_phased(z) -> PhasedComplex:
    return z if isinstance(z, PhasedComplex) else PhasedComplex.from_complex(z)


# -- saddles ------------------------------------------------------------------

@dataclass(frozen=True)
class SaddlePoint:
    index: int  # 1 or 2
    t: complex
    elevation: float  # Re f(t)
    descent_constant: float  # Im f(t), constant along its descent lines


def exponent(z: complex, t: complex) -> complex:
    return -1j * (z * t + t**3 / 3)


def exponent_prime(z: complex, t: complex) -> complex:
    return -1j * (z + t * t)


def saddle_points(z) -> tuple[SaddlePoint, SaddlePoint]:
    z = _as_phased(z)
    if z.modulus == 0:
        raise DegenerateSaddleError("saddles coalesce at z = 0")
    r = math.sqrt(z.modulus)
    scale = 2 / 3 * z.modulus**1.5
    out = []
    for index, sign in ((1, -1), (2, 1)):
        t = cmath.rect(r, (z.phase + sign * math.pi) / 2)
        # f(t1) = -(2/3)|z|^{3/2} e^{3i phase/2}, f(t2) = -f(t1)
        s = -sign
        out.append(SaddlePoint(index, t, -s * scale * math.cos(1.5 * z.phase),
                               -s * scale * math.sin(1.5 * z.phase)))
    return out[0], out[1]


def is_stokes_ray(phi: float, tol: float = STOKES_TOL) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return abs(math.sin(1.5 * phi)) < tol


def reduce_phase(phi: float, low: float) -> float:
    """phi shifted by a multiple of 2pi into [low, low + 2pi)."""
    k = math.floor((float(phi) - float(low)) / (2 * math.pi))
    return phi - 2 * k * mp.pi if k else phi


# -- contour tracing ----------------------------------------------------------

@dataclass
class ContourBranch:
    points: list[complex]
    end_angle: float
    valley: int | None
    captured: bool = False


@dataclass
class ContourPolyline:
    """Both descent branches from one saddle; ``points`` runs end to end through it."""

    origin_saddle: int
    constant: float
    branches: tuple[ContourBranch, ContourBranch]

    @property
    def points(self) -> list[complex]:
        a, b = self.branches
        return list(reversed(a.points)) + b.points[1:]

    @property
    def end_directions(self) -> tuple[float, float]:
        return self.branches[0].end_angle, self.branches[1].end_angle

    @property
    def valleys(self) -> frozenset:
        return frozenset(b.valley for b in self.branches)

    @property
    def captured(self) -> bool:
        return any(b.captured for b in self.branches)


def _nearest_valley(angle: float) -> tuple[int, float]:
    best, miss = None, math.inf
    for k, a in VALLEYS.items():
        d = abs(cmath.phase(cmath.rect(1, angle - a)))
        if d < miss:
            best, miss = k, d
    return best, miss


def _walk(z: complex, t0: complex, direction: complex, constant: float, step: float,
          r_max: float, drop: float, other: complex, capture: float) -> ContourBranch:
    scale = abs(z) ** 0.5
    re0 = exponent(z, t0).real

    def tangent(p):
        g = exponent_prime(z, p)
        return -g.conjugate() / abs(g)

    def correct(p):
        for _ in range(8):
            fp = exponent_prime(z, p)
            miss = exponent(z, p).imag - constant
            if abs(miss) < 1e-13 * max(1.0, abs(constant), abs(p) ** 3):
                return p
            p = p + 1j * tangent(p) * (miss / abs(fp))
        raise TracerError("corrector did not converge")

    t = correct(t0 + step * direction)
    pts = [t0, t]

    captured = False
    last_re = exponent(z, t).real
    while abs(t) < r_max and last_re > re0 - drop:
        if abs(t - other) < capture:
            captured = True
            warnings.warn("descent line reached the other saddle (Stokes ray)", NearStokesWarning,
                          stacklevel=3)
            break
        h = step * max(1.0, abs(t) / scale)
        for _ in range(30):
            mid = t + 0.5 * h * tangent(t)
            trial = t + h * tangent(mid)
            try:
                trial = correct(trial)
            except TracerError:
                h /= 2
                continue
            re = exponent(z, trial).real
            if re < last_re:
                break
            h /= 2
        else:
            raise TracerError("step halving failed")
        t, last_re = trial, re
        pts.append(t)
    valley, _ = _nearest_valley(cmath.phase(t))
    return ContourBranch(pts, cmath.phase(t), None if captured else valley, captured)


def trace_contour(z, s: SaddlePoint, step: float | None = None, max_len: float = math.inf,
                  radius_factor: float = 60.0) -> ContourPolyline:
    """Steepest-descent line through saddle ``s``, walked out in both directions.

    Stops at |t| = radius_factor * |z|**1/2 (the end angle is then within a
    few 1e-4 rad of its asymptote) or once Re f has dropped by ``max_len``.
    """
    zp = _as_phased(z)
    zc = complex(zp)
    scale = zp.modulus**0.5
    step = 1e-2 * scale if step is None else step
    second = -2j * s.t
    d = cmath.sqrt(-second.conjugate() / abs(second))
    other = -s.t
    capture = 1e-3 * scale
    branches = tuple(
        _walk(zc, s.t, sgn * d, s.descent_constant, step, radius_factor * scale, max_len, other, capture)
        for sgn in (1, -1)
    )
    return ContourPolyline(s.index, s.descent_constant, branches)


# -- decomposition ------------------------------------------------------------

class Representation(str, enum.Enum):
    W13 = "W13"
    W12_W23 = "W12+W23"
    HALF_SUM = "HalfSum"


@dataclass
class PathDecomposition:
    representation: Representation
    saddles_on_path: tuple[int, ...]
    dominant: int | None
    contours: dict = field(default_factory=dict)

    @property
    def saddle_count(self) -> int:
        return len(self.saddles_on_path)


def _dominant(z: PhasedComplex, on_path) -> int | None:
    s1, s2 = saddle_points(z)
    levels = {1: s1.elevation, 2: s2.elevation}
    if len(on_path) == 1:
        return on_path[0]
    if abs(levels[1] - levels[2]) < 1e-9 * max(1.0, abs(levels[1])):
        return None
    return max(on_path, key=levels.get)


def sector_rule(phi: float) -> Representation:
    """Representation read off from the phase alone."""
    reduced = reduce_phase(phi, -4 * math.pi / 3)
    if is_stokes_ray(phi):
        if abs(reduced + TWO_PI_3) < 1e-6:
            return Representation.W13  # no break at the lower pass
        return Representation.HALF_SUM
    return Representation.W13 if reduced < 0 else Representation.W12_W23


def path_decomposition(z, trace: bool = True) -> PathDecomposition:
    """Which saddle contours make up the path from valley 1 to valley 3.

    Off Stokes rays the answer comes from tracing both descent lines (or
    from :func:`sector_rule` when ``trace`` is false).  On a ray the rule is
    applied directly, because the traced lines run into each other there.
    """
    zp = _as_phased(z)
    s1, s2 = saddle_points(zp)
    if is_stokes_ray(zp.phase) or not trace:
        rep = sector_rule(zp.phase)
        if rep is Representation.W13:
            reduced = reduce_phase(zp.phase, -4 * math.pi / 3)
            # the upper saddle t2 in the reduced labelling; an odd 2pi shift swaps labels
            on = (1,) if round((zp.phase - reduced) / (2 * math.pi)) % 2 else (2,)
            return PathDecomposition(rep, on, _dominant(zp, on))
        return PathDecomposition(rep, (1, 2), _dominant(zp, (1, 2)))
    contours = {s.index: trace_contour(zp, s) for s in (s1, s2)}
    for idx, c in contours.items():
        if c.valleys == {1, 3}:
            return PathDecomposition(Representation.W13, (idx,), idx, contours)
    if any(c.valleys == {1, 2} for c in contours.values()) and any(
            c.valleys == {2, 3} for c in contours.values()):
        return PathDecomposition(Representation.W12_W23, (1, 2), _dominant(zp, (1, 2)), contours)
    raise TracerError(f"traced contours do not connect valleys 1 and 3: "
                      f"{[sorted(c.valleys - {None}) for c in contours.values()]}")


# -- sector assembly ----------------------------------------------------------

def _series(z: PhasedComplex, n, sign: int):
    """pi**1/2 / (2 z**1/4) e^{sign zeta} sum_k c_k (sign zeta)**-k and its first omitted term.

    sign = -1 gives S1 (Airy-type), +1 gives S2.
    """
    zeta = mp.mpf(2) / 3 * z.power(1.5)
    pre = mp.sqrt(mp.pi) / (2 * z.power(0.25)) * mp.exp(sign * zeta)
    u = 1 / (sign * zeta)
    if n == "optimal":
        n = optimal_terms(z.modulus)
    total, power = mp.zero, mp.one
    for k in range(n):
        c = co.coeff_c(k)
        total += mp.mpf(c.numerator) / c.denominator * power
        power *= u
    c = co.coeff_c(n)
    omitted = abs(pre) * mp.mpf(c.numerator) / c.denominator * abs(power)
    return pre * total, omitted, n


def optimal_terms(modulus: float) -> int:
    """Index of the smallest |c_k| zeta**-k, i.e. the number of terms kept."""
    with mp.workdps(30):
        zeta = mp.mpf(2) / 3 * mp.mpf(modulus) ** 1.5
        best, best_mag, mag = 0, None, None
        for k in range(co.MAX_INDEX):
            c = co.coeff_c(k)
            mag = mp.mpf(c.numerator) / c.denominator / zeta**k
            if best_mag is None or mag < best_mag:
                best, best_mag = k, mag
            elif k > best + 4:
                break
        return best


def _digits_for(z: PhasedComplex) -> int:
    return 30 + int(4 / 3 * z.modulus**1.5 / math.log(10)) + 10


def _check_modulus(z: PhasedComplex):
    if z.modulus == 0:
        raise DegenerateSaddleError("z = 0")
    if z.modulus < 2:
        warnings.warn("|z| < 2: outside the useful range of the expansions", UserWarning, stacklevel=3)


def assemble_ai(z, n="optimal") -> ValueWithError:
    """Ai(z) from one Airy-type series or, in the complementary sector, two continuations."""
    zp = _as_phased(z)
    _check_modulus(zp)
    phi = reduce_phase(zp.phase, -math.pi)
    if phi <= -mp.pi:
        # the cut itself belongs to the upper side
        phi = phi + 2 * mp.pi
    zr = PhasedComplex(zp.modulus, phi)
    with mp.workdps(_digits_for(zp)):
        value, err, kept = _series(zr, n, -1)
        if abs(phi) > TWO_PI_3 + 1e-12:
            # the two detours around z = 0
            shift = -2 * mp.pi if phi > 0 else 2 * mp.pi
            extra, err2, _ = _series(zr.rotate(shift), kept, -1)
            value += extra
            err += err2
        return ValueWithError(+value, kept, +err)


def assemble_w(z, n="optimal") -> ValueWithError:
    """w(z) = Bi + iAi from the sector forms: one series below the real axis, two above."""
    zp = _as_phased(z)
    _check_modulus(zp)
    phi = reduce_phase(zp.phase, -4 * math.pi / 3)
    zr = PhasedComplex(zp.modulus, phi)
    with mp.workdps(_digits_for(zp)):
        value, err, kept = _series(zr, n, 1)
        value, err = 2 * value, 2 * err
        if phi >= 0:
            extra, err2, _ = _series(zr.rotate(-2 * mp.pi), kept, 1)
            value += 2 * extra
            err += 2 * err2
        return ValueWithError(+value, kept, +err)


def oracle_w(z, digits: int = 30):
    with mp.workdps(digits + 10):
        return oracle_eval("W", _as_phased(z).mp_value(), digits)


def connection_residual(z, digits: int = 30):
    """Ai(z) + e^{-2pi i/3} Ai(z e^{-2pi i/3}) + e^{2pi i/3} Ai(z e^{-4pi i/3})."""
    with mp.workdps(digits + 10):
        zc = z.mp_value() if isinstance(z, PhasedComplex) else mp.mpmathify(z)
        w1 = mp.expj(-2 * mp.pi / 3)
        w2 = mp.expj(2 * mp.pi / 3)
        out = (oracle_eval("Ai", zc, digits + 5)
               + w1 * oracle_eval("Ai", zc * w1, digits + 5)
               + w2 * oracle_eval("Ai", zc * mp.expj(-4 * mp.pi / 3), digits + 5))
    return out


@dataclass
class JumpReport:
    phi: float
    modulus: float
    eps: float
    count_below: int
    count_above: int
    representation_below: Representation
    representation_above: Representation
    jump: object
    recessive: object

    @property
    def topology_changed(self) -> bool:
        return self.count_below != self.count_above

    @property
    def jump_rel_error(self):
        return abs(self.jump - self.recessive) / abs(self.recessive)


def stokes_jump_witness(phi: float, modulus: float, eps: float = 1e-2, n="optimal") -> JumpReport:
    """Saddle counts either side of a ray and the size of the switched-on series.

    The jump is the difference between the two-saddle and one-saddle sector
    forms evaluated on the ray itself; for the rays 0 and 2pi/3 it should
    reproduce w23(z) and w12(z) respectively.
    """
    below = path_decomposition(PhasedComplex(modulus, phi - eps))
    above = path_decomposition(PhasedComplex(modulus, phi + eps))
    z = PhasedComplex(modulus, phi)
    with mp.workdps(_digits_for(z)):
        reduced = reduce_phase(phi, -4 * math.pi / 3)
        n_terms = optimal_terms(modulus) if n == "optimal" else n
        if abs(reduced) < 1e-9:
            jump, _, _ = _series(z.rotate(-2 * mp.pi), n_terms, 1)
            jump *= 2
            recessive = 2j * oracle_eval("Ai", z.mp_value(), 30)
        elif abs(reduced - TWO_PI_3) < 1e-9 or abs(reduced + 4 * math.pi / 3) < 1e-9:
            zr = PhasedComplex(modulus, TWO_PI_3)
            jump, _, _ = _series(zr, n_terms, 1)
            jump *= 2
            rot = mp.expj(-2 * mp.pi / 3)
            recessive = rot * 2j * oracle_eval("Ai", zr.mp_value() * rot, 30)
        else:
            jump = recessive = mp.zero
    return JumpReport(phi, modulus, eps, below.saddle_count, above.saddle_count,
                      below.representation, above.representation, jump, recessive)
