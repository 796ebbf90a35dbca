import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp

from airyasym import oracle as orc
from airyasym.oracle import FunctionId


def close(a, b, rel):
    return abs(a - b) <= rel * max(abs(b), mp.mpf(1e-300))


@pytest.fixture(autouse=True)
def _precision():
    with mp.workdps(60):
        yield


def test_ai_at_zero():
    expected = mp.pi * mp.mpf(3) ** (-mp.mpf(2) / 3) / mp.gamma(mp.mpf(2) / 3)
    assert close(orc.oracle_eval(FunctionId.Ai, 0, 30), expected, 1e-29)


def test_hi_at_zero():
    # pi times the standard 2 / (3**(7/6) Gamma(2/3))
    expected = 2 * mp.pi / (mp.mpf(3) ** (mp.mpf(7) / 6) * mp.gamma(mp.mpf(2) / 3))
    assert close(orc.oracle_eval(FunctionId.Hi, 0, 30), expected, 1e-29)


def test_ai1_limits():
    assert close(orc.oracle_eval(FunctionId.Ai1, 0, 30), mp.pi / 3, 1e-29)
    # tends to pi as x -> -inf
    assert abs(orc.oracle_eval(FunctionId.Ai1, -60, 30) - mp.pi) < 0.1


@pytest.mark.parametrize("x", [0, 5, -7, 2.5, -0.3])
def test_wronskian(x):
    assert close(orc.oracle_wronskian(x, 40), mp.pi, 1e-38)


REFERENCE = {
    FunctionId.Ai: lambda z: mp.pi * mp.airyai(z),
    FunctionId.AiPrime: lambda z: mp.pi * mp.airyai(z, derivative=1),
    FunctionId.Bi: lambda z: mp.pi * mp.airybi(z),
    FunctionId.BiPrime: lambda z: mp.pi * mp.airybi(z, derivative=1),
    FunctionId.Hi: lambda z: mp.pi * mp.scorerhi(z),
    FunctionId.HiPrime: lambda z: mp.pi * mp.diff(mp.scorerhi, z),
    FunctionId.Gi: lambda z: mp.pi * mp.scorergi(z),
    FunctionId.GiPrime: lambda z: mp.pi * mp.diff(mp.scorergi, z),
    FunctionId.Ai1: lambda z: mp.pi / 3 - mp.pi * mp.airyai(z, derivative=-1),
}


@pytest.mark.parametrize("fn", list(REFERENCE))
@pytest.mark.parametrize("x", [-12.5, -3, 0.7, 4, 11])
def test_against_mpmath(fn, x):
    assert close(orc.oracle_eval(fn, x, 40), REFERENCE[fn](mp.mpf(x)), 1e-35)


@pytest.mark.parametrize("z", [mp.mpc(2, 3), mp.mpc(-4, 1), mp.mpc(0.5, -6)])
def test_complex_argument(z):
    assert close(orc.oracle_eval("Ai", z, 30), mp.pi * mp.airyai(z), 1e-28)
    assert close(orc.oracle_eval("Bi", z, 30), mp.pi * mp.airybi(z), 1e-28)


def test_squares_and_split():
    x = mp.mpf(-6)
    ai, bi = orc.oracle_eval("Ai", x, 40), orc.oracle_eval("Bi", x, 40)
    assert close(orc.oracle_eval("AiSq", x, 40), ai * ai, 1e-38)
    assert close(orc.oracle_eval("W1", x, 40) + orc.oracle_eval("W2", x, 40), ai * ai, 1e-36)


def test_parse():
    assert FunctionId.parse("gi'") is FunctionId.GiPrime
    assert FunctionId.parse("AI1") is FunctionId.Ai1
    with pytest.raises(ValueError):
        FunctionId.parse("zeta")


def test_standard_normalization_constant():
    assert close(orc.STANDARD_NORMALIZATION * orc.oracle_eval("Ai", 1, 30), mp.airyai(1), 1e-28)


def test_precision_doubling_is_stable():
    for fn in ("Ai", "Gi", "Ai1"):
        a = orc.oracle_eval(fn, -8.5, 30)
        b = orc.oracle_eval(fn, -8.5, 60)
        assert close(a, b, 1e-28)


def test_domain_limit():
    with pytest.raises(ValueError):
        orc.oracle_eval("Ai", 500, 30)


@given(st.floats(-20, 20))
@settings(max_examples=20, deadline=None)
def test_airy_equation(x):
    # Ai'' = x Ai, checked by a central difference of Ai'
    step = mp.mpf(10) ** -12
    d2 = (orc.oracle_eval("AiPrime", x + step, 40) - orc.oracle_eval("AiPrime", x - step, 40)) / (2 * step)
    assert abs(d2 - x * orc.oracle_eval("Ai", x, 40)) < 1e-18


def test_half_power_integral_identity():
    for v in (-5, 0, 3):
        q = orc.oracle_integral("Ai", lambda y: 1 / mp.sqrt(y), v)
        t = mp.mpf(v) * mp.mpf(2) ** (-mp.mpf(2) / 3)
        ref = mp.mpf(2) ** (mp.mpf(2) / 3) * orc.oracle_eval("Ai", t, 30) ** 2
        assert close(q, ref, 1e-15)


def test_integral_of_ai_is_ai1():
    q = orc.oracle_integral("Ai", lambda y: 1, -7)
    assert close(q, orc.oracle_eval("Ai1", -7, 30), 1e-15)


def test_integral_kernel_check():
    with pytest.raises(ValueError):
        orc.oracle_integral("Bi", lambda y: 1, 1)


def test_power_integral_by_parts_relation():
    # integral_v^inf x^-3 Ai = (Ai1(v) + Ai'(v)/v + Ai(v)/v^2) / 2 for v > 0
    v = mp.mpf(3)
    lhs = orc.integral_power_ai(3, v)
    ai, aip = orc.ai_and_derivative(v, 30)
    rhs = (orc.oracle_eval("Ai1", v, 30) + aip / v + ai / v**2) / 2
    assert close(lhs, rhs, 1e-15)


def test_w_contour_sum():
    # w13 = w12 + w23 off the Stokes rays
    z = mp.mpc(3, 2)
    assert abs(orc.w_contour(1, 3, z) - orc.w_contour(1, 2, z) - orc.w_contour(2, 3, z)) < 1e-20
