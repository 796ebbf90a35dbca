import cmath
import math
import random

import pytest
from mpmath import mp

from airyasym import stokes as st
from airyasym.oracle import oracle_eval
from airyasym.stokes import PhasedComplex, Representation

VALLEYS = (math.pi / 2, -5 * math.pi / 6, -math.pi / 6)


@pytest.fixture(autouse=True)
def _precision():
    with mp.workdps(40):
        yield


def angle_gap(a, b):
    return abs((a - b + math.pi) % (2 * math.pi) - math.pi)


def test_saddles_on_stokes_ray():
    s1, s2 = st.saddle_points(1)
    assert {complex(round(s.t.real, 12), round(s.t.imag, 12)) for s in (s1, s2)} == {1j, -1j}
    assert abs(s1.descent_constant) < 1e-14 and abs(s2.descent_constant) < 1e-14


def test_descent_constants_at_pi_over_3():
    s1, s2 = st.saddle_points(PhasedComplex(1, math.pi / 3))
    assert s1.descent_constant == pytest.approx(-2 / 3)
    assert s2.descent_constant == pytest.approx(2 / 3)


def test_saddles_of_minus_four():
    ts = sorted((s.t for s in st.saddle_points(PhasedComplex(4, 0))), key=lambda t: t.imag)
    assert ts[0] == pytest.approx(-2j) and ts[1] == pytest.approx(2j)


def test_saddles_are_stationary():
    z = PhasedComplex(7, 0.4)
    for s in st.saddle_points(z):
        assert abs(st.exponent_prime(complex(z), s.t)) < 1e-12


def test_degenerate_saddle():
    with pytest.raises(st.DegenerateSaddleError):
        st.saddle_points(0)


def test_stokes_rays():
    assert st.is_stokes_ray(0)
    assert st.is_stokes_ray(2 * math.pi / 3)
    assert st.is_stokes_ray(-2 * math.pi / 3)
    assert not st.is_stokes_ray(math.pi / 3)


def test_contour_end_directions():
    c = st.trace_contour(PhasedComplex(10, math.pi / 3), st.saddle_points(PhasedComplex(10, math.pi / 3))[0])
    for angle in c.end_directions:
        assert min(angle_gap(angle, v) for v in VALLEYS) < 1e-3


def test_contour_keeps_its_constant():
    z = PhasedComplex(10, -1.0)
    s = st.saddle_points(z)[1]
    c = st.trace_contour(z, s)
    for t in c.points:
        f = st.exponent(complex(z), t)
        assert abs(f.imag - s.descent_constant) < 1e-9 * max(1.0, abs(f))


def test_negative_axis_contour_passes_one_saddle():
    z = PhasedComplex(10, math.pi)
    dec = st.path_decomposition(z)
    assert dec.saddle_count == 1


@pytest.mark.parametrize("phi,rep,count", [
    (-math.pi / 2, Representation.W13, 1),
    (math.pi / 3, Representation.W12_W23, 2),
    (0.0, Representation.HALF_SUM, 2),
])
def test_path_decomposition(phi, rep, count):
    dec = st.path_decomposition(PhasedComplex(10, phi))
    assert dec.representation is rep
    assert dec.saddle_count == count


def test_traced_and_rule_agree():
    for phi in (-2.5, -1.2, -0.3, 0.3, 1.0, 1.9, 2.5):
        z = PhasedComplex(10, phi)
        assert st.path_decomposition(z).representation is st.path_decomposition(z, trace=False).representation


def test_topology_changes_only_on_two_rays():
    eps = 1e-2
    counts = {}
    for phi in (0.0, 2 * math.pi / 3, -2 * math.pi / 3):
        counts[phi] = tuple(st.path_decomposition(PhasedComplex(10, phi + d)).saddle_count for d in (-eps, eps))
    assert counts[0.0] == (1, 2)
    assert counts[2 * math.pi / 3] == (2, 1)
    assert counts[-2 * math.pi / 3] == (1, 1)


@pytest.mark.parametrize("phi", [0.0, math.pi, -math.pi, 0.5])
def test_assemble_ai(phi):
    z = PhasedComplex(10, phi)
    a = st.assemble_ai(z)
    ref = oracle_eval("Ai", z.mp_value(), 30)
    assert abs(a.value - ref) <= 2 * a.error_estimate


@pytest.mark.parametrize("phi", [-math.pi / 2, math.pi / 3])
def test_assemble_w(phi):
    z = PhasedComplex(10, phi)
    w = st.assemble_w(z)
    assert abs(w.value - st.oracle_w(z)) <= 2 * w.error_estimate


def test_connection_identity():
    rng = random.Random(7)
    for _ in range(5):
        z = PhasedComplex(rng.uniform(1, 6), rng.uniform(-math.pi, math.pi))
        assert abs(st.connection_residual(z, 30)) < 1e-25


@pytest.mark.parametrize("modulus", [10, 15])
def test_connection_identity_relative_to_largest_term(modulus):
    # one rotated argument sits in the growing sector, so the bound scales with it
    z = PhasedComplex(modulus, 0.9)
    zc = z.mp_value()
    terms = [oracle_eval("Ai", zc * mp.expj(-2 * k * mp.pi / 3), 30) for k in range(3)]
    assert abs(st.connection_residual(z, 30)) < 1e-27 * max(abs(t) for t in terms)


def test_jump_witness_at_zero():
    rep = st.stokes_jump_witness(0.0, 10)
    assert rep.topology_changed
    assert rep.jump_rel_error < 1e-15


def test_no_jump_at_minus_two_thirds_pi():
    rep = st.stokes_jump_witness(-2 * math.pi / 3, 10)
    assert not rep.topology_changed


def test_phased_complex_keeps_branch():
    a = PhasedComplex(3, math.pi)
    b = a.rotate(-2 * mp.pi)
    assert complex(a) == pytest.approx(complex(b))
    assert b.phase == pytest.approx(-math.pi)
    assert a.power(mp.mpf(1) / 2) != b.power(mp.mpf(1) / 2)


def test_from_complex_uses_principal_branch():
    z = PhasedComplex.from_complex(cmath.rect(2, -0.7))
    assert z.phase == pytest.approx(-0.7)
