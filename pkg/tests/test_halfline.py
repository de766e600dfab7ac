import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from radtree import (
    Decoupled,
    HalflineSystem,
    InterfaceCoupling,
    NoPeriod,
    SpecValidationError,
    free_transfer,
    interface_determinant,
    interface_transfer,
    monodromy,
    periodic_cell_transfer,
    propagate,
)


def kp(alpha=1.0, ell=1.0, n_cells=2, **kw):
    return HalflineSystem.periodic([ell], [InterfaceCoupling(alpha, 0, 0)], n_cells, **kw)


# -- interface matrices ---------------------------------------------------------

def test_delta_interface():
    # continuity, derivative jump alpha * u
    assert np.allclose(interface_transfer(InterfaceCoupling(1.5, 0, 0)), [[1, 0], [1.5, 1]])


def test_delta_prime_interface():
    # derivative continuity, value jump beta * u'
    assert np.allclose(interface_transfer(InterfaceCoupling(0, 0.7, 0)), [[1, 0.7], [0, 1]])


def test_degenerate_image_interface():
    assert np.array_equal(interface_transfer(InterfaceCoupling(2, -2, 0)), [[0, -1], [1, 0]])


def test_decoupled():
    with pytest.raises(Decoupled):
        interface_transfer(InterfaceCoupling(2, 2, 0))
    with pytest.raises(Decoupled):
        interface_transfer(InterfaceCoupling(0, 0, 2))


def test_complex_c_not_decoupled():
    # a q + |c|^2 = 4 but Im c != 0: a transfer matrix still exists
    T = interface_transfer(InterfaceCoupling(0, 0, 2j))
    assert abs(abs(np.linalg.det(T)) - 1) < 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_determinant_unimodular(a, q, cr, ci):
    m = InterfaceCoupling(a, q, complex(cr, ci))
    if abs(a * q + cr * cr + ci * ci - 4) < 1e-6 and abs(ci) < 1e-6:
        return
    dm = 1 - 1j * ci - (a * q + cr * cr + ci * ci) / 4
    if abs(dm) < 1e-6:
        return
    T = interface_transfer(m)
    det = np.linalg.det(T)
    assert abs(abs(det) - 1) < 1e-9
    assert det == pytest.approx(interface_determinant(m), abs=1e-9)
    if ci == 0:
        assert det == pytest.approx(1, abs=1e-9)


# -- free propagation -------------------------------------------------------------

@pytest.mark.parametrize("z", [4.0, -2.5, 0.0, 1e-12, 3 + 2j, -1 - 0.5j])
def test_free_transfer_against_ode(z):
    ell = 1.3

    def rhs(_, y):
        return [y[1], -z * y[0]]

    cols = []
    for y0 in ([1, 0], [0, 1]):
        sol = solve_ivp(rhs, (0, ell), np.array(y0, dtype=complex), rtol=1e-11, atol=1e-13)
        cols.append(sol.y[:, -1])
    oracle = np.array(cols).T
    assert np.allclose(free_transfer(ell, z), oracle, atol=1e-8)


def test_free_transfer_broadcast_and_det():
    z = np.linspace(-5, 30, 41)
    T = free_transfer(0.7, z)
    assert T.shape == (41, 2, 2)
    assert np.allclose(np.linalg.det(T), 1)
    assert np.isrealobj(T)


def test_free_transfer_series_branch_continuous():
    for z in (0.999e-8, 1.001e-8, -0.999e-8):
        k = np.sqrt(complex(z))
        exact = [[np.cos(k), np.sin(k) / k], [-k * np.sin(k), np.cos(k)]]
        assert np.allclose(free_transfer(1.0, z), exact, rtol=0, atol=1e-15)


# -- systems --------------------------------------------------------------------

def test_kronig_penney_trace():
    # tr M = 2 cos k + alpha sin k / k
    s = kp(alpha=1.0)
    for E in [0.5, 3.0, 12.0, 40.0]:
        k = math.sqrt(E)
        assert np.trace(monodromy(s, E)) == pytest.approx(2 * math.cos(k) + math.sin(k) / k, abs=1e-12)
    k = math.sqrt(2.0)  # E < 0
    assert np.trace(monodromy(s, -2.0)) == pytest.approx(2 * math.cosh(k) + math.sinh(k) / k)


def test_propagate_associative():
    s = HalflineSystem.periodic([0.6, 0.9], [InterfaceCoupling(1, 0.3, 0.2),
                                             InterfaceCoupling(-0.5, 0, 0.1j)], 3)
    z = 2.3 + 0.4j
    whole = propagate(s, z, 0.1, 5.05)
    split = propagate(s, z, 2.2, 5.05) @ propagate(s, z, 0.1, 2.2)
    assert np.allclose(whole, split, atol=1e-10)


def test_translation_invariance():
    s = HalflineSystem.periodic([0.5, 1.0], [InterfaceCoupling(1, 0, 0), InterfaceCoupling(0, 0.5, 0)], 4)
    t = s.shifted(2.75)
    z = 5.0 + 0.1j
    assert np.allclose(propagate(s, z, 0.2, 4.1), propagate(t, z, 2.95, 6.85))
    assert np.allclose(monodromy(s, z), monodromy(t, z))


def test_periodic_extension_beyond_listed_points():
    s = kp(n_cells=2)
    z = 7.0
    far = propagate(s, z, 10.5, 11.5)
    near = propagate(s, z, 0.5, 1.5)
    assert np.allclose(far, near)


def test_cell_transfer_conjugate_to_monodromy():
    s = HalflineSystem.periodic([0.4, 0.6], [InterfaceCoupling(1, 0, 0), InterfaceCoupling(0, 0.2, 0)])
    for bp in [-3.3, 0.1, 0.7, 2.35]:
        T = periodic_cell_transfer(s, 9.0, bp)
        assert np.trace(T) == pytest.approx(np.trace(monodromy(s, 9.0)))
    assert np.allclose(periodic_cell_transfer(s, 9.0, 0.2), propagate(s, 9.0, 0.2, 1.2))


def test_basepoint_on_lattice_rejected():
    with pytest.raises(SpecValidationError):
        periodic_cell_transfer(kp(), 1.0, 3.0)


def test_no_period():
    s = HalflineSystem(0, [1.0], [InterfaceCoupling(1, 0, 0)])
    with pytest.raises(NoPeriod):
        monodromy(s, 1.0)


def test_propagate_decoupled_reports_index():
    s = HalflineSystem(0, [1.0, 2.0, 3.0], [InterfaceCoupling(1, 0, 0), InterfaceCoupling(1, 0, 0),
                                            InterfaceCoupling(2, 2, 0)])
    with pytest.raises(Decoupled) as err:
        propagate(s, 1.0, 0.5, 3.5)
    assert err.value.generation == 3


@pytest.mark.parametrize("kwargs", [
    dict(origin=0, points=[1.0, 0.5], couplings=[InterfaceCoupling(0, 0, 0)] * 2),
    dict(origin=0, points=[0.0], couplings=[InterfaceCoupling(0, 0, 0)]),
    dict(origin=0, points=[1.0], couplings=[]),
    dict(origin=0, points=[1.0], couplings=[InterfaceCoupling(0, 0, 0)], left_boundary=2.0),
    dict(origin=0, points=[1.0, 2.0], couplings=[InterfaceCoupling(0, 0, 0)] * 2, period_hint=(0, 2)),
    dict(origin=0, points=[1.0, 2.0, 3.5], couplings=[InterfaceCoupling(0, 0, 0)] * 3,
         period_hint=(0, 1)),
])
def test_system_validation(kwargs):
    with pytest.raises(SpecValidationError):
        HalflineSystem(**kwargs)
