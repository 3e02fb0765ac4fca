import math

import numpy as np
import pytest

from cavicore.lib.optics import (
    airy_stack_reflectance, fresnel_amplitudes, interface_matrix2, propagation_matrix2, stack_amplitudes,
)
from cavicore.types.errors import InvalidInputError
from cavicore.types.optics import Layer, Stack


def __test_fresnel_air_gaas__():
    """Air / n = 3.4 interface reflects 29.75%"""
    r, t = fresnel_amplitudes(1.0, 3.4)
    assert math.isclose(abs(r) ** 2, 0.2975, abs_tol=1e-4)
    assert math.isclose(r.real, 2.4 / 4.4, rel_tol=1e-12)

    # A bare interface as a stack gives the same
    R, T = airy_stack_reflectance(Stack(top_cladding_index=1.0, bottom_cladding_index=3.4), 1310.0)
    assert math.isclose(R, 0.2975, abs_tol=1e-4)
    assert math.isclose(R + T, 1.0, abs_tol=1e-12)


def __test_interface_matrix_matches_fresnel__():
    """Interface matrix equals (1/t)·[[1, r], [r, 1]]"""
    for n_a, n_b in ((1.0, 3.4), (3.4, 1.0), (1.36, 1.0), (1.0, 2.0 + 0.1j)):
        r, t = fresnel_amplitudes(n_a, n_b)
        expected = np.array([[1.0, r], [r, 1.0]]) / t
        assert np.allclose(interface_matrix2(n_a, n_b), expected, atol=1e-14)


def __test_identity_cases__():
    """Equal indices and zero thickness are identities"""
    assert np.allclose(interface_matrix2(2.5, 2.5), np.eye(2))
    assert np.allclose(propagation_matrix2(3.4, 0.0, 1310.0), np.eye(2))

    r, t = stack_amplitudes(Stack(top_cladding_index=1.5, bottom_cladding_index=1.5), 1000.0)
    assert abs(r) < 1e-15
    assert math.isclose(abs(t), 1.0, rel_tol=1e-15)


def __test_propagation_phase_and_absorption__():
    """Forward wave picks up exp(-2πi·n·d/λ), absorption damps it"""
    p = propagation_matrix2(2.0, 100.0, 800.0)
    assert np.isclose(p[0, 0], np.exp(-2j * np.pi * 2.0 * 100.0 / 800.0))
    assert np.isclose(p[0, 0] * p[1, 1], 1.0)

    lossy = propagation_matrix2(2.0 + 0.05j, 100.0, 800.0)
    assert abs(lossy[0, 0]) < 1.0
    assert math.isclose(abs(lossy[0, 0]), math.exp(-2.0 * math.pi * 0.05 * 100.0 / 800.0), rel_tol=1e-12)


def __test_batched_over_wavelengths__():
    """Matrices and amplitudes broadcast over wavelength arrays"""
    wl = np.linspace(1200.0, 1400.0, 7)
    assert propagation_matrix2(3.4, 200.0, wl).shape == (7, 2, 2)

    stack = Stack(layers=(Layer(refractive_index=3.4, thickness=200.0),))
    r, t = stack_amplitudes(stack, wl)
    assert r.shape == t.shape == (7,)
    for i, x in enumerate(wl):
        r_i, t_i = stack_amplitudes(stack, float(x))
        assert np.isclose(r[i], r_i)
        assert np.isclose(t[i], t_i)


def __test_invalid_indices__():
    """Non-positive real parts and negative extinction are rejected"""
    with pytest.raises(InvalidInputError):
        fresnel_amplitudes(1.0, -3.4)
    with pytest.raises(InvalidInputError):
        fresnel_amplitudes(0.0, 1.0)
    with pytest.raises(InvalidInputError):
        Layer(refractive_index=2.0 - 0.1j, thickness=100.0)
    with pytest.raises(InvalidInputError):
        Layer(refractive_index=2.0, thickness=0.0)
    with pytest.raises(InvalidInputError):
        Stack(top_cladding_index=float('nan'))
    with pytest.raises(InvalidInputError):
        propagation_matrix2(2.0, 100.0, -1.0)


def __test_propagation_composes_in_thickness__():
    """Propagating over a then b equals propagating over a + b"""
    wl = np.linspace(1280.0, 1620.0, 35)
    for n in (1.0, 1.36, 2.0 + 0.05j):
        for a, b in ((100.0, 200.0), (0.0, 1200.0), (37.5, 62.5)):
            composed = propagation_matrix2(n, a, wl) @ propagation_matrix2(n, b, wl)
            assert np.allclose(composed, propagation_matrix2(n, a + b, wl), rtol=1e-12, atol=1e-15)


def __test_interfaces_invert_pairwise__():
    """Going into a medium and back out is the identity"""
    for a, b in ((1.0, 3.4), (1.36, 1.0), (1.0, 2.0 + 0.1j), (2.85, 3.4)):
        assert np.allclose(interface_matrix2(a, b) @ interface_matrix2(b, a), np.eye(2), rtol=0.0, atol=1e-12)
