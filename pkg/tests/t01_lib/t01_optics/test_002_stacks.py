import math

import numpy as np
import pytest
from scipy.signal import find_peaks

from cavicore.lib.optics import airy_stack_reflectance, free_spectral_range, reverse_stack, slab_stack
from cavicore.types.cavity import SlabGeometry
from cavicore.types.errors import InvalidInputError
from cavicore.types.optics import Layer, Stack


def __test_half_wave_slab_is_transparent__():
    """A half-wave GaAs slab in air does not reflect"""
    stack = Stack(layers=(Layer(refractive_index=3.4, thickness=200.0),))
    R, T = airy_stack_reflectance(stack, 1360.0)
    assert R < 1e-10
    assert math.isclose(T, 1.0, abs_tol=1e-10)


def __test_energy_conservation__(default_fp_stack):
    """R + T = 1 for lossless stacks at every wavelength"""
    wl = np.linspace(1200.0, 1700.0, 501)
    R, T = airy_stack_reflectance(default_fp_stack, wl)
    assert np.all((R >= 0.0) & (R <= 1.0))
    assert np.allclose(R + T, 1.0, atol=1e-12)

    stack = Stack(top_cladding_index=1.0,
                  layers=(Layer(refractive_index=2.1, thickness=150.0), Layer(refractive_index=1.45, thickness=260.0),
                          Layer(refractive_index=2.1, thickness=150.0)),
                  bottom_cladding_index=1.52)
    R, T = airy_stack_reflectance(stack, wl)
    assert np.allclose(R + T, 1.0, atol=1e-12)


def __test_absorbing_layer_loses_energy__():
    """An absorbing layer makes R + T < 1"""
    stack = Stack(layers=(Layer(refractive_index=3.4 + 0.05j, thickness=500.0),), bottom_cladding_index=1.45)
    assert not stack.is_lossless
    R, T = airy_stack_reflectance(stack, np.linspace(1200.0, 1400.0, 51))
    assert np.all(R + T < 1.0 - 1e-4)


def __test_reciprocity__(default_fp_stack):
    """Transmittance is the same from both sides, reflectance too when lossless"""
    wl = np.linspace(1250.0, 1650.0, 81)
    R_top, T_top = airy_stack_reflectance(default_fp_stack, wl)
    R_bottom, T_bottom = airy_stack_reflectance(reverse_stack(default_fp_stack), wl)
    assert np.allclose(T_top, T_bottom, atol=1e-12)
    assert np.allclose(R_top, R_bottom, atol=1e-12)

    lossy = Stack(layers=(Layer(refractive_index=2.0 + 0.2j, thickness=300.0),
                          Layer(refractive_index=1.3, thickness=100.0)), bottom_cladding_index=3.4)
    _, T_top = airy_stack_reflectance(lossy, wl)
    _, T_bottom = airy_stack_reflectance(reverse_stack(lossy), wl)
    assert np.allclose(T_top, T_bottom, atol=1e-12)


def __test_free_spectral_range__():
    """Fringe spacing λ²/(2nd)"""
    gap = Stack(layers=(Layer(refractive_index=1.0, thickness=1200.0),))
    assert math.isclose(free_spectral_range(gap, 1315.0), 720.51, abs_tol=0.5)

    # Compare with the fringe maxima of a thick slab
    slab = Stack(layers=(Layer(refractive_index=3.4, thickness=2000.0),))
    wl = np.linspace(1250.0, 1480.0, 23001)
    R, _ = airy_stack_reflectance(slab, wl)
    peaks, _ = find_peaks(R)
    assert len(peaks) == 2
    spacing = wl[peaks[1]] - wl[peaks[0]]
    assert math.isclose(wl[peaks[0]], 13600.0 / 10.5, abs_tol=0.05)
    assert math.isclose(spacing, free_spectral_range(slab, 0.5 * (wl[peaks[0]] + wl[peaks[1]])), rel_tol=0.05)

    with pytest.raises(InvalidInputError):
        free_spectral_range(Stack(), 1300.0)


def __test_slab_stack__():
    """The sample background is air | slab | gap | substrate"""
    geometry = SlabGeometry(n1_eff=2.85, t1=200.0, t2=1200.0, n3=3.4)
    stack = slab_stack(geometry)
    assert stack.indices == (1.0, 2.85, 1.0, 3.4)
    assert [layer.thickness for layer in stack.layers] == [200.0, 1200.0]
    assert stack.is_lossless
