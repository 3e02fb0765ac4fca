"""
Plane-wave multilayer optics at normal incidence.

Transfer matrices act on the (forward, backward) amplitude pair and carry the fields from the top of
an element to its bottom. Time dependence is exp(+iωt), so a forward wave picks up exp(-iβd) on its
way down. Absorbing indices are given as n + ik with k >= 0 and enter every matrix as n - ik.
"""
from typing import overload

import numpy as np
import numpy.typing as npt

from ..core.units import as_float_or_array
from ..types.cavity import SlabGeometry
from ..types.errors import InvalidInputError
from ..types.optics import Layer, Stack, check_index

__all__ = [
    'phase_index', 'fresnel_amplitudes', 'interface_matrix2', 'propagation_matrix2', 'stack_amplitudes',
    'airy_stack_reflectance', 'free_spectral_range', 'reverse_stack', 'slab_stack',
]


def phase_index(n: complex) -> complex:
    """The index as it appears in the exp(+iωt) phase convention"""
    return complex(n).conjugate()


def check_wavelengths(wavelength: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """
    :raises InvalidInputError: If any wavelength is not finite and positive
    """
    wl = np.asarray(wavelength, dtype=float)
    if not np.all(np.isfinite(wl)) or np.any(wl <= 0.0):
        raise InvalidInputError("Wavelengths must be finite and positive")
    return wl


def fresnel_amplitudes(n_a: complex, n_b: complex) -> tuple[complex, complex]:
    """
    Interface amplitudes in the transfer-matrix convention, for a wave going from `n_a` into `n_b`.

    They satisfy ``interface_matrix2(n_a, n_b) == (1/t)·[[1, r], [r, 1]]``.

    :return: (r, t) with r = (n_b - n_a)/(n_b + n_a) and t = 2·n_b/(n_a + n_b)
    :raises InvalidInputError: On a non-positive real part
    """
    na = phase_index(check_index(n_a, "n_a"))
    nb = phase_index(check_index(n_b, "n_b"))
    return (nb - na) / (nb + na), 2.0 * nb / (na + nb)


def interface_matrix2(n_a: complex, n_b: complex) -> npt.NDArray[np.complex128]:
    """2×2 transition matrix from medium `n_a` (above) into `n_b` (below)"""
    na = phase_index(check_index(n_a, "n_a"))
    nb = phase_index(check_index(n_b, "n_b"))
    return np.array([[nb + na, nb - na], [nb - na, nb + na]], dtype=complex) / (2.0 * nb)


def propagation_matrix2(n: complex, d: float, wavelength: npt.ArrayLike) -> npt.NDArray[np.complex128]:
    """2×2 propagation matrix over `d` nm, stacked along the wavelength axes"""
    wl = check_wavelengths(wavelength)
    phase = np.exp(-2j * np.pi * phase_index(n) * d / wl)
    out = np.zeros(wl.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = phase
    out[..., 1, 1] = 1.0 / phase
    return out


def _total_matrix(stack: Stack, wl: npt.NDArray[np.float64]) -> npt.NDArray[np.complex128]:
    m = np.broadcast_to(np.eye(2, dtype=complex), wl.shape + (2, 2))
    above = stack.top_cladding_index
    for layer in stack.layers:
        m = interface_matrix2(above, layer.refractive_index) @ m
        m = propagation_matrix2(layer.refractive_index, layer.thickness, wl) @ m
        above = layer.refractive_index
    return interface_matrix2(above, stack.bottom_cladding_index) @ m


@overload
def stack_amplitudes(stack: Stack, wavelength: float) -> tuple[complex, complex]: ...


@overload
def stack_amplitudes(stack: Stack, wavelength: npt.NDArray[np.float64]) \
        -> tuple[npt.NDArray[np.complex128], npt.NDArray[np.complex128]]: ...


def stack_amplitudes(stack, wavelength):
    """
    Reflection and transmission amplitudes of a stack lit from the top.

    With the bottom outgoing wave set to zero, the reflected amplitude is r = -M10/M11 and the
    transmitted one t = det(M)/M11, where M is the top-to-bottom transfer matrix.

    :param stack: The multilayer
    :param wavelength: Vacuum wavelength(s) in nm
    :return: (r, t), complex scalars or arrays shaped like `wavelength`
    """
    wl = check_wavelengths(wavelength)
    m = _total_matrix(stack, wl)
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    r = -m[..., 1, 0] / m[..., 1, 1]
    t = det / m[..., 1, 1]
    return as_float_or_array(r), as_float_or_array(t)


def airy_stack_reflectance(stack: Stack, wavelength: npt.ArrayLike):
    """
    Reflectance and transmittance of a multilayer (the Airy summation done with transfer matrices).

    :param stack: The multilayer
    :param wavelength: Vacuum wavelength(s) in nm
    :return: (R, T) with R = |r|² and T = Re(n_bottom)/Re(n_top)·|t|²
    """
    r, t = stack_amplitudes(stack, wavelength)
    ratio = stack.bottom_cladding_index.real / stack.top_cladding_index.real
    return as_float_or_array(np.abs(r) ** 2), as_float_or_array(ratio * np.abs(t) ** 2)


def free_spectral_range(stack: Stack, center_wavelength: float) -> float:
    """
    Fringe spacing λ²/(2·Σ nᵢdᵢ) of the stack around a wavelength, in nm.

    :raises InvalidInputError: For an empty stack or a non-positive wavelength
    """
    if not stack.layers:
        raise InvalidInputError("Free spectral range needs at least one layer")
    check_wavelengths(center_wavelength)
    optical = sum(layer.optical_thickness for layer in stack.layers)
    return center_wavelength ** 2 / (2.0 * optical)


def reverse_stack(stack: Stack) -> Stack:
    """The same stack lit from the bottom"""
    return Stack(top_cladding_index=stack.bottom_cladding_index, layers=tuple(reversed(stack.layers)),
                 bottom_cladding_index=stack.top_cladding_index)


def slab_stack(geometry: SlabGeometry) -> Stack:
    """
    The interference background of the sample: air | slab | air gap | substrate.
    """
    return Stack(
        top_cladding_index=geometry.n0,
        layers=(Layer(refractive_index=geometry.n1_eff, thickness=geometry.t1),
                Layer(refractive_index=geometry.n0, thickness=geometry.t2)),
        bottom_cladding_index=geometry.n3,
    )
