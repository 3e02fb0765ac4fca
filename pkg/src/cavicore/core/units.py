"""
Vacuum wavelength <-> angular frequency conversion.

Wavelengths are vacuum wavelengths in nm everywhere in cavicore, angular frequencies are in rad/s.
"""
from typing import overload

import numpy as np
import numpy.typing as npt

__all__ = ['C0', 'wavelength_to_omega', 'omega_to_wavelength', 'as_float_or_array']

# Speed of light in vacuum, m/s
C0 = 299_792_458.0

_NM = 1e-9


def as_float_or_array(value: npt.ArrayLike):
    """Unwrap 0-d arrays to plain floats, leave everything else as an array"""
    value = np.asarray(value)
    return value.item() if value.ndim == 0 else value


@overload
def wavelength_to_omega(wavelength: float) -> float: ...


@overload
def wavelength_to_omega(wavelength: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]: ...


def wavelength_to_omega(wavelength):
    """
    Angular frequency of a vacuum wavelength.

    :param wavelength: Wavelength in nm
    :return: Angular frequency in rad/s
    """
    return as_float_or_array(2.0 * np.pi * C0 / (np.asarray(wavelength, dtype=float) * _NM))


@overload
def omega_to_wavelength(omega: float) -> float: ...


@overload
def omega_to_wavelength(omega: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]: ...


def omega_to_wavelength(omega):
    """
    Vacuum wavelength of an angular frequency.

    :param omega: Angular frequency in rad/s
    :return: Wavelength in nm
    """
    return as_float_or_array(2.0 * np.pi * C0 / np.asarray(omega, dtype=float) / _NM)
