"""
Closed-form reflectance lineshapes and the synthetic spectrum generator.
"""
from typing import Iterable

import numpy as np
import numpy.typing as npt

from .optics import airy_stack_reflectance, check_wavelengths
from ..core.units import as_float_or_array, omega_to_wavelength, wavelength_to_omega
from ..types.errors import InvalidInputError
from ..types.lineshape import CompositeModel, Dip, FanoPeak, LorentzianPeak
from ..types.spectrum import Spectrum

__all__ = [
    'lorentzian_reflectance', 'fano_amplitude', 'fano_reflectance', 'composite_eval', 'synthesize_spectrum',
    'wavelength_to_omega', 'omega_to_wavelength',
]


def lorentzian_reflectance(peak: LorentzianPeak, omega: npt.ArrayLike):
    """
    R = κ·|-Γ_c / (Γ_c - i(ω - ω_c))|²

    :param peak: The resonance
    :param omega: Angular frequency (or array of them) in rad/s
    """
    detuning = np.asarray(omega, dtype=float) - peak.omega_c
    gamma_sq = peak.gamma_c * peak.gamma_c
    return as_float_or_array(peak.kappa * gamma_sq / (gamma_sq + detuning * detuning))


def fano_amplitude(peak: FanoPeak, omega: npt.ArrayLike):
    """The complex resonant amplitude plus the constant background offset"""
    detuning = np.asarray(omega, dtype=float) - peak.base.omega_c
    gamma = peak.base.gamma_c
    return as_float_or_array(peak.offset - gamma / (gamma - 1j * detuning))


def fano_reflectance(peak: FanoPeak, omega: npt.ArrayLike):
    """
    R = κ·|b + (-Γ_c / (Γ_c - i(ω - ω_c)))|², b = background_re + i·background_im

    Only an imaginary offset makes the line asymmetric around ω_c.
    """
    return as_float_or_array(peak.base.kappa * np.abs(fano_amplitude(peak, omega)) ** 2)


def composite_eval(model: CompositeModel, wavelength: npt.ArrayLike):
    """
    Σ peaks + fp_scale·R_airy(fp_stack) + floor, combined as intensities.

    :param model: The composite model
    :param wavelength: Wavelength(s) in nm
    """
    wl = check_wavelengths(wavelength)
    omega = wavelength_to_omega(wl)
    total = np.full(wl.shape, model.floor, dtype=float)
    for peak in model.peaks:
        total = total + fano_reflectance(peak, omega)
    if model.fp_stack is not None and model.fp_scale > 0.0:
        total = total + model.fp_scale * airy_stack_reflectance(model.fp_stack, wl)[0]
    return as_float_or_array(total)


def synthesize_spectrum(model: CompositeModel, grid: npt.ArrayLike, noise_sigma: float = 0.0,
                        dips: Iterable[Dip] = (), rng_seed: int = 0) -> Spectrum:
    """
    Sample a model, multiply in absorption dips and add seeded Gaussian noise.

    Each dip scales the spectrum by 1 - depth·exp(-(λ - center)²/(2·width²)). Values are clamped
    at zero after the noise is added.

    :param model: The composite model
    :param grid: Strictly increasing wavelengths in nm
    :param noise_sigma: Standard deviation of the additive noise
    :param dips: Absorption dips
    :param rng_seed: Seed of the noise generator
    :return: The synthetic spectrum
    """
    wl = check_wavelengths(grid)
    if wl.ndim != 1 or np.any(np.diff(wl) <= 0.0):
        raise InvalidInputError("Synthesis grid must be strictly increasing")
    if not noise_sigma >= 0.0:
        raise InvalidInputError(f"Noise sigma must not be negative, got {noise_sigma}")
    dips = tuple(dips)
    for dip in dips:
        if not isinstance(dip, Dip):
            raise InvalidInputError(f"Dips must be Dip instances, got {type(dip).__name__}")

    values = np.asarray(composite_eval(model, wl), dtype=float)
    for dip in dips:
        values = values * (1.0 - dip.depth * np.exp(-0.5 * ((wl - dip.center) / dip.width) ** 2))
    if noise_sigma > 0.0:
        rng = np.random.default_rng(rng_seed)
        values = values + rng.normal(0.0, noise_sigma, size=wl.shape)
    values = np.clip(values, 0.0, None)

    meta = f"synthetic, seed {rng_seed}, noise sigma {noise_sigma:.6g}, {len(model.peaks)} peak(s), {len(dips)} dip(s)"
    return Spectrum(wavelengths=wl, reflectance=values, meta=meta)
