from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .errors import InvalidInputError

__all__ = ['Spectrum', 'MIN_SPECTRUM_LENGTH']

MIN_SPECTRUM_LENGTH = 16


@dataclass(kw_only=True, slots=True, frozen=True)
class Spectrum:
    """
    Reflectance sampled on a strictly increasing wavelength grid

    Both arrays are stored read-only. `meta` holds free-form provenance text, one item per line.
    """
    wavelengths: npt.NDArray[np.float64]  # nm
    reflectance: npt.NDArray[np.float64]
    meta: str = ""

    def __post_init__(self):
        wavelengths = np.array(self.wavelengths, dtype=float)
        reflectance = np.array(self.reflectance, dtype=float)
        if wavelengths.ndim != 1 or reflectance.shape != wavelengths.shape:
            raise InvalidInputError(
                f"Wavelengths and reflectance must be 1D arrays of equal length, "
                f"got shapes {wavelengths.shape} and {reflectance.shape}")
        if len(wavelengths) < MIN_SPECTRUM_LENGTH:
            raise InvalidInputError(
                f"A spectrum needs length >= {MIN_SPECTRUM_LENGTH}, got {len(wavelengths)} samples")
        if not (np.all(np.isfinite(wavelengths)) and np.all(np.isfinite(reflectance))):
            raise InvalidInputError("Spectrum contains non-finite values")
        if np.any(np.diff(wavelengths) <= 0.0):
            index = int(np.argmax(np.diff(wavelengths) <= 0.0)) + 1
            raise InvalidInputError(f"Wavelengths must be strictly increasing (sample {index})")
        if wavelengths[0] <= 0.0:
            raise InvalidInputError(f"Wavelengths must be positive, got {wavelengths[0]}")
        if np.any(reflectance < 0.0):
            raise InvalidInputError(f"Reflectance must not be negative, got {reflectance.min()}")
        wavelengths.flags.writeable = False
        reflectance.flags.writeable = False
        object.__setattr__(self, 'wavelengths', wavelengths)
        object.__setattr__(self, 'reflectance', reflectance)

    def __len__(self) -> int:
        return len(self.wavelengths)

    @property
    def span(self) -> tuple[float, float]:
        return float(self.wavelengths[0]), float(self.wavelengths[-1])

    def samples(self, start: int, stop: int) -> 'Spectrum':
        """The samples with index in [start, stop)"""
        return Spectrum(wavelengths=self.wavelengths[start:stop], reflectance=self.reflectance[start:stop],
                        meta=self.meta)

    def scaled(self, factor: float) -> 'Spectrum':
        return Spectrum(wavelengths=self.wavelengths, reflectance=self.reflectance * factor, meta=self.meta)
