from dataclasses import dataclass
import math

from .errors import InvalidInputError
from .optics import Stack
from ..core.units import wavelength_to_omega, omega_to_wavelength

__all__ = ['LorentzianPeak', 'FanoPeak', 'CompositeModel', 'Dip']


def _finite(value: float, name: str) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InvalidInputError(f"{name} must be a number, got {value!r}") from None
    if not math.isfinite(value):
        raise InvalidInputError(f"{name} must be finite, got {value}")
    return value


@dataclass(kw_only=True, slots=True, frozen=True)
class LorentzianPeak:
    """
    A single cavity resonance seen in reflection

    :ivar kappa: Input/output coupling efficiency, the peak reflectance
    :ivar gamma_c: Field decay rate in rad/s
    :ivar omega_c: Resonance angular frequency in rad/s
    """
    kappa: float
    gamma_c: float
    omega_c: float

    def __post_init__(self):
        kappa = _finite(self.kappa, "kappa")
        if kappa < 0.0:
            raise InvalidInputError(f"kappa must not be negative, got {kappa}")
        gamma_c = _finite(self.gamma_c, "gamma_c")
        omega_c = _finite(self.omega_c, "omega_c")
        if gamma_c <= 0.0 or omega_c <= 0.0:
            raise InvalidInputError(f"gamma_c and omega_c must be positive, got {gamma_c}, {omega_c}")
        if omega_c <= 2.0 * gamma_c:
            raise InvalidInputError(f"Resonance Q must exceed 1, got {omega_c / (2.0 * gamma_c)}")
        object.__setattr__(self, 'kappa', kappa)
        object.__setattr__(self, 'gamma_c', gamma_c)
        object.__setattr__(self, 'omega_c', omega_c)

    @classmethod
    def from_q(cls, *, lambda_c: float, q: float, kappa: float) -> 'LorentzianPeak':
        """
        Build a peak from its resonance wavelength and quality factor.

        :param lambda_c: Resonance wavelength in nm
        :param q: Quality factor
        :param kappa: Coupling efficiency
        """
        omega_c = wavelength_to_omega(lambda_c)
        return cls(kappa=kappa, gamma_c=omega_c / (2.0 * q), omega_c=omega_c)

    @classmethod
    def from_linewidth(cls, *, lambda_c: float, fwhm: float, kappa: float) -> 'LorentzianPeak':
        """Build a peak from its resonance wavelength and FWHM, both in nm"""
        if fwhm <= 0.0:
            raise InvalidInputError(f"FWHM must be positive, got {fwhm}")
        return cls.from_q(lambda_c=lambda_c, q=lambda_c / fwhm, kappa=kappa)

    @property
    def lambda_c(self) -> float:
        """Resonance wavelength in nm"""
        return omega_to_wavelength(self.omega_c)

    @property
    def q(self) -> float:
        return self.omega_c / (2.0 * self.gamma_c)

    @property
    def fwhm(self) -> float:
        """Full width at half maximum in nm"""
        return self.lambda_c / self.q


@dataclass(kw_only=True, slots=True, frozen=True)
class FanoPeak:
    """
    A resonance interfering with a constant complex background amplitude
    """
    base: LorentzianPeak
    background_re: float = 0.0
    background_im: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, 'background_re', _finite(self.background_re, "background_re"))
        object.__setattr__(self, 'background_im', _finite(self.background_im, "background_im"))

    @property
    def offset(self) -> complex:
        return complex(self.background_re, self.background_im)


@dataclass(kw_only=True, slots=True, frozen=True)
class CompositeModel:
    """
    Cavity peaks + scaled Fabry-Pérot background + constant floor, summed as intensities
    """
    peaks: tuple[FanoPeak, ...] = ()
    fp_stack: Stack | None = None
    fp_scale: float = 0.0
    floor: float = 0.0

    def __post_init__(self):
        peaks = tuple(FanoPeak(base=p) if isinstance(p, LorentzianPeak) else p for p in self.peaks)
        object.__setattr__(self, 'peaks', peaks)
        fp_scale = _finite(self.fp_scale, "fp_scale")
        floor = _finite(self.floor, "floor")
        if fp_scale < 0.0 or floor < 0.0:
            raise InvalidInputError(f"fp_scale and floor must not be negative, got {fp_scale}, {floor}")
        object.__setattr__(self, 'fp_scale', fp_scale)
        object.__setattr__(self, 'floor', floor)


@dataclass(kw_only=True, slots=True, frozen=True)
class Dip:
    """
    A Gaussian absorption line multiplied into a synthetic spectrum

    :ivar center: Line center in nm
    :ivar depth: Fractional depth at the center, 0..1
    :ivar width: Gaussian standard deviation in nm
    """
    center: float
    depth: float
    width: float

    def __post_init__(self):
        center = _finite(self.center, "dip center")
        depth = _finite(self.depth, "dip depth")
        width = _finite(self.width, "dip width")
        if center <= 0.0:
            raise InvalidInputError(f"Dip center must be positive, got {center}")
        if not 0.0 <= depth <= 1.0:
            raise InvalidInputError(f"Dip depth must be within [0, 1], got {depth}")
        if width <= 0.0:
            raise InvalidInputError(f"Dip width must be positive, got {width}")
        object.__setattr__(self, 'center', center)
        object.__setattr__(self, 'depth', depth)
        object.__setattr__(self, 'width', width)
