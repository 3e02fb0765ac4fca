from dataclasses import dataclass
from typing import NamedTuple, TypeAlias
import math

import numpy as np
import numpy.typing as npt

from .errors import InvalidInputError
from ..core.units import wavelength_to_omega

__all__ = [
    'TransferMatrix4', 'FourPortField', 'ScatteringAmplitudes', 'SlabGeometry', 'CavityCoupling',
    'N1_EFF_ESTIMATE', 'N1_EFF_CALIBRATED',
]

# 4×4 complex matrix in the (S_x+, S_x-, S_y+, S_y-) basis, optionally stacked along leading axes
TransferMatrix4: TypeAlias = npt.NDArray[np.complex128]

# Area-weighted permittivity of a GaAs slab with a triangular lattice of r = 0.3a air holes
N1_EFF_ESTIMATE = 2.85
# Effective slab index that puts the peak-reflectivity minimum at 1370 nm (see calibrate_n1_eff)
N1_EFF_CALIBRATED = 1.36


def _positive(value: float, name: str, *, allow_inf: bool = False) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InvalidInputError(f"{name} must be a number, got {value!r}") from None
    if math.isnan(value) or value <= 0.0 or (math.isinf(value) and not allow_inf):
        raise InvalidInputError(f"{name} must be positive{'' if allow_inf else ' and finite'}, got {value}")
    return value


class FourPortField(NamedTuple):
    """
    Field amplitudes of both polarizations at one plane, "+" travelling down into the stack
    """
    s_x_plus: complex
    s_x_minus: complex
    s_y_plus: complex
    s_y_minus: complex

    def as_vector(self) -> npt.NDArray[np.complex128]:
        return np.asarray(self, dtype=complex)


class ScatteringAmplitudes(NamedTuple):
    """
    Reflected and transmitted amplitudes for a unit x-polarized wave incident from the top

    Entries are complex scalars, or complex arrays when solved over a wavelength grid.
    """
    r_xx: complex | npt.NDArray[np.complex128]
    r_yx: complex | npt.NDArray[np.complex128]
    t_xx: complex | npt.NDArray[np.complex128]
    t_yx: complex | npt.NDArray[np.complex128]

    @property
    def r_cross(self):
        """Cross-polarized reflectivity |r_yx|²"""
        return np.abs(self.r_yx) ** 2

    @property
    def top(self) -> FourPortField:
        return FourPortField(1.0, self.r_xx, 0.0, self.r_yx)

    @property
    def bottom(self) -> FourPortField:
        return FourPortField(self.t_xx, 0.0, self.t_yx, 0.0)


@dataclass(kw_only=True, slots=True, frozen=True)
class SlabGeometry:
    """
    The sample cross section: air | PC slab | air gap | substrate

    The photonic crystal slab is reduced to a homogeneous layer of effective index `n1_eff`, the
    cavity coupling plane sits at its mid-plane.
    """
    n0: float = 1.0
    n1_eff: float = N1_EFF_CALIBRATED
    t1: float = 200.0  # nm
    t2: float = 1200.0  # nm
    n3: float = 3.4

    def __post_init__(self):
        for name in ('n0', 'n1_eff', 't1', 't2', 'n3'):
            object.__setattr__(self, name, _positive(getattr(self, name), f"geometry.{name}"))

    @classmethod
    def uniform(cls, index: float = 1.0, *, t1: float = 200.0, t2: float = 1200.0) -> 'SlabGeometry':
        """A geometry with every region of the same index, so the cavity radiates into a homogeneous medium"""
        return cls(n0=index, n1_eff=index, t1=t1, t2=t2, n3=index)


@dataclass(kw_only=True, slots=True, frozen=True)
class CavityCoupling:
    """
    Resonance and decay channels of the nanocavity

    `q_cav_x` and `q_cav_y` are the vertical (radiative) quality factors of the two polarization
    channels, `q_loss` is the in-plane quality factor. An infinite `q_cav_x` or `q_cav_y` decouples
    that polarization.
    """
    resonance_wavelength: float = 1310.0  # nm
    q_cav_x: float = 1e4
    q_cav_y: float = 1e4
    q_loss: float = 1e8

    def __post_init__(self):
        object.__setattr__(self, 'resonance_wavelength',
                           _positive(self.resonance_wavelength, "coupling.resonance_wavelength"))
        for name in ('q_cav_x', 'q_cav_y'):
            object.__setattr__(self, name, _positive(getattr(self, name), f"coupling.{name}", allow_inf=True))
        object.__setattr__(self, 'q_loss', _positive(self.q_loss, "coupling.q_loss"))

    @property
    def omega0(self) -> float:
        """Resonance angular frequency in rad/s"""
        return wavelength_to_omega(self.resonance_wavelength)

    @property
    def total_q(self) -> float:
        """Loaded Q from the sum of the three decay rates"""
        return 1.0 / (1.0 / self.q_cav_x + 1.0 / self.q_cav_y + 1.0 / self.q_loss)
