from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Mapping

from .errors import InvalidInputError

__all__ = ['Shift', 'LatticeDesign', 'QTheoTable', 'SweepRow', 'SLAB_THICKNESS_NM', 'HOLE_RADIUS_RATIO']

SLAB_THICKNESS_NM = 200.0
HOLE_RADIUS_RATIO = 0.3


class Shift(Enum):
    """Outward shift of the two end holes of the L3 cavity"""
    NONE = 'none'
    A01 = '0.1a'
    A02 = '0.2a'

    @classmethod
    def parse(cls, value: 'str | Shift') -> 'Shift':
        """
        Accepts ``none``/``0``, ``0.1a``/``0.1`` and ``0.2a``/``0.2``.

        :raises InvalidInputError: On any other spelling
        """
        if isinstance(value, Shift):
            return value
        text = str(value).strip().lower()
        aliases = {'none': cls.NONE, '0': cls.NONE, '0a': cls.NONE, '0.0': cls.NONE,
                   '0.1a': cls.A01, '0.1': cls.A01, '0.2a': cls.A02, '0.2': cls.A02}
        try:
            return aliases[text]
        except KeyError:
            raise InvalidInputError(f"Unknown hole shift {value!r}, use one of: none, 0.1a, 0.2a") from None

    @property
    def fraction(self) -> float:
        """The shift as a fraction of the lattice constant"""
        return {Shift.NONE: 0.0, Shift.A01: 0.1, Shift.A02: 0.2}[self]


@dataclass(kw_only=True, slots=True, frozen=True)
class LatticeDesign:
    """
    One L3 cavity design of the triangular-lattice slab
    """
    a: float  # lattice constant, nm
    shift: Shift = Shift.NONE
    t: float = SLAB_THICKNESS_NM

    def __post_init__(self):
        if not self.a > 0.0:
            raise InvalidInputError(f"Lattice constant must be positive, got {self.a}")
        object.__setattr__(self, 'shift', Shift.parse(self.shift))

    @property
    def r(self) -> float:
        """Air hole radius in nm"""
        return HOLE_RADIUS_RATIO * self.a

    @property
    def relative_thickness(self) -> float:
        return self.t / self.a


@dataclass(kw_only=True, slots=True, frozen=True)
class QTheoTable:
    """
    Simulated Q at the two ends of the lattice constant range, per hole shift
    """
    a_min: float = 350.0
    a_max: float = 490.0
    # shift -> (Q at a_min, Q at a_max)
    endpoints: Mapping[Shift, tuple[float, float]]

    def __post_init__(self):
        if not self.a_min < self.a_max:
            raise InvalidInputError(f"a_min must be below a_max, got {self.a_min}, {self.a_max}")
        for shift, (q_hi, q_lo) in self.endpoints.items():
            if not q_hi > q_lo > 0.0:
                raise InvalidInputError(f"Q must decrease with the lattice constant for shift {shift.value}, "
                                        f"got {q_hi} -> {q_lo}")


class SweepRow(NamedTuple):
    """One lattice constant of a design sweep"""
    a: float
    resonance_wavelength: float
    relative_thickness: float
    q_theo: float
    peak_reflectivity: float
