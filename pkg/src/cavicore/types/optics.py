from dataclasses import dataclass
import cmath
import math

from .errors import InvalidInputError

__all__ = ['Layer', 'Stack', 'check_index']


def check_index(value: complex, name: str = "refractive index") -> complex:
    """
    Validate a refractive index given as n + ik.

    :param value: The index
    :param name: Name used in the error message
    :return: The index as a complex number
    :raises InvalidInputError: If the real part is not positive, or the extinction part is negative
    """
    try:
        n = complex(value)
    except (TypeError, ValueError):
        raise InvalidInputError(f"{name} must be a number, got {value!r}") from None
    if not cmath.isfinite(n):
        raise InvalidInputError(f"{name} must be finite, got {n}")
    if n.real <= 0.0:
        raise InvalidInputError(f"{name} must have a positive real part, got {n}")
    if n.imag < 0.0:
        raise InvalidInputError(f"{name} must have a non-negative imaginary part, got {n}")
    return n


@dataclass(kw_only=True, slots=True, frozen=True)
class Layer:
    """
    A homogeneous layer of finite thickness
    """
    refractive_index: complex
    thickness: float  # nm

    def __post_init__(self):
        object.__setattr__(self, 'refractive_index', check_index(self.refractive_index, "layer index"))
        thickness = float(self.thickness)
        if not math.isfinite(thickness) or thickness <= 0.0:
            raise InvalidInputError(f"Layer thickness must be finite and positive, got {self.thickness}")
        object.__setattr__(self, 'thickness', thickness)

    @property
    def optical_thickness(self) -> float:
        """Real optical path n·d in nm"""
        return self.refractive_index.real * self.thickness


@dataclass(kw_only=True, slots=True, frozen=True)
class Stack:
    """
    A 1D multilayer between two semi-infinite claddings, layers ordered top to bottom.

    An empty layer list is a bare interface between the claddings.
    """
    top_cladding_index: complex = 1.0
    layers: tuple[Layer, ...] = ()
    bottom_cladding_index: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, 'top_cladding_index', check_index(self.top_cladding_index, "top cladding index"))
        object.__setattr__(self, 'bottom_cladding_index',
                           check_index(self.bottom_cladding_index, "bottom cladding index"))
        layers = tuple(self.layers)
        for layer in layers:
            if not isinstance(layer, Layer):
                raise InvalidInputError(f"Stack layers must be Layer instances, got {type(layer).__name__}")
        object.__setattr__(self, 'layers', layers)

    @property
    def indices(self) -> tuple[complex, ...]:
        """All refractive indices from the top cladding down to the bottom cladding"""
        return (self.top_cladding_index, *(layer.refractive_index for layer in self.layers),
                self.bottom_cladding_index)

    @property
    def is_lossless(self) -> bool:
        return all(n.imag == 0.0 for n in self.indices)
