from .types import (
    Layer, Stack, SlabGeometry, CavityCoupling, LorentzianPeak, FanoPeak, CompositeModel, Dip, Spectrum,
    CavicoreError, InvalidInputError,
)

__all__ = [
    'Layer', 'Stack', 'SlabGeometry', 'CavityCoupling', 'LorentzianPeak', 'FanoPeak', 'CompositeModel', 'Dip',
    'Spectrum', 'CavicoreError', 'InvalidInputError',
]
