from .errors import (
    CavicoreError, InvalidInputError, SpectrumFormatError, InsufficientBackgroundError, SingularSystemError,
    PeakNotFoundError, NoSignificantPeakError,
)
from .optics import Layer, Stack
from .cavity import (
    TransferMatrix4, FourPortField, ScatteringAmplitudes, SlabGeometry, CavityCoupling,
    N1_EFF_ESTIMATE, N1_EFF_CALIBRATED,
)
from .lineshape import LorentzianPeak, FanoPeak, CompositeModel, Dip
from .spectrum import Spectrum
from .fit import PeakCandidate, FitOptions, FitResult, PooledQ, SpectrumFit, FitReport, FitReportRecord
from .design import Shift, LatticeDesign, QTheoTable, SweepRow
