from dataclasses import dataclass, field
from typing import NamedTuple, Mapping
import math

from .errors import InvalidInputError
from .lineshape import CompositeModel

__all__ = [
    'PeakCandidate', 'FitOptions', 'FitResult', 'PooledQ', 'SpectrumFit', 'FitReport', 'FitReportRecord',
    'INSTRUMENT_RESOLUTION_NM', 'SPECTROMETER_RESOLUTION_NM',
]

# Wavelength-meter resolution of the tunable laser scans
INSTRUMENT_RESOLUTION_NM = 3e-4
# Resolution limit of the PL spectrometer, noted in reports only
SPECTROMETER_RESOLUTION_NM = 1.8


class PeakCandidate(NamedTuple):
    """A local maximum found by peak detection, the starting point of a fit"""
    wavelength: float  # nm
    height: float
    rough_width: float  # nm, width at half prominence
    prominence: float


@dataclass(kw_only=True, slots=True, frozen=True)
class FitOptions:
    """
    Settings of the detect → fit → SNR pipeline

    `bounds` maps parameter names (``peak0.kappa``, ``peak0.lambda_c``, ``peak0.fwhm``,
    ``peak0.fano_re``, ``peak0.fano_im``, ``fp_scale``, ``fp_layer0.thickness``, ``floor``) to
    (lower, upper) intervals overriding the defaults.
    """
    window_halfwidths: float = 25.0
    restarts: tuple[float, ...] = (1.0, 0.5, 2.0)
    max_iterations: int = 200
    min_prominence: float | None = None
    relative_prominence: float = 0.5
    significance: float = 3.0
    exclusion_halfwidths: float = 5.0
    vary_fano: bool = True
    vary_fp: bool = True
    vary_fp_thickness: bool = True
    vary_floor: bool = True
    fp_scale: float = 0.05
    bounds: Mapping[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        restarts = tuple(float(r) for r in self.restarts)
        if not restarts or any(not (r > 0.0 and math.isfinite(r)) for r in restarts):
            raise InvalidInputError(f"fit.restarts must be a non-empty list of positive factors, got {restarts}")
        object.__setattr__(self, 'restarts', restarts)
        for name in ('window_halfwidths', 'significance', 'exclusion_halfwidths'):
            value = float(getattr(self, name))
            if not (value > 0.0 and math.isfinite(value)):
                raise InvalidInputError(f"fit.{name} must be positive, got {value}")
            object.__setattr__(self, name, value)
        if not 0.0 <= self.relative_prominence < 1.0:
            raise InvalidInputError(f"fit.relative_prominence must be within [0, 1), got {self.relative_prominence}")
        if self.min_prominence is not None and self.min_prominence < 0.0:
            raise InvalidInputError(f"fit.min_prominence must not be negative, got {self.min_prominence}")
        if int(self.max_iterations) < 1:
            raise InvalidInputError(f"fit.max_iterations must be at least 1, got {self.max_iterations}")
        object.__setattr__(self, 'max_iterations', int(self.max_iterations))
        if self.fp_scale < 0.0:
            raise InvalidInputError(f"fit.fp_scale must not be negative, got {self.fp_scale}")
        bounds = {}
        for name, interval in dict(self.bounds).items():
            try:
                lower, upper = (float(v) for v in interval)
            except (TypeError, ValueError):
                raise InvalidInputError(f"fit.bounds.{name} must be a [lower, upper] pair, got {interval!r}") \
                    from None
            if not lower < upper:
                raise InvalidInputError(f"fit.bounds.{name} must have lower < upper, got {interval!r}")
            bounds[name] = (lower, upper)
        object.__setattr__(self, 'bounds', bounds)


@dataclass(kw_only=True, slots=True, frozen=True)
class FitResult:
    """
    Outcome of one least-squares fit of a CompositeModel

    `lambda0`, `fwhm` and `q_exp` describe the first peak of `params`. `meta` carries flags such as
    ``below_instrument_resolution``, ``singular_jacobian:<names>``, ``ill_conditioned:<names>``
    and ``at_bounds:<names>``.
    """
    params: CompositeModel
    stderr: Mapping[str, float]
    q_exp: float
    q_stderr: float
    lambda0: float  # nm
    fwhm: float  # nm
    snr: float = math.nan
    residual_rms: float
    converged: bool
    iterations: int
    cost: float
    window: tuple[float, float]
    meta: tuple[str, ...] = ()

    @property
    def below_instrument_resolution(self) -> bool:
        return 'below_instrument_resolution' in self.meta


class PooledQ(NamedTuple):
    """Q factors of repeated measurements of one cavity"""
    mean: float
    std: float
    count: int


class SpectrumFit(NamedTuple):
    """Everything the pipeline found in one spectrum"""
    results: tuple[FitResult, ...]
    rejected: tuple[PeakCandidate, ...]
    noise: float

    @property
    def all_converged(self) -> bool:
        return all(r.converged for r in self.results)


class FitReportRecord(NamedTuple):
    """One fitted peak as written to a report"""
    lambda0_nm: float
    fwhm_nm: float
    q_exp: float
    snr: float
    kappa: float
    fano_re: float
    fano_im: float
    floor: float
    fp_scale: float
    fp_thickness_nm: tuple[float, ...]
    stderr: Mapping[str, float]
    converged: bool
    residual_rms: float
    iterations: int
    flags: tuple[str, ...]


# Report field -> fit parameter whose standard error it carries
_STDERR_SOURCES = {
    'lambda0_nm': 'peak0.lambda_c',
    'fwhm_nm': 'peak0.fwhm',
    'kappa': 'peak0.kappa',
    'fano_re': 'peak0.fano_re',
    'fano_im': 'peak0.fano_im',
    'floor': 'floor',
    'fp_scale': 'fp_scale',
}


@dataclass(slots=True)
class FitReport:
    """
    The per-peak records of one fitted spectrum
    """
    records: list[FitReportRecord] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @classmethod
    def from_results(cls, results: tuple[FitResult, ...] | list[FitResult],
                     notes: list[str] | None = None) -> 'FitReport':
        records = []
        for result in results:
            peak = result.params.peaks[0]
            stack = result.params.fp_stack
            thicknesses = tuple(layer.thickness for layer in stack.layers) if stack is not None else ()
            stderr = {key: result.stderr.get(name, 0.0) for key, name in _STDERR_SOURCES.items()}
            stderr['q_exp'] = result.q_stderr
            records.append(FitReportRecord(
                lambda0_nm=result.lambda0,
                fwhm_nm=result.fwhm,
                q_exp=result.q_exp,
                snr=result.snr,
                kappa=peak.base.kappa,
                fano_re=peak.background_re,
                fano_im=peak.background_im,
                floor=result.params.floor,
                fp_scale=result.params.fp_scale,
                fp_thickness_nm=thicknesses,
                stderr=stderr,
                converged=result.converged,
                residual_rms=result.residual_rms,
                iterations=result.iterations,
                flags=result.meta,
            ))
        return cls(records=records, notes=list(notes or []))
