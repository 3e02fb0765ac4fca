"""
Q-factor extraction from reflectance spectra.

The pipeline detects peaks, fits a composite model (Fano peak + Fabry-Pérot background + floor)
in a window around each of them with bounded least squares, and derives Q = λ₀/FWHM and the
peak-to-noise ratio from the fit.

Fits run on the spectrum divided by its maximum, and the parameters that scale with the reflectance
level (κ, FP scale, floor) are rescaled afterwards, so the extracted linewidths do not depend on the
absolute reflectance calibration.
"""
from dataclasses import dataclass, replace
from typing import Iterable, Mapping
import logging
import math

import numpy as np
import numpy.typing as npt
from scipy.optimize import least_squares
from scipy.signal import find_peaks, peak_widths

from .lineshape import composite_eval, fano_reflectance
from .optics import airy_stack_reflectance, free_spectral_range
from ..core.units import wavelength_to_omega
from ..types.errors import InsufficientBackgroundError, InvalidInputError, NoSignificantPeakError
from ..types.fit import (
    FitOptions, FitResult, INSTRUMENT_RESOLUTION_NM, PeakCandidate, PooledQ, SpectrumFit,
)
from ..types.lineshape import CompositeModel, FanoPeak, LorentzianPeak
from ..types.optics import Layer, Stack
from ..types.spectrum import MIN_SPECTRUM_LENGTH, Spectrum

__all__ = [
    'robust_deviation', 'noise_from_differences', 'detect_peaks', 'fit_composite', 'estimate_snr',
    'q_from_linewidth', 'fit_spectrum', 'normalize_by_reference', 'pool_q_factors',
]

logger = logging.getLogger(__name__)

# Median absolute deviation -> standard deviation of a normal distribution
MAD_TO_SIGMA = 1.4826

# Forward-difference step, relative to max(1, |x|)
DIFF_STEP = 1e-6
TOLERANCE = 1e-10

# Restarts whose costs differ less than this are compared by the number of pinned parameters
_TIE_RTOL = 1e-6
# Singular values below this fraction of the largest are treated as zero
_SINGULAR_RTOL = 1e-10
# With unit-norm Jacobian columns, directions below this fraction are flagged as poorly determined
_ILL_CONDITIONED_RTOL = 1e-4
# FP layer thicknesses are only identifiable in windows spanning a fair part of a fringe
_MIN_FSR_FRACTION = 0.1
# Background deviation below this fraction of the peak height counts as noiseless
_NOISELESS_RATIO = 1e-9


def robust_deviation(values: npt.ArrayLike) -> float:
    """1.4826 × median absolute deviation"""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise InvalidInputError("Robust deviation of an empty sample")
    return float(MAD_TO_SIGMA * np.median(np.abs(v - np.median(v))))


def noise_from_differences(values: npt.ArrayLike) -> float:
    """
    Robust noise estimate from first differences, insensitive to smooth backgrounds and narrow peaks.
    """
    v = np.asarray(values, dtype=float)
    if v.size < 3:
        raise InvalidInputError("Noise estimate needs at least 3 samples")
    return robust_deviation(np.diff(v)) / math.sqrt(2.0)


def q_from_linewidth(lambda0: float, fwhm: float) -> float:
    """
    :raises InvalidInputError: If the FWHM is not positive
    """
    if not fwhm > 0.0:
        raise InvalidInputError(f"FWHM must be positive, got {fwhm}")
    return lambda0 / fwhm


def detect_peaks(spectrum: Spectrum, min_prominence: float = 0.0) -> list[PeakCandidate]:
    """
    Local maxima with at least `min_prominence`, highest first.

    The rough width is the width at half prominence, interpolated between samples.

    :param spectrum: The spectrum to search
    :param min_prominence: Prominence threshold in reflectance units
    :return: The candidates, possibly none
    """
    r = np.asarray(spectrum.reflectance)
    wl = spectrum.wavelengths
    indices, props = find_peaks(r, prominence=max(float(min_prominence), 0.0))
    if not len(indices):
        return []
    _, _, left_ips, right_ips = peak_widths(
        r, indices, rel_height=0.5,
        prominence_data=(props['prominences'], props['left_bases'], props['right_bases']))
    samples = np.arange(len(r))
    widths = np.interp(right_ips, samples, wl) - np.interp(left_ips, samples, wl)
    min_width = float(np.min(np.diff(wl)))
    candidates = [
        PeakCandidate(wavelength=float(wl[i]), height=float(r[i]), rough_width=max(float(w), min_width),
                      prominence=float(p))
        for i, w, p in zip(indices, widths, props['prominences'])
    ]
    candidates.sort(key=lambda c: c.height, reverse=True)
    return candidates


@dataclass(slots=True)
class _Parameter:
    name: str
    value: float
    lower: float
    upper: float
    free: bool = True
    # Scales with the reflectance level
    linear: bool = False
    # The optimizer sees value - origin
    origin: float = 0.0


class _ModelSpace:
    """
    Maps between a CompositeModel and the optimizer vector of its free parameters
    """

    def __init__(self, init: CompositeModel, spectrum: Spectrum, options: FitOptions,
                 bounds: Mapping[str, tuple[float, float]], scale: float):
        self.init = init
        self.scale = scale
        self.params: list[_Parameter] = []

        lo_wl, hi_wl = spectrum.span
        span = hi_wl - lo_wl
        for i, peak in enumerate(init.peaks):
            lambda_c, fwhm = peak.base.lambda_c, peak.base.fwhm
            self._add(f"peak{i}.kappa", peak.base.kappa, 0.0, math.inf, linear=True)
            self._add(f"peak{i}.lambda_c", lambda_c, lo_wl, hi_wl, origin=lambda_c)
            self._add(f"peak{i}.fwhm", fwhm, 1e-3 * fwhm, max(span, 2.0 * fwhm))
            self._add(f"peak{i}.fano_re", peak.background_re, -10.0, 10.0, free=options.vary_fano)
            self._add(f"peak{i}.fano_im", peak.background_im, -10.0, 10.0, free=options.vary_fano)

        stack = init.fp_stack
        if stack is not None:
            self._add("fp_scale", init.fp_scale, 0.0, math.inf, free=options.vary_fp, linear=True)
            vary_thickness = options.vary_fp and options.vary_fp_thickness and bool(stack.layers)
            if vary_thickness and span < _MIN_FSR_FRACTION * free_spectral_range(stack, 0.5 * (lo_wl + hi_wl)):
                logger.debug("Fit window of %.4g nm is too narrow to resolve FP layer thicknesses, keeping them",
                             span)
                vary_thickness = False
            for j, layer in enumerate(stack.layers):
                self._add(f"fp_layer{j}.thickness", layer.thickness, 0.5 * layer.thickness,
                          1.5 * layer.thickness, free=vary_thickness)
        self._add("floor", init.floor, 0.0, math.inf, free=options.vary_floor, linear=True)

        names = {p.name: p for p in self.params}
        for name, (lower, upper) in bounds.items():
            if name not in names:
                raise InvalidInputError(f"Unknown fit parameter in bounds: {name}")
            names[name].lower, names[name].upper = lower, upper
        for p in self.params:
            if not p.lower <= p.value <= p.upper:
                raise InvalidInputError(f"Initial {p.name} = {p.value:.9g} is outside its bounds "
                                        f"[{p.lower:.9g}, {p.upper:.9g}]")

        self.free = [p for p in self.params if p.free]

    def _add(self, name: str, value: float, lower: float, upper: float, *, free: bool = True,
             linear: bool = False, origin: float = 0.0):
        self.params.append(_Parameter(name=name, value=float(value), lower=lower, upper=upper, free=free,
                                      linear=linear, origin=origin))

    def _unit(self, p: _Parameter) -> float:
        return self.scale if p.linear else 1.0

    def to_x(self, p: _Parameter, value: float) -> float:
        return (value - p.origin) / self._unit(p)

    def from_x(self, p: _Parameter, x: float) -> float:
        return p.origin + x * self._unit(p)

    @property
    def names(self) -> list[str]:
        return [p.name for p in self.free]

    @property
    def bounds(self) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
        lower = np.array([self.to_x(p, p.lower) for p in self.free])
        upper = np.array([self.to_x(p, p.upper) for p in self.free])
        return lower, upper

    def start(self, width_factor: float) -> npt.NDArray[np.float64]:
        """Initial vector with every peak width multiplied by `width_factor`"""
        x0 = []
        for p in self.free:
            value = p.value * width_factor if p.name.endswith('.fwhm') else p.value
            x0.append(self.to_x(p, min(max(value, p.lower), p.upper)))
        return np.array(x0)

    def values(self, x: npt.NDArray[np.float64], *, normalized: bool) -> dict[str, float]:
        """Parameter values of a vector, with linear ones optionally left in normalized units"""
        out = {}
        free = dict(zip(self.names, x))
        for p in self.params:
            value = self.from_x(p, free[p.name]) if p.name in free else p.value
            if normalized and p.linear:
                value /= self.scale
            out[p.name] = value
        return out

    def model(self, x: npt.NDArray[np.float64], *, normalized: bool = False) -> CompositeModel:
        v = self.values(x, normalized=normalized)
        peaks = tuple(
            FanoPeak(base=LorentzianPeak.from_linewidth(lambda_c=v[f"peak{i}.lambda_c"], fwhm=v[f"peak{i}.fwhm"],
                                                        kappa=v[f"peak{i}.kappa"]),
                     background_re=v[f"peak{i}.fano_re"], background_im=v[f"peak{i}.fano_im"])
            for i in range(len(self.init.peaks)))
        stack = self.init.fp_stack
        if stack is not None:
            stack = Stack(top_cladding_index=stack.top_cladding_index,
                          layers=tuple(Layer(refractive_index=layer.refractive_index,
                                             thickness=v[f"fp_layer{j}.thickness"])
                                       for j, layer in enumerate(stack.layers)),
                          bottom_cladding_index=stack.bottom_cladding_index)
            return CompositeModel(peaks=peaks, fp_stack=stack, fp_scale=v["fp_scale"], floor=v["floor"])
        return CompositeModel(peaks=peaks, floor=v["floor"])

    def active(self, active_mask: npt.NDArray[np.int_]) -> list[str]:
        """Names of the parameters the optimizer left on a bound"""
        return [name for name, active in zip(self.names, active_mask) if active]


@dataclass(slots=True)
class _Attempt:
    width_factor: float
    x: npt.NDArray[np.float64]
    fun: npt.NDArray[np.float64]
    jac: npt.NDArray[np.float64]
    cost: float
    nfev: int
    converged: bool
    at_bounds: list[str]


def _best_attempt(attempts: list[_Attempt]) -> _Attempt:
    """Lowest converged cost; near-ties go to fewer parameters pinned at bounds, then restart order"""
    pool = [a for a in attempts if a.converged] or attempts
    lowest = min(a.cost for a in pool)
    tied = [a for a in pool if a.cost <= lowest * (1.0 + _TIE_RTOL) + 1e-30]
    return min(tied, key=lambda a: len(a.at_bounds))


def _null_members(vt: npt.NDArray[np.float64], null: npt.NDArray[np.bool_]) -> list[int]:
    return sorted({int(j) for row in vt[null] for j in np.flatnonzero(np.abs(row) > 0.1)})


def _covariance(jac: npt.NDArray[np.float64], cost: float) \
        -> tuple[npt.NDArray[np.float64], list[int], list[int]]:
    """
    Parameter covariance s²·(JᵀJ)⁺ from the SVD of the Jacobian.

    Near-degenerate directions are looked for on the Jacobian with unit-norm columns, so parameter
    units do not count as ill-conditioning.

    :return: The covariance, the indices of parameters in (numerically) null directions and the
             indices of further parameters in poorly determined directions
    """
    m, k = jac.shape
    _, s, vt = np.linalg.svd(jac, full_matrices=False)
    keep = s > (s[0] * _SINGULAR_RTOL if len(s) and s[0] > 0.0 else math.inf)
    inv = np.where(keep, 1.0 / np.where(keep, s, 1.0) ** 2, 0.0)
    s2 = 2.0 * cost / max(m - k, 1)
    cov = (vt.T * inv) @ vt * s2
    singular = _null_members(vt, ~keep)

    norms = np.linalg.norm(jac, axis=0)
    _, sn, vtn = np.linalg.svd(jac / np.where(norms > 0.0, norms, 1.0), full_matrices=False)
    weak = sn < (sn[0] * _ILL_CONDITIONED_RTOL if len(sn) and sn[0] > 0.0 else math.inf)
    ill = [j for j in _null_members(vtn, weak) if j not in singular]
    return cov, singular, ill


def fit_composite(spectrum: Spectrum, init: CompositeModel, bounds: Mapping[str, tuple[float, float]] | None = None,
                  options: FitOptions | None = None) -> FitResult:
    """
    Least-squares fit of a composite model to a spectrum.

    Bounded trust-region least squares with forward-difference Jacobians, restarted with every peak
    width scaled by each of `options.restarts`. The best converged restart wins.

    :param spectrum: Data to fit, usually a window around one peak
    :param init: Starting model, its first peak is the one reported
    :param bounds: Per-parameter (lower, upper) intervals, on top of `options.bounds`
    :param options: Fit settings
    :return: The fit result, `converged` is False if no restart met the tolerances
    :raises InvalidInputError: If the model has no peak, or bounds do not contain the start
    """
    options = options or FitOptions()
    if not init.peaks:
        raise InvalidInputError("The model to fit needs at least one peak")
    wl = spectrum.wavelengths
    if not np.all(np.isfinite(composite_eval(init, wl))):
        raise InvalidInputError("Initial model does not evaluate finitely on the spectrum")

    scale = float(np.max(spectrum.reflectance)) or 1.0
    space = _ModelSpace(init, spectrum, options, {**options.bounds, **(bounds or {})}, scale)
    target = spectrum.reflectance / scale
    lower, upper = space.bounds

    def residuals(x: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return composite_eval(space.model(x, normalized=True), wl) - target

    attempts = []
    for factor in options.restarts:
        res = least_squares(residuals, space.start(factor), bounds=(lower, upper), method='trf', x_scale='jac',
                            diff_step=DIFF_STEP, ftol=TOLERANCE, xtol=TOLERANCE, gtol=TOLERANCE,
                            max_nfev=options.max_iterations)
        attempt = _Attempt(width_factor=factor, x=res.x, fun=res.fun, jac=res.jac, cost=float(res.cost),
                           nfev=int(res.nfev), converged=res.status > 0, at_bounds=space.active(res.active_mask))
        logger.debug("Restart with width ×%g: cost %.6g after %d evaluations (%s)", factor, attempt.cost,
                     attempt.nfev, res.message)
        attempts.append(attempt)
    best = _best_attempt(attempts)

    values = space.values(best.x, normalized=False)
    model = space.model(best.x)
    lambda0, fwhm = values["peak0.lambda_c"], values["peak0.fwhm"]
    q_exp = q_from_linewidth(lambda0, fwhm)

    cov, affected, ill = _covariance(best.jac, best.cost)
    stderr = {p.name: 0.0 for p in space.params}
    for i, p in enumerate(space.free):
        stderr[p.name] = math.sqrt(max(float(cov[i, i]), 0.0)) * (scale if p.linear else 1.0)
    q_stderr = q_exp * math.hypot(stderr["peak0.lambda_c"] / lambda0, stderr["peak0.fwhm"] / fwhm)

    meta = []
    if fwhm < INSTRUMENT_RESOLUTION_NM:
        meta.append("below_instrument_resolution")
        logger.warning("Fitted FWHM %.3g pm is below the %.1f pm wavelength-meter resolution",
                       fwhm * 1e3, INSTRUMENT_RESOLUTION_NM * 1e3)
    if affected:
        names = [space.names[i] for i in affected]
        meta.append("singular_jacobian:" + ",".join(names))
        logger.warning("Jacobian is singular in the direction of: %s", ", ".join(names))
    if ill:
        names = [space.names[i] for i in ill]
        meta.append("ill_conditioned:" + ",".join(names))
        logger.warning("Parameters trade off against each other, errors are unreliable: %s", ", ".join(names))
    if best.at_bounds:
        meta.append("at_bounds:" + ",".join(best.at_bounds))
    if not best.converged:
        logger.warning("Fit near %.6g nm did not converge in %d evaluations", lambda0, options.max_iterations)

    result = FitResult(
        params=model,
        stderr=stderr,
        q_exp=q_exp,
        q_stderr=q_stderr,
        lambda0=lambda0,
        fwhm=fwhm,
        residual_rms=float(np.sqrt(np.mean(best.fun ** 2))) * scale,
        converged=best.converged,
        iterations=best.nfev,
        cost=best.cost * scale * scale,
        window=spectrum.span,
        meta=tuple(meta),
    )
    logger.info("Peak at %.6f nm: FWHM %.4g pm, Q %.6g ± %.2g", lambda0, fwhm * 1e3, q_exp, q_stderr)
    return result


def estimate_snr(spectrum: Spectrum, fit: FitResult, exclusion_halfwidths: float = 5.0) -> float:
    """
    Fitted peak height over the robust deviation of the residuals away from the peak.

    Residuals are taken inside the fit window but outside ±`exclusion_halfwidths`·FWHM around λ₀.

    :return: The SNR, infinity if the background deviation vanishes
    :raises InsufficientBackgroundError: If fewer than 16 background samples remain
    """
    if not fit.converged:
        logger.warning("Estimating SNR from a fit that did not converge")
    lo, hi = fit.window
    wl = spectrum.wavelengths
    inside = (wl >= lo) & (wl <= hi)
    background = inside & (np.abs(wl - fit.lambda0) > exclusion_halfwidths * fit.fwhm)
    if np.count_nonzero(background) < MIN_SPECTRUM_LENGTH:
        raise InsufficientBackgroundError(
            f"Only {np.count_nonzero(background)} background samples outside ±{exclusion_halfwidths:g} FWHM, "
            f"need {MIN_SPECTRUM_LENGTH}")

    residuals = spectrum.reflectance[background] - composite_eval(fit.params, wl[background])
    noise = robust_deviation(residuals)

    omega = wavelength_to_omega(np.append(wl[inside], fit.lambda0))
    excess = np.zeros_like(omega)
    for peak in fit.params.peaks:
        excess += fano_reflectance(peak, omega) - peak.base.kappa * abs(peak.offset) ** 2
    height = float(np.max(excess))

    if noise <= _NOISELESS_RATIO * abs(height):
        return math.inf
    return height / noise


def _fit_window(spectrum: Spectrum, candidate: PeakCandidate, halfwidths: float) -> Spectrum:
    wl = spectrum.wavelengths
    half = halfwidths * candidate.rough_width
    lo = int(np.searchsorted(wl, candidate.wavelength - half, side='left'))
    hi = int(np.searchsorted(wl, candidate.wavelength + half, side='right'))
    if hi - lo < MIN_SPECTRUM_LENGTH:
        center = int(np.searchsorted(wl, candidate.wavelength))
        lo = max(0, center - MIN_SPECTRUM_LENGTH // 2)
        hi = min(len(wl), lo + MIN_SPECTRUM_LENGTH)
        lo = max(0, hi - MIN_SPECTRUM_LENGTH)
    return spectrum.samples(lo, hi)


def _initial_model(window: Spectrum, candidate: PeakCandidate, background: Stack | None,
                   options: FitOptions) -> CompositeModel:
    baseline = float(np.median(window.reflectance))
    peak = FanoPeak(base=LorentzianPeak.from_linewidth(lambda_c=candidate.wavelength, fwhm=candidate.rough_width,
                                                       kappa=candidate.prominence))
    if background is None:
        return CompositeModel(peaks=(peak,), floor=baseline)
    airy = float(np.mean(airy_stack_reflectance(background, window.wavelengths)[0]))
    fp_scale = min(options.fp_scale, baseline / airy) if airy > 0.0 else options.fp_scale
    return CompositeModel(peaks=(peak,), fp_stack=background, fp_scale=fp_scale,
                          floor=max(baseline - fp_scale * airy, 0.0))


def fit_spectrum(spectrum: Spectrum, options: FitOptions | None = None,
                 background: Stack | None = None) -> SpectrumFit:
    """
    Detect, fit and rate every significant peak of a spectrum.

    Candidates whose prominence is below `options.significance` × the robust noise are rejected,
    candidates inside the window of a higher peak already fitted are skipped.

    :param spectrum: The measured or synthetic spectrum
    :param options: Pipeline settings
    :param background: Fabry-Pérot stack of the fit background, no FP term if None
    :return: The fits and the rejected candidates
    :raises NoSignificantPeakError: If no candidate survives
    """
    options = options or FitOptions()
    r = spectrum.reflectance
    noise = noise_from_differences(r)
    if options.min_prominence is not None:
        threshold = options.min_prominence
    else:
        threshold = options.relative_prominence * float(np.max(r) - np.median(r))
    candidates = detect_peaks(spectrum, threshold)
    if not candidates:
        raise NoSignificantPeakError("No peak found in the spectrum")
    logger.debug("%d candidate(s) above prominence %.4g, noise %.4g", len(candidates), threshold, noise)

    results: list[FitResult] = []
    rejected: list[PeakCandidate] = []
    for candidate in candidates:
        if any(done.window[0] <= candidate.wavelength <= done.window[1] for done in results):
            logger.debug("Candidate at %.6f nm lies inside a fitted window, skipped", candidate.wavelength)
            continue
        if candidate.prominence < options.significance * noise:
            logger.warning("Peak at %.6f nm rejected: prominence %.3g is below %g× noise %.3g",
                           candidate.wavelength, candidate.prominence, options.significance, noise)
            rejected.append(candidate)
            continue
        window = _fit_window(spectrum, candidate, options.window_halfwidths)
        result = fit_composite(window, _initial_model(window, candidate, background, options), options=options)
        try:
            snr = estimate_snr(window, result, options.exclusion_halfwidths)
        except InsufficientBackgroundError as e:
            logger.warning("No SNR for the peak at %.6f nm: %s", result.lambda0, e)
            snr = math.nan
        results.append(replace(result, snr=snr))

    if not results:
        raise NoSignificantPeakError(
            f"None of {len(rejected)} peak candidate(s) exceeds {options.significance:g}× the noise {noise:.3g}")
    return SpectrumFit(results=tuple(results), rejected=tuple(rejected), noise=noise)


def normalize_by_reference(spectrum: Spectrum, reference: Spectrum) -> Spectrum:
    """
    Divide by a reference (mirror) spectrum interpolated onto the sample grid.

    :raises InvalidInputError: If the reference does not cover the spectrum or is not positive on it
    """
    lo, hi = spectrum.span
    ref_lo, ref_hi = reference.span
    if lo < ref_lo or hi > ref_hi:
        raise InvalidInputError(f"Reference {ref_lo:.6g}..{ref_hi:.6g} nm does not cover the spectrum "
                                f"{lo:.6g}..{hi:.6g} nm")
    ref = np.interp(spectrum.wavelengths, reference.wavelengths, reference.reflectance)
    if np.any(ref <= 0.0):
        raise InvalidInputError("Reference reflectance must be positive over the spectrum")
    meta = "\n".join(m for m in (spectrum.meta, "normalized by reference spectrum") if m)
    return Spectrum(wavelengths=spectrum.wavelengths, reflectance=spectrum.reflectance / ref, meta=meta)


def pool_q_factors(results: Iterable[FitResult]) -> PooledQ:
    """
    Mean and sample standard deviation of Q over repeated measurements of one cavity.

    :raises InvalidInputError: Without any result
    """
    q = np.array([r.q_exp for r in results], dtype=float)
    if not len(q):
        raise InvalidInputError("No fit results to pool")
    std = float(np.std(q, ddof=1)) if len(q) > 1 else 0.0
    return PooledQ(mean=float(np.mean(q)), std=std, count=len(q))
