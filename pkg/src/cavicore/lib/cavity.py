"""
Polarization-resolved transfer matrices of a slab with an embedded nanocavity.

Matrices act on the four-vector (S_x+, S_x-, S_y+, S_y-), "+" travelling down into the stack.
The system matrix relates the top-cladding amplitudes to the substrate amplitudes,
S_bottom = T_s · S_top, with its factors multiplied in the order

    T_s = T01 · Tp(t1/2) · Tc · Tp(t1/2) · T12 · Tp(t2) · T23

so the cavity plane sits at the slab mid-plane. The cavity matrix Tc couples the x and y
polarizations through one resonant mode; far from resonance it tends to the identity.
"""
from dataclasses import replace
from typing import NamedTuple
import logging
import math

import numpy as np
import numpy.typing as npt
from scipy.optimize import brentq, minimize_scalar

from .optics import check_wavelengths, interface_matrix2, phase_index
from ..core.units import as_float_or_array, wavelength_to_omega
from ..types.cavity import CavityCoupling, ScatteringAmplitudes, SlabGeometry, TransferMatrix4
from ..types.errors import InvalidInputError, PeakNotFoundError, SingularSystemError
from ..types.optics import check_index
from ..types.spectrum import Spectrum

__all__ = [
    'propagation_matrix', 'interface_matrix', 'coupling_constant', 'mixing_kernel', 'cavity_matrix',
    'system_matrix', 'solve_scattering', 'cross_pol_amplitudes', 'cross_pol_spectrum', 'peak_reflectivity',
    'sweep_peak_reflectivity', 'model_total_q', 'calibrate_n1_eff', 'PeakReflectivityCurve',
]

logger = logging.getLogger(__name__)

# Above this condition estimate the scattering system is treated as singular
MAX_CONDITION = 1e13

# Coarse scan of the peak search: points, and half-width in units of the a priori linewidth
PEAK_SEARCH_POINTS = 2001
PEAK_SEARCH_LINEWIDTHS = 20.0
PEAK_SEARCH_TOLERANCE = 1e-10

# Resonance range of the designed cavities
SWEEP_START = 1280.0
SWEEP_STOP = 1620.0
SWEEP_POINTS = 341

PEAK_TO_BACKGROUND = 10.0


def propagation_matrix(n: complex, d: float, wavelength: npt.ArrayLike) -> TransferMatrix4:
    """
    Propagation over thickness `d` in a medium of index `n`: diag(e^{-iβd}, e^{+iβd}, e^{-iβd}, e^{+iβd}).

    :param n: Refractive index n + ik
    :param d: Thickness in nm, may be 0
    :param wavelength: Vacuum wavelength(s) in nm
    :return: 4×4 matrix, or a stack of them for an array of wavelengths
    """
    if not (math.isfinite(d) and d >= 0.0):
        raise InvalidInputError(f"Propagation distance must be finite and non-negative, got {d}")
    wl = check_wavelengths(wavelength)
    phase = np.exp(-2j * np.pi * phase_index(check_index(n)) * d / wl)
    out = np.zeros(wl.shape + (4, 4), dtype=complex)
    out[..., 0, 0] = out[..., 2, 2] = phase
    out[..., 1, 1] = out[..., 3, 3] = 1.0 / phase
    return out


def interface_matrix(n_j: complex, n_j1: complex) -> TransferMatrix4:
    """Transition from layer j into layer j+1, the same 2×2 block for both polarizations"""
    block = interface_matrix2(n_j, n_j1)
    out = np.zeros((4, 4), dtype=complex)
    out[:2, :2] = block
    out[2:, 2:] = block
    return out


def coupling_constant(q_cav: float, omega0: float) -> float:
    """
    κ = sqrt(ϖ₀/(2·Q_cav)), so κ² is the field decay rate into one vertical channel.

    :param q_cav: Vertical quality factor, infinity decouples the channel
    :param omega0: Resonance angular frequency in rad/s
    :raises InvalidInputError: On non-positive arguments
    """
    q_cav = float(q_cav)
    omega0 = float(omega0)
    if not q_cav > 0.0:
        raise InvalidInputError(f"Q_cav must be positive, got {q_cav}")
    if not (omega0 > 0.0 and math.isfinite(omega0)):
        raise InvalidInputError(f"ϖ₀ must be finite and positive, got {omega0}")
    return math.sqrt(omega0 / (2.0 * q_cav))


def mixing_kernel(kappa_x: float, kappa_y: float) -> TransferMatrix4:
    """The κ-bilinear part of the cavity matrix"""
    xx, yy, xy = kappa_x * kappa_x, kappa_y * kappa_y, kappa_x * kappa_y
    return np.array([
        [-xx, -xx, -xy, -xy],
        [xx, xx, xy, xy],
        [-xy, -xy, -yy, -yy],
        [xy, xy, yy, yy],
    ], dtype=complex)


def cavity_matrix(coupling: CavityCoupling, omega: npt.ArrayLike, *, literal: bool = False) -> TransferMatrix4:
    """
    The cavity plane: Tc = I + K / (i(ϖ - ϖ₀) + ϖ₀/(2·Q_loss)).

    With `literal` the resonant prefactor multiplies the identity as well. That form does not tend
    to the identity off resonance and is only kept for comparison.

    :param coupling: Resonance and decay channels
    :param omega: Angular frequency (or array of them) in rad/s
    """
    w = np.asarray(omega, dtype=float)
    if not np.all(w > 0.0):
        raise InvalidInputError("Angular frequency must be positive")
    w0 = coupling.omega0
    kernel = mixing_kernel(coupling_constant(coupling.q_cav_x, w0), coupling_constant(coupling.q_cav_y, w0))
    # 0-d input gives a numpy scalar, which does not take new axes
    g = np.asarray(1.0 / (1j * (w - w0) + w0 / (2.0 * coupling.q_loss)), dtype=complex)[..., None, None]
    eye = np.eye(4, dtype=complex)
    if literal:
        return g * (eye + kernel)
    return eye + g * kernel


def system_matrix(geometry: SlabGeometry, coupling: CavityCoupling, wavelength: npt.ArrayLike, *,
                  literal: bool = False) -> TransferMatrix4:
    """
    Total transfer matrix of the sample, for one wavelength or stacked over an array of them.
    """
    wl = check_wavelengths(wavelength)
    n0, n1, n3 = geometry.n0, geometry.n1_eff, geometry.n3
    half_slab = propagation_matrix(n1, geometry.t1 / 2.0, wl)
    return (interface_matrix(n0, n1) @ half_slab
            @ cavity_matrix(coupling, wavelength_to_omega(wl), literal=literal) @ half_slab
            @ interface_matrix(n1, n0) @ propagation_matrix(n0, geometry.t2, wl) @ interface_matrix(n0, n3))


def solve_scattering(t_s: TransferMatrix4, *, wavelength: npt.ArrayLike | None = None) -> ScatteringAmplitudes:
    """
    Convert a system matrix to scattering amplitudes.

    The top input is a unit x-polarized wave (S_x+ = 1, S_y+ = 0) and nothing enters from the
    substrate. Unknowns are r_xx = S_x-, r_yx = S_y- at the top and t_xx, t_yx at the bottom.

    :param t_s: 4×4 system matrix, or a stack of them
    :param wavelength: Wavelength(s) of the matrices, only used in error reports
    :return: The amplitudes, complex arrays for stacked input
    :raises SingularSystemError: If the linear system is (numerically) singular
    """
    t = np.asarray(t_s, dtype=complex)
    if t.shape[-2:] != (4, 4):
        raise InvalidInputError(f"Expected 4×4 matrices, got shape {t.shape}")
    a = np.zeros_like(t)
    a[..., :, 0] = t[..., :, 1]
    a[..., :, 1] = t[..., :, 3]
    a[..., 0, 2] = -1.0
    a[..., 2, 3] = -1.0
    b = -t[..., :, 0]

    with np.errstate(divide='ignore', invalid='ignore'):
        condition = np.asarray(np.linalg.cond(a))
    singular = ~(condition < MAX_CONDITION)
    if np.any(singular):
        index = int(np.argmax(singular.reshape(-1)))
        where = None
        if wavelength is not None:
            wl = np.broadcast_to(np.asarray(wavelength, dtype=float), condition.shape).reshape(-1)
            where = float(wl[index])
        raise SingularSystemError(float(condition.reshape(-1)[index]), where)

    x = np.linalg.solve(a, b[..., None])[..., 0]
    return ScatteringAmplitudes(*(as_float_or_array(x[..., k]) for k in range(4)))


def _check_grid(grid: npt.ArrayLike) -> npt.NDArray[np.float64]:
    wl = check_wavelengths(grid)
    if wl.ndim != 1 or len(wl) < 2 or np.any(np.diff(wl) <= 0.0):
        raise InvalidInputError("Wavelength grid must be a strictly increasing 1D sequence")
    return wl


def cross_pol_amplitudes(geometry: SlabGeometry, coupling: CavityCoupling, grid: npt.ArrayLike, *,
                         literal: bool = False) -> ScatteringAmplitudes:
    """All four scattering amplitudes over a wavelength grid"""
    wl = _check_grid(grid)
    return solve_scattering(system_matrix(geometry, coupling, wl, literal=literal), wavelength=wl)


def cross_pol_spectrum(geometry: SlabGeometry, coupling: CavityCoupling, grid: npt.ArrayLike, *,
                       literal: bool = False) -> Spectrum:
    """
    Cross-polarized reflectivity |S_y-(top) / S_x+(top)|² over a wavelength grid.

    :raises SingularSystemError: With the offending wavelength attached
    """
    wl = _check_grid(grid)
    amplitudes = cross_pol_amplitudes(geometry, coupling, wl, literal=literal)
    meta = (f"cross-polarized reflectivity, resonance {coupling.resonance_wavelength:.9g} nm, "
            f"Q_cav {coupling.q_cav_x:.6g}/{coupling.q_cav_y:.6g}, Q_loss {coupling.q_loss:.6g}, "
            f"n1_eff {geometry.n1_eff:.6g}")
    return Spectrum(wavelengths=wl, reflectance=amplitudes.r_cross, meta=meta)


def _cross_reflectance(geometry: SlabGeometry, coupling: CavityCoupling, wavelength: npt.ArrayLike,
                       literal: bool):
    wl = check_wavelengths(wavelength)
    return solve_scattering(system_matrix(geometry, coupling, wl, literal=literal), wavelength=wl).r_cross


def _search_grid(coupling: CavityCoupling) -> npt.NDArray[np.float64]:
    center = coupling.resonance_wavelength
    half = PEAK_SEARCH_LINEWIDTHS * center / coupling.total_q
    return np.linspace(max(center - half, 1e-3 * center), center + half, PEAK_SEARCH_POINTS)


def _locate_peak(geometry: SlabGeometry, coupling: CavityCoupling, literal: bool) \
        -> tuple[float, float, npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """
    Coarse scan, then golden-section refinement of the maximum.

    :return: (peak wavelength, peak value, scan grid, scan values)
    """
    grid = _search_grid(coupling)
    values = np.asarray(_cross_reflectance(geometry, coupling, grid, literal))
    i = int(np.argmax(values))
    peak_wl, peak = float(grid[i]), float(values[i])
    # A maximum on the scan edge, or a plateau, is returned as scanned
    if 0 < i < len(grid) - 1 and values[i] > values[i - 1] and values[i] > values[i + 1]:
        res = minimize_scalar(lambda x: -float(_cross_reflectance(geometry, coupling, x, literal)),
                              bracket=(grid[i - 1], grid[i], grid[i + 1]), method='golden',
                              tol=PEAK_SEARCH_TOLERANCE)
        if -res.fun > peak:
            peak_wl, peak = float(res.x), float(-res.fun)
    return peak_wl, peak, grid, values


def peak_reflectivity(geometry: SlabGeometry, coupling_template: CavityCoupling, resonance_wavelength: float, *,
                      literal: bool = False) -> float:
    """
    Maximum cross-polarized reflectivity of a cavity resonant at `resonance_wavelength`.

    The maximum is searched within ±20 a priori linewidths of the resonance, the interference
    background may pull it off the exact resonance.

    :param geometry: The sample cross section
    :param coupling_template: Decay channels; its resonance wavelength is replaced
    :param resonance_wavelength: Cavity resonance in nm
    """
    coupling = replace(coupling_template, resonance_wavelength=resonance_wavelength)
    return _locate_peak(geometry, coupling, literal)[1]


class PeakReflectivityCurve(NamedTuple):
    """Peak reflectivity as a function of the cavity resonance"""
    resonance_wavelengths: npt.NDArray[np.float64]
    peak_reflectivity: npt.NDArray[np.float64]

    def minimum(self) -> float:
        """
        Wavelength of the curve minimum, refined by a parabola through the lowest point and its
        neighbours so it moves continuously with the curve.
        """
        i = int(np.argmin(self.peak_reflectivity))
        if i == 0 or i == len(self.peak_reflectivity) - 1:
            return float(self.resonance_wavelengths[i])
        x = self.resonance_wavelengths[i - 1:i + 2]
        a, b, _ = np.polyfit(x - x[1], self.peak_reflectivity[i - 1:i + 2], 2)
        if a <= 0.0:
            return float(x[1])
        return float(np.clip(x[1] - b / (2.0 * a), x[0], x[2]))


def sweep_peak_reflectivity(geometry: SlabGeometry, coupling_template: CavityCoupling,
                            resonance_grid: npt.ArrayLike | None = None, *,
                            literal: bool = False) -> PeakReflectivityCurve:
    """
    Peak reflectivity for every resonance wavelength of a grid.

    :param resonance_grid: Strictly increasing resonance wavelengths in nm, 1280..1620 nm by default
    """
    if resonance_grid is None:
        resonance_grid = np.linspace(SWEEP_START, SWEEP_STOP, SWEEP_POINTS)
    grid = _check_grid(resonance_grid)
    values = np.array([peak_reflectivity(geometry, coupling_template, float(wl), literal=literal) for wl in grid])
    curve = PeakReflectivityCurve(grid, values)
    logger.debug("Peak reflectivity sweep over %d resonances, minimum %.4g near %.1f nm",
                 len(grid), values.min(), curve.minimum())
    return curve


def model_total_q(geometry: SlabGeometry, coupling: CavityCoupling, *, literal: bool = False) -> float:
    """
    Loaded Q of the modelled cross-polarized peak, λ_peak / FWHM.

    The FWHM is taken at half of the background-subtracted peak height, the background being the
    lower edge of the search window.

    :raises PeakNotFoundError: If the peak is not 10× above the background
    """
    peak_wl, peak, grid, values = _locate_peak(geometry, coupling, literal)
    background = float(min(values[0], values[-1]))
    if not (peak > 0.0 and peak > PEAK_TO_BACKGROUND * background):
        raise PeakNotFoundError(
            f"No cross-polarized peak near {coupling.resonance_wavelength:.6g} nm "
            f"(peak {peak:.3g}, background {background:.3g})")

    half = background + 0.5 * (peak - background)

    def excess(x: float) -> float:
        return float(_cross_reflectance(geometry, coupling, x, literal)) - half

    i = int(np.argmax(values))
    below = np.flatnonzero(values < half)
    left, right = below[below < i], below[below > i]
    if not len(left) or not len(right):
        raise PeakNotFoundError(f"Half maximum of the peak near {peak_wl:.6g} nm lies outside the search window")
    j, k = int(left[-1]), int(right[0])
    fwhm = brentq(excess, grid[k - 1], grid[k]) - brentq(excess, grid[j], grid[j + 1])
    return peak_wl / fwhm


def calibrate_n1_eff(geometry: SlabGeometry, coupling_template: CavityCoupling, *, target: float = 1370.0,
                     resonance_grid: npt.ArrayLike | None = None, bounds: tuple[float, float] = (1.0, 2.0),
                     literal: bool = False) -> float:
    """
    Effective slab index that puts the peak-reflectivity minimum nearest to `target`.

    :param geometry: Geometry whose other fields are kept
    :param coupling_template: Decay channels used along the sweep
    :param target: Wanted minimum position in nm
    :param resonance_grid: Sweep grid, 1280..1620 nm in 5 nm steps by default
    :param bounds: Search interval of the index
    :return: The calibrated index
    """
    if resonance_grid is None:
        resonance_grid = np.linspace(SWEEP_START, SWEEP_STOP, 69)
    grid = _check_grid(resonance_grid)

    def misfit(n1_eff: float) -> float:
        curve = sweep_peak_reflectivity(replace(geometry, n1_eff=n1_eff), coupling_template, grid, literal=literal)
        position = curve.minimum()
        logger.debug("n1_eff %.5f -> minimum at %.2f nm", n1_eff, position)
        return (position - target) ** 2

    res = minimize_scalar(misfit, bounds=bounds, method='bounded', options={'xatol': 1e-3})
    logger.info("Calibrated n1_eff = %.4f (minimum %.1f nm off the %.1f nm target)",
                res.x, math.sqrt(res.fun), target)
    return float(res.x)
