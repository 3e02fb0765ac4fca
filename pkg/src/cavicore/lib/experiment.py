"""
Design tables of the fabricated L3 cavities and the datasets built from them.

The resonance wavelength follows a least-squares line through the measured reflectance peaks of the
a = 350…390 nm cavities. Simulated Q values are known only at the two ends of the lattice constant
range, and are interpolated linearly in `a` in between (interpolating in t* = t/a instead would bend
the curve slightly, by no more than the ±10% the interior data point allows).
"""
from dataclasses import replace
from typing import Iterable
import logging
import math

import numpy as np

from .cavity import peak_reflectivity
from ..types.cavity import CavityCoupling, SlabGeometry
from ..types.design import LatticeDesign, QTheoTable, Shift, SweepRow, SLAB_THICKNESS_NM
from ..types.errors import InvalidInputError

__all__ = [
    'RESONANCE_ANCHORS', 'Q_THEO', 'resonant_wavelength', 'q_theo', 'relative_thickness', 'lattice_design',
    'q_ratio', 'design_coupling', 'build_sweep_dataset',
]

logger = logging.getLogger(__name__)

# (lattice constant, measured reflectance peak), nm
RESONANCE_ANCHORS: tuple[tuple[float, float], ...] = (
    (350.0, 1274.0),
    (360.0, 1300.0),
    (370.0, 1324.0),
    (380.0, 1351.0),
    (390.0, 1374.0),
)

# Lattice constants the regression line may be evaluated at
RESONANCE_A_MIN = 340.0
RESONANCE_A_MAX = 500.0

Q_THEO = QTheoTable(endpoints={
    Shift.NONE: (5000.0, 3400.0),
    Shift.A01: (15400.0, 9400.0),
    Shift.A02: (78000.0, 43000.0),
})

_slope, _intercept = (float(c) for c in np.polyfit([a for a, _ in RESONANCE_ANCHORS],
                                                   [wl for _, wl in RESONANCE_ANCHORS], 1))


def _check_a(a: float, lower: float, upper: float) -> float:
    a = float(a)
    if not lower <= a <= upper:
        raise InvalidInputError(f"Lattice constant {a:g} nm is outside [{lower:g}, {upper:g}] nm")
    return a


def resonant_wavelength(a: float) -> float:
    """
    Resonance wavelength of the L3 cavity with lattice constant `a`, in nm.

    :raises InvalidInputError: If `a` is outside 340..500 nm
    """
    return _slope * _check_a(a, RESONANCE_A_MIN, RESONANCE_A_MAX) + _intercept


def q_theo(a: float, shift: Shift | str, table: QTheoTable = Q_THEO) -> float:
    """
    Simulated Q of the cavity, linearly interpolated between the tabulated range ends.

    :param a: Lattice constant in nm
    :param shift: End-hole shift
    :param table: The tabulated endpoints
    :raises InvalidInputError: If `a` is outside the table, or the shift is unknown
    """
    a = _check_a(a, table.a_min, table.a_max)
    shift = Shift.parse(shift)
    try:
        q_hi, q_lo = table.endpoints[shift]
    except KeyError:
        raise InvalidInputError(f"No simulated Q for shift {shift.value}") from None
    return float(np.interp(a, [table.a_min, table.a_max], [q_hi, q_lo]))


def relative_thickness(a: float, t: float = SLAB_THICKNESS_NM) -> float:
    """t* = t / a"""
    if not a > 0.0:
        raise InvalidInputError(f"Lattice constant must be positive, got {a}")
    return t / a


def lattice_design(a: float, shift: Shift | str = Shift.NONE) -> LatticeDesign:
    """The fabricated design at `a`: r = 0.3a, t = 200 nm"""
    return LatticeDesign(a=_check_a(a, Q_THEO.a_min, Q_THEO.a_max), shift=Shift.parse(shift))


def q_ratio(q_exp: float, a: float, shift: Shift | str) -> float:
    """Measured over simulated Q"""
    return q_exp / q_theo(a, shift)


def design_coupling(q: float, template: CavityCoupling, *, cav_factor: float = 2.0) -> CavityCoupling:
    """
    Decay channels whose vertical part alone gives a total Q of `q`.

    Both polarizations get Q_cav = cav_factor·q. With the default factor of 2 the two vertical
    channels together limit the cavity to Q = q, and Q_loss of the template comes on top.
    """
    if not (cav_factor > 0.0 and math.isfinite(cav_factor)):
        raise InvalidInputError(f"cav_factor must be positive, got {cav_factor}")
    return replace(template, q_cav_x=cav_factor * q, q_cav_y=cav_factor * q)


def build_sweep_dataset(shift: Shift | str, a_grid: Iterable[float], geometry: SlabGeometry,
                        coupling_template: CavityCoupling | None = None, *, cav_factor: float = 2.0,
                        literal: bool = False) -> list[SweepRow]:
    """
    One row of design data per lattice constant: resonance, t*, Q_theo and the modelled peak
    cross-polarized reflectivity of a cavity with that resonance and Q.

    :param shift: End-hole shift of the design series
    :param a_grid: Lattice constants in nm, within 350..490
    :param geometry: Sample cross section of the reflectivity model
    :param coupling_template: Supplies Q_loss, default Q_loss = 1e8
    :param cav_factor: Q_cav = cav_factor·Q_theo for both polarizations
    :return: The rows in grid order
    """
    shift = Shift.parse(shift)
    a_values = [float(a) for a in a_grid]
    if not a_values:
        raise InvalidInputError("The lattice constant grid is empty")
    template = coupling_template or CavityCoupling()

    rows = []
    for a in a_values:
        wavelength = resonant_wavelength(a)
        q = q_theo(a, shift)
        coupling = design_coupling(q, template, cav_factor=cav_factor)
        rows.append(SweepRow(
            a=a,
            resonance_wavelength=wavelength,
            relative_thickness=relative_thickness(a),
            q_theo=q,
            peak_reflectivity=peak_reflectivity(geometry, coupling, wavelength, literal=literal),
        ))
    lowest = min(rows, key=lambda row: row.peak_reflectivity)
    logger.info("Design sweep of %d cavities (shift %s): lowest peak reflectivity %.4g at a = %g nm",
                len(rows), shift.value, lowest.peak_reflectivity, lowest.a)
    return rows
