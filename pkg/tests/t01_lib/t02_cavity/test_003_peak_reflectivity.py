import math

import numpy as np
import pytest

from cavicore.lib.cavity import calibrate_n1_eff, peak_reflectivity, sweep_peak_reflectivity
from cavicore.types.cavity import CavityCoupling, N1_EFF_CALIBRATED, SlabGeometry
from cavicore.types.errors import InvalidInputError


def __test_uniform_peak_reflectivity__(uniform_geometry, balanced_coupling):
    """Without interfaces the peak is a quarter wherever the resonance sits"""
    for wl in (1300.0, 1450.0, 1600.0):
        assert math.isclose(peak_reflectivity(uniform_geometry, balanced_coupling, wl), 0.25, abs_tol=1e-6)


def __test_default_sweep_minimum__(default_geometry):
    """The calibrated geometry has its reflectivity minimum near 1370 nm"""
    curve = sweep_peak_reflectivity(default_geometry, CavityCoupling())
    assert len(curve.resonance_wavelengths) == 341
    assert curve.resonance_wavelengths[0] == 1280.0 and curve.resonance_wavelengths[-1] == 1620.0
    assert np.all((curve.peak_reflectivity > 0.0) & (curve.peak_reflectivity < 1.0))

    minimum = curve.minimum()
    assert 1340.0 <= minimum <= 1480.0
    assert abs(minimum - 1370.0) <= 60.0
    assert 0.02 < float(np.min(curve.peak_reflectivity)) < 0.1


def __test_minimum_moves_with_slab_index__():
    """A higher effective slab index pushes the minimum to longer wavelengths"""
    grid = np.arange(1280.0, 1621.0, 10.0)
    low = sweep_peak_reflectivity(SlabGeometry(n1_eff=1.2), CavityCoupling(), grid).minimum()
    high = sweep_peak_reflectivity(SlabGeometry(n1_eff=1.6), CavityCoupling(), grid).minimum()
    assert low < high


def __test_minimum_moves_with_gap__():
    """A wider air gap pushes the minimum to longer wavelengths"""
    grid = np.arange(1280.0, 1621.0, 10.0)
    narrow = sweep_peak_reflectivity(SlabGeometry(t2=1150.0), CavityCoupling(), grid).minimum()
    wide = sweep_peak_reflectivity(SlabGeometry(t2=1250.0), CavityCoupling(), grid).minimum()
    assert wide - narrow > 5.0


def __test_calibrate_n1_eff__(log):
    """Calibration against a 1370 nm minimum recovers the default index"""
    grid = np.arange(1300.0, 1451.0, 10.0)
    n1 = calibrate_n1_eff(SlabGeometry(), CavityCoupling(), target=1370.0, resonance_grid=grid, bounds=(1.2, 1.6))
    log.info("calibrated n1_eff = %.4f", n1)
    assert math.isclose(n1, N1_EFF_CALIBRATED, abs_tol=0.05)

    curve = sweep_peak_reflectivity(SlabGeometry(n1_eff=n1), CavityCoupling(), grid)
    assert abs(curve.minimum() - 1370.0) <= 10.0


def __test_sweep_grid_validation__(default_geometry):
    """Sweep grids must be strictly increasing"""
    with pytest.raises(InvalidInputError):
        sweep_peak_reflectivity(default_geometry, CavityCoupling(), [1400.0, 1300.0])
