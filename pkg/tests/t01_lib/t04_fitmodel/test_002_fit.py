import math

import numpy as np
import pytest

from cavicore.lib.fitmodel import estimate_snr, fit_composite
from cavicore.lib.lineshape import synthesize_spectrum
from cavicore.types.errors import InsufficientBackgroundError, InvalidInputError
from cavicore.types.fit import FitOptions, FitResult
from cavicore.types.lineshape import CompositeModel, FanoPeak, LorentzianPeak

LAMBDA_C = 1390.0
Q = 58000.0
FWHM = LAMBDA_C / Q
WINDOW = np.linspace(1389.8, 1390.2, 1601)


def _model(*, lambda_c=LAMBDA_C, fwhm=FWHM, kappa=0.1, fano_re=0.0, fano_im=0.0, floor=0.01) -> CompositeModel:
    peak = FanoPeak(base=LorentzianPeak.from_linewidth(lambda_c=lambda_c, fwhm=fwhm, kappa=kappa),
                    background_re=fano_re, background_im=fano_im)
    return CompositeModel(peaks=(peak,), floor=floor)


def _near_truth() -> CompositeModel:
    """Every parameter a few percent (λ a third of a linewidth) off"""
    return _model(lambda_c=LAMBDA_C + 0.008, fwhm=1.08 * FWHM, kappa=0.093, floor=0.0105)


def __test_noiseless_exact_recovery__():
    """Noiseless data started within 10% gives the generator back to 1e-6"""
    truth = _model()
    spectrum = synthesize_spectrum(truth, WINDOW)
    fit = fit_composite(spectrum, _near_truth(), options=FitOptions(vary_fano=False))

    assert fit.converged
    peak = fit.params.peaks[0]
    assert fit.lambda0 == pytest.approx(LAMBDA_C, rel=1e-6)
    assert fit.fwhm == pytest.approx(FWHM, rel=1e-6)
    assert fit.q_exp == pytest.approx(Q, rel=1e-6)
    assert peak.base.kappa == pytest.approx(0.1, rel=1e-6)
    assert fit.params.floor == pytest.approx(0.01, rel=1e-6)
    assert fit.residual_rms < 1e-8
    assert fit.window == spectrum.span

    # Derived quantities are consistent and errors never negative
    assert math.isclose(fit.q_exp, fit.lambda0 / fit.fwhm, rel_tol=1e-9)
    assert all(v >= 0.0 for v in fit.stderr.values())
    assert fit.stderr["peak0.fano_re"] == 0.0
    assert not fit.below_instrument_resolution


def __test_noiseless_fano_recovery__():
    """An asymmetric line is centered and sized exactly"""
    truth = _model(fano_im=0.1)
    spectrum = synthesize_spectrum(truth, WINDOW)
    fit = fit_composite(spectrum, _near_truth())
    assert fit.converged
    assert fit.lambda0 == pytest.approx(LAMBDA_C, rel=1e-6)
    assert fit.q_exp == pytest.approx(Q, rel=1e-6)


def __test_scale_invariance__():
    """Scaling the reflectance by 7.3 leaves Q alone and scales the amplitudes"""
    spectrum = synthesize_spectrum(_model(), WINDOW, noise_sigma=0.002, rng_seed=5)
    options = FitOptions(vary_fano=False)
    fit = fit_composite(spectrum, _near_truth(), options=options)

    init = _near_truth()
    scaled_init = CompositeModel(
        peaks=(FanoPeak(base=LorentzianPeak.from_linewidth(lambda_c=init.peaks[0].base.lambda_c,
                                                           fwhm=init.peaks[0].base.fwhm,
                                                           kappa=7.3 * init.peaks[0].base.kappa)),),
        floor=7.3 * init.floor)
    scaled = fit_composite(spectrum.scaled(7.3), scaled_init, options=options)

    assert scaled.q_exp == pytest.approx(fit.q_exp, rel=1e-5)
    assert scaled.lambda0 == pytest.approx(fit.lambda0, rel=1e-9)
    assert scaled.params.peaks[0].base.kappa == pytest.approx(7.3 * fit.params.peaks[0].base.kappa, rel=1e-5)
    assert scaled.params.floor == pytest.approx(7.3 * fit.params.floor, rel=1e-5)
    assert scaled.residual_rms == pytest.approx(7.3 * fit.residual_rms, rel=1e-4)


def __test_below_instrument_resolution__():
    """A 0.2 pm line is fitted and flagged"""
    q = 6.95e6
    truth = _model(fwhm=LAMBDA_C / q)
    spectrum = synthesize_spectrum(truth, np.linspace(LAMBDA_C - 0.01, LAMBDA_C + 0.01, 2001))
    init = _model(lambda_c=LAMBDA_C + 2e-5, fwhm=1.05 * LAMBDA_C / q, kappa=0.095, floor=0.0105)
    fit = fit_composite(spectrum, init, options=FitOptions(vary_fano=False))
    assert fit.q_exp == pytest.approx(q, rel=0.01)
    assert fit.below_instrument_resolution
    assert "below_instrument_resolution" in fit.meta


def __test_snr_of_noiseless_data_is_infinite__():
    """Zero background deviation gives an infinite SNR"""
    truth = _model(fano_im=0.1)
    spectrum = synthesize_spectrum(truth, WINDOW)
    exact = FitResult(params=truth, stderr={}, q_exp=Q, q_stderr=0.0, lambda0=LAMBDA_C, fwhm=FWHM,
                      residual_rms=0.0, converged=True, iterations=0, cost=0.0, window=spectrum.span)
    assert estimate_snr(spectrum, exact) == math.inf


def __test_snr_needs_background__():
    """Excluding the whole window leaves no samples for the noise"""
    spectrum = synthesize_spectrum(_model(), WINDOW, noise_sigma=0.005, rng_seed=1)
    fit = fit_composite(spectrum, _near_truth(), options=FitOptions(vary_fano=False))
    snr = estimate_snr(spectrum, fit)
    assert snr == pytest.approx(20.0, rel=0.25)
    with pytest.raises(InsufficientBackgroundError):
        estimate_snr(spectrum, fit, exclusion_halfwidths=10.0)


def __test_bounds__():
    """Bounds are applied by name and must contain the start"""
    spectrum = synthesize_spectrum(_model(), WINDOW)
    init = _model(lambda_c=LAMBDA_C + 0.008, fwhm=0.8 * FWHM, kappa=0.093, floor=0.0105)
    fit = fit_composite(spectrum, init, bounds={"peak0.fwhm": (0.5 * FWHM, 0.9 * FWHM)},
                        options=FitOptions(vary_fano=False, restarts=(1.0,)))
    # The optimum is pinned at the upper end
    assert fit.fwhm == pytest.approx(0.9 * FWHM, rel=1e-6)
    assert any(flag.startswith("at_bounds:") and "peak0.fwhm" in flag for flag in fit.meta)

    with pytest.raises(InvalidInputError):
        fit_composite(spectrum, _near_truth(), bounds={"peak1.kappa": (0.0, 1.0)})
    with pytest.raises(InvalidInputError):
        fit_composite(spectrum, _near_truth(), bounds={"peak0.lambda_c": (1391.0, 1392.0)})
    with pytest.raises(InvalidInputError):
        FitOptions(bounds={"floor": (1.0, 0.0)})
    with pytest.raises(InvalidInputError):
        FitOptions(restarts=())
    with pytest.raises(InvalidInputError):
        fit_composite(spectrum, CompositeModel(floor=0.01))


def __test_noiseless_recovery_on_fp_background__(default_fp_stack):
    """A peak on the slab's Airy background comes back exactly"""
    peak = FanoPeak(base=LorentzianPeak.from_linewidth(lambda_c=LAMBDA_C, fwhm=FWHM, kappa=0.1))
    truth = CompositeModel(peaks=(peak,), fp_stack=default_fp_stack, fp_scale=0.3, floor=0.01)
    spectrum = synthesize_spectrum(truth, WINDOW)

    near = _near_truth()
    init = CompositeModel(peaks=near.peaks, fp_stack=default_fp_stack, fp_scale=0.3, floor=near.floor)
    fit = fit_composite(spectrum, init, options=FitOptions(vary_fano=False, vary_fp=False))

    assert fit.converged
    assert fit.params.fp_stack == default_fp_stack
    assert fit.lambda0 == pytest.approx(LAMBDA_C, rel=1e-6)
    assert fit.q_exp == pytest.approx(Q, rel=1e-6)
    assert fit.params.floor == pytest.approx(0.01, rel=1e-4)
    assert fit.residual_rms < 1e-8


def __test_oversampled_grid__():
    """Twice the sampling density leaves Q within 0.01%"""
    oversampled = np.linspace(WINDOW[0], WINDOW[-1], 2 * len(WINDOW) - 1)
    options = FitOptions(vary_fano=False)
    fit = fit_composite(synthesize_spectrum(_model(), WINDOW), _near_truth(), options=options)
    dense = fit_composite(synthesize_spectrum(_model(), oversampled), _near_truth(), options=options)
    assert dense.q_exp == pytest.approx(fit.q_exp, rel=1e-4)
    assert dense.lambda0 == pytest.approx(fit.lambda0, rel=1e-9)


def __test_more_restarts_never_cost_more__():
    """The multi-start cost is at most that of any single converged start"""
    spectrum = synthesize_spectrum(_model(), WINDOW, noise_sigma=0.002, rng_seed=2)
    init = _model(lambda_c=LAMBDA_C + 0.01, fwhm=1.5 * FWHM, kappa=0.08, floor=0.012)
    options = FitOptions(vary_fano=False)
    best = fit_composite(spectrum, init, options=options)
    assert best.converged

    for factor in options.restarts:
        single = fit_composite(spectrum, init, options=FitOptions(vary_fano=False, restarts=(factor,)))
        if single.converged:
            assert best.cost <= single.cost * (1.0 + 1e-6)


def __test_traded_off_parameters_are_flagged__():
    """A symmetric line with a free Fano offset cannot separate κ from the offset"""
    spectrum = synthesize_spectrum(_model(), WINDOW, noise_sigma=0.002, rng_seed=5)
    fit = fit_composite(spectrum, _near_truth())
    flagged = ",".join(f.split(":", 1)[1] for f in fit.meta if f.startswith(("ill_conditioned:", "singular_jacobian:")))
    assert "peak0.kappa" in flagged.split(",")
    assert "peak0.fano_re" in flagged.split(",")

    # With the offset held at zero the same data is well posed
    fixed = fit_composite(spectrum, _near_truth(), options=FitOptions(vary_fano=False))
    assert not any(f.startswith(("ill_conditioned:", "singular_jacobian:")) for f in fixed.meta)
