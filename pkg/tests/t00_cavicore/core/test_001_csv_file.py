import numpy as np
import pytest

from cavicore.core.csv_file import (
    FIT_REPORT_HEADER, read_spectrum, read_table, write_fit_report, write_spectrum, write_table,
)
from cavicore.types.errors import InvalidInputError, SpectrumFormatError
from cavicore.types.fit import FitReport, FitResult
from cavicore.types.lineshape import CompositeModel, FanoPeak, LorentzianPeak
from cavicore.types.optics import Layer, Stack
from cavicore.types.spectrum import Spectrum


def _spectrum_file(path, rows: list[str], header: str = "wavelength_nm,reflectance"):
    path.write_text("\n".join(["# measured", header, *rows]) + "\n", encoding="utf-8")
    return path


def _rows(count: int) -> list[str]:
    return [f"{1300.0 + 0.1 * i:.1f},{0.1 + 0.001 * i:.3f}" for i in range(count)]


def __test_spectrum_write_and_read__(tmp_path):
    """Values survive at 9 significant digits, comments come back as meta"""
    spectrum = Spectrum(wavelengths=np.linspace(1388.0, 1392.0, 8001),
                        reflectance=np.linspace(0.0, 0.123456789, 8001), meta="synthetic\nseed 0")
    path = tmp_path / "spectrum.csv"
    write_spectrum(path, spectrum)

    text = path.read_text(encoding="utf-8")
    assert text.startswith("# synthetic\n# seed 0\nwavelength_nm,reflectance\n1388,0\n")
    assert "\r" not in text

    loaded = read_spectrum(path)
    assert loaded.meta == "synthetic\nseed 0"
    assert np.allclose(loaded.wavelengths, spectrum.wavelengths, rtol=1e-9, atol=0.0)
    assert np.allclose(loaded.reflectance, spectrum.reflectance, rtol=1e-8, atol=1e-12)


def __test_spectrum_format_errors__(tmp_path):
    """Parse errors carry the line number"""
    with pytest.raises(SpectrumFormatError, match="line 2"):
        read_spectrum(_spectrum_file(tmp_path / "a.csv", _rows(20), header="wl,r"))

    rows = _rows(20)
    rows[4] = "1300.4,abc"
    with pytest.raises(SpectrumFormatError, match="line 7: not a number") as exc_info:
        read_spectrum(_spectrum_file(tmp_path / "b.csv", rows))
    assert exc_info.value.line == 7

    rows = _rows(20)
    rows[10] = "1299.0,0.1"
    with pytest.raises(SpectrumFormatError, match="line 13: wavelengths must be strictly increasing"):
        read_spectrum(_spectrum_file(tmp_path / "c.csv", rows))

    rows = _rows(20)
    rows[0] = "1300.0,-0.1"
    with pytest.raises(SpectrumFormatError, match="line 3: reflectance must not be negative"):
        read_spectrum(_spectrum_file(tmp_path / "d.csv", rows))

    rows = _rows(20)
    rows[3] = "1300.3,0.1,7"
    with pytest.raises(SpectrumFormatError, match="expected 2 columns"):
        read_spectrum(_spectrum_file(tmp_path / "e.csv", rows))


def __test_short_spectrum_is_rejected__(tmp_path):
    """Ten rows are too few"""
    with pytest.raises(SpectrumFormatError, match="length >= 16"):
        read_spectrum(_spectrum_file(tmp_path / "short.csv", _rows(10)))
    # Sixteen are enough
    assert len(read_spectrum(_spectrum_file(tmp_path / "ok.csv", _rows(16)))) == 16


def __test_missing_header__(tmp_path):
    """A file of comments only has no header"""
    path = tmp_path / "empty.csv"
    path.write_text("# nothing here\n", encoding="utf-8")
    with pytest.raises(SpectrumFormatError, match="missing header"):
        read_spectrum(path)
    with pytest.raises(OSError):
        read_spectrum(tmp_path / "does_not_exist.csv")


def __test_tables__(tmp_path):
    """Tables keep comments, format floats and booleans"""
    path = tmp_path / "table.csv"
    write_table(path, ("a_nm", "q", "ok", "thickness"), [(390.0, 68000.0, True, (200.0, 1200.0)),
                                                         (400.0, 1.0 / 3.0, False, ())],
                comments=["design sweep"])
    headers, rows, comments = read_table(path)
    assert headers == ["a_nm", "q", "ok", "thickness"]
    assert comments == ["design sweep"]
    assert rows[0] == {"a_nm": "390", "q": "68000", "ok": "true", "thickness": "200;1200"}
    assert rows[1]["q"] == "0.333333333"
    assert rows[1]["thickness"] == ""

    with pytest.raises(InvalidInputError):
        write_table(tmp_path / "bad.csv", ("a", "b"), [(1.0,)])


def __test_fit_report__(tmp_path):
    """One row per peak, every fitted quantity next to its standard error"""
    stack = Stack(layers=(Layer(refractive_index=1.36, thickness=200.0), Layer(refractive_index=1.0, thickness=1200.0)),
                  bottom_cladding_index=3.4)
    peak = FanoPeak(base=LorentzianPeak.from_q(lambda_c=1390.0, q=58000.0, kappa=0.1), background_im=0.1)
    result = FitResult(params=CompositeModel(peaks=(peak,), fp_stack=stack, fp_scale=0.1, floor=0.01),
                       stderr={"peak0.lambda_c": 1e-5, "peak0.fwhm": 2e-4}, q_exp=58000.0, q_stderr=480.0,
                       lambda0=1390.0, fwhm=1390.0 / 58000.0, snr=20.5, residual_rms=0.005, converged=True,
                       iterations=17, cost=0.05, window=(1389.4, 1390.6), meta=("at_bounds:floor",))
    path = tmp_path / "report.csv"
    write_fit_report(path, FitReport.from_results([result], notes=["1 candidate rejected"]))

    headers, rows, comments = read_table(path)
    assert tuple(headers) == FIT_REPORT_HEADER
    assert comments[0] == "1 candidate rejected"
    assert "1.8 nm" in comments[-1]
    (row,) = rows
    assert float(row["q_exp"]) == 58000.0
    assert float(row["q_exp_stderr"]) == 480.0
    assert float(row["lambda0_nm_stderr"]) == 1e-5
    assert float(row["kappa_stderr"]) == 0.0
    assert row["fp_thickness_nm"] == "200;1200"
    assert row["converged"] == "true"
    assert row["iterations"] == "17"
    assert row["flags"] == "at_bounds:floor"
