"""
Spectrum and table files.

All files are UTF-8 CSV with LF line endings. Lines starting with ``#`` are comments, a spectrum
file keeps them as its meta text. A spectrum file has the header ``wavelength_nm,reflectance``
followed by ``%.9g`` value pairs, wavelengths strictly increasing.
"""
from pathlib import Path
from typing import Any, Iterable, Sequence
import csv
import math

from ..types.errors import InvalidInputError, SpectrumFormatError
from ..types.fit import FitReport, SPECTROMETER_RESOLUTION_NM
from ..types.spectrum import MIN_SPECTRUM_LENGTH, Spectrum

__all__ = [
    'SPECTRUM_HEADER', 'FIT_REPORT_HEADER', 'read_spectrum', 'write_spectrum', 'read_table', 'write_table',
    'write_fit_report',
]

SPECTRUM_HEADER = ('wavelength_nm', 'reflectance')

FIT_REPORT_HEADER = (
    'lambda0_nm', 'lambda0_nm_stderr', 'fwhm_nm', 'fwhm_nm_stderr', 'q_exp', 'q_exp_stderr', 'snr',
    'kappa', 'kappa_stderr', 'fano_re', 'fano_re_stderr', 'fano_im', 'fano_im_stderr',
    'floor', 'floor_stderr', 'fp_scale', 'fp_scale_stderr', 'fp_thickness_nm',
    'converged', 'residual_rms', 'iterations', 'flags',
)


class DialectLF(csv.excel):
    """CSV dialect with line feed as newline character"""
    lineterminator = '\n'


csv.register_dialect("lf", DialectLF)


def _format(value: Any) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return f"{value:.9g}"
    if isinstance(value, (tuple, list)):
        return ';'.join(_format(v) for v in value)
    return str(value)


def read_spectrum(path: Path | str) -> Spectrum:
    """
    Read a spectrum file.

    :param path: The file
    :return: The validated spectrum, comment lines joined into its meta text
    :raises SpectrumFormatError: With the 1-based line number of the first problem
    :raises OSError: If the file can not be read
    """
    meta: list[str] = []
    wavelengths: list[float] = []
    reflectance: list[float] = []
    header_seen = False

    with open(path, 'r', encoding='utf-8', newline='') as f:
        for lineno, line in enumerate(f, start=1):
            text = line.rstrip('\r\n')
            if text.startswith('#'):
                meta.append(text[1:].removeprefix(' '))
                continue
            if not text.strip():
                continue
            row = next(csv.reader([text], dialect='lf'))

            if not header_seen:
                if tuple(c.strip() for c in row) != SPECTRUM_HEADER:
                    raise SpectrumFormatError(f"expected header '{','.join(SPECTRUM_HEADER)}', got {text!r}",
                                              line=lineno)
                header_seen = True
                continue

            if len(row) != 2:
                raise SpectrumFormatError(f"expected 2 columns, got {len(row)}", line=lineno)
            try:
                wl, r = float(row[0]), float(row[1])
            except ValueError:
                raise SpectrumFormatError(f"not a number: {text!r}", line=lineno) from None
            if not (math.isfinite(wl) and math.isfinite(r)):
                raise SpectrumFormatError(f"non-finite value: {text!r}", line=lineno)
            if wavelengths and wl <= wavelengths[-1]:
                raise SpectrumFormatError(
                    f"wavelengths must be strictly increasing, {wl:.9g} follows {wavelengths[-1]:.9g}", line=lineno)
            if wl <= 0.0:
                raise SpectrumFormatError(f"wavelength must be positive, got {wl:.9g}", line=lineno)
            if r < 0.0:
                raise SpectrumFormatError(f"reflectance must not be negative, got {r:.9g}", line=lineno)
            wavelengths.append(wl)
            reflectance.append(r)

    if not header_seen:
        raise SpectrumFormatError(f"missing header '{','.join(SPECTRUM_HEADER)}'")
    if len(wavelengths) < MIN_SPECTRUM_LENGTH:
        raise SpectrumFormatError(f"a spectrum needs length >= {MIN_SPECTRUM_LENGTH}, got {len(wavelengths)} rows")
    return Spectrum(wavelengths=wavelengths, reflectance=reflectance, meta='\n'.join(meta))


def write_spectrum(path: Path | str, spectrum: Spectrum) -> None:
    """
    Write a spectrum file, its meta text as leading comment lines.

    :raises OSError: If the file can not be written
    """
    with open(path, 'w', encoding='utf-8', newline='') as f:
        for line in spectrum.meta.splitlines():
            f.write(f"# {line}\n")
        writer = csv.writer(f, dialect='lf')
        writer.writerow(SPECTRUM_HEADER)
        writer.writerows((f"{wl:.9g}", f"{r:.9g}")
                         for wl, r in zip(spectrum.wavelengths.tolist(), spectrum.reflectance.tolist()))


def write_table(path: Path | str, headers: Sequence[str], rows: Iterable[Sequence[Any]],
                comments: Iterable[str] = ()) -> None:
    """
    Write a CSV table, floats as ``%.9g``, tuples joined with ``;``.

    :param path: Output file
    :param headers: Column names
    :param rows: Rows with one value per column
    :param comments: Lines written first, each prefixed with ``# ``
    """
    with open(path, 'w', encoding='utf-8', newline='') as f:
        for comment in comments:
            f.write(f"# {comment}\n")
        writer = csv.writer(f, dialect='lf')
        writer.writerow(headers)
        for row in rows:
            if len(row) != len(headers):
                raise InvalidInputError(f"Row has {len(row)} values for {len(headers)} columns")
            writer.writerow([_format(v) for v in row])


def read_table(path: Path | str) -> tuple[list[str], list[dict[str, str]], list[str]]:
    """
    Read a table written by `write_table`.

    :return: (headers, rows as column -> text, comment lines)
    """
    with open(path, 'r', encoding='utf-8', newline='') as f:
        lines = f.read().splitlines()
    comments = [line[1:].removeprefix(' ') for line in lines if line.startswith('#')]
    reader = csv.reader((line for line in lines if line and not line.startswith('#')), dialect='lf')
    headers = next(reader, [])
    return headers, [dict(zip(headers, row)) for row in reader], comments


def write_fit_report(path: Path | str, report: FitReport) -> None:
    """
    Write one row per fitted peak with the standard error next to each fitted quantity.
    """
    rows = []
    for record in report.records:
        err = record.stderr
        rows.append((
            record.lambda0_nm, err['lambda0_nm'], record.fwhm_nm, err['fwhm_nm'], record.q_exp, err['q_exp'],
            record.snr, record.kappa, err['kappa'], record.fano_re, err['fano_re'], record.fano_im,
            err['fano_im'], record.floor, err['floor'], record.fp_scale, err['fp_scale'],
            record.fp_thickness_nm, record.converged, record.residual_rms, record.iterations, record.flags,
        ))
    notes = [*report.notes,
             f"linewidths from wavelength scans; the PL spectrometer ({SPECTROMETER_RESOLUTION_NM:g} nm) "
             f"can not resolve them"]
    write_table(path, FIT_REPORT_HEADER, rows, comments=notes)
