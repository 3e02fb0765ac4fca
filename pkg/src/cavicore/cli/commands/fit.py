from pathlib import Path
import math

from typer import Option, Exit, secho
from rich.console import Console
from rich.table import Table

from ..app import app, app_state
from ..utils import InputErrorHandler, load_config, resolve_output
from ...core.csv_file import read_spectrum, write_fit_report
from ...lib.fitmodel import fit_spectrum, normalize_by_reference
from ...lib.optics import slab_stack
from ...types.errors import NoSignificantPeakError
from ...types.fit import FitReport, SpectrumFit

__all__ = []


def _summary(result: SpectrumFit) -> Table:
    table = Table(title="Fitted peaks", title_justify="left")
    table.add_column("λ₀ (nm)", justify="right")
    table.add_column("FWHM (pm)", justify="right")
    table.add_column("Q", justify="right")
    table.add_column("SNR", justify="right")
    table.add_column("converged")
    table.add_column("flags")
    for r in result.results:
        snr = "∞" if math.isinf(r.snr) else f"{r.snr:.1f}"
        table.add_row(f"{r.lambda0:.4f}", f"{r.fwhm * 1e3:.3f}", f"{r.q_exp:.0f} ± {r.q_stderr:.0f}", snr,
                      "[green]yes[/]" if r.converged else "[red]no[/]", ", ".join(r.meta))
    for c in result.rejected:
        table.add_row(f"{c.wavelength:.4f}", f"{c.rough_width * 1e3:.3f}", "-", "-", "[yellow]rejected[/]",
                      f"prominence {c.prominence:.3g}")
    return table


@app.command()
def fit(
        input_path: Path = Option(..., "--in", "-i", dir_okay=False, help="Spectrum file to fit"),
        config_path: Path | None = Option(None, "--config", "-c", dir_okay=False,
                                          help="Run config (TOML), defaults without it"),
        report: Path | None = Option(None, "--report", "-r", dir_okay=False, help="Fit report to write"),
        reference: Path | None = Option(None, "--reference", dir_okay=False,
                                        help="Mirror reference spectrum to divide by"),
):
    """
    Detect and fit the cavity peaks of a spectrum, write Q, SNR and all fit parameters

    Exits with 2 if a peak was rejected as insignificant or a fit did not converge.
    """
    with InputErrorHandler(str(input_path)):
        config = load_config(config_path)
        report = resolve_output(report, config.output.report, "--report")
        spectrum = read_spectrum(input_path)
        notes = [f"spectrum {input_path.name}, {len(spectrum)} samples"]
        if reference is not None:
            spectrum = normalize_by_reference(spectrum, read_spectrum(reference))
            notes.append(f"normalized by {reference.name}")
        background = slab_stack(config.geometry) if config.fit_background else None

        try:
            result = fit_spectrum(spectrum, config.fit, background)
        except NoSignificantPeakError as e:
            write_fit_report(report, FitReport(notes=[*notes, f"no significant peak: {e}"]))
            secho(f"No significant peak: {e}", fg="yellow", err=True)
            raise Exit(2)

        notes.append(f"robust noise {result.noise:.6g}")
        notes.extend(f"rejected candidate at {c.wavelength:.6f} nm, prominence {c.prominence:.6g}"
                     for c in result.rejected)
        write_fit_report(report, FitReport.from_results(result.results, notes))

    if not app_state.quiet:
        Console(stderr=True, no_color=not app_state.color).print(_summary(result))
    if result.rejected or not result.all_converged:
        raise Exit(2)
