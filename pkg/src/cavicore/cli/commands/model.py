from pathlib import Path

from typer import Option, secho

from ..app import app, app_state
from ..utils import InputErrorHandler, load_config, resolve_output
from ...core.csv_file import write_spectrum
from ...lib.cavity import cross_pol_spectrum

__all__ = []


@app.command()
def model(
        config_path: Path | None = Option(None, "--config", "-c", dir_okay=False,
                                          help="Run config (TOML), defaults without it"),
        out: Path | None = Option(None, "--out", "-o", dir_okay=False, help="Spectrum file to write"),
):
    """
    Write the modelled cross-polarized reflectivity over the configured wavelength grid
    """
    with InputErrorHandler(str(config_path) if config_path else None):
        config = load_config(config_path)
        out = resolve_output(out, config.output.out, "--out")
        spectrum = cross_pol_spectrum(config.geometry, config.coupling, config.model_grid.values(),
                                      literal=config.literal)
        write_spectrum(out, spectrum)
    if not app_state.quiet:
        peak = int(spectrum.reflectance.argmax())
        secho(f"Peak {spectrum.reflectance[peak]:.4g} at {spectrum.wavelengths[peak]:.4f} nm, written to {out}",
              err=True)
