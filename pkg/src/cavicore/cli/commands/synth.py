from pathlib import Path

from typer import Option, secho

from ..app import app, app_state
from ..utils import InputErrorHandler, load_config, resolve_output
from ...core.csv_file import write_spectrum
from ...lib.lineshape import synthesize_spectrum
from ...lib.optics import slab_stack

__all__ = []


@app.command()
def synth(
        config_path: Path | None = Option(None, "--config", "-c", dir_okay=False,
                                          help="Run config (TOML), defaults without it"),
        out: Path | None = Option(None, "--out", "-o", dir_okay=False, help="Spectrum file to write"),
):
    """
    Write a synthetic reflectance spectrum: a Fano peak on the FP background, with dips and noise
    """
    with InputErrorHandler(str(config_path) if config_path else None):
        config = load_config(config_path)
        out = resolve_output(out, config.output.out, "--out")
        options = config.synth
        spectrum = synthesize_spectrum(options.model(slab_stack(config.geometry)), options.grid.values(),
                                       noise_sigma=options.noise_sigma, dips=options.dips, rng_seed=options.seed)
        write_spectrum(out, spectrum)
    if not app_state.quiet:
        secho(f"Wrote {len(spectrum)} samples to {out}", err=True)
