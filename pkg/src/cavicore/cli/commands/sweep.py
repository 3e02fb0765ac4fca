from pathlib import Path

import numpy as np
from typer import Option, secho

from ..app import app, app_state
from ..utils import InputErrorHandler, load_config, resolve_output
from ...core.csv_file import write_table
from ...lib.cavity import sweep_peak_reflectivity
from ...lib.experiment import Q_THEO, build_sweep_dataset

__all__ = []

# Fabricated lattice constants, nm
DESIGN_A_STEP = 10.0


@app.command()
def sweep(
        config_path: Path | None = Option(None, "--config", "-c", dir_okay=False,
                                          help="Run config (TOML), defaults without it"),
        out: Path | None = Option(None, "--out", "-o", dir_okay=False, help="Table to write"),
        design: str | None = Option(None, "--design", "-d", metavar="SHIFT",
                                    help="Tabulate the fabricated designs with this hole shift "
                                         "(none, 0.1a, 0.2a) instead of the resonance grid"),
):
    """
    Write the peak cross-polarized reflectivity as a function of the cavity resonance
    """
    with InputErrorHandler(str(config_path) if config_path else None):
        config = load_config(config_path)
        out = resolve_output(out, config.output.out, "--out")

        if design is not None:
            a_grid = np.arange(Q_THEO.a_min, Q_THEO.a_max + 0.5 * DESIGN_A_STEP, DESIGN_A_STEP)
            rows = build_sweep_dataset(design, a_grid, config.geometry, config.coupling, literal=config.literal)
            write_table(out, ('a_nm', 'resonance_wavelength_nm', 'relative_thickness', 'q_theo', 'peak_reflectivity'),
                        rows, comments=[f"design sweep, hole shift {design}, n1_eff {config.geometry.n1_eff:g}"])
            lowest = min(rows, key=lambda row: row.peak_reflectivity)
            minimum = lowest.resonance_wavelength
        else:
            curve = sweep_peak_reflectivity(config.geometry, config.coupling, config.sweep_grid.values(),
                                            literal=config.literal)
            minimum = curve.minimum()
            write_table(out, ('resonance_wavelength_nm', 'peak_reflectivity'),
                        zip(curve.resonance_wavelengths.tolist(), curve.peak_reflectivity.tolist()),
                        comments=[f"peak reflectivity sweep, n1_eff {config.geometry.n1_eff:g}, "
                                  f"minimum near {minimum:.1f} nm"])
    if not app_state.quiet:
        secho(f"Lowest peak reflectivity near {minimum:.1f} nm, written to {out}", err=True)
