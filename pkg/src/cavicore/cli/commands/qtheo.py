from typer import Option, echo

from ..app import app
from ..utils import InputErrorHandler
from ...lib.experiment import q_theo, relative_thickness, resonant_wavelength

__all__ = []


@app.command()
def qtheo(
        shift: str = Option(..., "--shift", "-s", help="End-hole shift: none, 0.1a or 0.2a"),
        a: float = Option(..., "--a", "-a", help="Lattice constant in nm (350..490)"),
):
    """
    Print the simulated Q and the resonance wavelength of a cavity design
    """
    with InputErrorHandler():
        q = q_theo(a, shift)
        wavelength = resonant_wavelength(a)
    echo(f"q_theo = {q:.6g}")
    echo(f"resonant_wavelength_nm = {wavelength:.2f}")
    echo(f"relative_thickness = {relative_thickness(a):.4f}")
