"""
Run configuration of the command line tools, loaded from TOML.

Every section and key is optional. Keys may be written flat with dotted section prefixes
(``geometry.n1_eff = 1.36``) or under table headers, both parse to the same structure.
"""
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping
import math
import tomllib

import numpy as np
import numpy.typing as npt

from ..types.cavity import CavityCoupling, SlabGeometry
from ..types.errors import InvalidInputError
from ..types.fit import FitOptions
from ..types.lineshape import CompositeModel, Dip, FanoPeak, LorentzianPeak
from ..types.optics import Stack

__all__ = ['WavelengthGrid', 'SynthOptions', 'OutputPaths', 'RunConfig']


@dataclass(kw_only=True, slots=True, frozen=True)
class WavelengthGrid:
    """Evenly spaced wavelengths, both ends included"""
    start: float  # nm
    stop: float  # nm
    points: int

    def __post_init__(self):
        start, stop = float(self.start), float(self.stop)
        if not (math.isfinite(start) and math.isfinite(stop) and 0.0 < start < stop):
            raise InvalidInputError(f"Grid needs 0 < start < stop, got {self.start}..{self.stop}")
        if int(self.points) != self.points or self.points < 2:
            raise InvalidInputError(f"Grid needs an integer number of points >= 2, got {self.points}")
        object.__setattr__(self, 'start', start)
        object.__setattr__(self, 'stop', stop)
        object.__setattr__(self, 'points', int(self.points))

    def values(self) -> npt.NDArray[np.float64]:
        return np.linspace(self.start, self.stop, self.points)


@dataclass(kw_only=True, slots=True, frozen=True)
class SynthOptions:
    """
    The synthetic spectrum: one Fano peak on the sample's FP background, dips and noise
    """
    grid: WavelengthGrid = field(default_factory=lambda: WavelengthGrid(start=1388.0, stop=1392.0, points=8001))
    noise_sigma: float = 0.005
    seed: int = 0
    kappa: float = 0.1
    lambda_c: float = 1390.0  # nm
    q: float = 58000.0
    fano_re: float = 0.0
    fano_im: float = 0.1
    fp_scale: float = 0.1
    floor: float = 0.01
    dips: tuple[Dip, ...] = ()

    def __post_init__(self):
        if not self.noise_sigma >= 0.0:
            raise InvalidInputError(f"synth.noise_sigma must not be negative, got {self.noise_sigma}")
        if int(self.seed) != self.seed:
            raise InvalidInputError(f"synth.seed must be an integer, got {self.seed}")
        object.__setattr__(self, 'dips', tuple(self.dips))
        # Peak parameters are checked by the model types
        self.model(None)

    def model(self, background: Stack | None) -> CompositeModel:
        """The noiseless model, with `background` as its FP stack"""
        peak = FanoPeak(base=LorentzianPeak.from_q(lambda_c=self.lambda_c, q=self.q, kappa=self.kappa),
                        background_re=self.fano_re, background_im=self.fano_im)
        if background is None or self.fp_scale == 0.0:
            return CompositeModel(peaks=(peak,), floor=self.floor)
        return CompositeModel(peaks=(peak,), fp_stack=background, fp_scale=self.fp_scale, floor=self.floor)


@dataclass(kw_only=True, slots=True, frozen=True)
class OutputPaths:
    """Output files used when the command line does not name one"""
    out: Path | None = None
    report: Path | None = None


_GRID_KEYS = {'start', 'stop', 'points'}


def _names(cls) -> set[str]:
    return {f.name for f in fields(cls)}


def _section(data: Mapping[str, Any], name: str, allowed: set[str]) -> dict[str, Any]:
    raw = data.get(name, {})
    if not isinstance(raw, dict):
        raise InvalidInputError(f"Config key {name} must be a table")
    for key in raw:
        if key not in allowed:
            raise InvalidInputError(f"Unknown config key: {name}.{key}")
    return dict(raw)


def _build(section: str, cls, values: Mapping[str, Any]):
    """Construct a config value type, turning type errors into input errors naming the section"""
    try:
        return cls(**values)
    except InvalidInputError:
        raise
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f"Invalid value in [{section}]: {e}") from None


def _grid(section: str, values: dict[str, Any], default: WavelengthGrid) -> WavelengthGrid:
    return _build(section, WavelengthGrid, {
        'start': values.pop('start', default.start),
        'stop': values.pop('stop', default.stop),
        'points': values.pop('points', default.points),
    })


@dataclass(kw_only=True, slots=True, frozen=True)
class RunConfig:
    """
    Everything one command line run needs
    """
    geometry: SlabGeometry = field(default_factory=SlabGeometry)
    coupling: CavityCoupling = field(default_factory=CavityCoupling)
    # Evaluate the cavity matrix with the prefactor on the identity too
    literal: bool = False
    model_grid: WavelengthGrid = field(default_factory=lambda: WavelengthGrid(start=1305.0, stop=1315.0, points=2001))
    sweep_grid: WavelengthGrid = field(default_factory=lambda: WavelengthGrid(start=1280.0, stop=1620.0, points=341))
    synth: SynthOptions = field(default_factory=SynthOptions)
    fit: FitOptions = field(default_factory=FitOptions)
    # Fit with the geometry's FP stack as background
    fit_background: bool = True
    output: OutputPaths = field(default_factory=OutputPaths)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'RunConfig':
        """
        Build a config from parsed TOML data.

        :raises InvalidInputError: On unknown keys and invalid values
        """
        sections = {'geometry', 'coupling', 'model', 'sweep', 'synth', 'fit', 'output'}
        for key in data:
            if key not in sections:
                raise InvalidInputError(f"Unknown config key: {key}")
        defaults = cls()

        geometry = _build('geometry', SlabGeometry, _section(data, 'geometry', _names(SlabGeometry)))

        coupling_values = _section(data, 'coupling', _names(CavityCoupling) | {'literal'})
        literal = bool(coupling_values.pop('literal', False))
        coupling = _build('coupling', CavityCoupling, coupling_values)

        model_grid = _grid('model', _section(data, 'model', _GRID_KEYS), defaults.model_grid)
        sweep_grid = _grid('sweep', _section(data, 'sweep', _GRID_KEYS), defaults.sweep_grid)

        synth_values = _section(data, 'synth', (_names(SynthOptions) - {'grid'}) | _GRID_KEYS)
        synth_values['grid'] = _grid('synth', synth_values, defaults.synth.grid)
        dips = synth_values.pop('dips', [])
        if not isinstance(dips, list):
            raise InvalidInputError("Config key synth.dips must be a list of tables")
        dip_list = []
        for i, dip in enumerate(dips):
            if not isinstance(dip, dict):
                raise InvalidInputError(f"synth.dips[{i}] must be a table with center, depth and width")
            for key in dip:
                if key not in _names(Dip):
                    raise InvalidInputError(f"Unknown config key: synth.dips[{i}].{key}")
            dip_list.append(_build('synth.dips', Dip, dip))
        synth = _build('synth', SynthOptions, {**synth_values, 'dips': tuple(dip_list)})

        fit_values = _section(data, 'fit', _names(FitOptions) | {'background'})
        fit_background = bool(fit_values.pop('background', True))
        if 'restarts' in fit_values:
            fit_values['restarts'] = tuple(fit_values['restarts'])
        fit = _build('fit', FitOptions, fit_values)

        output_values = _section(data, 'output', _names(OutputPaths))
        output = OutputPaths(**{key: Path(value) for key, value in output_values.items()})

        return cls(geometry=geometry, coupling=coupling, literal=literal, model_grid=model_grid,
                   sweep_grid=sweep_grid, synth=synth, fit=fit, fit_background=fit_background, output=output)

    @classmethod
    def load_toml(cls, path: Path | str) -> 'RunConfig':
        """
        Load a config file.

        :param path: TOML file
        :raises OSError: If the file can not be read
        :raises tomllib.TOMLDecodeError: On TOML syntax errors
        :raises InvalidInputError: On unknown keys and invalid values
        """
        with open(path, 'rb') as f:
            data = tomllib.load(f)
        return cls.from_dict(data)
