"""Run configuration: YAML with unit-annotated quantities, validated by pydantic.

Every physical quantity is written as ``"<number> <unit>"`` (e.g. ``"8.9 eV"``,
``"750 nm"``, ``"2.35 rad/fs"``); bare numbers are accepted only for
dimensionless values. Lists of axis values may be given explicitly or as
``{start, stop, step}`` / ``{start, stop, num}`` ranges (stop inclusive).
"""
import math
import re
from typing import Annotated, Literal, Optional, Union

import numpy as np
import yaml
from pydantic import (BaseModel, BeforeValidator, ConfigDict, Field, field_validator,
                      model_validator)
from pydantic import ValidationError as PydanticError

from .errors import ValidationError
from .units import C_NM_PER_FS, HBAR

# unit -> (dimension, converter to internal units)
_UNITS = {
    "fs": ("time", lambda x: x),
    "ps": ("time", lambda x: 1e3 * x),
    "as": ("time", lambda x: 1e-3 * x),
    "ev": ("energy", lambda x: x),
    "mev": ("energy", lambda x: 1e-3 * x),
    "rad/fs": ("frequency", lambda x: x),
    "nm": ("wavelength", lambda x: x),
    "angstrom": ("length", lambda x: x),
    "a": ("length", lambda x: x),
    "å": ("length", lambda x: x),
    "bohr": ("length", lambda x: 0.529177210903 * x),
    "amu": ("mass", lambda x: x),
    "u": ("mass", lambda x: x),
    "da": ("mass", lambda x: x),
    "ev/angstrom": ("force", lambda x: x),
    "ev/a": ("force", lambda x: x),
    "ev/å": ("force", lambda x: x),
    "rad": ("phase", lambda x: x),
    "deg": ("phase", math.radians),
    "pi": ("phase", lambda x: math.pi * x),
    "pi rad": ("phase", lambda x: math.pi * x),
}
_TAYLOR = re.compile(r"^fs\^?([0-4])$")
_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(.*?)\s*$")


class ConfigError(Exception):
    """Base for configuration problems reported by the CLI."""


class ConfigParseError(ConfigError):
    def __init__(self, message, line=None, column=None):
        self.message, self.line, self.column = message, line, column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"parse error{where}: {message}")


class ConfigValidationError(ConfigError):
    def __init__(self, errors):
        self.errors = errors  # list of (path, message)
        super().__init__("; ".join(f"{p}: {m}" for p, m in errors))


def parse_quantity(value, dimension):
    """Convert ``"<number> <unit>"`` to internal units for ``dimension``.

    ``frequency`` also accepts photon energies (eV) and wavelengths (nm);
    ``energy`` also accepts angular frequencies (rad/fs).
    """
    if isinstance(value, bool):
        raise ValueError("expected a quantity with unit")
    if isinstance(value, (int, float)):
        if dimension == "phase":
            return float(value)
        raise ValueError(f"missing unit ({dimension} expected)")
    if not isinstance(value, str):
        raise ValueError("expected a string such as '1.5 eV'")
    m = _QUANTITY.match(value)
    if not m:
        raise ValueError(f"cannot read quantity {value!r}")
    x, unit = float(m.group(1)), m.group(2).lower()
    if dimension.startswith("taylor"):
        tm = _TAYLOR.match(unit)
        want = dimension[-1]
        if unit in ("rad",) and want == "0":
            return x
        if not tm or tm.group(1) != want:
            raise ValueError(f"expected unit fs^{want}, got {unit!r}")
        return x
    if unit not in _UNITS:
        raise ValueError(f"unknown unit {unit!r}")
    kind, conv = _UNITS[unit]
    x = conv(x)
    if kind == dimension:
        return float(x)
    if dimension == "frequency" and kind == "energy":
        return x / HBAR
    if dimension == "frequency" and kind == "wavelength":
        if x <= 0:
            raise ValueError("wavelength must be > 0")
        return 2 * math.pi * C_NM_PER_FS / x
    if dimension == "energy" and kind == "frequency":
        return x * HBAR
    raise ValueError(f"unit {unit!r} is a {kind}, expected a {dimension}")


def _q(dimension):
    return Annotated[float, BeforeValidator(lambda v: parse_quantity(v, dimension))]


Time = _q("time")
Energy = _q("energy")
Frequency = _q("frequency")
Length = _q("length")
Mass = _q("mass")
Phase = _q("phase")
Slope = _q("force")


def _axis(dimension):
    def parse(v):
        if isinstance(v, dict):
            extra = set(v) - {"start", "stop", "step", "num"}
            if extra:
                raise ValueError(f"unknown range keys {sorted(extra)}")
            if "start" not in v or "stop" not in v:
                raise ValueError("range needs start and stop")
            a = parse_quantity(v["start"], dimension)
            b = parse_quantity(v["stop"], dimension)
            if ("step" in v) == ("num" in v):
                raise ValueError("range needs exactly one of step or num")
            if "num" in v:
                n = int(v["num"])
                if n < 1:
                    raise ValueError("num must be >= 1")
                return np.linspace(a, b, n).tolist()
            step = parse_quantity(v["step"], dimension)
            if not step > 0 or b < a:
                raise ValueError("need step > 0 and stop >= start")
            n = int(math.floor((b - a) / step + 1e-9)) + 1
            return (a + step * np.arange(n)).tolist()
        if isinstance(v, (list, tuple)):
            return [parse_quantity(x, dimension) for x in v]
        return [parse_quantity(v, dimension)]
    return Annotated[list[float], BeforeValidator(parse)]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class FieldSection(_Section):
    center: Frequency
    edge_low: Frequency
    edge_high: Frequency
    shape: Literal["gaussian", "supergaussian"] = "gaussian"
    order: int = Field(4, ge=1)
    time_window: Time = 1024.0
    peak_field: float = Field(1.0, gt=0)

    @model_validator(mode="after")
    def _edges(self):
        # wavelength edges may arrive in either order
        lo, hi = sorted((self.edge_low, self.edge_high))
        self.edge_low, self.edge_high = lo, hi
        if not lo < self.center < hi:
            raise ValueError("center must lie strictly between the spectral edges")
        return self


class WindowSpec(_Section):
    kind: Literal["window"]
    A: float = Field(1.0, ge=0)
    center: Frequency
    width: Frequency


class TaylorSpec(_Section):
    kind: Literal["taylor"]
    phi0: _q("taylor0") = 0.0
    phi1: _q("taylor1") = 0.0
    phi2: _q("taylor2") = 0.0
    phi3: _q("taylor3") = 0.0
    phi4: _q("taylor4") = 0.0
    omega_ref: Optional[Frequency] = None


class PulsePairSpec(_Section):
    kind: Literal["pulse_pair"]
    A_T: float = Field(1.0, ge=0)
    A_R: float = Field(1.0, ge=0)


MaskSpec = Annotated[Union[WindowSpec, TaylorSpec, PulsePairSpec],
                     Field(discriminator="kind")]


class CurveSpec(_Section):
    kind: Literal["harmonic", "morse", "linear"] = "harmonic"
    R0: Length = 0.0
    period: Optional[Time] = None
    well_depth: Optional[Energy] = None
    slope: Optional[Slope] = None

    @model_validator(mode="after")
    def _needs(self):
        if self.kind in ("harmonic", "morse") and self.period is None:
            raise ValueError(f"{self.kind} curve needs a vibrational period")
        if self.period is not None and not self.period > 0:
            raise ValueError("period must be > 0")
        if self.kind == "morse" and self.well_depth is None:
            raise ValueError("morse curve needs well_depth")
        if self.kind == "linear" and self.slope is None:
            raise ValueError("linear curve needs slope (eV/angstrom)")
        return self


class StateSpec(CurveSpec):
    label: str
    V_FC: Energy
    photon_order: int = Field(ge=1)
    q_excite: float = 1.0
    q_ion: float = 1.0
    ion_order: Optional[int] = Field(None, ge=1)
    ic_lifetime: Optional[Time] = None


class GridSpec(_Section):
    r_min: Length
    r_max: Length
    n_points: int = Field(512, ge=16)


class MoleculeSection(_Section):
    name: str = "molecule"
    Ip: Energy
    reduced_mass: Mass
    grid: GridSpec
    base_ion_order: int = Field(2, ge=1)
    ground: CurveSpec
    states: list[StateSpec] = Field(min_length=1)

    @field_validator("Ip")
    @classmethod
    def _positive(cls, v):
        if not v > 0:
            raise ValueError("must be > 0")
        return v


EXPERIMENT_TYPES = ("delay_scan", "phase_scan", "locking_frequency_scan", "window_scan",
                    "cfrog")


class ExperimentSection(_Section):
    type: Literal["delay_scan", "phase_scan", "locking_frequency_scan", "window_scan",
                  "cfrog"]
    mode: Literal["impulsive", "integrated"] = "impulsive"
    delays: Optional[_axis("time")] = None
    phases: Optional[_axis("phase")] = None
    locking_phase: Phase = 0.0
    locking_frequency: Optional[Frequency] = None
    locking_frequencies: Optional[_axis("frequency")] = None
    window_centers: Optional[_axis("frequency")] = None
    window_width: Optional[Frequency] = None
    Up: Energy = 0.0
    noise: float = Field(0.0, ge=0)
    dt_max: Optional[Time] = None
    local_phase: bool = False

    @field_validator("delays", "phases", "locking_frequencies", "window_centers")
    @classmethod
    def _monotonic(cls, v):
        if v is not None and len(v) > 1 and not np.all(np.diff(v) > 0):
            raise ValueError("axis values must be strictly increasing")
        return v

    @model_validator(mode="after")
    def _required(self):
        need = {
            "delay_scan": ("delays",),
            "phase_scan": ("delays",),
            "locking_frequency_scan": ("delays", "locking_frequencies"),
            "window_scan": ("window_centers", "window_width"),
            "cfrog": ("delays",),
        }[self.type]
        missing = [k for k in need if getattr(self, k) is None]
        if missing:
            raise ValueError(f"{self.type} needs {', '.join(missing)}")
        if self.type != "cfrog" and self.delays is not None and min(self.delays) < 0:
            raise ValueError("delays must be >= 0")
        if self.window_width is not None and not self.window_width > 0:
            raise ValueError("window_width must be > 0")
        return self


class OutputSection(_Section):
    directory: str = "out"
    prefix: Optional[str] = None


class RunConfig(_Section):
    seed: int = 0
    field: FieldSection
    masks: list[MaskSpec] = []
    molecule: MoleculeSection
    experiment: ExperimentSection
    output: OutputSection = OutputSection()

    @model_validator(mode="after")
    def _one_pair(self):
        pairs = sum(isinstance(m, PulsePairSpec) for m in self.masks)
        if pairs > 1:
            raise ValueError("at most one pulse_pair mask")
        if pairs == 0 and self.experiment.type in ("delay_scan", "phase_scan",
                                                   "locking_frequency_scan"):
            raise ValueError(f"{self.experiment.type} needs a pulse_pair mask")
        return self


def _loc(loc):
    out = ""
    for part in loc:
        if isinstance(part, int):
            out += f"[{part}]"
        elif part in ("window", "taylor", "pulse_pair") or str(part).startswith(
                ("function-after", "function-before")):
            continue
        else:
            out += ("." if out else "") + str(part)
    return out or "config"


def parse_yaml(text):
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        msg = getattr(exc, "problem", None) or str(exc)
        if mark is not None:
            raise ConfigParseError(msg, mark.line + 1, mark.column + 1) from None
        raise ConfigParseError(msg) from None
    if not isinstance(data, dict):
        raise ConfigParseError("top level must be a mapping")
    return data


def validate_config(data):
    try:
        return RunConfig.model_validate(data)
    except PydanticError as exc:
        errs = []
        for e in exc.errors():
            msg = e["msg"]
            if msg.startswith("Value error, "):
                msg = msg[len("Value error, "):]
            errs.append((_loc(e["loc"]), msg))
        raise ConfigValidationError(errs) from None


def load_config(path):
    """Read and validate ``path``; returns ``(RunConfig, raw_mapping)``."""
    with open(path, encoding="utf-8") as fh:
        data = parse_yaml(fh.read())
    return validate_config(data), data


def build(cfg):
    """Instantiate spectrum, masks and molecule from a validated RunConfig.

    Returns a dict with ``spectrum``, ``shaping`` (masks other than the pulse
    pair), ``A_T``, ``A_R`` and ``model``.
    """
    from .fields import synthesize_spectrum, to_time
    from .masks import TaylorPhaseMask, WindowMask
    from .molecule import CoordinateGrid, ElectronicState, MoleculeModel, PotentialCurve

    try:
        f = cfg.field
        spec = synthesize_spectrum(f.center, f.edge_low, f.edge_high, shape=f.shape,
                                   order=f.order, time_window=f.time_window)
        peak = to_time(spec).peak
        spec = spec.replace(spec.amplitude * (f.peak_field / peak))

        shaping, A_T, A_R = [], 1.0, 0.0
        for m in cfg.masks:
            if isinstance(m, WindowSpec):
                shaping.append(WindowMask(m.A, m.center, m.width))
            elif isinstance(m, TaylorSpec):
                shaping.append(TaylorPhaseMask((m.phi0, m.phi1, m.phi2, m.phi3, m.phi4),
                                               m.omega_ref))
            else:
                A_T, A_R = m.A_T, m.A_R

        mol = cfg.molecule

        def curve(c, V_FC=0.0):
            omega = 2 * np.pi / c.period if c.period else None
            return PotentialCurve(c.kind, c.R0, omega, c.well_depth, c.slope, V_FC)

        states = tuple(
            ElectronicState(s.label, curve(s, s.V_FC), s.photon_order, s.q_excite,
                            s.q_ion, s.ion_order, s.ic_lifetime)
            for s in mol.states)
        model = MoleculeModel(curve(mol.ground), states, mol.Ip, mol.reduced_mass,
                              CoordinateGrid(mol.grid.r_min, mol.grid.r_max,
                                             mol.grid.n_points),
                              mol.base_ion_order, mol.name)
    except ValidationError as exc:
        raise ConfigValidationError([(exc.field or "config", exc.message)]) from None
    return {"spectrum": spec, "shaping": tuple(shaping), "A_T": A_T, "A_R": A_R,
            "model": model}
