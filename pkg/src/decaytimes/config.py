"""Run configuration: flat ``key = value`` files with ``#`` comments.

Every key can also be given as a command-line flag of the same name
(underscores become dashes). Values are validated when the config is built,
before any computation starts.

Units. With ``units = tau_s_units`` rates are in units of 1/tau_S and times
in units of tau_S. With ``units = si_seconds`` rates are in 1/s, times in s
and densities come out per second (single) or per second squared (joint).
"""

from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .joint import NORMALIZATIONS, GridSpec
from .model import (
    ALL_APPROACHES,
    EPSILON_ABS,
    EPSILON_ARG_DEG,
    TAU_L_SECONDS,
    TAU_S_SECONDS,
    ApproachKind,
    Channel,
    EntangledStateSpec,
    KaonParams,
)
from .single import SuperpositionSpec

CONFIG_ENV = "DECAYTIMES_CONFIG"
UNITS = ("tau_s_units", "si_seconds")
MODES = ("joint", "single")
OUTPUTS = ("csv", "json")
SINGLE_APPROACHES = (ApproachKind.STANDARD_NEW, ApproachKind.HYBRID, ApproachKind.TIME_OPERATOR)


# -- value syntax -----------------------------------------------------------
def parse_state(text: str) -> EntangledStateSpec:
    """``alpha:<rad>``, ``beta:<rad>``, ``singlet`` or ``general:<8 reals>``."""
    text = text.strip()
    if text == "singlet":
        return EntangledStateSpec.singlet()
    kind, _, rest = text.partition(":")
    if kind in ("alpha", "beta"):
        return getattr(EntangledStateSpec, kind)(float(rest))
    if kind == "general":
        vals = [float(v) for v in rest.split(",")]
        if len(vals) != 8:
            raise ValueError("general state needs 8 reals (re, im of C_SS, C_SL, C_LS, C_LL)")
        c = np.array(vals[0::2]) + 1j * np.array(vals[1::2])
        return EntangledStateSpec.general(c.reshape(2, 2))
    raise ValueError(f"unrecognized state {text!r}")


def parse_grid(text: str) -> GridSpec:
    """``start:stop:n`` or ``start:stop:n:log``."""
    parts = text.strip().split(":")
    if len(parts) not in (3, 4):
        raise ValueError(f"grid must be start:stop:n[:log], got {text!r}")
    start, stop, n = float(parts[0]), float(parts[1]), int(parts[2])
    spacing = "uniform"
    if len(parts) == 4:
        if parts[3] not in ("log", "uniform"):
            raise ValueError(f"unknown grid spacing {parts[3]!r}")
        spacing = parts[3]
    return GridSpec(t_max=stop, n=n, spacing=spacing, t_min=start if (start or spacing == "log") else None)


def canonical_grid(g: GridSpec) -> GridSpec:
    """Spell the first point out for log grids and drop a zero start."""
    start = float(g.axis()[0])
    t_min = start if (start or g.spacing == "log") else None
    return GridSpec(t_max=float(g.t_max), n=int(g.n), spacing=g.spacing, t_min=t_min)


def format_grid(g: GridSpec) -> str:
    start = float(g.axis()[0])
    out = f"{start!r}:{g.t_max!r}:{g.n}"
    return out + (":log" if g.spacing == "log" else "")


def _opt_float(text):
    text = text.strip()
    return None if text in ("", "none", "default") else float(text)


def _approaches(text):
    text = text.strip()
    if text in ("all", ""):
        return None
    return tuple(ApproachKind.parse(a) for a in text.split(","))


def _channels(text):
    text = text.strip()
    if text == "all":
        return tuple(Channel.parse(c) for c in ("11", "12", "21", "22"))
    return tuple(Channel.parse(c) for c in text.split(","))


def _choice(options):
    def parse(text):
        text = text.strip()
        if text not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return text

    return parse


def _opt_int(text):
    text = text.strip()
    return None if text in ("", "none") else int(text)


def _opt_str(text):
    text = text.strip()
    return None if text in ("", "none") else text


PARSERS = {
    "mode": _choice(MODES),
    "units": _choice(UNITS),
    "gamma_s": _opt_float,
    "gamma_l": _opt_float,
    "delta_m": _opt_float,
    "epsilon_abs": float,
    "epsilon_arg_deg": float,
    "gamma_1": _opt_float,
    "gamma_2": _opt_float,
    "state": parse_state,
    "alpha1": lambda s: complex(s.strip().replace(" ", "")),
    "alpha2": lambda s: complex(s.strip().replace(" ", "")),
    "delta_e": _opt_float,
    "gamma1": _opt_float,
    "gamma2": _opt_float,
    "approaches": _approaches,
    "channels": _channels,
    "grid": parse_grid,
    "normalization": lambda s: None if s.strip() in ("", "none") else _choice(NORMALIZATIONS)(s),
    "seed": int,
    "n": _opt_int,
    "z": float,
    "p_approach": ApproachKind.parse,
    "q_approach": ApproachKind.parse,
    "bins": parse_grid,
    "events": _opt_str,
    "out": _opt_str,
    "output": _choice(OUTPUTS),
}

# command-line spellings that differ from the file keys
ALIASES = {"approach": "approaches", "channel": "channels", "epsilon_arg": "epsilon_arg_deg"}


@dataclass(frozen=True)
class RunConfig:
    mode: str = "joint"
    units: str = "tau_s_units"
    # rates in the configured units; None selects the kaon defaults
    gamma_s: float | None = None
    gamma_l: float | None = None
    delta_m: float | None = None
    epsilon_abs: float = EPSILON_ABS
    epsilon_arg_deg: float = EPSILON_ARG_DEG
    gamma_1: float | None = None
    gamma_2: float | None = None
    state: EntangledStateSpec = field(default_factory=EntangledStateSpec.singlet)
    # single-particle superposition; None rates fall back to gamma_s, gamma_l, delta_m
    alpha1: complex = complex(1 / math.sqrt(2))
    alpha2: complex = complex(1 / math.sqrt(2))
    delta_e: float | None = None
    gamma1: float | None = None
    gamma2: float | None = None
    approaches: tuple | None = None
    channels: tuple = (Channel(1, 1),)
    grid: GridSpec = GridSpec(t_max=10.0, n=11)
    # None: global for density and sample, per_channel for compare and discriminate
    normalization: str | None = None
    seed: int = 0
    n: int | None = None
    z: float = 5.0
    p_approach: ApproachKind = ApproachKind.HYBRID
    q_approach: ApproachKind = ApproachKind.TIME_OPERATOR
    bins: GridSpec = GridSpec(t_max=10.0, n=20)
    events: str | None = None
    out: str | None = None
    output: str = "csv"

    def __post_init__(self):
        for key in ("grid", "bins"):
            object.__setattr__(self, key, canonical_grid(getattr(self, key)))
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed: must be a 64-bit unsigned integer")
        if self.n is not None and self.n < 1:
            raise ConfigError("n: must be >= 1")
        if not self.z > 0:
            raise ConfigError("z: must be positive")
        if not 0 <= self.epsilon_abs < 1:
            raise ConfigError("epsilon_abs: must lie in [0, 1)")
        if not self.channels:
            raise ConfigError("channels: at least one channel is required")
        try:
            self.kaon_params()
            if self.mode == "single":
                self.superposition()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    # -- derived objects -----------------------------------------------------
    @property
    def time_unit(self) -> float:
        """Seconds per time unit of the inputs (1 for internal units)."""
        if self.units == "tau_s_units":
            return 1.0
        return 1.0 / self.gamma_s if self.gamma_s is not None else TAU_S_SECONDS

    def _internal_rate(self, value, default):
        return default if value is None else value * self.time_unit

    def kaon_params(self) -> KaonParams:
        """Parameters in internal units (gamma_s of the config sets the unit)."""
        if self.units == "tau_s_units":
            gs = 1.0 if self.gamma_s is None else self.gamma_s
            gl = TAU_S_SECONDS / TAU_L_SECONDS * gs if self.gamma_l is None else self.gamma_l
            dm = 0.5 * gs if self.delta_m is None else self.delta_m
        else:
            gs = 1.0
            gl = self._internal_rate(self.gamma_l, self.time_unit / TAU_L_SECONDS)
            dm = self._internal_rate(self.delta_m, 0.5)
        eps = cmath.rect(self.epsilon_abs, math.radians(self.epsilon_arg_deg))
        return KaonParams(
            gamma_s=gs, gamma_l=gl, delta_m=dm, epsilon=eps,
            gamma_1=None if self.gamma_1 is None else self._internal_rate(self.gamma_1, None),
            gamma_2=None if self.gamma_2 is None else self._internal_rate(self.gamma_2, None),
        )

    def superposition(self) -> SuperpositionSpec:
        p = self.kaon_params()
        g1 = p.gamma_s if self.gamma1 is None else self._internal_rate(self.gamma1, None)
        g2 = p.gamma_l if self.gamma2 is None else self._internal_rate(self.gamma2, None)
        de = p.delta_m if self.delta_e is None else self._internal_rate(self.delta_e, None)
        return SuperpositionSpec(self.alpha1, self.alpha2, de, g1, g2)

    def approach_list(self) -> tuple:
        if self.approaches is not None:
            return self.approaches
        return SINGLE_APPROACHES if self.mode == "single" else ALL_APPROACHES

    def normalization_for(self, command: str) -> str:
        if self.normalization is not None:
            return self.normalization
        return "per_channel" if command in ("compare", "discriminate") else "global"

    def internal_axis(self, grid: GridSpec | None = None) -> np.ndarray:
        return (grid or self.grid).axis() / self.time_unit

    # -- text form -----------------------------------------------------------
    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            lines.append(f"{f.name} = {format_value(f.name, v)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, overrides: dict | None = None, source: str = "<config>") -> "RunConfig":
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
            key = ALIASES.get(key.strip(), key.strip())
            values[key] = parse_value(key, value, where=f"{source}:{lineno}")
        for key, value in (overrides or {}).items():
            key = ALIASES.get(key, key)
            values[key] = parse_value(key, value, where=f"--{key.replace('_', '-')}")
        try:
            return cls(**values)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{source}: {exc}") from exc

    @classmethod
    def load(cls, path=None, overrides: dict | None = None) -> "RunConfig":
        """Read ``path``, else the file named by $DECAYTIMES_CONFIG, else defaults."""
        path = path or os.environ.get(CONFIG_ENV)
        if not path:
            return cls.from_text("", overrides)
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_text(text, overrides, source=str(path))


def parse_value(key: str, value: str, where: str = ""):
    if key not in PARSERS:
        raise ConfigError(f"{where}: unknown key {key!r}")
    try:
        return PARSERS[key](value)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{where}: {key}: {exc}") from exc


def format_value(key: str, v) -> str:
    if v is None:
        return "all" if key == "approaches" else "none"
    if key in ("grid", "bins"):
        return format_grid(v)
    if key == "state":
        return v.describe()
    if key == "approaches":
        return ",".join(str(a) for a in v)
    if key == "channels":
        return ",".join(str(c) for c in v)
    if isinstance(v, complex):
        return repr(v).strip("()")
    if isinstance(v, float):
        return repr(v)
    return str(v)
