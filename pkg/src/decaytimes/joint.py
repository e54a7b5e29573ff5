"""Joint decay-time densities p^ij(t_l, t_r) of entangled kaon pairs.

All four prescriptions are built exactly (to all orders in epsilon) from the
CP-basis survival amplitudes:

* standard-new:  d^2 P^ij / dt_l dt_r
* hybrid:        Gamma_i Gamma_j P^ij
* time-operator: |psi^TO_ij|^2, each K_S / K_L factor weighted by sqrt(Gamma)
* standard-old:  -(d/dt_l + d/dt_r) P^ij

where P^ij = |psi_ij|^2 / ||psi(0, 0)||^2.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .biexp import BiExpSum
from .errors import NormalizationError
from .model import (
    ALL_APPROACHES,
    ALL_CHANNELS,
    ApproachKind,
    Channel,
    EntangledStateSpec,
    KaonParams,
    survival_amplitudes,
)

NORMALIZATIONS = ("global", "per_channel")
PROPORTIONAL_RTOL = 1e-10
NEGATIVITY_RTOL = 1e-12


@dataclass(frozen=True)
class GridSpec:
    t_max: float
    n: int
    spacing: str = "uniform"
    # first point; defaults to 0 (uniform) or t_max / 1000 (log)
    t_min: float | None = None

    def __post_init__(self):
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")
        if self.n < 2:
            raise ValueError("a grid needs at least two points per axis")
        if self.spacing not in ("uniform", "log"):
            raise ValueError(f"unknown spacing {self.spacing!r}")
        if self.t_min is not None:
            if not 0 <= self.t_min < self.t_max:
                raise ValueError("t_min must lie in [0, t_max)")
            if self.spacing == "log" and self.t_min == 0:
                raise ValueError("a log grid needs t_min > 0")

    def axis(self) -> np.ndarray:
        if self.spacing == "uniform":
            return np.linspace(self.t_min or 0.0, self.t_max, self.n)
        lo = self.t_max / 1000 if self.t_min is None else self.t_min
        return np.geomspace(lo, self.t_max, self.n)

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        """Row-major (t_l outer, t_r inner) flattened grid."""
        tl, tr = np.meshgrid(self.axis(), self.axis(), indexing="ij")
        return tl.ravel(), tr.ravel()


@dataclass(frozen=True)
class Negativity:
    min_value: float
    location: tuple[float, float]


@dataclass(frozen=True, eq=False)
class JointDensity:
    approach: ApproachKind
    channel: Channel
    state: EntangledStateSpec
    params: KaonParams
    carrier: BiExpSum
    norm_constant: float
    negativity: Negativity | None
    normalization: str = "global"
    efficiency: float = 1.0

    def __call__(self, t_l, t_r):
        """Normalized density."""
        return self.norm_constant * self.carrier.real(t_l, t_r)

    def unnormalized(self, t_l, t_r):
        return self.carrier.real(t_l, t_r)

    def channel_mass(self) -> float:
        return self.norm_constant * self.carrier.integral().real

    def descriptor(self) -> dict:
        p = self.params
        return {
            "approach": str(self.approach),
            "channel": str(self.channel),
            "state": self.state.describe(),
            "normalization": self.normalization,
            "params": {
                "gamma_s": p.gamma_s,
                "gamma_l": p.gamma_l,
                "delta_m": p.delta_m,
                "epsilon_re": p.epsilon.real,
                "epsilon_im": p.epsilon.imag,
                "gamma_1": p.cp_rates[0],
                "gamma_2": p.cp_rates[1],
            },
        }


def survival_carrier(state: EntangledStateSpec, params: KaonParams, channel) -> BiExpSum:
    """P^ij(t_l, t_r) as an exact carrier."""
    i, j = Channel.parse(channel).index
    psi = survival_amplitudes(state, params)[i][j]
    return psi.modsq() / state.norm_squared(params)


def joint_survival(state: EntangledStateSpec, params: KaonParams, channel, t_l, t_r):
    if np.any(np.asarray(t_l) < 0) or np.any(np.asarray(t_r) < 0):
        raise ValueError("decay times must be nonnegative")
    return survival_carrier(state, params, channel).real(t_l, t_r)


def density_carrier(approach, state: EntangledStateSpec, params: KaonParams, channel) -> BiExpSum:
    """Unnormalized density of one prescription in one channel."""
    approach = ApproachKind.parse(approach)
    channel = Channel.parse(channel)
    if approach is ApproachKind.TIME_OPERATOR:
        i, j = channel.index
        psi = survival_amplitudes(state, params, weighted=True)[i][j]
        return psi.modsq() / state.norm_squared(params)
    surv = survival_carrier(state, params, channel)
    if approach is ApproachKind.STANDARD_NEW:
        return surv.mixed_derivative()
    if approach is ApproachKind.STANDARD_OLD:
        return surv.sum_derivative()
    rates = params.cp_rates
    return surv * (rates[channel.left - 1] * rates[channel.right - 1])


def _envelope_mass(f: BiExpSum) -> float:
    if len(f) == 0:
        return 0.0
    return float(np.sum(np.abs(f.coeffs) / (f.z_left.real * f.z_right.real)))


def _channel_mass(approach, state, params, channel, carrier) -> float:
    """Net probability of a channel carrier, in closed form."""
    if approach is ApproachKind.STANDARD_NEW:
        # telescoping: the quadrant integral equals P^ij(0, 0)
        return float(survival_carrier(state, params, channel).real(0.0, 0.0))
    return carrier.integral().real


def scan_negativity(f: BiExpSum, t_short: float = 10.0, n: int = 200) -> Negativity | None:
    """Look for values below -NEGATIVITY_RTOL * envelope on a scan grid.

    The grid is the uniform n x n grid on [0, t_short]^2 joined with a
    log-spaced axis reaching 40 times the slowest decay length, so that
    features living on the long-lived scale are also seen.
    """
    if f.is_zero:
        return None
    slow = min(float(np.min(f.z_left.real)), float(np.min(f.z_right.real)))
    axis = np.union1d(np.linspace(0.0, t_short, n), np.geomspace(1e-2, 40.0 / slow, n))
    tl, tr = np.meshgrid(axis, axis, indexing="ij")
    v = f.real(tl, tr)
    bad = v < -NEGATIVITY_RTOL * f.envelope(tl, tr)
    if not np.any(bad):
        return None
    k = np.argmin(np.where(bad, v, np.inf))
    return Negativity(float(v.flat[k]), (float(tl.flat[k]), float(tr.flat[k])))


def joint_density(
    approach,
    state: EntangledStateSpec,
    params: KaonParams,
    channel,
    normalization: str = "global",
    efficiencies: dict | None = None,
) -> JointDensity:
    """Exact density with its normalization constant and negativity report.

    ``global`` normalizes all four channels together (one detector
    calibration constant); ``per_channel`` normalizes this channel alone.
    ``efficiencies`` maps channels to detection-efficiency multipliers.
    """
    approach = ApproachKind.parse(approach)
    channel = Channel.parse(channel)
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    eff = {c: 1.0 for c in ALL_CHANNELS}
    for k, v in (efficiencies or {}).items():
        if not v > 0:
            raise ValueError("efficiencies must be positive")
        eff[Channel.parse(k)] = float(v)

    carrier = density_carrier(approach, state, params, channel) * eff[channel]
    if normalization == "per_channel":
        mass = _channel_mass(approach, state, params, channel, carrier)
        if approach is ApproachKind.STANDARD_NEW:
            mass *= eff[channel]
        scale = _envelope_mass(carrier)
        if not mass > 1e-12 * scale:
            raise NormalizationError(
                f"{approach} channel {channel} carries no positive net probability ({mass:.3e})"
            )
        norm = 1.0 / mass
    elif approach is ApproachKind.STANDARD_NEW and all(v == 1.0 for v in eff.values()):
        norm = 1.0
    else:
        total = 0.0
        for c in ALL_CHANNELS:
            car = density_carrier(approach, state, params, c)
            total += eff[c] * _channel_mass(approach, state, params, c, car)
        if not total > 0:
            raise NormalizationError(f"{approach} densities carry no positive total probability")
        norm = 1.0 / total

    return JointDensity(
        approach=approach,
        channel=channel,
        state=state,
        params=params,
        carrier=carrier,
        norm_constant=norm,
        negativity=scan_negativity(carrier, t_short=10.0 / params.gamma_s),
        normalization=normalization,
        efficiency=eff[channel],
    )


def proportionality_residual(p: np.ndarray, q: np.ndarray) -> float:
    """max |p - s q| / max |p| with s the least-squares scale; 0 for p = q = 0."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    pmax, qmax = np.max(np.abs(p)), np.max(np.abs(q))
    if pmax == 0 and qmax == 0:
        return 0.0
    if pmax == 0 or qmax == 0:
        return np.inf
    s = np.dot(p, q) / np.dot(q, q)
    return float(np.max(np.abs(p - s * q)) / pmax)


def max_relative_deviation(p: np.ndarray, q: np.ndarray) -> float:
    scale = max(np.max(np.abs(p)), np.max(np.abs(q)))
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(p - q)) / scale)


@dataclass
class Comparison:
    state: EntangledStateSpec
    channel: Channel
    t_l: np.ndarray
    t_r: np.ndarray
    raw: dict
    normalized: dict  # approach -> array, NaN where normalization is undefined
    deviations: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)

    def pairs(self):
        return list(self.verdicts)


def approach_comparison(
    state: EntangledStateSpec,
    params: KaonParams,
    channel,
    grid: GridSpec,
    approaches=ALL_APPROACHES,
    normalization: str = "per_channel",
) -> Comparison:
    """Evaluate every approach on a grid and decide which pairs share a shape.

    A pair is "proportional" when the least-squares proportionality residual
    is below 1e-10; the verdict is independent of normalization.
    """
    channel = Channel.parse(channel)
    approaches = [ApproachKind.parse(a) for a in approaches]
    tl, tr = grid.points()
    raw, normed = {}, {}
    for a in approaches:
        carrier = density_carrier(a, state, params, channel)
        raw[a] = carrier.real(tl, tr)
        try:
            d = joint_density(a, state, params, channel, normalization=normalization)
            normed[a] = d.norm_constant * raw[a]
        except NormalizationError:
            normed[a] = np.full_like(raw[a], np.nan)
    cmp = Comparison(state, channel, tl, tr, raw, normed)
    for a, b in itertools.combinations(approaches, 2):
        res = proportionality_residual(raw[a], raw[b])
        cmp.residuals[(a, b)] = res
        cmp.verdicts[(a, b)] = "proportional" if res <= PROPORTIONAL_RTOL else "not proportional"
        if np.all(np.isnan(normed[a])) or np.all(np.isnan(normed[b])):
            cmp.deviations[(a, b)] = float("nan")
        else:
            cmp.deviations[(a, b)] = max_relative_deviation(normed[a], normed[b])
    return cmp
