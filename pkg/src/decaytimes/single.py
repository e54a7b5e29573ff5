"""Decay-time densities of one particle prepared in a superposition of two
exponentially decaying levels (quantum beats).

Each prescription gives a density of the form

    N * (w1 |a1|^2 e^{-G1 t} + w2 |a2|^2 e^{-G2 t} + 2 |a1||a2| e^{-Gbar t} X(t))

and the normalization N over [0, inf) is obtained in closed form.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NormalizationError
from .model import ApproachKind


class NegativeDensityWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SuperpositionSpec:
    alpha1: complex
    alpha2: complex
    delta_e: float
    gamma1: float
    gamma2: float

    def __post_init__(self):
        object.__setattr__(self, "alpha1", complex(self.alpha1))
        object.__setattr__(self, "alpha2", complex(self.alpha2))
        if not (self.gamma1 > 0 and self.gamma2 > 0):
            raise ValueError("decay rates must be positive")
        norm = abs(self.alpha1) ** 2 + abs(self.alpha2) ** 2
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"|alpha1|^2 + |alpha2|^2 must be 1, got {norm!r}")

    @classmethod
    def kaon_like(cls, delta_phi: float = 0.0) -> "SuperpositionSpec":
        from .model import KaonParams

        p = KaonParams()
        a = 1 / math.sqrt(2)
        return cls(a, a * cmath.exp(1j * delta_phi), p.delta_m, p.gamma_s, p.gamma_l)

    @property
    def gamma_bar(self) -> float:
        return 0.5 * (self.gamma1 + self.gamma2)

    @property
    def delta_phi(self) -> float:
        if self.alpha1 == 0 or self.alpha2 == 0:
            return 0.0
        return cmath.phase(self.alpha2 / self.alpha1)


@dataclass(frozen=True)
class BeatPolar:
    R: float
    theta: float

    @property
    def value(self) -> complex:
        return cmath.rect(self.R, self.theta)


def beat_polar(spec: SuperpositionSpec) -> BeatPolar:
    """R e^{i theta} = Gbar - i dE."""
    return BeatPolar(math.hypot(spec.gamma_bar, spec.delta_e), math.atan2(-spec.delta_e, spec.gamma_bar))


def _damped_cos_integral(rate: float, omega: float, phase: float) -> float:
    # int_0^inf e^{-rate t} cos(omega t + phase) dt
    return (rate * math.cos(phase) - omega * math.sin(phase)) / (rate**2 + omega**2)


def _shape(approach: ApproachKind, spec: SuperpositionSpec):
    """(weight1, weight2, beat amplitude, beat phase offset) for one rule."""
    if approach in (ApproachKind.STANDARD_NEW, ApproachKind.STANDARD_OLD):
        pol = beat_polar(spec)
        return spec.gamma1, spec.gamma2, pol.R, pol.theta
    if approach is ApproachKind.HYBRID:
        return 1.0, 1.0, 1.0, 0.0
    if approach is ApproachKind.TIME_OPERATOR:
        return spec.gamma1, spec.gamma2, math.sqrt(spec.gamma1 * spec.gamma2), 0.0
    raise ValueError(f"unknown approach {approach!r}")


class SingleDensity:
    """Normalized decay-time density of one superposed particle."""

    def __init__(self, approach, spec: SuperpositionSpec):
        self.approach = ApproachKind.parse(approach)
        self.spec = spec
        self._w1, self._w2, self._amp, self._offset = _shape(self.approach, spec)
        total = self.unnormalized_integral()
        if not total > 0:
            raise NormalizationError(f"{self.approach} density integrates to {total!r}")
        self.norm_constant = 1.0 / total

    def unnormalized_integral(self) -> float:
        s = self.spec
        a1, a2 = abs(s.alpha1), abs(s.alpha2)
        return (
            a1**2 * self._w1 / s.gamma1
            + a2**2 * self._w2 / s.gamma2
            + 2 * a1 * a2 * self._amp * _damped_cos_integral(s.gamma_bar, s.delta_e, s.delta_phi + self._offset)
        )

    def unnormalized(self, t):
        s = self.spec
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("decay times must be nonnegative")
        a1, a2 = abs(s.alpha1), abs(s.alpha2)
        beat = np.cos(s.delta_e * t + s.delta_phi + self._offset)
        return (
            a1**2 * self._w1 * np.exp(-s.gamma1 * t)
            + a2**2 * self._w2 * np.exp(-s.gamma2 * t)
            + 2 * a1 * a2 * self._amp * np.exp(-s.gamma_bar * t) * beat
        )

    def __call__(self, t):
        return self.norm_constant * self.unnormalized(t)


def density_single(approach, spec: SuperpositionSpec, t):
    """Normalized density at ``t``; warns (never clips) where it is negative."""
    value = SingleDensity(approach, spec)(t)
    if np.any(value < 0):
        warnings.warn(
            f"{ApproachKind.parse(approach)} density is negative at some requested times",
            NegativeDensityWarning,
            stacklevel=2,
        )
    return value if np.ndim(value) else float(value)


def survival_single(spec: SuperpositionSpec, t, coherent: bool = False):
    """Survival probability of the superposed system.

    The default treats the two levels as decaying into distinguishable
    final states: sum_j |a_j|^2 e^{-G_j t}. With ``coherent=True`` the
    interference term 2|a1||a2| e^{-Gbar t} cos(dE t + dphi) is included;
    minus its derivative is the unnormalized standard beat density.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("decay times must be nonnegative")
    a1, a2 = abs(spec.alpha1), abs(spec.alpha2)
    p = a1**2 * np.exp(-spec.gamma1 * t) + a2**2 * np.exp(-spec.gamma2 * t)
    if coherent:
        p = p + 2 * a1 * a2 * np.exp(-spec.gamma_bar * t) * np.cos(spec.delta_e * t + spec.delta_phi)
    return p if p.ndim else float(p)
