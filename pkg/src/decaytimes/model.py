"""Neutral-kaon constants, CP mixing and two-kaon state specifications.

Internal units: times in units of the K_S lifetime, so the default
``gamma_s`` is 1 and every rate is dimensionless. Only the mass splitting
enters observables; the K_S mass is set to zero.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .biexp import BiExpSum

TAU_S_SECONDS = 8.92e-11
TAU_L_SECONDS = 5.17e-8
EPSILON_ABS = 2.27e-3
EPSILON_ARG_DEG = 43.37

S, L = 0, 1  # mode indices in coefficient matrices


def default_epsilon() -> complex:
    return cmath.rect(EPSILON_ABS, math.radians(EPSILON_ARG_DEG))


@dataclass(frozen=True)
class KaonParams:
    gamma_s: float = 1.0
    gamma_l: float = TAU_S_SECONDS / TAU_L_SECONDS
    # m_L - m_S; the default is the kaon approximation delta_m ~ gamma_s / 2
    delta_m: float = 0.5
    epsilon: complex = field(default_factory=default_epsilon)
    # CP-sector rates used by the hybrid rule; None means gamma_s / gamma_l
    gamma_1: float | None = None
    gamma_2: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "epsilon", complex(self.epsilon))
        if not (self.gamma_s > 0 and self.gamma_l > 0):
            raise ValueError("decay rates must be positive")
        if self.gamma_s < self.gamma_l:
            raise ValueError("gamma_s must be >= gamma_l")
        if self.delta_m < 0:
            raise ValueError("delta_m must be >= 0 (convention m_L > m_S)")
        if abs(self.epsilon) >= 1:
            raise ValueError("|epsilon| must be < 1")
        for g in (self.gamma_1, self.gamma_2):
            if g is not None and not g > 0:
                raise ValueError("CP-sector rates must be positive")

    @property
    def gamma_bar(self) -> float:
        return 0.5 * (self.gamma_s + self.gamma_l)

    @property
    def cp_rates(self) -> tuple[float, float]:
        g1 = self.gamma_s if self.gamma_1 is None else self.gamma_1
        g2 = self.gamma_l if self.gamma_2 is None else self.gamma_2
        return g1, g2

    @property
    def mode_rates(self) -> tuple[float, float]:
        return self.gamma_s, self.gamma_l

    @property
    def mode_exponents(self) -> tuple[complex, complex]:
        """z_a with exp(-i (m_a - i Gamma_a / 2) t) = exp(-z_a t), m_S := 0."""
        return complex(0.5 * self.gamma_s, 0.0), complex(0.5 * self.gamma_l, self.delta_m)

    def replace(self, **changes) -> "KaonParams":
        values = {f: getattr(self, f) for f in self.__dataclass_fields__}
        values.update(changes)
        return KaonParams(**values)


def mixing_matrix(params: KaonParams) -> np.ndarray:
    """M[i, a] = <K_i | K_a> with rows (K_1, K_2) and columns (K_S, K_L)."""
    eps = params.epsilon
    if abs(eps) >= 1:
        raise ValueError("|epsilon| must be < 1")
    n = math.sqrt(1.0 + abs(eps) ** 2)
    m = np.array([[1.0, eps], [eps, 1.0]], dtype=complex) / n
    m.flags.writeable = False
    return m


@dataclass(frozen=True)
class Channel:
    """Joint detection class: CP sector on the left and on the right."""

    left: int
    right: int

    def __post_init__(self):
        if self.left not in (1, 2) or self.right not in (1, 2):
            raise ValueError(f"CP sectors are 1 or 2, got {self.left}{self.right}")

    @classmethod
    def parse(cls, text: str | "Channel") -> "Channel":
        if isinstance(text, Channel):
            return text
        s = str(text).strip().strip("()").replace(",", "").replace(" ", "")
        if len(s) != 2 or not s.isdigit():
            raise ValueError(f"cannot parse channel {text!r}")
        return cls(int(s[0]), int(s[1]))

    def __str__(self) -> str:
        return f"{self.left}{self.right}"

    @property
    def index(self) -> tuple[int, int]:
        return self.left - 1, self.right - 1


ALL_CHANNELS = tuple(Channel(i, j) for i in (1, 2) for j in (1, 2))


class ApproachKind(enum.Enum):
    STANDARD_NEW = "standard-new"
    HYBRID = "hybrid"
    TIME_OPERATOR = "time-operator"
    STANDARD_OLD = "standard-old"

    @classmethod
    def parse(cls, text) -> "ApproachKind":
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower().replace("_", "-")
        aliases = {"standard": "standard-new", "to": "time-operator", "old": "standard-old"}
        return cls(aliases.get(key, key))

    def __str__(self) -> str:
        return self.value


ALL_APPROACHES = tuple(ApproachKind)


@dataclass(frozen=True, eq=False)
class EntangledStateSpec:
    """Two-kaon state sum_ab C[a, b] |K_a>_l |K_b>_r with a, b in (S, L).

    Coefficients are stored without the epsilon-dependent prefactors; the
    state is normalized on use through :meth:`norm_squared`.
    """

    variant: str
    phase: float = 0.0
    coefficients: np.ndarray = None

    def __post_init__(self):
        if self.variant == "alpha":
            c = np.zeros((2, 2), dtype=complex)
            c[L, S] = 1.0
            c[S, L] = -cmath.exp(1j * self.phase)
        elif self.variant == "beta":
            c = np.zeros((2, 2), dtype=complex)
            c[L, L] = 1.0
            c[S, S] = -cmath.exp(1j * self.phase)
        elif self.variant == "general":
            c = np.array(self.coefficients, dtype=complex)
            if c.shape != (2, 2):
                raise ValueError("general state needs a 2x2 coefficient matrix")
        else:
            raise ValueError(f"unknown state variant {self.variant!r}")
        if not np.any(c):
            raise ValueError("state coefficients must not all vanish")
        if self.variant != "general":
            c = c / math.sqrt(2.0)
        c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def alpha(cls, phase: float = 0.0) -> "EntangledStateSpec":
        return cls("alpha", float(phase))

    @classmethod
    def beta(cls, phase: float = 0.0) -> "EntangledStateSpec":
        return cls("beta", float(phase))

    @classmethod
    def singlet(cls) -> "EntangledStateSpec":
        return cls.alpha(0.0)

    @classmethod
    def general(cls, coefficients) -> "EntangledStateSpec":
        return cls("general", 0.0, np.asarray(coefficients, dtype=complex))

    def __eq__(self, other):
        if not isinstance(other, EntangledStateSpec):
            return NotImplemented
        return (
            self.variant == other.variant
            and self.phase == other.phase
            and np.array_equal(self.coefficients, other.coefficients)
        )

    def __hash__(self):
        return hash((self.variant, self.phase, self.coefficients.tobytes()))

    def cp_amplitudes_at_origin(self, params: KaonParams) -> np.ndarray:
        m = mixing_matrix(params)
        return m @ self.coefficients @ m.T

    def norm_squared(self, params: KaonParams) -> float:
        """||psi(0, 0)||^2 summed over the four CP channels."""
        return float(np.sum(np.abs(self.cp_amplitudes_at_origin(params)) ** 2))

    def describe(self) -> str:
        if self.variant == "general":
            flat = self.coefficients.ravel()
            return "general:" + ",".join(f"{float(x.real)!r},{float(x.imag)!r}" for x in flat)
        return f"{self.variant}:{float(self.phase)!r}"


def survival_amplitudes(
    state: EntangledStateSpec, params: KaonParams, weighted: bool = False
) -> tuple[tuple[BiExpSum, BiExpSum], tuple[BiExpSum, BiExpSum]]:
    """psi_ij(t_l, t_r) for i, j in the CP basis, as BiExpSum objects.

    With ``weighted=True`` each K_S (K_L) factor carries sqrt(Gamma_S)
    (sqrt(Gamma_L)): the temporal wave function of the time-operator rule.
    """
    m = mixing_matrix(params)
    z = params.mode_exponents
    w = np.sqrt(params.mode_rates) if weighted else np.ones(2)
    c = state.coefficients
    rows = []
    for i in range(2):
        row = []
        for j in range(2):
            terms = [
                (c[a, b] * m[i, a] * m[j, b] * w[a] * w[b], z[a], z[b])
                for a in (S, L)
                for b in (S, L)
                if c[a, b] != 0
            ]
            row.append(BiExpSum.from_terms(terms).simplify())
        rows.append(tuple(row))
    return rows[0], rows[1]


def survival_amplitude_matrix(state: EntangledStateSpec, params: KaonParams):
    return survival_amplitudes(state, params, weighted=False)
