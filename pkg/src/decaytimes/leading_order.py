"""Closed leading-order-in-epsilon formulas for alpha and beta states.

These are the expanded expressions as printed in the original derivation,
evaluated verbatim, prefactors included. They are cross-checks for the
exact engine in :mod:`decaytimes.joint`, not a replacement for it: several
of them differ from the exact densities by constant factors (the expanded
forms drop the 1/2 of |eps|^2 / 2), and the beta-state old-standard form
does not follow from its own survival probability.
"""

from __future__ import annotations

import cmath

import numpy as np

from .errors import UnsupportedCombination
from .model import ApproachKind, Channel, EntangledStateSpec, KaonParams

SN, HY, TO, OLD = (
    ApproachKind.STANDARD_NEW,
    ApproachKind.HYBRID,
    ApproachKind.TIME_OPERATOR,
    ApproachKind.STANDARD_OLD,
)


def _alpha(approach, phase, ch, p: KaonParams, tl, tr, simplified):
    gs, gl, gb, dm = p.gamma_s, p.gamma_l, p.gamma_bar, p.delta_m
    e2 = abs(p.epsilon) ** 2
    x = np.exp(-gl * tl - gs * tr)
    y = np.exp(-gs * tl - gl * tr)
    e = np.exp(-gb * (tl + tr))
    beat = np.cos(dm * (tl - tr) + phase)
    if ch == "11":
        if approach is SN and phase == 0:
            if simplified:
                return e2 * (gs * gl * (x + y) - gs**2 * e * beat)
            return e2 * (gs * gl * (x + y) - 2 * e * (gb**2 + dm**2) * beat)
        if approach in (HY, TO):
            return gs * gl * e2 * (x + y - 2 * e * beat)
        if approach is OLD and phase == 0:
            return (gs + gl) * e2 * (x + y - 2 * e * beat)
    # zeroth order: CP=-1 on the left with CP=+1 on the right, and its mirror
    if ch == "21" and approach in (SN, HY, TO):
        return gs * gl * x
    if ch == "12" and approach in (SN, HY, TO):
        return gs * gl * y
    return None


def _beta(approach, phase, ch, p: KaonParams, tl, tr):
    gs, gl, gb, dm = p.gamma_s, p.gamma_l, p.gamma_bar, p.delta_m
    e2 = abs(p.epsilon) ** 2
    s = tl + tr
    e = np.exp(-gb * s)
    if ch == "11" and approach in (SN, HY, TO):
        return gs**2 * np.exp(-gs * s)
    if ch == "22" and approach in (SN, HY, TO):
        return gl**2 * np.exp(-gl * s)
    if ch in ("12", "21"):
        arg = dm * s + phase
        if approach is HY:
            return e2 * (np.exp(-gl * s) + np.exp(-gs * s) - 2 * e * np.cos(arg))
        if approach is TO:
            zs, zl = p.mode_exponents
            amp = gl * np.exp(-zl * s) - gs * cmath.exp(1j * phase) * np.exp(-zs * s)
            return e2 * np.abs(amp) ** 2
        if approach is OLD:
            return 0.5 * e2 * (
                2 * gl * np.exp(-gl * s)
                + 2 * gs * np.exp(-gs * s)
                + 2 * e * ((gs + gl) * np.cos(arg) - dm * np.sin(arg))
            )
    return None


def paper_approximation(
    approach,
    state: EntangledStateSpec,
    channel,
    params: KaonParams,
    t_l,
    t_r,
    simplified: bool = False,
):
    """Evaluate the printed leading-order density for an alpha or beta state.

    ``simplified`` selects the kaon form of the singlet standard-new density
    that uses Gbar ~ delta_m ~ Gamma_S / 2.
    Raises :class:`UnsupportedCombination` where no closed form was given.
    """
    approach = ApproachKind.parse(approach)
    ch = str(Channel.parse(channel))
    tl = np.asarray(t_l, dtype=float)
    tr = np.asarray(t_r, dtype=float)
    value = None
    if state.variant == "alpha":
        value = _alpha(approach, state.phase, ch, params, tl, tr, simplified)
    elif state.variant == "beta" and not simplified:
        value = _beta(approach, state.phase, ch, params, tl, tr)
    if value is None:
        raise UnsupportedCombination(
            f"no leading-order formula for {approach} / {state.describe()} / channel {ch}"
        )
    return value if np.ndim(value) else float(value)
