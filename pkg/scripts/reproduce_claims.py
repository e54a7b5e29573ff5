#!/usr/bin/env python3
"""Recompute the qualitative claims about the four decay-time prescriptions.

Prints one line per claim with the number that backs it. Run from anywhere
once the package is installed:

    python3 scripts/reproduce_claims.py
"""

import argparse
import math

import numpy as np

from decaytimes import (
    EntangledStateSpec,
    GridSpec,
    KaonParams,
    SuperpositionSpec,
    approach_comparison,
    joint_density,
    kl_divergence,
    required_sample_size,
)
from decaytimes.joint import density_carrier
from decaytimes.single import SingleDensity


def claim(text, value):
    print(f"{text:<62} {value}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--z", type=float, default=5.0, help="significance for the event count")
    args = ap.parse_args(argv)

    p = KaonParams()
    singlet = EntangledStateSpec.singlet()
    t = np.linspace(0, 10, 200)

    print("# single particle")
    kaon = SuperpositionSpec.kaon_like()
    dens = {a: SingleDensity(a, kaon)(t) for a in ("standard-new", "hybrid", "time-operator")}
    claim("standard beat density minimum (kaon-like superposition)", f"{dens['standard-new'].min():.4e}")
    claim("hybrid vs time-operator max difference", f"{np.max(np.abs(dens['hybrid'] - dens['time-operator'])):.4e}")

    print("# singlet")
    for a in ("hybrid", "time-operator", "standard-new"):
        v = joint_density(a, singlet, p, "11").unnormalized(t, t)
        claim(f"{a} p11 on the diagonal, max / min", f"{v.max():.3e} / {v.min():.3e}")
    sn = density_carrier("standard-new", singlet, p, "11")
    claim("standard-new p11(0, 0), unnormalized", f"{sn.real(0.0, 0.0):.10e}")
    old = density_carrier("standard-old", singlet, p, "11").real(1.3, 0.4)
    base = density_carrier("hybrid", singlet, p, "11").real(1.3, 0.4) / p.gamma_s**2
    claim("standard-old / P11 (constant)", f"{old / base:.12f} (Gamma_S + Gamma_L = {p.gamma_s + p.gamma_l:.12f})")

    print("# alpha and beta classes, hybrid vs time-operator")
    grid = GridSpec(t_max=10.0, n=41)
    for name, state, ch in (
        ("alpha=0", EntangledStateSpec.alpha(0.0), "11"),
        ("alpha=pi/2", EntangledStateSpec.alpha(math.pi / 2), "12"),
        ("beta=0", EntangledStateSpec.beta(0.0), "12"),
        ("beta=pi/2", EntangledStateSpec.beta(math.pi / 2), "12"),
    ):
        cmp = approach_comparison(state, p, ch, grid, ("hybrid", "time-operator"))
        pair = next(iter(cmp.verdicts))
        hy = joint_density("hybrid", state, p, ch, "per_channel")
        to = joint_density("time-operator", state, p, ch, "per_channel")
        kl = kl_divergence(hy, to)
        n = required_sample_size(kl, args.z)
        claim(f"{name} channel {ch}: {cmp.verdicts[pair]}", f"kl {kl:.6g}, events for {args.z:g} sigma: {n}")


if __name__ == "__main__":
    main()
