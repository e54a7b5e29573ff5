#!/usr/bin/env python3
"""Hybrid vs time-operator KL divergence as |epsilon| varies.

Writes CSV (abs_epsilon,state,channel,kl_pq,kl_qp,n_required) to stdout.
No functional form is fitted; the table is meant for plotting.

    python3 scripts/kl_vs_epsilon.py --states beta:0 --channels 11,12 --points 6
"""

import argparse
import cmath
import csv
import math
import sys

import numpy as np

from decaytimes import KaonParams, joint_density, kl_divergence, required_sample_size
from decaytimes.config import parse_state
from decaytimes.errors import DecayTimesError
from decaytimes.model import EPSILON_ARG_DEG


def main(argv=None):
    ap = argparse.ArgumentParser(description="KL divergence between hybrid and time-operator densities vs |eps|")
    ap.add_argument("--states", default="beta:0", help="comma-separated state specs")
    ap.add_argument("--channels", default="11,12,22")
    ap.add_argument("--eps-min", type=float, default=1e-4)
    ap.add_argument("--eps-max", type=float, default=0.1)
    ap.add_argument("--points", type=int, default=7)
    ap.add_argument("--z", type=float, default=5.0)
    args = ap.parse_args(argv)

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["abs_epsilon", "state", "channel", "kl_pq", "kl_qp", "n_required"])
    for eps in np.geomspace(args.eps_min, args.eps_max, args.points):
        p = KaonParams(epsilon=cmath.rect(eps, math.radians(EPSILON_ARG_DEG)))
        for spec in args.states.split(","):
            state = parse_state(spec)
            for ch in args.channels.split(","):
                try:
                    hy = joint_density("hybrid", state, p, ch, "per_channel")
                    to = joint_density("time-operator", state, p, ch, "per_channel")
                    kl_pq, kl_qp = kl_divergence(hy, to), kl_divergence(to, hy)
                    n = required_sample_size(kl_pq, args.z)
                except DecayTimesError as exc:
                    print(f"# {spec} {ch} eps={eps:.3g}: {exc}", file=sys.stderr)
                    continue
                w.writerow([repr(float(eps)), state.describe(), ch, repr(kl_pq), repr(kl_qp),
                            "Infinite" if n == math.inf else n])


if __name__ == "__main__":
    main()
