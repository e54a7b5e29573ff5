"""Rejection sampling of (t_l, t_r) decay events from an exact joint density.

The proposal is the term-wise envelope sum_k |c_k| exp(-Re zl_k t_l - Re zr_k t_r):
a mixture of product exponentials that dominates the density everywhere
and is sampled by picking a term, then two exponential variates.

Events are generated in fixed-size chunks. Chunk i draws from PCG64 seeded
with SeedSequence(seed, spawn_key=(i,)), so a batch depends only on
(seed, n, model) and never on how chunks are scheduled.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EnvelopeDegenerate, NegativeDensity
from .joint import NEGATIVITY_RTOL, JointDensity

RNG_ALGORITHM = "numpy-PCG64/SeedSequence(seed,spawn_key=(chunk,))"
CHUNK_SIZE = 1 << 16


@dataclass(frozen=True, eq=False)
class EventBatch:
    t_l: np.ndarray
    t_r: np.ndarray
    channels: np.ndarray  # (n, 2) CP sectors (left, right)
    seed: int
    model: dict
    acceptance_rate: float
    rng_algorithm: str = RNG_ALGORITHM
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.t_l.size

    def channel_codes(self) -> list[str]:
        return [f"{a}{b}" for a, b in self.channels]

    def sidecar(self) -> dict:
        return {
            "n": len(self),
            "seed": self.seed,
            "model": self.model,
            "rng_algorithm": self.rng_algorithm,
            "acceptance_rate": self.acceptance_rate,
        }

    def write(self, path) -> tuple[Path, Path]:
        """Write ``path`` (CSV t_l,t_r,channel) and ``path``.json (metadata)."""
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t_l", "t_r", "channel"])
            for a, b, c in zip(self.t_l.tolist(), self.t_r.tolist(), self.channel_codes()):
                w.writerow([repr(a), repr(b), c])
        side = path.with_name(path.name + ".json")
        side.write_text(json.dumps(self.sidecar(), indent=2, sort_keys=True) + "\n")
        return path, side

    @classmethod
    def read(cls, path) -> "EventBatch":
        path = Path(path)
        with path.open(newline="") as fh:
            rows = list(csv.DictReader(fh))
        side = path.with_name(path.name + ".json")
        meta = json.loads(side.read_text()) if side.exists() else {}
        tl = np.array([float(r["t_l"]) for r in rows])
        tr = np.array([float(r["t_r"]) for r in rows])
        ch = np.array([[int(r["channel"][0]), int(r["channel"][1])] for r in rows], dtype=int).reshape(-1, 2)
        return cls(
            tl, tr, ch,
            seed=int(meta.get("seed", 0)),
            model=meta.get("model", {}),
            acceptance_rate=float(meta.get("acceptance_rate", float("nan"))),
            rng_algorithm=meta.get("rng_algorithm", RNG_ALGORITHM),
        )


def chunk_generator(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def _sample_chunk(density: JointDensity, m: int, rng: np.random.Generator, probs, rl, rr):
    f = density.carrier
    out_l, out_r = [], []
    accepted = proposed = 0
    rate = 0.5
    while accepted < m:
        k = max(64, int(1.2 * (m - accepted) / rate))
        idx = rng.choice(probs.size, size=k, p=probs)
        tl = rng.exponential(1.0 / rl[idx])
        tr = rng.exponential(1.0 / rr[idx])
        u = rng.random(k)
        keep = u * f.envelope(tl, tr) <= f.real(tl, tr)
        out_l.append(tl[keep])
        out_r.append(tr[keep])
        accepted += int(keep.sum())
        proposed += k
        rate = max(accepted / proposed, 1e-3)
    return np.concatenate(out_l)[:m], np.concatenate(out_r)[:m], accepted, proposed


def sample_events(density: JointDensity, n: int, seed: int) -> EventBatch:
    if density.negativity is not None:
        neg = density.negativity
        f = density.carrier
        t = np.linspace(0.0, 10.0 / density.params.gamma_s, 200)
        on_diag = np.any(f.real(t, t) < -NEGATIVITY_RTOL * f.envelope(t, t))
        where = "on the diagonal" if on_diag else f"at {neg.location}"
        raise NegativeDensity(
            f"{density.approach} density is negative {where}; sampling refused (min {neg.min_value:.3e})"
        )
    if int(n) < 1:
        raise ValueError("n must be >= 1")
    if not 0 <= int(seed) < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    n, seed = int(n), int(seed)
    f = density.carrier
    if f.is_zero:
        raise EnvelopeDegenerate("density is identically zero")
    rl, rr = f.z_left.real, f.z_right.real
    if np.any(rl <= 0) or np.any(rr <= 0):
        raise EnvelopeDegenerate("envelope term without exponential decay")
    w = np.abs(f.coeffs) / (rl * rr)
    probs = w / w.sum()

    tls, trs = [], []
    acc = prop = 0
    for chunk, start in enumerate(range(0, n, CHUNK_SIZE)):
        m = min(CHUNK_SIZE, n - start)
        tl, tr, a, p = _sample_chunk(density, m, chunk_generator(seed, chunk), probs, rl, rr)
        tls.append(tl)
        trs.append(tr)
        acc += a
        prop += p
    channels = np.tile([density.channel.left, density.channel.right], (n, 1))
    return EventBatch(
        np.concatenate(tls), np.concatenate(trs), channels,
        seed=seed, model=density.descriptor(), acceptance_rate=acc / prop,
    )
