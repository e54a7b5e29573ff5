"""Command-line front end.

    decaytimes constants
    decaytimes density --mode joint --state alpha:0 --channel 11 --approach hybrid --grid 0:10:5
    decaytimes compare --state beta:0 --channel 12
    decaytimes sample --state singlet --channel 12 --approach hybrid --n 1000 --seed 42 --out ev.csv
    decaytimes discriminate --state beta:0 --channel 12 --z 5

Exit codes: 0 success, 2 configuration or validation error, 3 numerical
failure (non-convergence, negativity refusal, too few events), 4 support
mismatch.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import replace

import numpy as np

from .config import ALIASES, CONFIG_ENV, PARSERS, RunConfig
from .discrimination import DiscriminationReport, discriminate
from .errors import (
    ConfigError,
    ConvergenceError,
    EnvelopeDegenerate,
    NegativeDensity,
    NormalizationError,
    SupportMismatch,
    TooFewEvents,
    UnsupportedCombination,
)
from .joint import approach_comparison, density_carrier, joint_density
from .model import EPSILON_ABS, EPSILON_ARG_DEG, TAU_L_SECONDS, TAU_S_SECONDS, KaonParams
from .sampling import EventBatch, sample_events
from .single import SingleDensity

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_SUPPORT = 0, 2, 3, 4


def _rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else str(v) for v in row])
    return buf.getvalue()


# -- commands -------------------------------------------------------------------
def cmd_constants(cfg: RunConfig | None = None) -> str:
    p = KaonParams()
    lines = [
        "# default neutral-kaon parameters",
        f"tau_S = {TAU_S_SECONDS!r} s  [quoted: K_S (K_1) lifetime]",
        f"tau_L = {TAU_L_SECONDS!r} s  [quoted: K_L lifetime]",
        f"|epsilon| = {EPSILON_ABS!r}  [quoted]",
        f"arg epsilon = {EPSILON_ARG_DEG!r} deg  [quoted]",
        f"Gamma_S = {p.gamma_s!r} / tau_S  [unit choice]",
        f"Gamma_L/Gamma_S = {p.gamma_l / p.gamma_s:.4e} ({p.gamma_l / p.gamma_s!r})  [derived: tau_S / tau_L]",
        f"delta_m = {p.delta_m!r} / tau_S = Gamma_S/2  [approximation: kaon delta_m ~ Gamma_S/2]",
        f"epsilon = {p.epsilon.real!r} + {p.epsilon.imag!r}i  [derived]",
    ]
    return "\n".join(lines) + "\n"


def _density_joint(cfg: RunConfig) -> str:
    params = cfg.kaon_params()
    axis = cfg.internal_axis()
    tl, tr = np.meshgrid(axis, axis, indexing="ij")
    tl, tr = tl.ravel(), tr.ravel()
    unit = cfg.time_unit
    rows = []
    for ch in cfg.channels:
        for a in cfg.approach_list():
            raw = density_carrier(a, cfg.state, params, ch).real(tl, tr)
            try:
                norm = joint_density(a, cfg.state, params, ch, cfg.normalization_for("density")).norm_constant
            except NormalizationError:
                norm = math.nan
            for x, y, v in zip(tl * unit, tr * unit, raw):
                rows.append((float(x), float(y), str(a), str(ch), v / unit**2, norm * v / unit**2))
    if cfg.output == "json":
        keys = ("t_l", "t_r", "approach", "channel", "density", "normalized")
        return json.dumps([dict(zip(keys, r)) for r in rows]) + "\n"
    return _rows_to_csv(["t_l", "t_r", "approach", "channel", "density", "normalized"], rows)


def _density_single(cfg: RunConfig) -> str:
    spec = cfg.superposition()
    t = cfg.internal_axis()
    unit = cfg.time_unit
    rows = []
    for a in cfg.approach_list():
        vals = SingleDensity(a, spec)(t)
        rows.extend((float(x), str(a), v / unit) for x, v in zip(t * unit, vals))
    if cfg.output == "json":
        return json.dumps([dict(zip(("t", "approach", "density"), r)) for r in rows]) + "\n"
    return _rows_to_csv(["t", "approach", "density"], rows)


def cmd_density(cfg: RunConfig) -> str:
    return _density_single(cfg) if cfg.mode == "single" else _density_joint(cfg)


def cmd_compare(cfg: RunConfig) -> str:
    params = cfg.kaon_params()
    grid = replace(cfg.grid, t_max=cfg.grid.t_max / cfg.time_unit,
                   t_min=None if cfg.grid.t_min is None else cfg.grid.t_min / cfg.time_unit)
    rows = []
    for ch in cfg.channels:
        cmp = approach_comparison(
            cfg.state, params, ch, grid, cfg.approach_list(), cfg.normalization_for("compare")
        )
        for a, b in cmp.pairs():
            rows.append((str(ch), str(a), str(b), cmp.deviations[(a, b)], cmp.residuals[(a, b)], cmp.verdicts[(a, b)]))
    header = ["channel", "approach_a", "approach_b", "max_relative_deviation", "proportionality_residual", "verdict"]
    if cfg.output == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n"
    return _rows_to_csv(header, rows)


def _one_density(cfg: RunConfig, command: str, approach=None):
    a = approach or cfg.approach_list()[0]
    return joint_density(a, cfg.state, cfg.kaon_params(), cfg.channels[0], cfg.normalization_for(command))


def cmd_sample(cfg: RunConfig) -> tuple[EventBatch, str]:
    if cfg.n is None:
        raise ConfigError("n: the number of events is required")
    batch = sample_events(_one_density(cfg, "sample"), cfg.n, cfg.seed)
    if cfg.time_unit != 1.0:
        batch = replace(batch, t_l=batch.t_l * cfg.time_unit, t_r=batch.t_r * cfg.time_unit)
    if cfg.out:
        batch.write(cfg.out)
        return batch, f"wrote {len(batch)} events to {cfg.out} (acceptance {batch.acceptance_rate:.4f})\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t_l", "t_r", "channel"])
    for x, y, c in zip(batch.t_l.tolist(), batch.t_r.tolist(), batch.channel_codes()):
        w.writerow([repr(x), repr(y), c])
    return batch, buf.getvalue()


def cmd_discriminate(cfg: RunConfig) -> DiscriminationReport:
    p = _one_density(cfg, "discriminate", cfg.p_approach)
    q = _one_density(cfg, "discriminate", cfg.q_approach)
    events = EventBatch.read(cfg.events) if cfg.events else None
    bins = None
    if events is not None:
        unit = cfg.time_unit
        events = replace(events, t_l=events.t_l / unit, t_r=events.t_r / unit)
        bins = replace(cfg.bins, t_max=cfg.bins.t_max / unit,
                       t_min=None if cfg.bins.t_min is None else cfg.bins.t_min / unit)
    return discriminate(p, q, z=cfg.z, events=events, bins=bins)


# -- argument handling ----------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="decaytimes", description="Decay-time densities of entangled kaon pairs.")
    sub = ap.add_subparsers(dest="command", required=True)
    helps = {
        "constants": "print the default parameter set",
        "density": "tabulate densities on a grid",
        "compare": "compare approaches pairwise",
        "sample": "draw decay-time events",
        "discriminate": "KL divergence, chi-square and required event count",
    }
    keys = sorted(set(PARSERS) | set(ALIASES))
    for name, text in helps.items():
        sp = sub.add_parser(name, help=text)
        if name == "constants":
            continue
        sp.add_argument("--config", help=f"key = value config file (default: ${CONFIG_ENV})")
        for key in keys:
            sp.add_argument("--" + key.replace("_", "-"), dest=key, default=None, metavar="VALUE")
    return ap


def _config_from_args(ns) -> RunConfig:
    overrides = {k: v for k, v in vars(ns).items() if k in PARSERS or k in ALIASES}
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return RunConfig.load(ns.config, overrides)


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        ns = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        if ns.command == "constants":
            stdout.write(cmd_constants())
            return EXIT_OK
        cfg = _config_from_args(ns)
        if ns.command == "density":
            stdout.write(cmd_density(cfg))
        elif ns.command == "compare":
            stdout.write(cmd_compare(cfg))
        elif ns.command == "sample":
            stdout.write(cmd_sample(cfg)[1])
        elif ns.command == "discriminate":
            report = cmd_discriminate(cfg)
            stdout.write(json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n")
        return EXIT_OK
    except (ConfigError, UnsupportedCombination, ValueError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG
    except SupportMismatch as exc:
        stderr.write(f"support mismatch: {exc}\n")
        return EXIT_SUPPORT
    except (NegativeDensity, ConvergenceError, NormalizationError, TooFewEvents, EnvelopeDegenerate) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_NUMERIC


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
