"""How many events it takes to tell two decay-time prescriptions apart.

The headline figure is the Kullback-Leibler divergence between the two
per-channel shapes; ``required_sample_size`` turns it into an event count
through the log-likelihood-ratio scale z^2 / (2 kl). A binned Pearson test
checks event batches against a model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .biexp import BiExpSum, scales
from .errors import NegativeDensity, SupportMismatch, TooFewEvents
from .joint import GridSpec, JointDensity
from .numerics import quad_semiinf_2d
from .sampling import EventBatch

INFINITE = math.inf
IDENTICAL_RTOL = 1e-12
SUPPORT_RTOL = 1e-13
MIN_EXPECTED = 5.0
# Distinct per-axis map scales keep quadrature nodes off the diagonal t_l = t_r.
_DIAGONAL_DETUNE = 1.0 - 1.0 / (64.0 * math.pi)


@dataclass(frozen=True)
class KLResult:
    value: float
    error_estimate: float
    tail_mass: float  # p-probability outside [0, t_max]^2; 0 for the full quadrant
    evaluations: int


@dataclass(frozen=True)
class ChiSquareResult:
    chi2: float
    dof: int
    p_value: float
    n_bins: int


@dataclass(frozen=True)
class DiscriminationReport:
    kl_pq: float
    kl_qp: float
    n_required: float  # int-valued, or math.inf
    models: tuple[dict, dict]
    z: float = 5.0
    chi2: float | None = None
    dof: int | None = None
    p_value: float | None = None

    def to_json_dict(self) -> dict:
        n = self.n_required
        return {
            "kl_pq": self.kl_pq,
            "kl_qp": self.kl_qp,
            "chi2": self.chi2,
            "dof": self.dof,
            "p_value": self.p_value,
            "n_required": "Infinite" if n == INFINITE else int(n),
            "z": self.z,
            "models": list(self.models),
        }


def _shape(d: JointDensity) -> BiExpSum:
    """Carrier rescaled to unit mass over the quadrant."""
    if d.negativity is not None:
        raise NegativeDensity(
            f"{d.approach} channel {d.channel} density is negative at {d.negativity.location}; "
            "the divergence is undefined"
        )
    mass = d.carrier.integral().real
    if not mass > 0:
        raise SupportMismatch(f"{d.approach} channel {d.channel} carries no probability")
    return d.carrier / mass


def _check_pair(p: JointDensity, q: JointDensity):
    if p.channel != q.channel:
        raise ValueError("densities must share the channel")
    if p.state.describe() != q.state.describe():
        raise ValueError("densities must share the entangled state")


def _kl_density(pv, qv):
    """p log(p/q) - p + q for p, q > 0, i.e. q * phi(r) with r = p/q - 1.

    A series in r handles p ~ q; elsewhere logs are taken separately so that
    p/q below machine epsilon never rounds 1 + r to zero.
    """
    r = pv / qv - 1.0
    small = np.abs(r) < 1e-3
    rs = np.where(small, r, 0.0)
    series = qv * (rs**2 / 2 - rs**3 / 6 + rs**4 / 12 - rs**5 / 20)
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = pv * (np.log(pv) - np.log(qv)) - pv + qv
    return np.where(small, series, direct)


def kl_result(p: JointDensity, q: JointDensity, t_max: float | None = None, rtol: float = 1e-9) -> KLResult:
    """KL(p || q) of the two per-channel shapes, integrated over [0, t_max]^2."""
    _check_pair(p, q)
    fp, fq = _shape(p), _shape(q)
    tail = 0.0
    if t_max is not None:
        edges = [0.0, float(t_max)]
        tail = max(0.0, 1.0 - float(fp.box_integral(edges, edges).real[0, 0]))
    diff = (fp - fq).simplify()
    if diff.is_zero or np.max(np.abs(diff.coeffs)) <= IDENTICAL_RTOL * np.max(np.abs(fp.coeffs)):
        return KLResult(0.0, 0.0, tail, 0)

    def integrand(tl, tr):
        pv, qv = fp.real(tl, tr), fq.real(tl, tr)
        p_zero = pv <= SUPPORT_RTOL * fp.envelope(tl, tr)
        q_zero = qv <= SUPPORT_RTOL * fq.envelope(tl, tr)
        hole = q_zero & ~p_zero
        if np.any(hole):
            k = np.argmax(hole)
            raise SupportMismatch(
                f"q vanishes where p does not, near ({np.ravel(tl * np.ones_like(tr))[k]:.6g}, "
                f"{np.ravel(tr * np.ones_like(tl))[k]:.6g})"
            )
        live = ~(p_zero | q_zero)
        val = _kl_density(np.where(live, pv, 1.0), np.where(live, qv, 1.0))
        # p = 0 contributes q; both zero contributes 0
        return np.where(p_zero, np.maximum(qv, 0.0), np.where(q_zero, 0.0, val))

    sl, sr = scales(fp)
    sl2, sr2 = scales(fq)
    sc = (min(sl, sl2), min(sr, sr2) * _DIAGONAL_DETUNE)
    res = quad_semiinf_2d(integrand, sc, t_max=t_max, rtol=rtol, atol=1e-14)
    return KLResult(max(res.value, 0.0), res.error_estimate, tail, res.evaluations)


def kl_divergence(p: JointDensity, q: JointDensity, t_max: float | None = None) -> float:
    return kl_result(p, q, t_max=t_max).value


def required_sample_size(kl: float, z: float = 5.0):
    """ceil(z^2 / (2 kl)); ``math.inf`` when kl == 0."""
    if not z > 0:
        raise ValueError("significance z must be positive")
    if kl < 0 or math.isnan(kl):
        raise ValueError("kl must be nonnegative")
    if kl == 0:
        return INFINITE
    return math.ceil(z * z / (2.0 * kl))


def bin_edges(grid: GridSpec) -> np.ndarray:
    """Bin edges along one axis: ``grid.n`` bins up to t_max, plus an overflow bin."""
    if grid.spacing == "uniform":
        inner = np.linspace(0.0, grid.t_max, grid.n + 1)
    else:
        lo = grid.t_max / 1000 if grid.t_min is None else grid.t_min
        inner = np.concatenate([[0.0], np.geomspace(lo, grid.t_max, grid.n)])
    return np.append(inner, np.inf)


def bin_probabilities(model: JointDensity, edges: np.ndarray) -> np.ndarray:
    f = model.carrier
    probs = f.box_integral(edges, edges).real / f.integral().real
    if np.any(probs < -1e-12):
        raise NegativeDensity(f"{model.approach} density gives negative bin probabilities")
    return np.maximum(probs, 0.0)


def merge_bins(expected: np.ndarray, min_expected: float = MIN_EXPECTED) -> np.ndarray:
    """Group labels for flattened bins so that every group expects >= min_expected.

    Bins that already qualify stay alone; sparse bins are pooled in row-major
    order and a short final pool joins the previous one.
    """
    labels = np.empty(expected.size, dtype=int)
    next_label = 0
    pool, pool_sum, pools = [], 0.0, []
    for k, e in enumerate(expected):
        if e >= min_expected:
            labels[k] = next_label
            next_label += 1
            continue
        pool.append(k)
        pool_sum += e
        if pool_sum >= min_expected:
            pools.append(pool)
            pool, pool_sum = [], 0.0
    if pool:
        if pools:
            pools[-1].extend(pool)
        elif next_label:
            # attach the remainder to the least populated dense bin
            dense = np.flatnonzero(expected >= min_expected)
            target = dense[np.argmin(expected[dense])]
            labels[pool] = labels[target]
        else:
            raise TooFewEvents(f"total expected count {expected.sum():.3g} is below {min_expected}")
    for members in pools:
        labels[members] = next_label
        next_label += 1
    return labels


def chi_square_binned(
    events: EventBatch, model: JointDensity, bins: GridSpec | None = None, min_expected: float = MIN_EXPECTED
) -> ChiSquareResult:
    """Pearson test of an event batch against model bin probabilities."""
    bins = bins or GridSpec(t_max=10.0, n=20)
    n = len(events)
    if n == 0:
        raise TooFewEvents("event batch is empty")
    edges = bin_edges(bins)
    probs = bin_probabilities(model, edges).ravel()
    nb = edges.size - 1
    il = np.clip(np.searchsorted(edges, events.t_l, side="right") - 1, 0, nb - 1)
    ir = np.clip(np.searchsorted(edges, events.t_r, side="right") - 1, 0, nb - 1)
    observed = np.bincount(il * nb + ir, minlength=nb * nb).astype(float)

    labels = merge_bins(n * probs, min_expected)
    groups = labels.max() + 1
    if groups < 2:
        raise TooFewEvents("fewer than two bins reach the minimum expected count")
    exp_g = np.bincount(labels, weights=n * probs, minlength=groups)
    obs_g = np.bincount(labels, weights=observed, minlength=groups)
    chi2 = float(np.sum((obs_g - exp_g) ** 2 / exp_g))
    dof = int(groups - 1)
    return ChiSquareResult(chi2, dof, float(stats.chi2.sf(chi2, dof)), int(groups))


def discriminate(
    p: JointDensity,
    q: JointDensity,
    z: float = 5.0,
    events: EventBatch | None = None,
    bins: GridSpec | None = None,
) -> DiscriminationReport:
    """Both KL directions, the event count at significance z, and optionally
    a chi-square of ``events`` against ``q``."""
    kl_pq = kl_divergence(p, q)
    kl_qp = kl_divergence(q, p)
    chi = chi_square_binned(events, q, bins) if events is not None else None
    return DiscriminationReport(
        kl_pq=kl_pq,
        kl_qp=kl_qp,
        n_required=required_sample_size(kl_pq, z),
        models=(p.descriptor(), q.descriptor()),
        z=z,
        chi2=None if chi is None else chi.chi2,
        dof=None if chi is None else chi.dof,
        p_value=None if chi is None else chi.p_value,
    )
