"""Independent numerical oracles: semi-infinite quadrature and finite differences.

Quadrature maps [0, inf) onto (0, 1] with u = exp(-scale * t) and runs a
globally adaptive composite Gauss-Legendre rule in u. The error estimate of
a panel is the difference between an n-point and a 2n-point rule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError

_ORDER = 8
_X1, _W1 = np.polynomial.legendre.leggauss(_ORDER)
_X2, _W2 = np.polynomial.legendre.leggauss(2 * _ORDER)


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int


def _u_range(scale: float, t_max: float | None) -> float:
    if scale <= 0:
        raise ValueError("scale must be positive")
    return 0.0 if t_max is None else float(np.exp(-scale * t_max))


def _gl_panels(g, a, b, x, w):
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    nodes = mid[:, None] + half[:, None] * x[None, :]
    return half * (g(nodes) @ w)


def quad_semiinf_1d(
    f, scale: float = 1.0, *, t_max: float | None = None, rtol: float = 1e-12, atol: float = 1e-15,
    max_panels: int = 200_000,
) -> QuadratureResult:
    """Integrate ``f`` (vectorized, real) over [0, t_max], t_max=None meaning infinity."""
    u0 = _u_range(scale, t_max)

    def g(u):
        return f(-np.log(u) / scale) / (scale * u)

    edges = np.linspace(u0, 1.0, 9)
    a, b = edges[:-1], edges[1:]
    done_val = done_err = 0.0
    evals = 0
    while True:
        fine = _gl_panels(g, a, b, _X2, _W2)
        coarse = _gl_panels(g, a, b, _X1, _W1)
        evals += a.size * 3 * _ORDER
        err = np.abs(fine - coarse)
        total = done_val + fine.sum()
        tol = max(atol, rtol * abs(total))
        if done_err + err.sum() <= tol:
            return QuadratureResult(float(total), float(done_err + err.sum()), evals)
        split = err > 0.5 * tol * (b - a) / (1.0 - u0)
        done_val += fine[~split].sum()
        done_err += err[~split].sum()
        mid = 0.5 * (a[split] + b[split])
        a, b = np.concatenate([a[split], mid]), np.concatenate([mid, b[split]])
        if a.size > max_panels or not np.all(np.isfinite(fine)):
            raise ConvergenceError("1d quadrature did not converge")


def _gl_rects(g, ax, bx, ay, by, x, w):
    mx, hx = 0.5 * (ax + bx), 0.5 * (bx - ax)
    my, hy = 0.5 * (ay + by), 0.5 * (by - ay)
    ux = mx[:, None] + hx[:, None] * x[None, :]
    uy = my[:, None] + hy[:, None] * x[None, :]
    vals = g(ux[:, :, None], uy[:, None, :])
    return hx * hy * np.einsum("rij,i,j->r", vals, w, w)


def quad_semiinf_2d(
    f, scales: tuple[float, float] = (1.0, 1.0), *, t_max: tuple | float | None = None,
    rtol: float = 1e-12, atol: float = 1e-15, max_rects: int = 400_000,
) -> QuadratureResult:
    """Integrate ``f(t_l, t_r)`` over the quadrant (or the box [0, t_max]^2)."""
    sl, sr = scales
    tm = t_max if isinstance(t_max, tuple) else (t_max, t_max)
    ul0, ur0 = _u_range(sl, tm[0]), _u_range(sr, tm[1])

    def g(ul, ur):
        return f(-np.log(ul) / sl, -np.log(ur) / sr) / (sl * sr * ul * ur)

    el = np.linspace(ul0, 1.0, 5)
    er = np.linspace(ur0, 1.0, 5)
    ax, ay = np.meshgrid(el[:-1], er[:-1], indexing="ij")
    bx, by = np.meshgrid(el[1:], er[1:], indexing="ij")
    ax, bx, ay, by = ax.ravel(), bx.ravel(), ay.ravel(), by.ravel()
    done_val = done_err = 0.0
    evals = 0
    while True:
        fine = _gl_rects(g, ax, bx, ay, by, _X2, _W2)
        coarse = _gl_rects(g, ax, bx, ay, by, _X1, _W1)
        evals += ax.size * 5 * _ORDER**2
        err = np.abs(fine - coarse)
        total = done_val + fine.sum()
        tol = max(atol, rtol * abs(total))
        if done_err + err.sum() <= tol:
            return QuadratureResult(float(total), float(done_err + err.sum()), evals)
        split = err > 0.5 * tol * (bx - ax) * (by - ay) / ((1.0 - ul0) * (1.0 - ur0))
        done_val += fine[~split].sum()
        done_err += err[~split].sum()
        ax, bx, ay, by = ax[split], bx[split], ay[split], by[split]
        mx, my = 0.5 * (ax + bx), 0.5 * (ay + by)
        ax, bx, ay, by = (
            np.concatenate([ax, mx, ax, mx]),
            np.concatenate([mx, bx, mx, bx]),
            np.concatenate([ay, ay, my, my]),
            np.concatenate([my, my, by, by]),
        )
        if ax.size > max_rects or not np.all(np.isfinite(fine)):
            raise ConvergenceError("2d quadrature did not converge")


def _interior(t, h):
    return np.maximum(np.asarray(t, dtype=float), h)


def finite_diff_mixed(P, t_l, t_r, h: float = 1e-4, richardson: bool = False):
    """Central 4-point estimate of d^2 P / dt_l dt_r; O(h^2), O(h^4) with Richardson."""
    if h <= 0:
        raise ValueError("step must be positive")
    t_l, t_r = _interior(t_l, h), _interior(t_r, h)

    def stencil(k):
        return (P(t_l + k, t_r + k) - P(t_l + k, t_r - k) - P(t_l - k, t_r + k) + P(t_l - k, t_r - k)) / (4 * k * k)

    if not richardson:
        return stencil(h)
    return (4 * stencil(h / 2) - stencil(h)) / 3


def finite_diff_gradient_sum(P, t_l, t_r, h: float = 1e-4, richardson: bool = False):
    """Central estimate of (d/dt_l + d/dt_r) P."""
    if h <= 0:
        raise ValueError("step must be positive")
    t_l, t_r = _interior(t_l, h), _interior(t_r, h)

    def stencil(k):
        return (P(t_l + k, t_r) - P(t_l - k, t_r) + P(t_l, t_r + k) - P(t_l, t_r - k)) / (2 * k)

    if not richardson:
        return stencil(h)
    return (4 * stencil(h / 2) - stencil(h)) / 3
