import math

import numpy as np
import pytest

from decaytimes.biexp import BiExpSum, scales
from decaytimes.errors import ConvergenceError
from decaytimes.joint import joint_density, joint_survival
from decaytimes.model import ALL_CHANNELS, EntangledStateSpec
from decaytimes.numerics import (
    finite_diff_gradient_sum,
    finite_diff_mixed,
    quad_semiinf_1d,
    quad_semiinf_2d,
)
from decaytimes.single import SingleDensity, SuperpositionSpec


def test_quad_1d_examples():
    r = quad_semiinf_1d(lambda t: np.exp(-t))
    assert r.value == pytest.approx(1.0, abs=1e-10) and r.error_estimate >= 0
    r = quad_semiinf_1d(lambda t: np.exp(-t) * np.cos(0.5 * t), 0.5)
    assert r.value == pytest.approx(0.8, abs=1e-10)


def test_quad_1d_single_density():
    s = SuperpositionSpec.kaon_like()
    r = quad_semiinf_1d(SingleDensity("standard-new", s), 0.5 * s.gamma2)
    assert r.value == pytest.approx(1.0, abs=1e-8)


def test_quad_1d_finite_range():
    r = quad_semiinf_1d(lambda t: np.exp(-t), t_max=2.0)
    assert r.value == pytest.approx(1 - math.exp(-2), rel=1e-12)


def test_quad_1d_reports_nonconvergence():
    with pytest.raises(ConvergenceError):
        quad_semiinf_1d(lambda t: 1.0 / t, max_panels=200)


def test_quad_2d_product():
    r = quad_semiinf_2d(lambda a, b: np.exp(-a - b))
    assert r.value == pytest.approx(1.0, abs=1e-10)


def test_quad_2d_standard_new_sums_to_one(params, singlet):
    total = 0.0
    for ch in ALL_CHANNELS:
        d = joint_density("standard-new", singlet, params, ch)
        total += quad_semiinf_2d(d, scales(d.carrier), rtol=1e-11).value
    assert total == pytest.approx(1.0, abs=1e-8)


def test_quad_2d_hybrid_singlet_closed_form(params, singlet):
    d = joint_density("hybrid", singlet, params, "11")
    exact = d.carrier.integral().real
    r = quad_semiinf_2d(d.unnormalized, scales(d.carrier), rtol=1e-11, atol=1e-20)
    assert r.value == pytest.approx(exact, rel=1e-8)


def test_quad_2d_box():
    r = quad_semiinf_2d(lambda a, b: np.exp(-a - b), t_max=1.0)
    assert r.value == pytest.approx((1 - math.exp(-1)) ** 2, rel=1e-12)


def test_finite_diff_examples():
    assert finite_diff_mixed(lambda a, b: np.exp(-a - b), 0.5, 0.5) == pytest.approx(math.exp(-1), abs=1e-8)
    assert finite_diff_mixed(lambda a, b: a * b, 1.0, 1.0, h=1e-3) == pytest.approx(1.0, abs=1e-9)
    assert finite_diff_gradient_sum(lambda a, b: a + 2 * b, 1.0, 1.0) == pytest.approx(3.0, rel=1e-10)
    with pytest.raises(ValueError):
        finite_diff_mixed(lambda a, b: a, 1, 1, h=0)


def test_finite_diff_shifts_boundary_inward():
    # P is undefined for negative arguments; a point at the origin must still work
    v = finite_diff_mixed(lambda a, b: np.sqrt(a) * np.sqrt(b) + np.exp(-a - b), 0.0, 0.0, h=1e-4)
    assert np.isfinite(v)


def test_finite_diff_singlet_survival(params, singlet):
    d = joint_density("standard-new", singlet, params, "11")
    fd = finite_diff_mixed(lambda a, b: joint_survival(singlet, params, "11", a, b), 1.0, 2.0, h=1e-4)
    assert fd == pytest.approx(d.unnormalized(1.0, 2.0), rel=1e-6)


def test_finite_diff_second_order_convergence():
    f = BiExpSum([1, 0.5], [1 + 0.5j, 0.3], [0.7, 1 - 1j]).modsq()
    exact = f.mixed_derivative().real(0.8, 1.3)
    e1 = abs(finite_diff_mixed(f.real, 0.8, 1.3, h=1e-2) - exact)
    e2 = abs(finite_diff_mixed(f.real, 0.8, 1.3, h=5e-3) - exact)
    assert 3.0 < e1 / e2 < 5.0
    rich = finite_diff_mixed(f.real, 0.8, 1.3, h=1e-2, richardson=True)
    assert abs(rich - exact) < e2 / 10


def test_quad_matches_random_closed_forms(rng):
    for _ in range(5):
        k = 3
        f = BiExpSum(
            rng.normal(size=k) + 1j * rng.normal(size=k),
            rng.uniform(0.1, 2, k) + 1j * rng.uniform(-2, 2, k),
            rng.uniform(0.1, 2, k) + 1j * rng.uniform(-2, 2, k),
        ).modsq()
        r = quad_semiinf_2d(f.real, scales(f), rtol=1e-9)
        assert r.value == pytest.approx(f.integral().real, rel=1e-8)


def test_beta_state_quadrature(params):
    d = joint_density("time-operator", EntangledStateSpec.beta(0.0), params, "12", "per_channel")
    r = quad_semiinf_2d(d, scales(d.carrier), rtol=1e-11)
    assert r.value == pytest.approx(1.0, rel=1e-8)
