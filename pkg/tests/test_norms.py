"""Luxemburg norm checks against closed-form scalar oracles."""

import numpy as np
import pytest
from scipy.optimize import brentq

from ncmaxlab.norms import OrliczFunction, lp_norm, orlicz_norm, orlicz_value
from ncmaxlab.qps import QPS, HermitianOp


def test_identity_norm_is_one_for_all_alpha():
    qps = QPS(4)
    eye = qps.identity()
    for alpha in (0.0, 1.0, 2.0):
        phi = OrliczFunction(alpha=alpha)
        assert abs(orlicz_norm(eye, phi) - 1.0) < 1e-10


def test_alpha_zero_is_l1():
    rng = np.random.default_rng(5)
    qps = QPS(8)
    phi = OrliczFunction(alpha=0.0)
    for _ in range(20):
        a = rng.standard_normal((8, 8))
        f = HermitianOp(a + a.T, qps)
        assert abs(orlicz_norm(f, phi) - lp_norm(f, 1)) < 1e-10


def test_scalar_oracle_small_c():
    # Phi(t) = t for t <= 1, so for c <= 1 the Luxemburg norm of c*I is c.
    qps = QPS(3)
    phi = OrliczFunction(alpha=1.0)
    f = HermitianOp(0.37 * np.eye(3), qps)
    assert orlicz_norm(f, phi) == pytest.approx(0.37, abs=1e-9)


def test_scalar_oracle_large_c_via_root():
    # For c*I the norm solves Phi(c/s) = 1; solve independently by brentq.
    qps = QPS(2)
    for alpha, c in ((1.0, 7.0), (2.0, 40.0)):
        phi = OrliczFunction(alpha=alpha)
        f = HermitianOp(c * np.eye(2), qps)
        root = brentq(lambda s: float(phi(c / s)) - 1.0, c / 100, c)
        assert orlicz_norm(f, phi) == pytest.approx(root, abs=1e-8)


def test_homogeneity_and_triangle():
    rng = np.random.default_rng(11)
    qps = QPS(6)
    phi = OrliczFunction(alpha=1.0)
    for _ in range(25):
        a = rng.standard_normal((6, 6))
        b = rng.standard_normal((6, 6))
        f = HermitianOp(a + a.T, qps)
        g = HermitianOp(b + b.T, qps)
        c = float(rng.uniform(0.1, 5.0))
        assert abs(orlicz_norm(c * f, phi) - c * orlicz_norm(f, phi)) < 1e-8
        assert orlicz_norm(f + g, phi) <= \
            orlicz_norm(f, phi) + orlicz_norm(g, phi) + 1e-8


def test_orlicz_value_definition():
    qps = QPS(2)
    phi = OrliczFunction(alpha=1.0)
    f = HermitianOp(np.diag([np.e, 1.0]), qps)
    # tau Phi(|f|) = (e(1+1) + 1)/2
    assert orlicz_value(f, phi) == pytest.approx((2 * np.e + 1) / 2, rel=1e-12)


def test_lp_norm_values():
    qps = QPS(2)
    f = HermitianOp(np.diag([3.0, -4.0]), qps)
    assert lp_norm(f, 1) == pytest.approx(3.5)
    assert lp_norm(f, 2) == pytest.approx(np.sqrt(12.5))
    assert lp_norm(f, np.inf) == pytest.approx(4.0)


def test_norm_monotone_on_commuting_positives():
    qps = QPS(4)
    phi = OrliczFunction(alpha=1.0)
    f = HermitianOp(np.diag([1.0, 2.0, 3.0, 4.0]), qps)
    g = HermitianOp(np.diag([1.5, 2.0, 3.5, 4.0]), qps)
    assert orlicz_norm(f, phi) <= orlicz_norm(g, phi) + 1e-12


def test_custom_handle_validation():
    OrliczFunction(handle=lambda t: t * t)  # convex, fine
    with pytest.raises(ValueError):
        OrliczFunction(handle=lambda t: np.sqrt(t))  # concave
    with pytest.raises(ValueError):
        OrliczFunction(handle=lambda t: t + 1.0)  # Phi(0) != 0
    with pytest.raises(ValueError):
        OrliczFunction(alpha=1.0, handle=lambda t: t)
    with pytest.raises(ValueError):
        OrliczFunction(alpha=-0.5)
