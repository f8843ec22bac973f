from types import SimpleNamespace

import numpy as np
import pytest

import ncmaxlab.jmz as jmz
from ncmaxlab.cuculescu import BoundViolation
from ncmaxlab.channels import MarkovChannel
from ncmaxlab.harness.generate import dyadic_scalar_filtration, stream
from ncmaxlab.jmz import (MaximalFamily, composition_certificate,
                          ergodic_family, expectation_family,
                          two_param_commutative_oracle)
from ncmaxlab.norms import OrliczFunction
from ncmaxlab.qps import QPS, HermitianOp


def test_expectation_family_shape():
    qps = QPS(4)
    filt = dyadic_scalar_filtration(qps)
    fam = expectation_family(filt)
    assert len(fam.maps) == len(filt.levels)
    f = HermitianOp(np.diag([1.0, 2.0, 3.0, 4.0]), qps)
    # first listed level is the trivial algebra, last is everything
    assert np.abs(fam.maps[0](f).mat - 2.5 * np.eye(4)).max() < 1e-12
    assert np.abs(fam.limit(f).mat - f.mat).max() < 1e-12
    with pytest.raises(ValueError):
        expectation_family([])


def test_constant_certificate_is_tight():
    qps = QPS(4)
    filt = dyadic_scalar_filtration(qps)
    fam = expectation_family(filt)
    f = HermitianOp(0.8 * np.eye(4), qps)
    cert = composition_certificate(f, fam, OrliczFunction(alpha=1.0))
    assert cert.majorant_norm == pytest.approx(0.8, rel=1e-5)
    assert cert.bound == pytest.approx(cert.F_of_g_norm)
    assert cert.bound <= cert.majorant_norm + 1e-8
    assert cert.phi_norm == pytest.approx(0.8, abs=1e-9)
    assert cert.phi_ratio == pytest.approx(1.0, rel=1e-5)


def test_certificate_random_instance_dominates():
    rng = stream(55, 0)
    qps = QPS(8)
    filt = dyadic_scalar_filtration(qps)
    fam = expectation_family(filt)
    a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    f = HermitianOp(a @ a.conj().T / 8.0, qps)
    cert = composition_certificate(f, fam, OrliczFunction(alpha=1.0))
    for m in fam.maps:
        gap = np.linalg.eigvalsh(cert.g.mat - m(f).mat)[0]
        assert gap >= -1e-7
    assert cert.bound <= cert.majorant_norm + 1e-8


def test_certificate_rejects_negative_input():
    qps = QPS(2)
    fam = expectation_family(dyadic_scalar_filtration(qps))
    with pytest.raises(ValueError, match="positive"):
        composition_certificate(HermitianOp(np.diag([1.0, -1.0]), qps),
                                fam, OrliczFunction(alpha=1.0))


def test_certificate_flags_expanding_limit():
    qps = QPS(4)
    filt = dyadic_scalar_filtration(qps)
    base = expectation_family(filt)
    inflating = MaximalFamily(
        maps=base.maps,
        limit=lambda h: HermitianOp(2.0 * h.mat, qps),
        label="inflating")
    f = HermitianOp(np.diag([1.0, 0.5, 0.25, 0.0]), qps)
    with pytest.raises(BoundViolation, match="F\\(g\\)"):
        composition_certificate(f, inflating, OrliczFunction(alpha=1.0))


def test_certificate_flags_bad_majorant(monkeypatch):
    qps = QPS(4)
    fam = expectation_family(dyadic_scalar_filtration(qps))
    f = HermitianOp(np.diag([1.0, 0.5, 0.25, 0.0]), qps)

    def fake(seq, p):
        return SimpleNamespace(g=HermitianOp(np.zeros((4, 4)), qps))

    monkeypatch.setattr(jmz, "sup_norm_positive", fake)
    with pytest.raises(BoundViolation, match="dominate"):
        composition_certificate(f, fam, OrliczFunction(alpha=1.0))


def test_ergodic_family_pinching():
    qps = QPS(4)
    kraus = [np.diag((np.arange(4) == i).astype(complex)) for i in range(4)]
    chan = MarkovChannel(kraus, qps, symmetric=True)
    fam = ergodic_family(chan, [1, 2, 4])
    rng = stream(56, 0)
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    f = HermitianOp(a @ a.conj().T / 4.0, qps)
    assert np.abs(fam.maps[0](f).mat - f.mat).max() < 1e-12
    limit = fam.limit(f)
    assert np.abs(limit.mat - np.diag(np.diag(f.mat))).max() < 1e-7
    cert = composition_certificate(f, fam, OrliczFunction(alpha=1.0))
    assert cert.bound <= cert.majorant_norm + 1e-8
    with pytest.raises(ValueError):
        ergodic_family(chan, [])
    with pytest.raises(ValueError):
        ergodic_family(chan, [0, 1])


def test_oracle_hand_example():
    x = np.array([4.0, 0.0, 0.0, 0.0])
    oracle = two_param_commutative_oracle(x, (2, 2))
    assert np.array_equal(oracle.maximal, np.array([4.0, 2.0, 2.0, 1.0]))
    # full depths exhaust the grid: the tail is the input itself
    assert np.array_equal(oracle.tail, x)


def test_oracle_factorizes_on_products():
    rng = stream(57, 0)
    u = rng.uniform(0.0, 3.0, size=8)
    v = rng.uniform(0.0, 3.0, size=4)
    x = np.outer(u, v)
    oracle = two_param_commutative_oracle(x.reshape(-1), (8, 4))

    def dyadic_sups(vec):
        d = vec.size
        out = np.zeros(d)
        level = 0
        while (1 << level) <= d:
            blocks = 1 << level
            b = d // blocks
            means = vec.reshape(blocks, b).mean(axis=1)
            out = np.maximum(out, np.repeat(means, b))
            level += 1
        return out

    expected = np.outer(dyadic_sups(u), dyadic_sups(v)).reshape(-1)
    assert np.abs(oracle.maximal - expected).max() < 1e-12


def test_oracle_corner_sups_monotone():
    rng = stream(58, 0)
    x = rng.uniform(0.0, 5.0, size=16)
    oracle = two_param_commutative_oracle(x, (4, 4))
    for (n, m), s in oracle.corner_sups.items():
        if (n + 1, m) in oracle.corner_sups:
            assert np.all(s >= oracle.corner_sups[(n + 1, m)] - 1e-12)
        if (n, m + 1) in oracle.corner_sups:
            assert np.all(s >= oracle.corner_sups[(n, m + 1)] - 1e-12)
    assert np.all(oracle.tail <= oracle.maximal + 1e-12)


def test_oracle_validates_input():
    with pytest.raises(ValueError, match="nonnegative"):
        two_param_commutative_oracle(np.array([-1.0, 0.0, 0.0, 0.0]), (2, 2))
    with pytest.raises(ValueError, match="powers of two"):
        two_param_commutative_oracle(np.zeros(6), (2, 3))
    with pytest.raises(ValueError, match="depth"):
        two_param_commutative_oracle(np.zeros(4), (2, 2), depths=(2, 1))
