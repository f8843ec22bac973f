import numpy as np
import pytest

import ncmaxlab.cuculescu as cuc
from ncmaxlab.cuculescu import (BoundViolation, CuculescuResult,
                                DegenerateLevel, commutative_stopping_complement,
                                cuculescu_projections, stein_integral,
                                verify_refined, verify_weak11)
from ncmaxlab.filtration import martingale
from ncmaxlab.harness.generate import (dyadic_scalar_filtration,
                                       random_diagonal, random_positive,
                                       random_scalar_filtration, stream)
from ncmaxlab.qps import QPS, HermitianOp, trace


def _dyadic4():
    return dyadic_scalar_filtration(QPS(4))


def test_hand_example_single_spike():
    # f = diag(4,0,0,0), lam = 1: stopping happens at the halves level and
    # the surviving projection is the second half
    qps = QPS(4)
    f = HermitianOp(np.diag([4.0, 0.0, 0.0, 0.0]), qps)
    filt = _dyadic4()
    res = cuculescu_projections(martingale(f, filt), filt, 1.0)
    assert np.abs(res.q.mat - np.diag([0.0, 0.0, 1.0, 1.0])).max() < 1e-12
    assert res.trace_complement == pytest.approx(0.5, abs=1e-12)

    weak = verify_weak11(res, f)
    assert weak["lhs"] == pytest.approx(0.5, abs=1e-12)
    assert weak["rhs"] == pytest.approx(1.0, abs=1e-12)
    refined = verify_refined(res, f)
    assert refined["rhs"] == pytest.approx(2.0, abs=1e-12)
    assert refined["ratio"] == pytest.approx(0.25, abs=1e-10)


def test_small_martingale_never_stops():
    qps = QPS(4)
    f = HermitianOp(np.diag([0.25, 0.5, 0.75, 1.0]), qps)
    filt = _dyadic4()
    res = cuculescu_projections(martingale(f, filt), filt, 2.0)
    assert np.abs(res.q.mat - np.eye(4)).max() < 1e-12
    assert res.trace_complement == pytest.approx(0.0, abs=1e-12)
    assert res.corner_max_eig <= 2.0 + 1e-7


def test_large_scalar_stops_immediately():
    qps = QPS(4)
    f = HermitianOp(3.0 * np.eye(4), qps)
    filt = _dyadic4()
    res = cuculescu_projections(martingale(f, filt), filt, 1.0)
    assert np.abs(res.q.mat).max() < 1e-12
    assert res.trace_complement == pytest.approx(1.0, abs=1e-12)
    verify_weak11(res, f)  # 1 <= 3/1


def test_matches_classical_stopping_on_diagonals():
    for idx in range(5):
        rng = stream(314, idx)
        d = 8
        qps = QPS(d)
        filt = dyadic_scalar_filtration(qps)
        f = HermitianOp(np.diag(rng.uniform(0.0, 4.0, size=d)), qps)
        mart = martingale(f, filt)
        lam = 1.5
        res = cuculescu_projections(mart, filt, lam)
        oracle = commutative_stopping_complement(
            [np.diag(e.mat).real for e in mart.entries], lam)
        assert np.abs(np.diag(res.q.mat).real - oracle).max() < 1e-12
        assert np.abs(res.q.mat - np.diag(np.diag(res.q.mat))).max() < 1e-12


def test_recursion_invariants_random_instance():
    rng = stream(271, 3)
    d = 8
    qps = QPS(d)
    filt = random_scalar_filtration(rng, qps, depth=3)
    f = random_positive(rng, qps)
    mart = martingale(f, filt)
    lam = 0.8
    res = cuculescu_projections(mart, filt, lam)
    assert len(res.q_levels) == len(filt.levels)
    for i, q_n in enumerate(res.q_levels):
        corner = q_n.mat @ mart.entries[i].mat @ q_n.mat
        top = np.linalg.eigvalsh((corner + corner.conj().T) / 2.0)[-1]
        assert top <= lam + 1e-7
        e_q = filt.levels[i].apply_raw(q_n.mat)
        assert np.abs(e_q - q_n.mat).max() < 1e-7
        if i > 0:
            gap = np.linalg.eigvalsh(res.q_levels[i - 1].mat - q_n.mat)[0]
            assert gap >= -1e-8
    assert res.corner_max_eig <= lam + 1e-7
    verify_weak11(res, f)
    verify_refined(res, f)


def test_rejects_bad_input():
    qps = QPS(4)
    filt = _dyadic4()
    f = HermitianOp(np.diag([1.0, 1.0, 1.0, -1.0]), qps)
    with pytest.raises(ValueError, match="not positive"):
        cuculescu_projections(martingale(f, filt), filt, 1.0)
    g = HermitianOp(np.eye(4), qps)
    with pytest.raises(ValueError, match="lam"):
        cuculescu_projections(martingale(g, filt), filt, 0.0)
    short = martingale(g, filt)
    trimmed = type(short)(short.entries[:2], tail=None)
    with pytest.raises(ValueError, match="length"):
        cuculescu_projections(trimmed, filt, 1.0)


def test_verifiers_raise_on_violation():
    qps = QPS(4)
    f = HermitianOp(np.diag([4.0, 0.0, 0.0, 0.0]), qps)
    filt = _dyadic4()
    res = cuculescu_projections(martingale(f, filt), filt, 1.0)
    with pytest.raises(BoundViolation):
        verify_weak11(res, f, slack=-0.6)
    with pytest.raises(BoundViolation):
        verify_refined(res, f, slack=-2.0)


def test_degenerate_level_carries_fields():
    exc = DegenerateLevel(2, 0.5)
    assert exc.level == 2
    assert exc.residual == 0.5
    assert "1e-06" in str(exc) or "1e-6" in str(exc)


def test_stein_integral_on_identity():
    qps = QPS(4)
    f = HermitianOp(np.eye(4), qps)
    filt = _dyadic4()
    grid = np.geomspace(0.01, 2.0, 60)
    res = stein_integral(f, filt, grid)
    # integrand is the step 1_{lam < 1}; hand-trapezoid the same step
    expected_vals = [1.0 if lam < 1.0 - 1e-10 else 0.0 for lam in grid]
    assert res.integral == pytest.approx(
        float(np.trapezoid(expected_vals, grid)), abs=1e-12)
    assert res.orlicz == pytest.approx(1.0, abs=1e-9)
    assert res.ratio == pytest.approx(res.integral, rel=1e-9)
    assert len(res.nodes) == len(grid)


def test_stein_integral_zero_operator():
    qps = QPS(4)
    f = HermitianOp(np.zeros((4, 4)), qps)
    res = stein_integral(f, _dyadic4(), np.array([0.5, 1.0]))
    assert res.integral == 0.0
    assert res.ratio == 0.0


def test_stein_integral_grid_validation():
    qps = QPS(4)
    f = HermitianOp(np.eye(4), qps)
    filt = _dyadic4()
    with pytest.raises(ValueError, match="increasing"):
        stein_integral(f, filt, np.array([1.0, 0.5, 2.0]))
    with pytest.raises(ValueError, match="increasing"):
        stein_integral(f, filt, np.array([2.0]))
    with pytest.raises(ValueError, match="reach"):
        stein_integral(f, filt, np.array([0.1, 0.5]))


def test_stein_integral_retries_degenerate_levels(monkeypatch):
    qps = QPS(4)
    f = HermitianOp(np.eye(4), qps)
    filt = _dyadic4()
    real = cuc.cuculescu_projections
    calls = {"n": 0}

    def flaky(mart, flt, lam):
        calls["n"] += 1
        if calls["n"] == 1:
            raise DegenerateLevel(0, 1.0)
        return real(mart, flt, lam)

    monkeypatch.setattr(cuc, "cuculescu_projections", flaky)
    res = cuc.stein_integral(f, filt, np.array([0.5, 2.0]))
    assert calls["n"] == 3  # first grid point retried once
    assert res.integral == pytest.approx(0.75, abs=1e-6)

    def hopeless(mart, flt, lam):
        raise DegenerateLevel(1, 2.0)

    monkeypatch.setattr(cuc, "cuculescu_projections", hopeless)
    with pytest.raises(DegenerateLevel):
        cuc.stein_integral(f, filt, np.array([0.5, 2.0]))
