"""Conditional expectations, filtrations, tensor lifts.

The partial-trace oracle for lifted scalar blocks and the row-major vec
convention are the two places where an orientation mistake would corrupt
everything downstream, so both get exact unit tests here.
"""

import numpy as np
import pytest

from ncmaxlab.filtration import (Block, Filtration, SubalgebraDescriptor,
                                 TwoParamFiltration, conditional_expectation,
                                 contains, filtration_from_jsonable,
                                 filtration_to_jsonable, martingale,
                                 tensor_lift)
from ncmaxlab.harness.generate import (random_positive,
                                       random_scalar_filtration, stream)
from ncmaxlab.norms import lp_norm
from ncmaxlab.qps import QPS, HermitianOp, Projection, trace


def _dyadic_descriptor(qps, blocks):
    """Scalar blocks on index ranges [(lo, hi), ...]."""
    d = qps.dim
    out = []
    for lo, hi in blocks:
        m = np.zeros((d, d), dtype=complex)
        m[lo:hi, lo:hi] = np.eye(hi - lo)
        out.append(Block(Projection(m, qps), "scalar", None))
    return SubalgebraDescriptor(tuple(out), qps)


def test_scalar_block_expectation_is_block_average():
    qps = QPS(4)
    a = _dyadic_descriptor(qps, [(0, 2), (2, 4)])
    f = HermitianOp(np.diag([4.0, 0.0, 1.0, 3.0]), qps)
    e = conditional_expectation(f, a)
    assert np.allclose(np.diag(e.mat).real, [2, 2, 2, 2])


def test_full_block_expectation_is_corner_compression():
    qps = QPS(4)
    p = Projection(np.diag([1.0, 1.0, 0.0, 0.0]), qps)
    a = SubalgebraDescriptor(
        (Block(p, "full", None), Block(complementary(p), "scalar", None)),
        qps)
    rng = np.random.default_rng(2)
    m = rng.standard_normal((4, 4))
    f = HermitianOp(m + m.T, qps)
    e = conditional_expectation(f, a)
    # full block: untouched corner
    assert np.allclose(e.mat[:2, :2], f.mat[:2, :2])
    # scalar block: trace-weighted multiple of the corner identity
    avg = np.trace(f.mat[2:, 2:]) / 2.0
    assert np.allclose(e.mat[2:, 2:], avg * np.eye(2))


def complementary(p):
    eye = np.eye(p.qps.dim, dtype=complex)
    return Projection(eye - p.mat, p.qps, _trusted=True)


def test_expectation_idempotent_trace_preserving_unital():
    rng = stream(101, 0)
    qps = QPS(8)
    filt = random_scalar_filtration(rng, qps, 3)
    f = random_positive(rng, qps)
    for n in range(len(filt.levels)):
        e = filt.expectation(f, n)
        ee = filt.expectation(e, n)
        assert np.abs(ee.mat - e.mat).max() < 1e-10
        assert abs(trace(e) - trace(f)) < 1e-12 * max(1, abs(trace(f)))
        eye = filt.expectation(HermitianOp(np.eye(8), qps), n)
        assert np.abs(eye.mat - np.eye(8)).max() < 1e-12


def test_tower_property_and_contraction():
    rng = stream(101, 1)
    qps = QPS(8)
    filt = random_scalar_filtration(rng, qps, 3)
    f = random_positive(rng, qps)
    levels = filt.levels
    for n in range(len(levels) - 1):
        assert contains(levels[n], levels[n + 1])
        # E_n E_{n+1} = E_n
        a = levels[n].apply_raw(levels[n + 1].apply_raw(f.mat))
        b = levels[n].apply_raw(f.mat)
        assert np.abs(a - b).max() < 1e-10
    for n in range(len(levels)):
        e = filt.expectation(f, n)
        for p in (1, 2, np.inf):
            assert lp_norm(e, p) <= lp_norm(f, p) + 1e-9


def test_kadison_schwarz():
    rng = stream(101, 2)
    qps = QPS(8)
    filt = random_scalar_filtration(rng, qps, 2)
    a = rng.standard_normal((8, 8))
    f = HermitianOp(a + a.T, qps)
    for n in range(len(filt.levels)):
        e = filt.expectation(f, n)
        e_sq = filt.expectation(HermitianOp(f.mat @ f.mat, qps), n)
        gap = e_sq.mat - e.mat @ e.mat
        assert float(np.linalg.eigvalsh(gap)[0]) > -1e-9


def test_martingale_terminal_entry_and_tail():
    rng = stream(101, 3)
    qps = QPS(8)
    filt = random_scalar_filtration(rng, qps, 3)
    f = random_positive(rng, qps)
    mart = martingale(f, filt)
    assert len(mart.entries) == len(filt.levels)
    assert np.abs(mart.entries[-1].mat - f.mat).max() < 1e-12
    assert mart.tail[0] == "constant"


def test_vec_row_major_kron_orientation():
    # row-major vec(K X K*) = kron(K, conj(K)) vec(X) — the convention the
    # channel superoperator relies on
    rng = np.random.default_rng(9)
    k = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    lhs = (k @ x @ k.conj().T).reshape(-1)
    rhs = np.kron(k, k.conj()) @ x.reshape(-1)
    assert np.abs(lhs - rhs).max() < 1e-12


def test_tensor_lift_partial_trace_oracle():
    # lift of the trivial subalgebra {c*I_2} into M_2 (x) M_2 acts as
    # (tau (x) id): E(f) = I/2 (x) (partial trace over the first leg)
    qps2 = QPS(2)
    triv = SubalgebraDescriptor(
        (Block(qps2.identity(), "scalar", None),), qps2)
    lifted = tensor_lift(triv, "left", 2)
    rng = np.random.default_rng(4)
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    f = HermitianOp(m + m.conj().T, QPS(4))
    e = lifted.expectation(f)
    ptrace = f.mat.reshape(2, 2, 2, 2).trace(axis1=0, axis2=2) / 2.0
    expected = np.kron(np.eye(2), ptrace)
    assert np.abs(e.mat - expected).max() < 1e-12


def test_tensor_lift_full_leg_is_identity_map():
    # A (x) M_2 with A = M_2 is all of M_4, so the lifted expectation
    # must fix every element
    qps2 = QPS(2)
    full = SubalgebraDescriptor(
        (Block(qps2.identity(), "full", None),), qps2)
    lifted = tensor_lift(full, "left", 2)
    rng = np.random.default_rng(6)
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    f = HermitianOp(m + m.conj().T, QPS(4))
    e = lifted.expectation(f)
    assert np.abs(e.mat - f.mat).max() < 1e-12


def test_tensor_lift_atomic_left_pinches_first_factor():
    # lifting the diagonal atoms of M_2 acts as E_A (x) id: the first
    # tensor factor is pinched, the second passes through untouched
    qps2 = QPS(2)
    atoms = SubalgebraDescriptor(
        (Block(Projection(np.diag([1.0, 0.0]), qps2), "scalar", None),
         Block(Projection(np.diag([0.0, 1.0]), qps2), "scalar", None)),
        qps2)
    lifted = tensor_lift(atoms, "left", 2)
    rng = np.random.default_rng(7)
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    f = HermitianOp(m + m.conj().T, QPS(4))
    e = lifted.expectation(f)
    expected = f.mat * np.kron(np.eye(2), np.ones((2, 2)))
    assert np.abs(e.mat - expected).max() < 1e-12


def test_two_param_joint_expectation_commutes():
    rng = stream(101, 4)
    left = random_scalar_filtration(stream(101, 5), QPS(4), 2)
    right = random_scalar_filtration(stream(101, 6), QPS(4), 2)
    tp = TwoParamFiltration(left, right)
    f = random_positive(rng, QPS(16))
    for n in range(len(left.levels)):
        for m in range(len(right.levels)):
            a = tp.lifted_left(n).apply_raw(tp.lifted_right(m).apply_raw(f.mat))
            b = tp.lifted_right(m).apply_raw(tp.lifted_left(n).apply_raw(f.mat))
            assert np.abs(a - b).max() < 1e-9
            j = tp.joint_expectation(f, n, m)
            assert np.abs(j.mat - a).max() < 1e-9


def test_two_param_martingale_grid_row_major():
    left = random_scalar_filtration(stream(101, 7), QPS(4), 2)
    right = random_scalar_filtration(stream(101, 8), QPS(4), 2)
    tp = TwoParamFiltration(left, right)
    f = random_positive(stream(101, 9), QPS(16))
    seq = tp.two_param_martingale(f)
    rows, cols = seq.tail[1]
    assert rows == len(left.levels) and cols == len(right.levels)
    probe = tp.joint_expectation(f, 1, 0)
    assert np.abs(seq.grid_entry(1, 0).mat - probe.mat).max() < 1e-12


def test_filtration_serialization_round_trip():
    filt = random_scalar_filtration(stream(101, 10), QPS(8), 3)
    obj = filtration_to_jsonable(filt)
    back = filtration_from_jsonable(obj)
    f = random_positive(stream(101, 11), QPS(8))
    for n in range(len(filt.levels)):
        a = filt.expectation(f, n)
        b = back.expectation(f, n)
        assert np.abs(a.mat - b.mat).max() < 1e-12


def test_filtration_rejects_non_nested_levels():
    qps = QPS(4)
    a = _dyadic_descriptor(qps, [(0, 2), (2, 4)])
    b = _dyadic_descriptor(qps, [(0, 1), (1, 2), (2, 4)])
    full = SubalgebraDescriptor((Block(qps.identity(), "full", None),), qps)
    Filtration([a, b, full])  # nested coarse-to-fine: validates
    with pytest.raises(ValueError):
        Filtration([b, a, full])  # refinement order reversed
    with pytest.raises(ValueError):
        Filtration([a, b])  # missing terminal full algebra
