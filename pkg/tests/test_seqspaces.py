import numpy as np
import pytest

from ncmaxlab.norms import OrliczFunction, lp_norm
from ncmaxlab.qps import QPS, HermitianOp, Projection, trace
from ncmaxlab.seqspaces import (BauCertificate, OperatorSequence,
                                asym_sup_norm, bau_certificate,
                                limsup_norm_estimate, orlicz_sup_norm,
                                sup_norm_positive)


def _diag(qps, *vals):
    return HermitianOp(np.diag(np.array(vals, dtype=float)), qps)


def test_sequence_rejects_bad_input():
    qps = QPS(2)
    f = _diag(qps, 1.0, 2.0)
    with pytest.raises(ValueError):
        OperatorSequence([])
    with pytest.raises(ValueError):
        OperatorSequence([f, _diag(QPS(3), 1.0, 1.0, 1.0)])
    with pytest.raises(ValueError):
        OperatorSequence([f], tail=("grid2d", (2, 3)))
    with pytest.raises(ValueError):
        OperatorSequence([f], tail=("weird", f))
    with pytest.raises(ValueError):
        OperatorSequence([f], tail=("constant",
                                    _diag(QPS(3), 0.0, 0.0, 0.0)))


def test_grid_entry_is_row_major():
    qps = QPS(2)
    entries = [_diag(qps, float(i), float(i)) for i in range(6)]
    seq = OperatorSequence(entries, tail=("grid2d", (2, 3)))
    assert seq.grid_entry(0, 0).mat[0, 0] == 0.0
    assert seq.grid_entry(0, 2).mat[0, 0] == 2.0
    assert seq.grid_entry(1, 0).mat[0, 0] == 3.0
    assert seq.grid_entry(1, 2).mat[0, 0] == 5.0


def test_folded_appends_constant_tail_only():
    qps = QPS(2)
    f = _diag(qps, 1.0, 2.0)
    h = _diag(qps, 0.5, 0.5)
    assert len(OperatorSequence([f]).folded()) == 1
    folded = OperatorSequence([f], tail=("constant", h)).folded()
    assert len(folded) == 2
    assert np.array_equal(folded[1].mat, h.mat)
    grid = OperatorSequence([f, f], tail=("grid2d", (1, 2)))
    assert len(grid.folded()) == 2


def test_sup_norm_positive_diagonal_oracle():
    qps = QPS(4)
    entries = [_diag(qps, 3.0, 0.0, 1.0, 2.0),
               _diag(qps, 1.0, 4.0, 0.0, 0.0),
               _diag(qps, 0.0, 2.0, 2.0, 5.0)]
    pointwise_max = _diag(qps, 3.0, 4.0, 2.0, 5.0)
    for p in (1, 2):
        sol = sup_norm_positive(entries, p)
        assert sol.objective == pytest.approx(
            lp_norm(pointwise_max, p), rel=2e-6)
        assert sol.feasibility_residual >= -1e-7


def test_sup_norm_positive_rejects_negative_entry():
    qps = QPS(2)
    with pytest.raises(ValueError, match="positive"):
        sup_norm_positive([_diag(qps, 1.0, -1.0)], 1)


def test_asym_sup_norm_distinguishes_sides():
    # f1 has its column square at index 1, row square at index 0; the
    # diagonal f2 overlaps only the row side, so the two norms differ
    f1 = np.array([[0.0, 2.0], [0.0, 0.0]])
    f2 = np.diag([3.0, 0.0])
    col = asym_sup_norm([f1, f2], "column")
    row = asym_sup_norm([f1, f2], "row")
    assert col == pytest.approx(np.sqrt(6.5), rel=1e-4)
    assert row == pytest.approx(np.sqrt(4.5), rel=1e-4)
    with pytest.raises(ValueError):
        asym_sup_norm([f1], "middle")


def test_orlicz_sup_norm_alpha_zero_matches_l1():
    qps = QPS(4)
    entries = [_diag(qps, 3.0, 0.0, 1.0, 2.0),
               _diag(qps, 1.0, 4.0, 0.0, 0.0)]
    phi = OrliczFunction(alpha=0.0)
    value = orlicz_sup_norm(entries, phi)
    ref = sup_norm_positive(entries, 1).objective
    assert value == pytest.approx(ref, rel=1e-3)


def test_orlicz_sup_norm_edge_cases():
    qps = QPS(2)
    zero = _diag(qps, 0.0, 0.0)
    assert orlicz_sup_norm([zero], OrliczFunction(alpha=1.0)) == 0.0
    custom = OrliczFunction(handle=lambda x: np.asarray(x) ** 2)
    with pytest.raises(ValueError, match="log-power"):
        orlicz_sup_norm([_diag(qps, 1.0, 1.0)], custom)


def test_limsup_estimate_constant_tail():
    qps = QPS(4)
    entries = [_diag(qps, 3.0, 3.0, 3.0, 3.0),
               _diag(qps, 2.0, 2.0, 2.0, 2.0)]
    tail = _diag(qps, 1.0, 1.0, 1.0, 1.0)
    seq = OperatorSequence(entries, tail=("constant", tail))
    overall, diag = limsup_norm_estimate(seq, 1, (0.1, 0.5))
    # the transient prefix is cut away; only the constant tail remains
    assert overall == pytest.approx(1.0, rel=1e-3)
    assert diag[0.1]["cut"] == (2,)
    # eps = 0.5 additionally admits a rank-1 corner of the identity
    assert diag[0.5]["value"] == pytest.approx(0.75, rel=1e-3)


def test_limsup_estimate_grid_tail():
    qps = QPS(4)
    vals = [4.0, 2.0, 2.0, 1.0]
    entries = [_diag(qps, v, v, v, v) for v in vals]
    seq = OperatorSequence(entries, tail=("grid2d", (2, 2)))
    overall, diag = limsup_norm_estimate(seq, 1, (0.1,))
    assert overall == pytest.approx(1.0, rel=1e-3)
    assert diag[0.1]["cut"] == (1, 1)


def test_limsup_estimate_validates_input():
    qps = QPS(2)
    seq = OperatorSequence([_diag(qps, 1.0, 1.0)])
    with pytest.raises(ValueError, match="tail"):
        limsup_norm_estimate(seq, 1, (0.1,))
    tailed = OperatorSequence(
        [_diag(qps, 1.0, 1.0)],
        tail=("constant", _diag(qps, 1.0, 1.0)))
    with pytest.raises(ValueError, match="eps"):
        limsup_norm_estimate(tailed, 1, ())


def test_bau_certificate_kills_rank_one_defect():
    qps = QPS(8)
    rng = np.random.default_rng(2)
    m = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    base = m @ m.conj().T / 8.0
    f = HermitianOp(base, qps)
    spike = np.zeros((8, 8))
    spike[0, 0] = 1.0
    entries = [HermitianOp(base + 2.0 ** -n * spike, qps) for n in range(5)]
    seq = OperatorSequence(entries, tail=("constant", f))

    # epsilon = 0.2 allows a rank-1 projection: the defect disappears
    cert = bau_certificate(seq, f, 0.2)
    assert cert.N == 0
    assert cert.delta <= 1e-12
    assert trace(cert.e) == pytest.approx(0.125, abs=1e-12)

    # epsilon = 0.1 forces e = 0: the best cut is the last index
    cert0 = bau_certificate(seq, f, 0.1)
    assert cert0.N == 4
    assert cert0.delta == pytest.approx(2.0 ** -4, rel=1e-12)
    assert trace(cert0.e) == 0.0


def test_bau_certificate_validates_input():
    qps = QPS(2)
    f = _diag(qps, 1.0, 1.0)
    with pytest.raises(ValueError, match="constant-tail"):
        bau_certificate(OperatorSequence([f]), f, 0.5)
    with pytest.raises(ValueError, match="small"):
        BauCertificate(e=Projection(np.eye(2), qps), N=0,
                       delta=0.0, epsilon=0.5)
