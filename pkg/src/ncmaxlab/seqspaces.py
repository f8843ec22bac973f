"""Mixed-norm sequence spaces over (M_d, tau).

The central object is the positive-cone sup norm ||(f_n)|| = inf{||g||_p :
g >= f_n for all n}, computed by the barrier kernel in
:mod:`ncmaxlab.majorant`.  On top of it sit the Orlicz variant (bisection in
the norm level), row/column asymmetric norms through squares, a limsup
seminorm estimator with tail-cut and small-projection search, and Egorov-style
almost-uniform-convergence certificates.

Projection searches are restricted to spectral projections of computed tail
majorants, so limsup values and certificates are certified upper bounds; the
infimum over all small projections is not attempted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from ncmaxlab.majorant import MajorantSolution, minimize_majorant, minimize_spectral
from ncmaxlab.norms import OrliczFunction
from ncmaxlab.qps import QPS, HermitianOp, Projection

PSD_TOL = 1e-9       # positivity tolerance on input entries
ORLICZ_REL = 1e-5    # relative bisection width in orlicz_sup_norm


class OperatorSequence:
    """A finite operator sequence with an optional tail descriptor.

    ``tail`` is None, ``("constant", h)`` meaning f_n = h for every index
    beyond the stored prefix, or ``("grid2d", (rows, cols))`` meaning the
    entries are a row-major two-parameter array whose last entry doubles as
    the constant corner tail.
    """

    __slots__ = ("entries", "tail", "qps")

    def __init__(self, entries: Iterable[HermitianOp], tail=None):
        entries = tuple(entries)
        if not entries:
            raise ValueError("sequence needs at least one entry")
        qps = entries[0].qps
        if any(e.qps != qps for e in entries):
            raise ValueError("entries live in different spaces")
        if tail is not None:
            kind = tail[0]
            if kind == "constant":
                if tail[1].qps != qps:
                    raise ValueError("tail lives in a different space")
            elif kind == "grid2d":
                rows, cols = tail[1]
                if rows * cols != len(entries):
                    raise ValueError(
                        f"grid2d dims {rows}x{cols} do not match "
                        f"{len(entries)} entries")
            else:
                raise ValueError(f"unknown tail kind {kind!r}")
        self.entries = entries
        self.tail = tail
        self.qps = qps

    def __len__(self) -> int:
        return len(self.entries)

    def grid_entry(self, n: int, m: int) -> HermitianOp:
        rows, cols = self.tail[1]
        return self.entries[n * cols + m]

    def folded(self) -> list[HermitianOp]:
        """Entries with a constant tail appended as one more entry."""
        out = list(self.entries)
        if self.tail is not None and self.tail[0] == "constant":
            out.append(self.tail[1])
        return out


@dataclass
class BauCertificate:
    """Witness of almost-uniform smallness past a cut.

    tau(e) < epsilon, and ||e_perp (f_n - f) e_perp||_inf <= delta for every
    n > N in the supplied prefix.
    """

    e: Projection
    N: int
    delta: float
    epsilon: float

    def __post_init__(self):
        from ncmaxlab.qps import trace
        if trace(self.e) >= self.epsilon:
            raise ValueError("certificate projection is not small enough")


def _as_ops(seq: Union[OperatorSequence, Sequence[HermitianOp]]
            ) -> tuple[list[HermitianOp], QPS]:
    if isinstance(seq, OperatorSequence):
        ops = seq.folded()
        return ops, seq.qps
    ops = list(seq)
    if not ops:
        raise ValueError("empty sequence")
    return ops, ops[0].qps


def _check_positive(ops: list[HermitianOp]) -> None:
    for i, f in enumerate(ops):
        if float(f.eigvals()[0]) < -PSD_TOL:
            raise ValueError(
                f"entry {i} has min eigenvalue {f.eigvals()[0]:.3e}; "
                "positive semidefinite input required")


def sup_norm_positive(seq, p: float) -> MajorantSolution:
    """inf{||g||_p : g >= f_n} for positive entries, solved by the barrier.

    The returned objective is evaluated at a certified feasible point, hence
    always an upper bound on the true infimum.
    """
    ops, qps = _as_ops(seq)
    _check_positive(ops)
    return minimize_majorant([f.mat for f in ops], p, qps)


def asym_sup_norm(seq, side: str) -> float:
    """Column/row asymmetric norm through squares.

    column: sqrt of sup_norm_positive((f* f)_n, 1); row: with f f*.  Entries
    may be arbitrary matrices (raw ndarrays accepted).
    """
    if side not in ("column", "row"):
        raise ValueError(f"side must be column or row, got {side!r}")
    if isinstance(seq, OperatorSequence):
        mats = [f.mat for f in seq.folded()]
        qps = seq.qps
    else:
        mats = [np.asarray(f.mat if isinstance(f, HermitianOp) else f,
                           dtype=complex) for f in seq]
        qps = QPS(mats[0].shape[0])
    if side == "column":
        squares = [m.conj().T @ m for m in mats]
    else:
        squares = [m @ m.conj().T for m in mats]
    sol = minimize_majorant(squares, 1, qps)
    return float(np.sqrt(max(sol.objective, 0.0)))


# ---------------------------------------------------------------------------
# Orlicz variant


def _phi_derivatives(alpha: float, t: float):
    """phi(x) = Phi(|x|/t) and two derivatives, for Phi in the log family."""

    def u_of(x):
        return np.abs(np.asarray(x, dtype=float)) / t

    def phi(x):
        u = u_of(x)
        return u * (1.0 + np.log(np.maximum(u, 1.0))) ** alpha

    def dphi(x):
        x = np.asarray(x, dtype=float)
        u = u_of(x)
        big = u > 1.0
        lu = np.log(np.maximum(u, 1.0))
        out = np.where(big,
                       (1.0 + lu) ** alpha + alpha * (1.0 + lu) ** (alpha - 1),
                       1.0)
        return np.sign(x) * out / t

    def d2phi(x):
        u = np.maximum(u_of(x), 1.0)
        lu = np.log(u)
        out = np.where(u > 1.0,
                       (alpha / u) * (1.0 + lu) ** (alpha - 2) * (lu + alpha),
                       0.0)
        return out / (t * t)

    return phi, dphi, d2phi


def orlicz_sup_norm(seq, phi: OrliczFunction) -> float:
    """Bisection on t of the feasibility of {g >= f_n, tau Phi(g/t) <= 1}.

    Feasibility at level t is tested by minimizing tau Phi(g/t) over the
    majorant cone with the barrier kernel; the reported value is an upper
    bound, exact on diagonal instances up to the bisection width.
    """
    if phi.alpha is None:
        raise ValueError("orlicz_sup_norm supports the log-power family only")
    alpha = float(phi.alpha)
    ops, qps = _as_ops(seq)
    _check_positive(ops)
    mats = [f.mat for f in ops]
    if max(float(np.abs(f.eigvals()).max()) for f in ops) == 0.0:
        return 0.0

    def feasible(t: float) -> bool:
        fns = _phi_derivatives(alpha, t)
        _, val, _ = minimize_spectral(mats, qps, *fns)
        return val <= 1.0

    from ncmaxlab.norms import orlicz_norm
    t_hi = orlicz_norm(sup_norm_positive(seq, 1).g, phi)
    expansions = 0
    while not feasible(t_hi):
        t_hi *= 2.0
        expansions += 1
        if expansions > 40:
            raise RuntimeError("no feasible upper level found")
    t_lo = max(orlicz_norm(f, phi) for f in ops) / 2.0
    shrinks = 0
    while feasible(t_lo):
        t_lo /= 2.0
        shrinks += 1
        if shrinks > 40:
            return t_hi  # everything feasible down to ~0: degenerate
    while t_hi - t_lo > ORLICZ_REL * t_hi:
        mid = (t_hi + t_lo) / 2.0
        if feasible(mid):
            t_hi = mid
        else:
            t_lo = mid
    return t_hi


# ---------------------------------------------------------------------------
# limsup estimation and b.a.u. certificates


def _top_k_projection(g: HermitianOp, k: int) -> np.ndarray:
    """Rank-k projection onto the top eigendirections of g (k may be 0)."""
    if k == 0:
        return np.zeros((g.qps.dim, g.qps.dim), dtype=complex)
    w, v = g.eig()
    top = v[:, np.argsort(w)[::-1][:k]]
    return top @ top.conj().T


def _candidate_ranks(d: int) -> list[int]:
    ks = [0]
    k = 1
    while k < d:
        ks.append(k)
        k *= 2
    return ks


def limsup_norm_estimate(seq: OperatorSequence, p: float,
                         eps_grid: Sequence[float]) -> tuple[float, dict]:
    """Upper estimate of sup_eps inf_{tau(e)<eps} inf_cut ||(e' f_n e')_tail||_p.

    Candidate projections run over top-k spectral projections of the tail
    majorant (k in {0} and powers of two with k/d < eps); cuts enumerate the
    finite tail positions.  Returns the sup over the eps grid and per-eps
    diagnostics; values are upper bounds by construction.
    """
    if seq.tail is None:
        raise ValueError("limsup estimation needs a tail descriptor")
    ops, qps = _as_ops(seq)
    _check_positive(ops)
    d = qps.dim
    if not eps_grid:
        raise ValueError("empty eps grid")

    if seq.tail[0] == "constant":
        cuts = [(n,) for n in range(len(seq.entries) + 1)]

        def tail_mats(cut):
            n = cut[0]
            mats = [f.mat for f in seq.entries[n:]]
            mats.append(seq.tail[1].mat)
            return mats
    else:
        rows, cols = seq.tail[1]
        cuts = [(n, m) for n in range(rows) for m in range(cols)]

        def tail_mats(cut):
            n0, m0 = cut
            return [seq.grid_entry(n, m).mat
                    for n in range(n0, rows) for m in range(m0, cols)]

    per_cut = []
    for cut in cuts:
        mats = tail_mats(cut)
        sol = minimize_majorant(mats, p, qps)
        per_cut.append((cut, mats, sol))

    diagnostics = {}
    overall = 0.0
    for eps in eps_grid:
        best = None
        for cut, mats, sol in per_cut:
            for k in _candidate_ranks(d):
                if k / d >= eps:
                    break
                if k == 0:
                    value = sol.objective
                else:
                    e = _top_k_projection(sol.g, k)
                    ep = np.eye(d) - e
                    cut_sol = minimize_majorant(
                        [ep @ m @ ep for m in mats], p, qps)
                    value = cut_sol.objective
                if best is None or value < best[0]:
                    best = (value, cut, k)
        diagnostics[eps] = {
            "value": best[0], "cut": best[1], "proj_trace": best[2] / d}
        overall = max(overall, best[0])
    diagnostics["upper_bound"] = True
    return overall, diagnostics


def bau_certificate(seq: OperatorSequence, f: HermitianOp,
                    epsilon: float) -> BauCertificate:
    """Greedy Egorov-style certificate for a constant-tail sequence.

    For each cut N, a p=1 majorant h_N of {|f_n - f| : n > N} supplies the
    candidate projection (top eigendirections of h_N, as many as tau allows
    under epsilon); the smallest achieved delta wins, earliest cut on ties.
    """
    if seq.tail is None or seq.tail[0] != "constant":
        raise ValueError("certificate needs a constant-tail sequence")
    qps = seq.qps
    d = qps.dim
    k_small = int(np.ceil(epsilon * d - 1e-12)) - 1
    k_small = max(k_small, 0)
    diffs = []
    abs_diffs = []
    for entry in seq.entries:
        delta_op = entry - f
        w, v = delta_op.eig()
        diffs.append(delta_op)
        abs_diffs.append((v * np.abs(w)) @ v.conj().T)

    best = None
    for n_cut in range(len(seq.entries)):
        h = minimize_majorant(abs_diffs[n_cut:], 1, qps)
        e_mat = _top_k_projection(h.g, k_small)
        ep = np.eye(d) - e_mat
        delta = 0.0
        for diff in diffs[n_cut:]:
            w = np.linalg.eigvalsh(ep @ diff.mat @ ep)
            delta = max(delta, float(np.abs(w).max()))
        if best is None or delta < best[0] - 1e-15:
            best = (delta, n_cut, e_mat)
    delta, n_cut, e_mat = best
    return BauCertificate(
        e=Projection(e_mat, qps, _trusted=True),
        N=n_cut, delta=delta, epsilon=epsilon)
