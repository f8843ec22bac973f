"""Cuculescu's stopped-projection recursion and its trace bounds.

Given a positive martingale (f_n) and a level lam, the recursion

    q_0 = 1,   q_n = q_{n-1} * 1_{[0, lam]}(q_{n-1} f_n q_{n-1})

produces a decreasing family of projections; the final one plays the role of
"the martingale never exceeded lam".  The complement trace obeys a weak
(1,1) bound ||f||_1 / lam and a refined bound involving only the part of f
above lam/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ncmaxlab.filtration import Filtration, martingale
from ncmaxlab.norms import OrliczFunction, lp_norm, orlicz_norm
from ncmaxlab.qps import EIG_TOL, HermitianOp, Projection, trace
from ncmaxlab.seqspaces import OperatorSequence

IDEMPOTENCY_TOL = 1e-6   # above this the level is numerically degenerate
MEMBERSHIP_TOL = 1e-8    # E_n(q_n) = q_n
DECREASE_TOL = 1e-8      # q_n <= q_{n-1}
WEAK11_SLACK = 1e-9
POSITIVITY_TOL = 1e-10   # relative to the entry's sup norm


class DegenerateLevel(RuntimeError):
    """lam collides with the spectrum of an intermediate corner.

    Retry with a jittered level, e.g. lam * (1 + 1e-7).
    """

    def __init__(self, level: int, residual: float):
        super().__init__(
            f"corner at martingale level {level} yields idempotency residual "
            f"{residual:.3e} > {IDEMPOTENCY_TOL:.0e}; "
            "retry with lam * (1 + 1e-7)")
        self.level = level
        self.residual = residual


class BoundViolation(RuntimeError):
    """A certified inequality failed beyond its slack."""


@dataclass
class CuculescuResult:
    q_levels: list[Projection]
    q: Projection
    lam: float
    corner_max_eig: float
    trace_complement: float


def _op_norm(mat: np.ndarray) -> float:
    w = np.linalg.eigvalsh(mat)
    return float(np.abs(w).max()) if w.size else 0.0


def cuculescu_projections(mart: OperatorSequence, filt: Filtration,
                          lam: float) -> CuculescuResult:
    """Run the recursion along a martingale; q is the final (smallest) level.

    Each step takes the spectral projection of the current corner onto
    [0, lam] (closed endpoints, boundary eigenvalues within 1e-10 kept) and
    multiplies by the previous projection; the product is snapped back to an
    exact projection, failing loudly if its idempotency residual exceeds
    1e-6 — the signature of lam sitting on a corner eigenvalue.
    """
    if lam <= 0:
        raise ValueError(f"lam must be positive, got {lam}")
    if len(mart.entries) != len(filt.levels):
        raise ValueError("martingale length does not match filtration depth")
    qps = mart.qps
    d = qps.dim
    for i, f_n in enumerate(mart.entries):
        w = f_n.eigvals()
        scale = max(1.0, float(np.abs(w).max()))
        if float(w[0]) < -POSITIVITY_TOL * scale:
            raise ValueError(f"martingale entry {i} is not positive")

    q = qps.identity()
    q_levels: list[Projection] = []
    corner_max = 0.0
    for i, f_n in enumerate(mart.entries):
        corner = q.mat @ f_n.mat @ q.mat
        corner = (corner + corner.conj().T) / 2.0
        w, v = np.linalg.eigh(corner)
        # The kernel of q is a noise-width eigenvalue cluster at 0; a fixed
        # floor would slice it and mix kernel vectors into the kept basis,
        # so the floor scales with the corner's norm.
        floor = EIG_TOL * max(1.0, float(np.abs(w).max()))
        keep = (w >= -floor) & (w <= lam + EIG_TOL)
        below = Projection.from_isometry(v[:, keep], qps)
        raw = q.mat @ below.mat
        raw = (raw + raw.conj().T) / 2.0
        resid = _op_norm(raw @ raw - raw)
        if resid > IDEMPOTENCY_TOL:
            raise DegenerateLevel(i, resid)
        w2, v2 = np.linalg.eigh(raw)
        q_new = Projection.from_isometry(v2[:, w2 >= 0.5], qps)
        if float(np.linalg.eigvalsh(q.mat - q_new.mat)[0]) < -DECREASE_TOL:
            raise RuntimeError(f"projection increased at level {i}")
        e_res = _op_norm(filt.levels[i].apply_raw(q_new.mat) - q_new.mat)
        if e_res > MEMBERSHIP_TOL:
            raise RuntimeError(
                f"q at level {i} left its subalgebra (residual {e_res:.3e})")
        stopped_corner = q_new.mat @ f_n.mat @ q_new.mat
        corner_max = max(corner_max, float(
            np.linalg.eigvalsh((stopped_corner + stopped_corner.conj().T) / 2)[-1]))
        q = q_new
        q_levels.append(q_new)

    return CuculescuResult(
        q_levels=q_levels,
        q=q,
        lam=lam,
        corner_max_eig=corner_max,
        trace_complement=1.0 - trace(q),
    )


def verify_weak11(res: CuculescuResult, f: HermitianOp,
                  slack: float = WEAK11_SLACK) -> dict:
    """tau(q_perp) <= ||f||_1 / lam, with 1e-9 slack.  Returns both sides."""
    lhs = res.trace_complement
    rhs = lp_norm(f, 1) / res.lam
    if lhs > rhs + slack:
        raise BoundViolation(
            f"weak (1,1) failed: tau(q_perp) = {lhs:.12e} > "
            f"||f||_1/lam = {rhs:.12e}")
    return {"lhs": lhs, "rhs": rhs,
            "ratio": lhs / rhs if rhs > 0 else 0.0}


def verify_refined(res: CuculescuResult, f: HermitianOp,
                   slack: float = WEAK11_SLACK) -> dict:
    """tau(q_perp) <= (2/lam) tau(f 1_{(lam/2, inf)}(f)), 1e-9 slack."""
    lam = res.lam
    w = f.eigvals()
    upper_mass = float(np.sum(w[w > lam / 2.0 + EIG_TOL])) / f.qps.dim
    lhs = res.trace_complement
    rhs = 2.0 / lam * upper_mass
    if lhs > rhs + slack:
        raise BoundViolation(
            f"refined bound failed: tau(q_perp) = {lhs:.12e} > "
            f"(2/lam) tau(f above lam/2) = {rhs:.12e}")
    return {"lhs": lhs, "rhs": rhs,
            "ratio": lhs / rhs if rhs > 0 else 0.0}


def commutative_stopping_complement(diag_mart: list[np.ndarray],
                                    lam: float) -> np.ndarray:
    """Classical stopping-set oracle for diagonal martingales.

    Takes the diagonals of E_n(f) and returns the 0/1 indicator of the
    complement of {exists n: (E_n f)(k) > lam}.  Mirrors the pipeline's
    closed-endpoint convention: values within EIG_TOL above lam are treated
    as not exceeding it.
    """
    stopped = np.zeros(diag_mart[0].shape[0], dtype=bool)
    for v in diag_mart:
        stopped |= np.asarray(v).real > lam + EIG_TOL
    return (~stopped).astype(float)


@dataclass
class SteinResult:
    integral: float
    orlicz: float
    ratio: float
    nodes: list = field(default_factory=list)


def stein_integral(f: HermitianOp, filt: Filtration,
                   lambda_grid: np.ndarray) -> SteinResult:
    """Trapezoid quadrature of lam -> tau(q(lam)_perp) over a geometric grid.

    Returns the integral together with its ratio against the L log L norm
    of f (alpha = 1).  Grid must reach past ||f||_inf so the integrand has
    decayed to 0 at the right end.
    """
    grid = np.asarray(lambda_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise ValueError("lambda_grid must be an increasing 1-d grid")
    sup = lp_norm(f, np.inf)
    if grid[-1] < sup:
        raise ValueError(
            f"grid must reach ||f||_inf = {sup:.6g}, ends at {grid[-1]:.6g}")
    mart = martingale(f, filt)
    values = []
    for lam in grid:
        lam_eff = lam
        last: DegenerateLevel | None = None
        for _ in range(3):
            try:
                res = cuculescu_projections(mart, filt, lam_eff)
                break
            except DegenerateLevel as exc:
                last = exc
                lam_eff *= 1.0 + 1e-7
        else:
            raise last
        values.append(res.trace_complement)
    integral = float(np.trapezoid(values, grid))
    lloglog = orlicz_norm(f, OrliczFunction(alpha=1.0))
    ratio = integral / lloglog if lloglog > 0 else 0.0
    return SteinResult(integral=integral, orlicz=lloglog, ratio=ratio,
                       nodes=list(zip(grid.tolist(), values)))
