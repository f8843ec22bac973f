"""Log-barrier interior-point kernel for positive-majorant problems.

Solves  min obj(g)  over Hermitian g subject to g >= f_n for all n, where
obj is tau(g) (p=1), tau(g^2) (p=2), or a spectral function tau(phi(g)).
The barrier at parameter mu is

    F_mu(g) = obj(g) - mu * sum_n logdet(g - f_n + mu*I),

with mu decreasing geometrically (factor 0.25) from 1.  The mu*I shift keeps
the initial iterate g = (max_n ||f_n||_inf) * I strictly inside every shifted
cone.  The nominal floor mu = 1e-9 is extended adaptively down to 1e-13 when
the estimated duality gap (~ 2 mu n) would otherwise miss the relative
accuracy wanted on small-scale objectives.

Newton directions: for d <= 20 the Hessian is assembled densely via complex
Kronecker products and factored; for larger d a preconditioned CG runs on
the Hessian-vector operator (Jacobi preconditioner when every constraint is
numerically diagonal — exact in that case — congruence preconditioner
otherwise).  The returned point is always certified: any residual
infeasibility is removed by a final shift along the identity, so the
reported objective is the value of a true feasible point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from ncmaxlab.qps import QPS, HermitianOp

DENSE_DIM_MAX = 20
MU_FACTOR = 0.25
MU_SPEC_FLOOR = 1e-9     # nominal stopping trigger
MU_HARD_FLOOR = 1e-13    # adaptive extension for small objectives
REL_GAP_TARGET = 1e-8
NEWTON_TOL = 1e-12       # on the Newton decrement, relative to |F|
NEWTON_MAX = 60
CG_MAX = 500
STAGNATION_RESIDUAL = -1e-7


class SolverStagnation(RuntimeError):
    """Barrier iteration stopped making progress while still infeasible."""

    def __init__(self, msg: str, *, residual: float, rel_change: float,
                 iterations: int):
        super().__init__(
            f"{msg} (residual {residual:.3e}, relative change "
            f"{rel_change:.3e}, after {iterations} Newton steps)")
        self.residual = residual
        self.rel_change = rel_change
        self.iterations = iterations


@dataclass
class MajorantSolution:
    """Feasible majorant g with its certified objective value."""

    g: HermitianOp
    objective: float
    feasibility_residual: float
    iterations: int
    p: float
    mu_final: float


# ---------------------------------------------------------------------------
# objective strategies


class _ObjLinear:
    """obj(g) = tau(g)."""

    c_quad = 0.0
    spectral = False

    def __init__(self, d: int):
        self.d = d
        self._grad = np.eye(d, dtype=complex) / d

    def prepare(self, g):
        return None

    def val(self, g, ctx) -> float:
        return float(np.trace(g).real) / self.d

    def grad(self, g, ctx):
        return self._grad

    def hess_apply(self, ctx, x):
        return np.zeros_like(x)


class _ObjQuadratic:
    """obj(g) = tau(g^2)."""

    spectral = False

    def __init__(self, d: int):
        self.d = d
        self.c_quad = 2.0 / d

    def prepare(self, g):
        return None

    def val(self, g, ctx) -> float:
        return float(np.vdot(g, g).real) / self.d

    def grad(self, g, ctx):
        return (2.0 / self.d) * g

    def hess_apply(self, ctx, x):
        return (2.0 / self.d) * x


class _ObjSpectral:
    """obj(g) = tau(phi(g)) for a scalar phi with two derivatives."""

    c_quad = 0.0
    spectral = True

    def __init__(self, d: int, phi, dphi, d2phi):
        self.d = d
        self.phi = phi
        self.dphi = dphi
        self.d2phi = d2phi

    def prepare(self, g):
        w, v = np.linalg.eigh(g)
        dp = self.dphi(w)
        scale = max(1.0, float(np.abs(w).max()))
        gaps = w[:, None] - w[None, :]
        close = np.abs(gaps) <= 1e-12 * scale
        mids = (w[:, None] + w[None, :]) / 2.0
        dd = np.where(close, self.d2phi(mids),
                      (dp[:, None] - dp[None, :]) / np.where(close, 1.0, gaps))
        return (w, v, dp, dd / self.d)

    def val(self, g, ctx) -> float:
        w = ctx[0]
        return float(np.mean(self.phi(w)))

    def grad(self, g, ctx):
        w, v, dp, _ = ctx
        return (v * (dp / self.d)) @ v.conj().T

    def hess_apply(self, ctx, x):
        _, v, _, dd = ctx
        return v @ (dd * (v.conj().T @ x @ v)) @ v.conj().T

    def hess_dense(self, ctx):
        _, v, _, dd = ctx
        m1 = np.kron(v, v.conj())
        return m1 @ (dd.reshape(-1)[:, None] * m1.conj().T)


# ---------------------------------------------------------------------------
# barrier machinery


def _inner(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.vdot(a, b).real)


def _chol_logdet(g, mats, mu, eye):
    """Cholesky factors of the shifted slacks and their total logdet."""
    chols = []
    ld = 0.0
    for f in mats:
        s = g - f + mu * eye
        try:
            c = np.linalg.cholesky(s)
        except np.linalg.LinAlgError:
            return None, None
        chols.append(c)
        ld += 2.0 * float(np.sum(np.log(np.diag(c).real)))
    return chols, ld


def _slack_inverses(chols, eye):
    invs = []
    for c in chols:
        s_inv = sla.cho_solve((c, True), eye)
        invs.append((s_inv + s_inv.conj().T) / 2.0)
    return invs


def _newton_direction(rhs, s_invs, mu, obj, ctx, d, diag_mode):
    n = len(s_invs)
    if d <= DENSE_DIM_MAX:
        h = np.zeros((d * d, d * d), dtype=complex)
        for s in s_invs:
            h += np.kron(s, s.conj())
        h *= mu
        if obj.c_quad:
            h[np.diag_indices_from(h)] += obj.c_quad
        if obj.spectral:
            h += obj.hess_dense(ctx)
        try:
            cf = sla.cho_factor(h)
            x = sla.cho_solve(cf, rhs.reshape(-1))
        except np.linalg.LinAlgError:
            x = np.linalg.solve(h, rhs.reshape(-1))
        dmat = x.reshape(d, d)
        return (dmat + dmat.conj().T) / 2.0

    def hvp(x):
        out = obj.hess_apply(ctx, x)
        for s in s_invs:
            out = out + mu * (s @ x @ s)
        return out

    if diag_mode:
        ds = [np.diag(s).real.copy() for s in s_invs]
        coeff = obj.c_quad + mu * sum(np.outer(v, v) for v in ds)

        def minv(r):
            return r / coeff
    else:
        b = mu * sum(s_invs)
        w = b / np.sqrt(n * mu)
        if obj.c_quad:
            w = w + np.sqrt(obj.c_quad) * np.eye(d)
        cw = np.linalg.cholesky(w)

        def minv(r):
            a = sla.cho_solve((cw, True), r)
            return sla.cho_solve((cw, True), a.conj().T).conj().T

    x = np.zeros_like(rhs)
    r = rhs.copy()
    z = minv(r)
    p = z.copy()
    rz = _inner(r, z)
    bnorm = np.linalg.norm(rhs)
    for _ in range(CG_MAX):
        hp = hvp(p)
        php = _inner(p, hp)
        if php <= 0:
            break
        alpha = rz / php
        x += alpha * p
        r -= alpha * hp
        if np.linalg.norm(r) <= 1e-6 * bnorm:
            break
        z = minv(r)
        rz_new = _inner(r, z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    return (x + x.conj().T) / 2.0


def _center(g, mats, mu, obj, d, diag_mode, eye, iters_so_far):
    """Newton iteration for the barrier at fixed mu.  Returns (g, iters)."""
    iters = iters_so_far
    chols, ld = _chol_logdet(g, mats, mu, eye)
    if chols is None:
        raise RuntimeError("barrier entered an infeasible point")
    for _ in range(NEWTON_MAX):
        s_invs = _slack_inverses(chols, eye)
        ctx = obj.prepare(g)
        fval = obj.val(g, ctx) - mu * ld
        grad = obj.grad(g, ctx) - mu * sum(s_invs)
        direction = _newton_direction(-grad, s_invs, mu, obj, ctx, d, diag_mode)
        dec = -_inner(grad, direction)
        if dec <= 0:
            direction = -grad
            dec = _inner(grad, grad)
        if dec / 2.0 <= NEWTON_TOL * max(1.0, abs(fval)):
            break
        gd = _inner(grad, direction)
        t = 1.0
        accepted = False
        while t >= 1e-14:
            gt = g + t * direction
            gt = (gt + gt.conj().T) / 2.0
            chols_t, ld_t = _chol_logdet(gt, mats, mu, eye)
            if chols_t is not None:
                fval_t = obj.val(gt, obj.prepare(gt)) - mu * ld_t
                if fval_t <= fval + 0.25 * t * gd:
                    g, chols, ld = gt, chols_t, ld_t
                    accepted = True
                    break
            t /= 2.0
        iters += 1
        if not accepted:
            residual = min(
                float(np.linalg.eigvalsh(g - f)[0]) for f in mats)
            if residual < STAGNATION_RESIDUAL:
                raise SolverStagnation(
                    "line search stalled on an infeasible iterate",
                    residual=residual, rel_change=0.0, iterations=iters)
            break
    return g, iters


def _stage_entry(g, mats, mu, eye):
    """Shift g up if the shrunken mu leaves a shifted slack non-PD."""
    worst = min(float(np.linalg.eigvalsh(g - f)[0]) for f in mats)
    margin = 0.05 * mu
    if worst + mu < margin:
        g = g + (margin - worst - mu) * eye
    return g


def _barrier_solve(mats, obj, d):
    eye = np.eye(d, dtype=complex)
    top = max(float(np.linalg.eigvalsh(f)[-1]) for f in mats)
    g = max(top, 1.0) * eye.copy()
    scale = max(1.0, max(np.abs(f).max() for f in mats))
    diag_mode = all(
        np.abs(f - np.diag(np.diag(f))).max() <= 1e-13 * scale for f in mats)
    n = len(mats)
    mu = 1.0
    iters = 0
    while True:
        g = _stage_entry(g, mats, mu, eye)
        g, iters = _center(g, mats, mu, obj, d, diag_mode, eye, iters)
        gap = 2.0 * mu * n
        objval = obj.val(g, obj.prepare(g))
        if mu <= MU_SPEC_FLOOR and gap <= REL_GAP_TARGET * max(abs(objval), 1e-6):
            break
        if mu <= MU_HARD_FLOOR:
            break
        mu *= MU_FACTOR
    return g, iters, mu


def _certify(g, mats):
    """Shift g along the identity until every constraint is satisfied."""
    viol = min(float(np.linalg.eigvalsh(g - f)[0]) for f in mats)
    if viol < 0:
        g = g + (-viol) * np.eye(g.shape[0])
        viol = min(float(np.linalg.eigvalsh(g - f)[0]) for f in mats)
    return g, viol


def _norm_of(mat: np.ndarray, p: float, d: int) -> float:
    w = np.abs(np.linalg.eigvalsh(mat))
    if np.isinf(p):
        return float(w.max()) if w.size else 0.0
    return float(np.mean(w ** p) ** (1.0 / p))


def minimize_majorant(mats: list[np.ndarray], p: float, qps: QPS) -> MajorantSolution:
    """min ||g||_p over g >= f_n, f_n given as raw Hermitian ndarrays."""
    if not mats:
        raise ValueError("need at least one constraint")
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    d = qps.dim
    tops = [float(np.linalg.eigvalsh(f)[-1]) for f in mats]
    cmax = max(tops)
    if cmax <= 0.0:
        # g = 0 dominates every constraint and has the smallest norm
        zero = np.zeros((d, d), dtype=complex)
        g, viol = _certify(zero, mats)
        return MajorantSolution(HermitianOp(g, qps), _norm_of(g, p, d),
                                viol, 0, p, 0.0)
    if np.isinf(p):
        g = cmax * np.eye(d, dtype=complex)
        g, viol = _certify(g, mats)
        return MajorantSolution(HermitianOp(g, qps), _norm_of(g, p, d),
                                viol, 0, p, 0.0)

    s = cmax
    scaled = [f / s for f in mats]
    if p == 1:
        obj = _ObjLinear(d)
    elif p == 2:
        obj = _ObjQuadratic(d)
    else:
        # general p through the spectral objective tau(|g|^p)
        obj = _ObjSpectral(
            d,
            lambda x: np.abs(x) ** p,
            lambda x: p * np.sign(x) * np.abs(x) ** (p - 1),
            lambda x: p * (p - 1) * np.maximum(np.abs(x), 1e-8) ** (p - 2),
        )
        if d > DENSE_DIM_MAX:
            raise ValueError(
                f"general p supported only for d <= {DENSE_DIM_MAX}")
    g, iters, mu = _barrier_solve(scaled, obj, d)
    g, viol = _certify(g, scaled)
    g_full = s * g
    return MajorantSolution(
        HermitianOp(g_full, qps),
        _norm_of(g_full, p, d),
        s * viol,
        iters,
        p,
        mu,
    )


def minimize_spectral(mats: list[np.ndarray], qps: QPS, phi, dphi, d2phi
                      ) -> tuple[np.ndarray, float, int]:
    """min tau(phi(g)) over g >= f_n.  Returns (g, value, iterations).

    Used by the Orlicz feasibility search; restricted to the dense-Hessian
    regime.  The returned value is evaluated at a certified feasible point,
    hence an upper bound on the true minimum.
    """
    if not mats:
        raise ValueError("need at least one constraint")
    d = qps.dim
    if d > DENSE_DIM_MAX + 12:
        raise ValueError("spectral objectives supported only at small d")
    obj = _ObjSpectral(d, phi, dphi, d2phi)
    g, iters, _ = _barrier_solve(mats, obj, d)
    g, _ = _certify(g, mats)
    val = float(np.mean(phi(np.linalg.eigvalsh(g))))
    return g, val, iters
