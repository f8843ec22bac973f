"""Unital trace-preserving Markov channels and their ergodic calculus.

A channel acts by a Kraus family, T(f) = sum_i K_i f K_i*.  Unitality and
trace preservation are enforced at construction; an optional symmetry flag
additionally verifies self-adjointness with respect to the trace pairing on
a randomized Hermitian pair.

The fixed-point projection is obtained by composing Cesaro averages at
doubling lengths: g_{k+1} = M_{2^k}(T)(g_k).  Composition is essential —
a plain Cesaro mean M_N(T)(f) converges only at rate 1/N, while the
composed sequence contracts the complement of the fixed-point space
geometrically in k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ncmaxlab.qps import QPS, HermitianOp

KRAUS_TOL = 1e-10
SYMMETRY_TOL = 1e-9
FIXED_POINT_TOL = 1e-9      # L2 distance between consecutive doublings
FIXED_POINT_POST = 1e-7     # ||T(F) - F||_2 on the reported fixed point
MAX_DOUBLINGS = 24


def _l2(mat: np.ndarray, d: int) -> float:
    return float(np.sqrt(max(np.vdot(mat, mat).real, 0.0) / d))


class ConvergenceFailure(RuntimeError):
    def __init__(self, doublings: int, residual: float):
        super().__init__(
            f"ergodic averages did not stabilize after {doublings} "
            f"doublings (last L2 step {residual:.3e})")
        self.doublings = doublings
        self.residual = residual


@dataclass(frozen=True)
class MarkovChannel:
    """Kraus-presented channel, validated unital and trace-preserving."""

    kraus: tuple
    qps: QPS
    symmetric: bool = False

    def __init__(self, kraus, qps: QPS, symmetric: bool = False):
        mats = tuple(np.asarray(k, dtype=complex) for k in kraus)
        if not mats:
            raise ValueError("need at least one Kraus operator")
        d = qps.dim
        for k in mats:
            if k.shape != (d, d):
                raise ValueError(f"Kraus operator shape {k.shape} != ({d},{d})")
        eye = np.eye(d)
        unital = sum(k @ k.conj().T for k in mats)
        tp = sum(k.conj().T @ k for k in mats)
        if np.abs(unital - eye).max() > KRAUS_TOL:
            raise ValueError(
                f"channel is not unital (residual "
                f"{np.abs(unital - eye).max():.3e})")
        if np.abs(tp - eye).max() > KRAUS_TOL:
            raise ValueError(
                f"channel is not trace-preserving (residual "
                f"{np.abs(tp - eye).max():.3e})")
        object.__setattr__(self, "kraus", mats)
        object.__setattr__(self, "qps", qps)
        object.__setattr__(self, "symmetric", symmetric)
        if symmetric:
            rng = np.random.default_rng(0xC0FFEE ^ d)
            fs = []
            for _ in range(2):
                a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
                fs.append((a + a.conj().T) / 2.0)
            f, g = fs
            lhs = np.trace(f @ self._apply_mat(g)) / d
            rhs = np.trace(self._apply_mat(f) @ g) / d
            scale = max(1.0, abs(lhs), abs(rhs))
            if abs(lhs - rhs) > SYMMETRY_TOL * scale:
                raise ValueError(
                    f"channel declared symmetric but "
                    f"tau(f T(g)) - tau(T(f) g) = {abs(lhs - rhs):.3e}")

    def _apply_mat(self, mat: np.ndarray) -> np.ndarray:
        out = np.zeros_like(mat, dtype=complex)
        for k in self.kraus:
            out += k @ mat @ k.conj().T
        return out

    def apply(self, f: HermitianOp) -> HermitianOp:
        if f.qps != self.qps:
            raise ValueError("operator lives on a different space")
        return HermitianOp(self._apply_mat(f.mat), self.qps)

    def __repr__(self):
        return (f"MarkovChannel(dim={self.qps.dim}, "
                f"n_kraus={len(self.kraus)}, symmetric={self.symmetric})")


def ergodic_mean(chan: MarkovChannel, f: HermitianOp, n: int) -> HermitianOp:
    """M_n(T)(f) = (1/n) * (f + T f + ... + T^{n-1} f)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    acc = np.array(f.mat, dtype=complex)
    cur = np.array(f.mat, dtype=complex)
    for _ in range(n - 1):
        cur = chan._apply_mat(cur)
        acc += cur
    return HermitianOp(acc / n, chan.qps)


def fixed_point_projection(chan: MarkovChannel, f: HermitianOp,
                           max_doublings: int = MAX_DOUBLINGS) -> HermitianOp:
    """Project f onto the fixed-point subalgebra of the channel.

    Iterates g <- M_{2^k}(T)(g) for k = 1, 2, ... until consecutive
    iterates differ by less than 1e-9 in L2.  The Cesaro matrices are
    power-doubled on the channel's d^2 x d^2 matrix representation
    (M_{2^{k+1}} = (1 + T^{2^k}) M_{2^k} / 2), so a deep doubling costs two
    matrix products instead of 2^k channel applications.  Errors with the
    residual if max_doublings compositions do not stabilize.  The result is
    checked to be fixed by the channel within 1e-7 — through the Kraus
    action directly, independent of the iteration route — and to preserve
    the trace of f.
    """
    qps = chan.qps
    d = qps.dim
    super_t = np.zeros((d * d, d * d), dtype=complex)
    for k in chan.kraus:
        super_t += np.kron(k, k.conj())   # row-major vec(K X K*) convention
    vec = np.array(f.mat, dtype=complex).reshape(-1)
    avg = (np.eye(d * d, dtype=complex) + super_t) / 2.0
    power = super_t
    converged = False
    last_step = np.inf
    for _k in range(1, max_doublings + 1):
        new = avg @ vec
        last_step = _l2((new - vec).reshape(d, d), d)
        vec = new
        if last_step < FIXED_POINT_TOL:
            converged = True
            break
        power = power @ power
        avg = (avg + power @ avg) / 2.0
    if not converged:
        raise ConvergenceFailure(max_doublings, last_step)
    g = vec.reshape(d, d)
    out = HermitianOp(g, qps)
    fixed_resid = _l2(chan._apply_mat(out.mat) - out.mat, d)
    if fixed_resid > FIXED_POINT_POST:
        raise ConvergenceFailure(max_doublings, fixed_resid)
    tr_in = float(np.trace(f.mat).real) / d
    tr_out = float(np.trace(out.mat).real) / d
    if abs(tr_in - tr_out) > 1e-10 * max(1.0, abs(tr_in)):
        raise RuntimeError(
            f"fixed-point projection moved the trace: {tr_in} -> {tr_out}")
    return out


def subordination_weight(s: float, v: np.ndarray) -> np.ndarray:
    """phi_s(v) = s * exp(-s^2/(4v)) * v^{-3/2} / (2 sqrt(pi)).

    The classical subordinator density tying the Poisson semigroup to the
    heat semigroup: integral over v in (0, inf) equals 1 for every s > 0.
    """
    if s <= 0:
        raise ValueError(f"s must be positive, got {s}")
    v = np.asarray(v, dtype=float)
    if np.any(v <= 0):
        raise ValueError("subordination weight needs v > 0")
    return s / (2.0 * np.sqrt(np.pi)) * np.exp(-s * s / (4.0 * v)) * v ** -1.5
