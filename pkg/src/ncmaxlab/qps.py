"""Quantum probability spaces: (M_d, tau) with tau the normalized trace.

The wrapper types are deliberately thin.  A :class:`HermitianOp` is a
validated complex matrix plus a reference to its ambient space; all heavy
lifting happens in plain numpy on the ``.mat`` arrays.  Spectral data is
computed once per operator and cached, since nearly every downstream
operation (norms, functional calculus, spectral windows) consumes it.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

HERM_TOL = 1e-12   # admissible anti-hermitian contamination, relative to scale
PROJ_TOL = 1e-8    # spectral distance from {0,1} tolerated in a Projection
EIG_TOL = 1e-10    # endpoint tolerance for spectral windows
MEET_TOL = 1e-8    # width of the eigenvalue-2 window in the lattice meet


class QPS:
    """The algebra M_d of d x d complex matrices with tau = Tr/d."""

    __slots__ = ("dim",)

    def __init__(self, dim: int):
        dim = int(dim)
        if dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        self.dim = dim

    @property
    def trace_normalizer(self) -> float:
        return 1.0 / self.dim

    def identity(self) -> "Projection":
        return Projection(np.eye(self.dim, dtype=complex), self, _trusted=True)

    def zero(self) -> "HermitianOp":
        return HermitianOp(np.zeros((self.dim, self.dim), dtype=complex), self)

    def __eq__(self, other) -> bool:
        return isinstance(other, QPS) and other.dim == self.dim

    def __hash__(self) -> int:
        return hash(("QPS", self.dim))

    def __repr__(self) -> str:
        return f"QPS(dim={self.dim})"


class HermitianOp:
    """A self-adjoint element of M_d.

    The constructor symmetrizes its argument, ``(f + f*)/2``, and refuses
    inputs whose anti-hermitian part exceeds ``HERM_TOL`` relative to the
    operator scale, so downstream code can rely on ``mat`` being Hermitian.
    """

    __slots__ = ("mat", "qps", "_eig")

    def __init__(self, mat, qps: QPS):
        mat = np.asarray(mat, dtype=complex)
        if mat.shape != (qps.dim, qps.dim):
            raise ValueError(
                f"matrix shape {mat.shape} does not match QPS dim {qps.dim}"
            )
        sym = (mat + mat.conj().T) / 2.0
        skew_norm = np.linalg.norm(mat - sym)
        scale = max(1.0, np.linalg.norm(sym))
        if skew_norm > HERM_TOL * scale:
            raise ValueError(
                "matrix is not Hermitian: anti-hermitian part has Frobenius "
                f"norm {skew_norm:.3e} (tolerance {HERM_TOL:.0e} x scale)"
            )
        sym = (sym + sym.conj().T) / 2.0
        sym.setflags(write=False)
        self.mat = sym
        self.qps = qps
        self._eig = None

    # -- spectral cache -------------------------------------------------

    def eig(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues (ascending, real) and eigenvectors, cached."""
        if self._eig is None:
            w, v = np.linalg.eigh(self.mat)
            self._eig = (w, v)
        return self._eig

    def eigvals(self) -> np.ndarray:
        return self.eig()[0]

    # -- arithmetic ------------------------------------------------------

    def _like(self, mat: np.ndarray) -> "HermitianOp":
        return HermitianOp(mat, self.qps)

    def __add__(self, other: "HermitianOp") -> "HermitianOp":
        _check_same_space(self, other)
        return self._like(self.mat + other.mat)

    def __sub__(self, other: "HermitianOp") -> "HermitianOp":
        _check_same_space(self, other)
        return self._like(self.mat - other.mat)

    def __neg__(self) -> "HermitianOp":
        return self._like(-self.mat)

    def __mul__(self, c) -> "HermitianOp":
        c = float(c)
        return self._like(c * self.mat)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.qps.dim})"


class Projection(HermitianOp):
    """A Hermitian operator whose spectrum sits in {0, 1} within PROJ_TOL."""

    __slots__ = ()

    def __init__(self, mat, qps: QPS, *, _trusted: bool = False):
        super().__init__(mat, qps)
        if not _trusted:
            w = self.eigvals()
            off = np.minimum(np.abs(w), np.abs(w - 1.0))
            worst = float(off.max()) if off.size else 0.0
            if worst > PROJ_TOL:
                raise ValueError(
                    f"spectrum is {worst:.3e} away from {{0,1}} "
                    f"(tolerance {PROJ_TOL:.0e}); not a projection"
                )

    @classmethod
    def from_isometry(cls, v: np.ndarray, qps: QPS) -> "Projection":
        """Build V V* for a matrix V with orthonormal columns (no check)."""
        if v.shape[1] == 0:
            return cls(np.zeros((qps.dim, qps.dim), dtype=complex), qps,
                       _trusted=True)
        return cls(v @ v.conj().T, qps, _trusted=True)


def _check_same_space(f: HermitianOp, g: HermitianOp) -> None:
    if f.qps != g.qps:
        raise ValueError(f"operators live in different spaces: {f.qps} vs {g.qps}")


# ---------------------------------------------------------------------------
# operations


def trace(f: HermitianOp) -> float:
    """tau(f) = (1/d) Tr f."""
    return float(np.trace(f.mat).real) / f.qps.dim


def spectral_projection(
    f: HermitianOp,
    lo: float = -np.inf,
    hi: float = np.inf,
    *,
    closed_lo: bool = True,
    closed_hi: bool = True,
    eig_tol: float = EIG_TOL,
) -> Projection:
    """Projection onto the span of eigenvectors with eigenvalue in a window.

    Eigenvalues within ``eig_tol`` of a closed endpoint count as inside; for
    an open endpoint the dual convention applies (within ``eig_tol`` counts
    as outside), so the two flavors partition a tolerance band consistently.
    An empty selection yields the zero projection.
    """
    w, v = f.eig()
    if closed_lo:
        keep = w >= lo - eig_tol
    else:
        keep = w > lo + eig_tol
    if closed_hi:
        keep &= w <= hi + eig_tol
    else:
        keep &= w < hi - eig_tol
    return Projection.from_isometry(v[:, keep], f.qps)


def functional_calculus(f: HermitianOp, phi: Callable) -> HermitianOp:
    """Apply a scalar function to the spectrum, keeping the eigenvectors."""
    w, v = f.eig()
    with np.errstate(invalid="ignore", divide="ignore"):
        try:
            vals = np.asarray(phi(w), dtype=float)
            if vals.shape != w.shape:
                raise TypeError
        except (TypeError, ValueError):
            vals = np.array([float(phi(x)) for x in w])
    if not np.all(np.isfinite(vals)):
        bad = w[~np.isfinite(vals)]
        raise ValueError(
            f"scalar function is undefined on part of the spectrum: {bad}"
        )
    return HermitianOp((v * vals) @ v.conj().T, f.qps)


def meet(p: Projection, q: Projection, *, tol: float = MEET_TOL) -> Projection:
    """Projection onto range(P) ∩ range(Q).

    Computed as the spectral projection of P+Q onto eigenvalues within
    ``tol`` of 2 — one eigendecomposition, deterministic rank.
    """
    _check_same_space(p, q)
    w, v = np.linalg.eigh(p.mat + q.mat)
    return Projection.from_isometry(v[:, w >= 2.0 - tol], p.qps)


def complement(p: Projection) -> Projection:
    _i = np.eye(p.qps.dim, dtype=complex)
    return Projection(_i - p.mat, p.qps, _trusted=True)


def join(p: Projection, q: Projection) -> Projection:
    return complement(meet(complement(p), complement(q)))


def leq(f: HermitianOp, g: HermitianOp, tol: float = 1e-9) -> bool:
    """Operator-order predicate: min eigenvalue of g - f >= -tol."""
    _check_same_space(f, g)
    wmin = float(np.linalg.eigvalsh(g.mat - f.mat)[0])
    return wmin >= -tol
