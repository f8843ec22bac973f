"""Subalgebras, conditional expectations, filtrations, and tensor lifts.

A subalgebra is described by a block decomposition: a list of pairwise
orthogonal projections summing to the identity, each carrying a mode.  A
``full`` block keeps the whole corner P M P; a ``scalar`` block keeps only
multiples of P.  Tensor lifts of scalar blocks carry a ``split`` marker so
the lifted expectation averages over the lifted factor and acts as the
identity on the other one (mode bookkeeping for E ⊗ id).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from ncmaxlab.qps import QPS, HermitianOp, Projection
from ncmaxlab.seqspaces import OperatorSequence

BLOCK_TOL = 1e-9      # orthogonality / partition-of-identity tolerance
CONTAINS_TOL = 1e-9   # fixed-point tolerance in the containment test
FULL, SCALAR = "full", "scalar"


@dataclass(frozen=True)
class Block:
    """One summand of a block decomposition.

    ``split`` is None for ordinary blocks.  For a lifted scalar block it is
    ``(side, d_left, d_right)`` where ``side`` names the tensor factor the
    original scalar block lived on; the expectation then averages that
    factor inside the corner and leaves the other factor untouched.
    """

    proj: Projection
    mode: str
    split: Optional[tuple] = None

    def __post_init__(self):
        if self.mode not in (FULL, SCALAR):
            raise ValueError(f"unknown block mode {self.mode!r}")
        if self.split is not None:
            side, dl, dr = self.split
            if side not in ("left", "right"):
                raise ValueError(f"bad split side {side!r}")
            if dl * dr != self.proj.qps.dim:
                raise ValueError("split dims do not factor the ambient dim")


class SubalgebraDescriptor:
    """A vN subalgebra of M_d given by orthogonal blocks with modes."""

    __slots__ = ("qps", "blocks")

    def __init__(self, blocks: Iterable[Block], qps: QPS):
        blocks = tuple(blocks)
        if not blocks:
            raise ValueError("descriptor needs at least one block")
        for b in blocks:
            if b.proj.qps != qps:
                raise ValueError("block projection lives in the wrong space")
        mats = [b.proj.mat for b in blocks]
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                if np.linalg.norm(mats[i] @ mats[j]) > BLOCK_TOL:
                    raise ValueError(f"blocks {i} and {j} are not orthogonal")
        total = sum(mats)
        if np.linalg.norm(total - np.eye(qps.dim)) > BLOCK_TOL:
            raise ValueError("block projections do not sum to the identity")
        for i, b in enumerate(blocks):
            if np.trace(b.proj.mat).real < 0.5:  # integer rank >= 1
                raise ValueError(f"block {i} has trace 0")
        self.qps = qps
        self.blocks = blocks

    # -- expectation ------------------------------------------------------

    def apply_raw(self, mat: np.ndarray) -> np.ndarray:
        """E on a raw (not necessarily Hermitian) matrix."""
        out = np.zeros_like(mat, dtype=complex)
        for b in self.blocks:
            p = b.proj.mat
            if b.mode == FULL:
                out += p @ mat @ p
            elif b.split is None:
                coeff = np.einsum("ij,ji->", p, mat) / np.trace(p)
                out += coeff * p
            else:
                side, dl, dr = b.split
                corner = (p @ mat @ p).reshape(dl, dr, dl, dr)
                if side == "left":
                    a = np.einsum("ijik->jk", corner) / (np.trace(p).real / dr)
                    out += p @ np.kron(np.eye(dl), a)
                else:
                    a = np.einsum("jiki->jk", corner) / (np.trace(p).real / dl)
                    out += np.kron(a, np.eye(dr)) @ p
        return out

    def expectation(self, f: HermitianOp) -> HermitianOp:
        if f.qps != self.qps:
            raise ValueError("operator and descriptor live in different spaces")
        return HermitianOp(self.apply_raw(f.mat), self.qps)

    # -- containment ------------------------------------------------------

    def spanning_set(self) -> list[np.ndarray]:
        """Matrices spanning the subalgebra (not orthonormalized)."""
        d = self.qps.dim
        out = []
        for b in self.blocks:
            if b.mode == FULL:
                w, v = np.linalg.eigh(b.proj.mat)
                basis = v[:, w > 0.5]
                for i in range(basis.shape[1]):
                    for j in range(basis.shape[1]):
                        out.append(np.outer(basis[:, i], basis[:, j].conj()))
            elif b.split is None:
                out.append(b.proj.mat.astype(complex))
            else:
                side, dl, dr = b.split
                small = dr if side == "left" else dl
                for k in range(small):
                    for l in range(small):
                        unit = np.zeros((small, small), dtype=complex)
                        unit[k, l] = 1.0
                        if side == "left":
                            out.append(b.proj.mat @ np.kron(np.eye(dl), unit))
                        else:
                            out.append(np.kron(unit, np.eye(dr)) @ b.proj.mat)
        return out

    # -- serialization ------------------------------------------------------

    def to_jsonable(self) -> dict:
        blocks = []
        for b in self.blocks:
            blocks.append({
                "mode": b.mode,
                "split": list(b.split) if b.split else None,
                "proj_re": b.proj.mat.real.tolist(),
                "proj_im": b.proj.mat.imag.tolist(),
            })
        return {"dim": self.qps.dim, "blocks": blocks}

    @classmethod
    def from_jsonable(cls, obj: dict) -> "SubalgebraDescriptor":
        qps = QPS(obj["dim"])
        blocks = []
        for raw in obj["blocks"]:
            mat = np.asarray(raw["proj_re"], dtype=float) \
                + 1j * np.asarray(raw["proj_im"], dtype=float)
            split = tuple(raw["split"]) if raw.get("split") else None
            blocks.append(Block(Projection(mat, qps), raw["mode"], split))
        return cls(blocks, qps)


def conditional_expectation(f: HermitianOp, a: SubalgebraDescriptor) -> HermitianOp:
    return a.expectation(f)


def contains(a: SubalgebraDescriptor, b: SubalgebraDescriptor,
             tol: float = CONTAINS_TOL) -> bool:
    """True iff the subalgebra of ``a`` is contained in that of ``b``.

    Tested exactly: E_b is the trace-orthogonal projection onto subalg(b),
    so containment holds iff E_b fixes a spanning set of subalg(a).
    """
    if a.qps != b.qps:
        raise ValueError("descriptors live in different spaces")
    for x in a.spanning_set():
        y = b.apply_raw(x)
        if np.linalg.norm(y - x) > tol * max(1.0, np.linalg.norm(x)):
            return False
    return True


class Filtration:
    """Increasing levels, coarsest first, ending at the full algebra."""

    __slots__ = ("levels", "qps")

    def __init__(self, levels: Iterable[SubalgebraDescriptor], *,
                 validate: bool = True):
        levels = tuple(levels)
        if not levels:
            raise ValueError("filtration needs at least one level")
        qps = levels[0].qps
        if any(lv.qps != qps for lv in levels):
            raise ValueError("levels live in different spaces")
        if validate:
            last = levels[-1]
            if (len(last.blocks) != 1 or last.blocks[0].mode != FULL
                    or np.linalg.norm(last.blocks[0].proj.mat
                                      - np.eye(qps.dim)) > BLOCK_TOL):
                raise ValueError("final level must be the full algebra")
            for k in range(len(levels) - 1):
                if not contains(levels[k], levels[k + 1]):
                    raise ValueError(f"levels {k} and {k + 1} are not nested")
        self.levels = levels
        self.qps = qps

    def __len__(self) -> int:
        return len(self.levels)

    def expectation(self, f: HermitianOp, n: int) -> HermitianOp:
        return self.levels[n].expectation(f)


def martingale(f: HermitianOp, filt: Filtration) -> OperatorSequence:
    """(E_1(f), ..., E_K(f)) with constant tail E_K(f)."""
    entries = [lv.expectation(f) for lv in filt.levels]
    return OperatorSequence(entries, tail=("constant", entries[-1]))


def tensor_lift(a: SubalgebraDescriptor, side: str,
                other_dim: int) -> SubalgebraDescriptor:
    """Descriptor of A ⊗ M_other (side=left) or M_other ⊗ A (side=right).

    The lifted expectation equals E_A ⊗ id (resp. id ⊗ E_A): full blocks
    become the pinching by P ⊗ I, scalar blocks keep averaging over the A
    factor only, recorded by the ``split`` marker.
    """
    if side not in ("left", "right"):
        raise ValueError(f"bad side {side!r}")
    d = a.qps.dim
    big = QPS(d * other_dim)
    eye_o = np.eye(other_dim)
    blocks = []
    for b in a.blocks:
        if side == "left":
            lifted = np.kron(b.proj.mat, eye_o)
            split = ("left", d, other_dim)
        else:
            lifted = np.kron(eye_o, b.proj.mat)
            split = ("right", other_dim, d)
        proj = Projection(lifted, big, _trusted=True)
        if b.mode == FULL:
            blocks.append(Block(proj, FULL))
        else:
            blocks.append(Block(proj, SCALAR, split))
    return SubalgebraDescriptor(blocks, big)


class TwoParamFiltration:
    """A pair of filtrations acting on the two factors of M_d1 ⊗ M_d2."""

    __slots__ = ("left", "right", "qps", "_lifted_left", "_lifted_right")

    def __init__(self, left: Filtration, right: Filtration):
        self.left = left
        self.right = right
        d1, d2 = left.qps.dim, right.qps.dim
        self.qps = QPS(d1 * d2)
        self._lifted_left = tuple(
            tensor_lift(lv, "left", d2) for lv in left.levels)
        self._lifted_right = tuple(
            tensor_lift(lv, "right", d1) for lv in right.levels)
        self._check_commutation()

    def _check_commutation(self):
        rng = np.random.default_rng(20260817)
        d = self.qps.dim
        probe = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        probe = probe + probe.conj().T
        scale = max(1.0, np.linalg.norm(probe))
        for la in self._lifted_left:
            for rb in self._lifted_right:
                lhs = la.apply_raw(rb.apply_raw(probe))
                rhs = rb.apply_raw(la.apply_raw(probe))
                if np.linalg.norm(lhs - rhs) > 1e-10 * scale:
                    raise ValueError("lifted expectations fail to commute")

    def lifted_left(self, n: int) -> SubalgebraDescriptor:
        return self._lifted_left[n]

    def lifted_right(self, m: int) -> SubalgebraDescriptor:
        return self._lifted_right[m]

    def joint_expectation(self, f: HermitianOp, n: int, m: int) -> HermitianOp:
        return self._lifted_left[n].expectation(
            self._lifted_right[m].expectation(f))

    def two_param_martingale(self, f: HermitianOp) -> OperatorSequence:
        """Row-major grid (f_{n,m})  with the corner entry as its tail."""
        entries = []
        for n in range(len(self.left.levels)):
            for m in range(len(self.right.levels)):
                entries.append(self.joint_expectation(f, n, m))
        shape = (len(self.left.levels), len(self.right.levels))
        return OperatorSequence(entries, tail=("grid2d", shape))


def filtration_to_jsonable(filt: Filtration) -> dict:
    return {"dim": filt.qps.dim,
            "levels": [lv.to_jsonable() for lv in filt.levels]}


def filtration_from_jsonable(obj: dict) -> Filtration:
    levels = [SubalgebraDescriptor.from_jsonable(lv) for lv in obj["levels"]]
    return Filtration(levels)
