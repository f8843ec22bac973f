"""Deterministic instance generation.

Streams are counter-based: instance i of a run draws from
Philox(key=[seed, i]), so corpora are reproducible bit-for-bit across
platforms and instances can be regenerated individually.  All random
ingredients live here: spectra, Haar unitaries, refining filtrations,
bistochastic channels, and Sigma-supported group elements.
"""

from __future__ import annotations

import numpy as np

from ncmaxlab.channels import MarkovChannel
from ncmaxlab.filtration import FULL, SCALAR, Block, Filtration, \
    SubalgebraDescriptor, TwoParamFiltration
from ncmaxlab.freegroup import FreeElement, FreeWord
from ncmaxlab.qps import QPS, HermitianOp, Projection

LOG_SPEC_LO = -2.0
LOG_SPEC_HI = 12.0


def stream(seed: int, index: int) -> np.random.Generator:
    """The per-instance PRNG: Philox keyed by (seed, index)."""
    key = np.array([seed % 2 ** 64, index % 2 ** 64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def haar_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    phases = diag / np.abs(diag)
    return q * phases


def random_positive(rng: np.random.Generator, qps: QPS,
                    log_lo: float = LOG_SPEC_LO,
                    log_hi: float = LOG_SPEC_HI) -> HermitianOp:
    """Dense positive operator: log-uniform spectrum, Haar eigenbasis."""
    d = qps.dim
    w = np.exp(rng.uniform(log_lo, log_hi, size=d))
    u = haar_unitary(rng, d)
    return HermitianOp((u * w) @ u.conj().T, qps)


def random_diagonal(rng: np.random.Generator, d: int,
                    log_lo: float = LOG_SPEC_LO,
                    log_hi: float = LOG_SPEC_HI) -> np.ndarray:
    return np.exp(rng.uniform(log_lo, log_hi, size=d))


def _subset_projection(idx, d: int, basis: np.ndarray | None) -> Projection:
    qps = QPS(d)
    if basis is None:
        mat = np.zeros((d, d))
        mat[idx, idx] = 1.0
        return Projection(mat, qps, _trusted=True)
    v = basis[:, idx]
    return Projection.from_isometry(v, qps)


def _partition_chain(rng: np.random.Generator, d: int, depth: int,
                     order: np.ndarray) -> list[list[np.ndarray]]:
    """Refining chain of partitions of range(d) into contiguous runs of a
    fixed ordering; chain[0] is the single-part partition."""
    cuts: set[int] = set()
    chain = [[order.copy()]]
    for _ in range(depth - 1):
        free = [c for c in range(1, d) if c not in cuts]
        if free:
            take = min(len(free), max(1, int(rng.integers(1, 3))))
            chosen = rng.choice(len(free), size=take, replace=False)
            cuts.update(free[int(i)] for i in chosen)
        marks = sorted(cuts)
        parts = []
        prev = 0
        for c in marks + [d]:
            parts.append(order[prev:c])
            prev = c
        chain.append(parts)
    return chain


def random_scalar_filtration(rng: np.random.Generator, qps: QPS,
                             depth: int, conjugate: bool = True,
                             ) -> Filtration:
    """Refining scalar-block levels topped by the full algebra.

    Levels 0..depth-2 carry scalar blocks over a refining partition chain
    (random recursive splitting of a random ordering of the basis);
    the final level is the whole algebra.  With conjugate=True all blocks
    are rotated by one Haar unitary so nothing is diagonal in the standard
    basis.
    """
    d = qps.dim
    basis = haar_unitary(rng, d) if conjugate else None
    order = rng.permutation(d)
    n_scalar = max(depth - 1, 1)
    chain = _partition_chain(rng, d, n_scalar, order)
    levels = []
    for parts in chain:
        blocks = [Block(_subset_projection(np.sort(p), d, basis), SCALAR)
                  for p in parts if len(p)]
        levels.append(SubalgebraDescriptor(blocks, qps))
    levels.append(SubalgebraDescriptor(
        [Block(qps.identity(), FULL)], qps))
    return Filtration(levels, validate=False)


def dyadic_scalar_filtration(qps: QPS, depth: int | None = None,
                             basis: np.ndarray | None = None) -> Filtration:
    """The canonical dyadic chain: halves, quarters, ..., singletons, full.

    Level k (k = 0..K-1) has 2^k scalar blocks of size d / 2^k; the last
    scalar level reaches singletons when depth is omitted and d is a power
    of two.
    """
    d = qps.dim
    full_depth = int(np.log2(d))
    if 2 ** full_depth != d:
        raise ValueError(f"dimension {d} is not a power of two")
    k_max = full_depth if depth is None else min(depth, full_depth)
    levels = []
    for k in range(k_max + 1):
        size = d >> k
        blocks = [Block(_subset_projection(
            np.arange(i * size, (i + 1) * size), d, basis), SCALAR)
            for i in range(2 ** k)]
        levels.append(SubalgebraDescriptor(blocks, qps))
    levels.append(SubalgebraDescriptor([Block(qps.identity(), FULL)], qps))
    return Filtration(levels, validate=False)


def random_two_param(rng: np.random.Generator, d1: int, d2: int,
                     depth1: int, depth2: int,
                     conjugate: bool = False) -> TwoParamFiltration:
    q1, q2 = QPS(d1), QPS(d2)
    f1 = random_scalar_filtration(rng, q1, depth1, conjugate=conjugate)
    f2 = random_scalar_filtration(rng, q2, depth2, conjugate=conjugate)
    return TwoParamFiltration(f1, f2)


def random_bistochastic(rng: np.random.Generator, qps: QPS,
                        n_unitaries: int = 3,
                        symmetric: bool = True) -> MarkovChannel:
    """Mixture of unitary conjugations; symmetric variants pair U with U*."""
    d = qps.dim
    probs = rng.dirichlet(np.ones(n_unitaries))
    kraus = []
    for i in range(n_unitaries):
        u = haar_unitary(rng, d)
        if symmetric:
            kraus.append(np.sqrt(probs[i] / 2.0) * u)
            kraus.append(np.sqrt(probs[i] / 2.0) * u.conj().T)
        else:
            kraus.append(np.sqrt(probs[i]) * u)
    return MarkovChannel(kraus, qps, symmetric=symmetric)


def random_pinching(rng: np.random.Generator, qps: QPS,
                    n_blocks: int) -> SubalgebraDescriptor:
    """Block-diagonal (full-mode) subalgebra in a Haar-random basis."""
    d = qps.dim
    basis = haar_unitary(rng, d)
    sizes = np.full(n_blocks, d // n_blocks)
    sizes[:d % n_blocks] += 1
    blocks = []
    start = 0
    for s in sizes:
        idx = np.arange(start, start + s)
        blocks.append(Block(_subset_projection(idx, d, basis), FULL))
        start += s
    return SubalgebraDescriptor(blocks, qps)


def random_sigma_word(rng: np.random.Generator, max_len: int) -> FreeWord:
    """Uniform-ish Sigma word: per-generator signs fixed up front."""
    target = int(rng.integers(0, max_len + 1))
    if target == 0:
        return FreeWord(())
    sign = {"a": 1 if rng.random() < 0.5 else -1,
            "b": 1 if rng.random() < 0.5 else -1}
    gen = "a" if rng.random() < 0.5 else "b"
    syllables = []
    remaining = target
    while remaining > 0:
        e = int(rng.integers(1, remaining + 1))
        syllables.append((gen, sign[gen] * e))
        remaining -= e
        gen = "b" if gen == "a" else "a"
    return FreeWord(tuple(syllables))


def random_sigma_element(rng: np.random.Generator, max_len: int,
                         n_words: int) -> FreeElement:
    coeffs: dict[FreeWord, complex] = {}
    while len(coeffs) < n_words:
        w = random_sigma_word(rng, max_len)
        c = complex(rng.standard_normal(), rng.standard_normal())
        coeffs[w] = coeffs.get(w, 0) + c
    return FreeElement(coeffs)
