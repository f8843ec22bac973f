"""Majorant certificates for maximal functions of expectation families.

A family here is a finite list of positive unital maps (conditional
expectations along a filtration, or ergodic means of a Markov channel)
together with its limit map F.  The certificate produces one positive g
dominating every member image of f, and records ||g||_1 and ||F(g)||_1;
since the limit map preserves the trace and g >= 0, the two agree and both
control the maximal function of the family at f.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ncmaxlab.channels import MarkovChannel, ergodic_mean, \
    fixed_point_projection
from ncmaxlab.cuculescu import BoundViolation
from ncmaxlab.filtration import Filtration, SubalgebraDescriptor, \
    conditional_expectation
from ncmaxlab.norms import OrliczFunction, lp_norm, orlicz_norm
from ncmaxlab.qps import HermitianOp, leq
from ncmaxlab.seqspaces import OperatorSequence, sup_norm_positive

DOMINATION_TOL = 1e-7
NORM_SLACK = 1e-8


@dataclass(frozen=True)
class MaximalFamily:
    """Maps f -> B_m(f) plus the computable limit map F."""

    maps: tuple
    limit: Callable[[HermitianOp], HermitianOp]
    label: str = "family"


def expectation_family(filt: Filtration | Sequence[SubalgebraDescriptor],
                       ) -> MaximalFamily:
    """Conditional expectations along the listed levels; F is the coarsest
    listed one applied last-to-first order convention: the limit of E_n as
    n runs through the list is the expectation onto the final level."""
    levels = list(filt.levels) if isinstance(filt, Filtration) else list(filt)
    if not levels:
        raise ValueError("need at least one level")
    maps = tuple(
        (lambda f, a=a: conditional_expectation(f, a)) for a in levels)
    final = levels[-1]
    return MaximalFamily(
        maps=maps,
        limit=lambda f: conditional_expectation(f, final),
        label="expectations")


def ergodic_family(chan: MarkovChannel, ns: Sequence[int]) -> MaximalFamily:
    """Cesaro means M_n(T) for n in ns; F projects onto the fixed points."""
    ns = [int(n) for n in ns]
    if not ns or any(n < 1 for n in ns):
        raise ValueError("ns must be positive integers")
    maps = tuple((lambda f, n=n: ergodic_mean(chan, f, n)) for n in ns)
    return MaximalFamily(
        maps=maps,
        limit=lambda f: fixed_point_projection(chan, f),
        label="ergodic_means")


@dataclass
class JmzCertificate:
    g: HermitianOp
    bound: float
    majorant_norm: float       # ||g||_1
    F_of_g_norm: float         # ||F(g)||_1
    phi_norm: float            # ||f||_Phi for the requested Orlicz gauge
    phi_ratio: float           # majorant_norm / phi_norm


def composition_certificate(f: HermitianOp, family: MaximalFamily,
                            phi: OrliczFunction) -> JmzCertificate:
    """One-g certificate: g >= B_m(f) for every member, bound = ||F(g)||_1.

    Raises BoundViolation if the solver's g fails to dominate a member
    image beyond 1e-7, or if ||F(g)||_1 exceeds ||g||_1 + 1e-8 (the limit
    map is a trace-preserving positive map, so equality is expected).
    """
    if float(f.eigvals()[0]) < -1e-10:
        raise ValueError("certificate requires positive f")
    images = [m(f) for m in family.maps]
    sol = sup_norm_positive(OperatorSequence(images), 1)
    g = sol.g
    for i, im in enumerate(images):
        if not leq(im, g, tol=DOMINATION_TOL):
            raise BoundViolation(
                f"majorant fails to dominate member {i} of {family.label}")
    majorant_norm = lp_norm(g, 1)
    fg = family.limit(g)
    f_norm = lp_norm(fg, 1)
    if f_norm > majorant_norm + NORM_SLACK:
        raise BoundViolation(
            f"||F(g)||_1 = {f_norm:.12e} > ||g||_1 = {majorant_norm:.12e}")
    phi_norm = orlicz_norm(f, phi)
    return JmzCertificate(
        g=g, bound=f_norm, majorant_norm=majorant_norm,
        F_of_g_norm=f_norm, phi_norm=phi_norm,
        phi_ratio=majorant_norm / phi_norm if phi_norm > 0 else 0.0)


@dataclass
class CommutativeOracle:
    maximal: np.ndarray        # pointwise sup over all level pairs
    tail: np.ndarray           # pointwise min over corner cuts of corner sup
    corner_sups: dict          # (N, M) -> flat array of the corner sup


def _dyadic_mean(x: np.ndarray, level: int, axis: int) -> np.ndarray:
    """Average x over 2^level equal blocks along the axis, then broadcast
    back to full shape."""
    n = x.shape[axis]
    blocks = 2 ** level
    if n % blocks:
        raise ValueError(f"axis of length {n} not divisible by {blocks}")
    b = n // blocks
    if axis == 0:
        m = x.reshape(blocks, b, x.shape[1]).mean(axis=1)
        return np.repeat(m, b, axis=0)
    m = x.reshape(x.shape[0], blocks, b).mean(axis=2)
    return np.repeat(m, b, axis=1)


def two_param_commutative_oracle(values: np.ndarray, shape: tuple,
                                 depths: tuple | None = None,
                                 ) -> CommutativeOracle:
    """Brute-force two-parameter maximal data for a diagonal density.

    values is a flat row-major d1 x d2 array of nonnegative reals; level n
    on the left averages over d1/2^n-sized dyadic blocks of rows (n = 0 is
    the full average), and symmetrically on the right.  With full depths
    the filtration exhausts, so the tail is exactly the input.
    """
    d1, d2 = shape
    x = np.asarray(values, dtype=float).reshape(d1, d2)
    if np.any(x < 0):
        raise ValueError("oracle expects nonnegative values")
    full1, full2 = int(np.log2(d1)), int(np.log2(d2))
    if 2 ** full1 != d1 or 2 ** full2 != d2:
        raise ValueError(f"shape {shape} must be powers of two")
    l1, l2 = depths if depths is not None else (full1, full2)
    if l1 > full1 or l2 > full2:
        raise ValueError("depth exceeds available dyadic levels")

    left = [_dyadic_mean(x, n, axis=0) for n in range(l1 + 1)]
    joint = [[_dyadic_mean(ln, m, axis=1) for m in range(l2 + 1)]
             for ln in left]
    maximal = np.maximum.reduce([j for row in joint for j in row])

    sups: dict[tuple, np.ndarray] = {}
    for n in range(l1, -1, -1):
        for m in range(l2, -1, -1):
            s = joint[n][m]
            if n + 1 <= l1:
                s = np.maximum(s, sups[(n + 1, m)])
            if m + 1 <= l2:
                s = np.maximum(s, sups[(n, m + 1)])
            sups[(n, m)] = s
    tail = np.minimum.reduce(list(sups.values()))

    return CommutativeOracle(
        maximal=maximal.reshape(-1),
        tail=tail.reshape(-1),
        corner_sups={k: v.reshape(-1) for k, v in sups.items()})
