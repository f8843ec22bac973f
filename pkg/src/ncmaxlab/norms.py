"""L_p norms and Orlicz norms of the family Phi(t) = t(1+log+ t)^alpha."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ncmaxlab.qps import HermitianOp

BISECT_TOL = 1e-10     # absolute tolerance on the Luxemburg root
BISECT_MAX = 200       # bisection step budget before giving up
_DOUBLINGS = 64        # power-of-2 expansions allowed for the upper bracket


def log_plus(x):
    """log+ x = max(log x, 0), elementwise, with log+ 0 = 0."""
    return np.log(np.maximum(np.asarray(x, dtype=float), 1.0))


@dataclass(frozen=True)
class OrliczFunction:
    """A Young function, either from the log-power family or user supplied.

    With ``alpha`` set (and ``handle`` None) this is
    Phi(t) = t (1 + log+ t)^alpha; alpha = 0 gives Phi(t) = t, whose
    Luxemburg norm is the L1 norm.  A general ``handle`` must be convex,
    increasing, and vanish at 0; a sampled convexity check on a log grid
    runs at construction.
    """

    alpha: Optional[float] = None
    handle: Optional[Callable] = None

    def __post_init__(self):
        if (self.alpha is None) == (self.handle is None):
            raise ValueError("provide exactly one of alpha / handle")
        if self.alpha is not None and self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.handle is not None:
            self._sampled_check()

    def _sampled_check(self):
        ts = np.geomspace(1e-6, 1e6, 49)
        vals = np.array([float(self.handle(t)) for t in ts])
        if float(self.handle(0.0)) > 1e-12:
            raise ValueError("Phi(0) must be 0")
        if np.any(np.diff(vals) < -1e-12):
            raise ValueError("Phi must be increasing")
        # midpoint convexity on the sampled grid
        mids = (ts[:-1] + ts[1:]) / 2.0
        mvals = np.array([float(self.handle(t)) for t in mids])
        if np.any(mvals > (vals[:-1] + vals[1:]) / 2.0 + 1e-9 * (1 + np.abs(mvals))):
            raise ValueError("Phi fails a sampled convexity check")
        if vals[-1] < 1.0:
            raise ValueError("Phi must be unbounded (Phi(1e6) < 1)")

    def __call__(self, t):
        if self.alpha is not None:
            t = np.asarray(t, dtype=float)
            return t * (1.0 + log_plus(t)) ** self.alpha
        try:
            return np.asarray(self.handle(t), dtype=float)
        except (TypeError, ValueError):
            return np.array([float(self.handle(x)) for x in np.atleast_1d(t)])


def lp_norm(f: HermitianOp, p: float) -> float:
    """tau(|f|^p)^(1/p); for p = inf, the largest singular value."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    absw = np.abs(f.eigvals())
    if np.isinf(p):
        return float(absw.max()) if absw.size else 0.0
    return float(np.mean(absw ** p) ** (1.0 / p))


def orlicz_value(f: HermitianOp, phi: OrliczFunction) -> float:
    """tau(Phi(|f|)) evaluated through the spectrum."""
    return float(np.mean(phi(np.abs(f.eigvals()))))


def _gauge(absw: np.ndarray, phi: OrliczFunction, lam: float) -> float:
    return float(np.mean(phi(absw / lam)))


def orlicz_norm(f: HermitianOp, phi: OrliczFunction) -> float:
    """Luxemburg norm inf{lam >= 0 : tau Phi(|f|/lam) <= 1} by bisection.

    Bracket: lower end ||f||_1 (Phi(t) >= t for the log-power family makes
    the gauge >= 1 there), upper end ||f||_inf expanded by powers of 2 until
    the gauge drops to <= 1.  For the alpha family the expansion never
    actually triggers: t <= 1 gives Phi(t) = t, so the gauge at ||f||_inf is
    ||f||_1/||f||_inf <= 1 already.
    """
    absw = np.abs(f.eigvals())
    if absw.size == 0 or float(absw.max()) == 0.0:
        return 0.0
    lo = float(np.mean(absw))           # ||f||_1
    hi = float(absw.max())              # ||f||_inf
    if _gauge(absw, phi, lo) < 1.0:
        # can only happen for a general handle with Phi(t) < t somewhere
        for _ in range(_DOUBLINGS):
            lo /= 2.0
            if _gauge(absw, phi, lo) >= 1.0:
                break
        else:
            raise RuntimeError(
                f"no lower bracket: gauge({lo:.3e}) = "
                f"{_gauge(absw, phi, lo):.3e} still below 1"
            )
    expansions = 0
    while _gauge(absw, phi, hi) > 1.0:
        hi *= 2.0
        expansions += 1
        if expansions > _DOUBLINGS:
            raise RuntimeError(
                f"no upper bracket after {_DOUBLINGS} doublings: "
                f"gauge({hi:.3e}) = {_gauge(absw, phi, hi):.3e} still above 1"
            )
    for _ in range(BISECT_MAX):
        if hi - lo <= BISECT_TOL:
            return hi
        mid = (lo + hi) / 2.0
        if _gauge(absw, phi, mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    raise RuntimeError(
        f"bisection failed to converge in {BISECT_MAX} steps: "
        f"bracket [{lo:.17g}, {hi:.17g}], width {hi - lo:.3e}"
    )
