"""Desk-scale numerical laboratory for maximal inequalities on (M_d, tau).

The ambient object everywhere is the matrix algebra M_d equipped with the
normalized trace tau = Tr/d.  Modules build on each other roughly in the
order: qps -> norms -> filtration / channels -> majorant / seqspaces ->
cuculescu -> strongmax -> jmz; freegroup is independent combinatorics; the
harness subpackage drives reproducible experiment corpora from the CLI.
"""

from ncmaxlab.qps import (
    QPS,
    HermitianOp,
    Projection,
    trace,
    spectral_projection,
    functional_calculus,
    meet,
    join,
    complement,
    leq,
)
from ncmaxlab.norms import OrliczFunction, lp_norm, orlicz_value, orlicz_norm

__all__ = [
    "QPS",
    "HermitianOp",
    "Projection",
    "trace",
    "spectral_projection",
    "functional_calculus",
    "meet",
    "join",
    "complement",
    "leq",
    "OrliczFunction",
    "lp_norm",
    "orlicz_value",
    "orlicz_norm",
]

__version__ = "0.1.0"
