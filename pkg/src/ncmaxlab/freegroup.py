"""Reduced words in the rank-2 free group and coefficientwise multipliers.

The combinatorial heart is the set Sigma of words whose a-exponents all
share one sign and whose b-exponents all share one sign.  On Sigma the word
length equals |n_a| + |n_b| where (n_a, n_b) are the signed exponent sums,
so the abelianization detects the length there — the mechanism that lets a
two-torus Poisson kernel reproduce the free Poisson multiplier e^{-t|w|}
coefficientwise.

Serialization: strings over {a, A, b, B} with optional run-length digits,
e.g. "a2B3" is a^2 b^-3; the empty word serializes as "e".
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

GENS = ("a", "b")


@dataclass(frozen=True)
class FreeWord:
    """Reduced word: alternating (generator, nonzero exponent) syllables."""

    syllables: tuple = ()

    def __post_init__(self):
        syl = tuple((g, int(e)) for g, e in self.syllables)
        for g, e in syl:
            if g not in GENS:
                raise ValueError(f"unknown generator {g!r}")
            if e == 0:
                raise ValueError("zero exponent in syllable")
        for (g1, _), (g2, _) in zip(syl, syl[1:]):
            if g1 == g2:
                raise ValueError("adjacent syllables share a generator")
        object.__setattr__(self, "syllables", syl)

    def __str__(self):
        if not self.syllables:
            return "e"
        parts = []
        for g, e in self.syllables:
            ch = g if e > 0 else g.upper()
            n = abs(e)
            parts.append(ch if n == 1 else f"{ch}{n}")
        return "".join(parts)

    def __repr__(self):
        return f"FreeWord({str(self)!r})"


IDENTITY = FreeWord(())

_TOKEN = re.compile(r"([aAbB])(\d*)")


def parse_word(s: str) -> FreeWord:
    s = s.strip()
    if s in ("", "e"):
        return IDENTITY
    pos = 0
    letters: list[tuple[str, int]] = []
    for m in _TOKEN.finditer(s):
        if m.start() != pos:
            raise ValueError(f"cannot parse word {s!r} at offset {pos}")
        pos = m.end()
        ch, digits = m.groups()
        n = int(digits) if digits else 1
        if n == 0:
            raise ValueError(f"zero exponent in {s!r}")
        g = ch.lower()
        e = n if ch.islower() else -n
        letters.append((g, e))
    if pos != len(s):
        raise ValueError(f"cannot parse word {s!r} at offset {pos}")
    out = IDENTITY
    for g, e in letters:
        out = multiply(out, FreeWord(((g, e),)))
    return out


def multiply(u: FreeWord, v: FreeWord) -> FreeWord:
    """Group law with full reduction (boundary merges cascade)."""
    out = list(u.syllables)
    for g, e in v.syllables:
        if out and out[-1][0] == g:
            s = out[-1][1] + e
            if s == 0:
                out.pop()
            else:
                out[-1] = (g, s)
        else:
            out.append((g, e))
    return FreeWord(tuple(out))


def inverse(w: FreeWord) -> FreeWord:
    return FreeWord(tuple((g, -e) for g, e in reversed(w.syllables)))


def length(w: FreeWord) -> int:
    return sum(abs(e) for _, e in w.syllables)


def quotient_counts(w: FreeWord) -> tuple[int, int]:
    """Signed exponent sums (n_a, n_b) — the image in Z^2."""
    na = sum(e for g, e in w.syllables if g == "a")
    nb = sum(e for g, e in w.syllables if g == "b")
    return na, nb


def in_sigma(w: FreeWord) -> bool:
    """No sign changes within either generator (vacuously true if absent)."""
    for gen in GENS:
        signs = {e > 0 for g, e in w.syllables if g == gen}
        if len(signs) > 1:
            return False
    return True


_LETTERS = (("a", 1), ("a", -1), ("b", 1), ("b", -1))


def enumerate_reduced(max_len: int):
    """Yield every reduced word of length <= max_len, identity included."""
    if max_len < 0:
        raise ValueError("max_len must be nonnegative")
    yield IDENTITY
    frontier = [IDENTITY]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            last = w.syllables[-1] if w.syllables else None
            for g, e in _LETTERS:
                if last is not None and last[0] == g and (last[1] > 0) != (e > 0):
                    continue  # appending the inverse letter would cancel
                nw = multiply(w, FreeWord(((g, e),)))
                nxt.append(nw)
                yield nw
        frontier = nxt


def sigma_sphere_count(n: int) -> int:
    """|Sigma ∩ {length = n}| in closed form.

    A Sigma word of length n is determined by a sign pattern for each
    generator present and a composition of n into alternating runs.  For
    n >= 1 counting compositions by first generator and number of blocks
    gives 4 + 8 (2^{n-1} - 1): four single-generator words g^{±n} plus, for
    each of the 2·4 choices of (starting generator, sign pair), one word
    per composition of n into >= 2 parts (2^{n-1} - 1 of them).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 1
    return 4 + 8 * (2 ** (n - 1) - 1)


def sigma_ball_count(n: int) -> int:
    return sum(sigma_sphere_count(k) for k in range(n + 1))


@dataclass
class SigmaReport:
    max_len: int
    total_words: int
    sigma_ball: dict = field(default_factory=dict)  # n -> |Sigma cap ball(n)|
    violations: list = field(default_factory=list)


def sigma_length_identity(max_len: int) -> SigmaReport:
    """Exhaustively confirm: length = |n_a| + |n_b| holds exactly on Sigma.

    Also asserts the one-sided inequality length >= |n_a| + |n_b| for every
    word, and tallies the Sigma ball growth per radius.  Any counterexample
    raises with the offending word.
    """
    if max_len > 12:
        raise ValueError("enumeration bound is max_len <= 12")
    counts = {n: 0 for n in range(max_len + 1)}
    total = 0
    for w in enumerate_reduced(max_len):
        total += 1
        na, nb = quotient_counts(w)
        lw = length(w)
        reduced_len = abs(na) + abs(nb)
        if lw < reduced_len:
            raise AssertionError(
                f"length {lw} < |n_a|+|n_b| = {reduced_len} for {w}")
        if (lw == reduced_len) != in_sigma(w):
            raise AssertionError(
                f"length identity disagrees with Sigma membership for {w}")
        if in_sigma(w):
            for n in range(lw, max_len + 1):
                counts[n] += 1
    return SigmaReport(max_len=max_len, total_words=total,
                       sigma_ball=counts, violations=[])


@dataclass(frozen=True)
class FreeElement:
    """Finitely supported coefficient map on the group."""

    coeffs: tuple  # sorted tuple of (FreeWord, complex), zeros pruned

    def __init__(self, coeffs):
        items = coeffs.items() if isinstance(coeffs, dict) else coeffs
        cleaned = {}
        for w, c in items:
            if not isinstance(w, FreeWord):
                raise TypeError(f"key {w!r} is not a FreeWord")
            c = complex(c)
            if c != 0:
                cleaned[w] = cleaned.get(w, 0) + c
        pruned = tuple(sorted(
            ((w, c) for w, c in cleaned.items() if c != 0),
            key=lambda wc: (length(wc[0]), str(wc[0]))))
        object.__setattr__(self, "coeffs", pruned)

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def coefficient(self, w: FreeWord) -> complex:
        for ww, c in self.coeffs:
            if ww == w:
                return c
        return 0j

    def trace(self) -> complex:
        """tau(f) = coefficient of the identity word."""
        return self.coefficient(IDENTITY)

    def __len__(self):
        return len(self.coeffs)


def free_poisson(f: FreeElement, t: float) -> FreeElement:
    """Coefficientwise multiplier e^{-t length(w)}."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return FreeElement({w: c * math.exp(-t * length(w))
                        for w, c in f.coeffs})


def theta_twist(f: FreeElement, theta: tuple) -> FreeElement:
    """Phase twist e^{2 pi i (n_a th1 + n_b th2)} per coefficient.

    Trace-preserving: the identity word has n_a = n_b = 0, so its
    coefficient is untouched — exactly, not just to rounding.
    """
    th1, th2 = theta
    out = {}
    for w, c in f.coeffs:
        na, nb = quotient_counts(w)
        out[w] = c * complex(math.cos(2 * math.pi * (na * th1 + nb * th2)),
                             math.sin(2 * math.pi * (na * th1 + nb * th2)))
    return FreeElement(out)


DIAGRAM_REL_TOL = 1e-14


@dataclass
class DiagramRow:
    word: str
    length: int
    n_a: int
    n_b: int
    in_sigma: bool
    mult_word: float    # e^{-t |w|}
    mult_torus: float   # e^{-t (|n_a| + |n_b|)}
    gap: float


def diagram_check(f: FreeElement, t: float) -> list[DiagramRow]:
    """Compare the free and torus Poisson multipliers on supp(f).

    On Sigma-supported words the two agree to 1e-14 relative; off Sigma the
    free multiplier is strictly smaller for t > 0 (the word is longer than
    its abelianized shadow).  A Sigma-supported mismatch is an error.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    rows = []
    for w, _ in f.coeffs:
        lw = length(w)
        na, nb = quotient_counts(w)
        m_word = math.exp(-t * lw)
        m_torus = math.exp(-t * (abs(na) + abs(nb)))
        sig = in_sigma(w)
        gap = m_torus - m_word
        if sig:
            if abs(gap) > DIAGRAM_REL_TOL * max(m_word, m_torus):
                raise AssertionError(
                    f"multiplier mismatch on Sigma word {w}: "
                    f"{m_word!r} vs {m_torus!r}")
        elif t > 0 and not m_word < m_torus:
            raise AssertionError(
                f"free multiplier not strictly smaller off Sigma for {w}")
        rows.append(DiagramRow(word=str(w), length=lw, n_a=na, n_b=nb,
                               in_sigma=sig, mult_word=m_word,
                               mult_torus=m_torus, gap=gap))
    return rows


def class_c_upper(f: FreeElement) -> float:
    """Crude upper bound for the split norm inf{||g||_1 + ||h||_{L log^2 L}}.

    Splits f along Sigma: the Sigma part is bounded in L1 by the coefficient
    l1 norm (each lambda_w is a unitary, norm one in every L_p); the
    remainder is bounded the same way, scaled by the L log^2 L norm of the
    identity — computed, not assumed, from the Luxemburg gauge.
    """
    if not f.coeffs:
        return 0.0
    from ncmaxlab.norms import OrliczFunction, orlicz_norm
    from ncmaxlab.qps import QPS, HermitianOp
    import numpy as np

    sigma_part = sum(abs(c) for w, c in f.coeffs if in_sigma(w))
    rest = sum(abs(c) for w, c in f.coeffs if not in_sigma(w))
    if rest == 0:
        return float(sigma_part)
    unit = orlicz_norm(HermitianOp(np.eye(1), QPS(1)),
                       OrliczFunction(alpha=2.0))
    return float(sigma_part + rest * unit)
