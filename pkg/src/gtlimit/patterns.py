"""C-type and B-type Gelfand-Tsetlin patterns for sp_2n and o_2n+1.

A pattern of rank n consists of rows ``lam[k-1] = (lambda_k1, ..., lambda_kk)`` and
``lamp[k-1] = (lambda'_k1, ..., lambda'_kk)`` for k = 1..n (top row ``lam[n-1]`` is the
highest weight); B-type patterns also carry a flag ``sigma[k-1]`` in {0, 1} per level.
All entries are non-positive; for B they are all integers or all half-integers.

The interlacing conditions at level k are

    0 >= l'_k1 >= l_k1 >= l'_k2 >= l_k2 >= ... >= l'_kk >= l_kk
    0 >= l'_k1 >= l_{k-1,1} >= l'_k2 >= ... >= l_{k-1,k-1} >= l'_kk

and, for integral B patterns, ``sigma_k = 1`` forces ``l'_k1 <= -1``.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

from .liealg import AlgebraKind, InvalidWeight, fmt_weight, validate_hw

HALF = Fraction(1, 2)


class InvalidPattern(ValueError):
    pass


@dataclass(frozen=True)
class Pattern:
    family: str  # "C" or "B"
    lam: tuple  # lam[k-1] = row lambda_k (k entries)
    lamp: tuple  # lamp[k-1] = row lambda'_k
    sigma: tuple | None = None  # B only: sigma[k-1]

    @property
    def rank(self) -> int:
        return len(self.lam)

    @property
    def top(self) -> tuple:
        return self.lam[-1]

    def level(self, k: int) -> tuple:
        """``(lambda_k, lambda'_k, lambda_{k-1}, sigma_k)`` for level k (lambda_0 = ())."""
        below = self.lam[k - 2] if k >= 2 else ()
        sg = self.sigma[k - 1] if self.sigma is not None else None
        return self.lam[k - 1], self.lamp[k - 1], below, sg

    def to_json(self) -> dict:
        rows = []
        for k in range(self.rank, 0, -1):
            rows.append([str(x) for x in self.lam[k - 1]])
            rows.append([str(x) for x in self.lamp[k - 1]])
        out = {"type": self.family, "rows": rows}
        if self.sigma is not None:
            out["sigma"] = [self.sigma[k - 1] for k in range(self.rank, 0, -1)]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Pattern":
        rows = [tuple(Fraction(x) for x in r) for r in obj["rows"]]
        n = len(rows) // 2
        lam = tuple(rows[2 * (n - k)] for k in range(1, n + 1))
        lamp = tuple(rows[2 * (n - k) + 1] for k in range(1, n + 1))
        sigma = None
        if obj["type"] == "B":
            sg = obj["sigma"]
            sigma = tuple(sg[n - k] for k in range(1, n + 1))
        p = cls(obj["type"], lam, lamp, sigma)
        validate_pattern(p)
        return p

    def __str__(self) -> str:
        parts = []
        for k in range(self.rank, 0, -1):
            lk, lp, _, sg = self.level(k)
            s = f"{fmt_weight(lk)} | {fmt_weight(lp)}"
            if sg is not None:
                s = f"s={sg} " + s
            parts.append(s)
        return " ; ".join(parts)


def _is_int(x: Fraction) -> bool:
    return Fraction(x).denominator == 1


def pattern_violations(p: Pattern) -> list[str]:
    """Human-readable list of violated conditions (empty for a valid pattern)."""
    bad = []
    if p.family not in ("C", "B"):
        return [f"unknown family {p.family!r}"]
    n = p.rank
    if len(p.lamp) != n or any(len(p.lam[k - 1]) != k or len(p.lamp[k - 1]) != k for k in range(1, n + 1)):
        return ["row lengths do not match the pattern shape"]
    entries = [x for r in p.lam + p.lamp for x in r]
    if any(x > 0 for x in entries):
        bad.append("positive entry")
    if p.family == "C":
        if not all(_is_int(x) for x in entries):
            bad.append("C pattern entries must be integers")
        if p.sigma is not None:
            bad.append("C patterns carry no sigma")
    else:
        integral = {_is_int(x) for x in entries}
        halfint = all((2 * Fraction(x)).denominator == 1 for x in entries)
        if len(integral) > 1 or not halfint:
            bad.append("B pattern entries must be all integers or all half-integers")
        if p.sigma is None or len(p.sigma) != n or any(s not in (0, 1) for s in p.sigma):
            bad.append("B pattern needs sigma in {0,1} per level")
    for k in range(1, n + 1):
        lk, lp, below, sg = p.level(k)
        chain = [Fraction(0)]
        for i in range(k):
            chain += [lp[i], lk[i]]
        if any(a < b for a, b in zip(chain, chain[1:])):
            bad.append(f"level {k}: lambda'_k does not interlace lambda_k")
        if k >= 2:
            chain = [Fraction(0)]
            for i in range(k - 1):
                chain += [lp[i], below[i]]
            chain.append(lp[k - 1])
            if any(a < b for a, b in zip(chain, chain[1:])):
                bad.append(f"level {k}: lambda'_k does not interlace lambda_(k-1)")
        if p.family == "B" and sg == 1 and _is_int(lk[0]) and lp[0] > -1:
            bad.append(f"level {k}: sigma=1 needs lambda'_k1 <= -1 (integral case)")
    return bad


def validate_pattern(p: Pattern) -> Pattern:
    bad = pattern_violations(p)
    if bad:
        raise InvalidPattern("; ".join(bad))
    return p


def _range_down(hi: Fraction, lo: Fraction) -> list[Fraction]:
    """hi, hi-1, ..., >= lo (same residue class as hi)."""
    out = []
    x = hi
    while x >= lo:
        out.append(x)
        x -= 1
    return out


def _top_bound(x: Fraction) -> Fraction:
    """Largest admissible entry (0 or -1/2) in the residue class of x."""
    return Fraction(0) if _is_int(x) else -HALF


def primed_rows(lam: Sequence[Fraction], mu: Sequence[Fraction]) -> list[tuple]:
    """All rows lambda' between lambda (k entries) and mu (k-1 entries), lexicographically descending."""
    k = len(lam)
    ranges = []
    for i in range(k):
        hi = _top_bound(lam[i]) if i == 0 else min(lam[i - 1], mu[i - 1])
        lo = max(lam[i], mu[i]) if i < k - 1 else lam[i]
        ranges.append(_range_down(hi, lo))
    return list(product(*ranges))


def lower_rows(lamp: Sequence[Fraction]) -> list[tuple]:
    """All rows mu (k-1 entries) with lambda'_i >= mu_i >= lambda'_{i+1}."""
    k = len(lamp)
    return list(product(*[_range_down(lamp[i], lamp[i + 1]) for i in range(k - 1)]))


def level_labels(family: str, lam: Sequence, mu: Sequence) -> list[tuple]:
    """``(lambda', sigma)`` pairs allowed between lambda and mu (sigma None for C)."""
    lam = tuple(Fraction(x) for x in lam)
    mu = tuple(Fraction(x) for x in mu)
    out = []
    for row in primed_rows(lam, mu):
        if family == "C":
            out.append((row, None))
        else:
            for s in (0, 1):
                if s == 1 and _is_int(lam[0]) and row[0] > -1:
                    continue
                out.append((row, s))
    return out


def _check_family_hw(family: str, hw) -> tuple:
    kind = AlgebraKind(family, len(tuple(hw)) if not isinstance(hw, str) else len(hw.split(",")))
    return validate_hw(kind, hw)


def _enumerate(family: str, hw) -> Iterator[Pattern]:
    hw = _check_family_hw(family, hw)
    n = len(hw)

    # choose lambda'_k and sigma_k, then lambda_{k-1}, level by level downward
    def gen(k, row):
        """Yield lists of (lam_k, lamp_k, sigma_k) from level k downward."""
        for lp in _primed_all(row):
            sigmas = [None] if family == "C" else [s for s in (0, 1)
                                                   if not (s == 1 and _is_int(row[0]) and lp[0] > -1)]
            for sg in sigmas:
                if k == 1:
                    yield [(row, lp, sg)]
                    continue
                for mu in lower_rows(lp):
                    for rest in gen(k - 1, mu):
                        yield [(row, lp, sg)] + rest

    for levels in gen(n, hw):
        levels = levels[::-1]
        lam = tuple(tuple(r) for r, _, _ in levels)
        lamp = tuple(tuple(p) for _, p, _ in levels)
        sigma = None if family == "C" else tuple(s for _, _, s in levels)
        yield Pattern(family, lam, lamp, sigma)


def _primed_all(row: tuple) -> list[tuple]:
    """Rows lambda' interlacing lambda_k from above (0 >= l'_1 >= l_1 >= l'_2 >= ...)."""
    k = len(row)
    ranges = [_range_down(_top_bound(row[0]) if i == 0 else row[i - 1], row[i]) for i in range(k)]
    return list(product(*ranges))


def enumerate_c(hw) -> list[Pattern]:
    """All C-type patterns with top row hw (deterministic order)."""
    return list(_enumerate("C", hw))


def enumerate_b(hw) -> list[Pattern]:
    """All B-type patterns with top row hw, sigma flags included."""
    return list(_enumerate("B", hw))


def enumerate_patterns(kind: AlgebraKind, hw) -> list[Pattern]:
    return enumerate_c(hw) if kind.family == "C" else enumerate_b(hw)


@lru_cache(maxsize=None)
def _count(family: str, row: tuple) -> int:
    k = len(row)
    total = 0
    for lp in _primed_all(row):
        nsig = 1 if family == "C" else (1 if (_is_int(row[0]) and lp[0] > -1) else 2)
        if k == 1:
            total += nsig
        else:
            total += nsig * sum(_count(family, mu) for mu in lower_rows(lp))
    return total


def count_patterns(kind: AlgebraKind, hw) -> int:
    """Number of patterns with top row hw (memoized recursion, no enumeration)."""
    hw = validate_hw(kind, hw)
    return _count(kind.family, tuple(hw))


# ---------------------------------------------------------------- multiplicity-space parameters

def alpha_beta(family: str, lam: Sequence, mu: Sequence) -> tuple[list[Fraction], list[Fraction]]:
    """Parameters alpha_i, beta_i (i = 1..k) of the multiplicity module of lam restricted to mu.

    ``alpha_1`` is -1/2 for C and 0 for B (the B half-integral case and the second summand
    adjust it, see :func:`gtlimit.spectral.multiplicity_modules`).  ``beta_k`` uses
    lambda_k alone (mu has k-1 entries).
    """
    lam = [Fraction(x) for x in lam]
    mu = [Fraction(x) for x in mu]
    k = len(lam)
    if len(mu) != k - 1:
        raise ValueError(f"mu must have {k - 1} entries")
    h = HALF if family == "C" else Fraction(1)
    alphas, betas = [], []
    for i in range(1, k + 1):
        if i == 1:
            alphas.append(-HALF if family == "C" else Fraction(0))
        else:
            alphas.append(min(lam[i - 2], mu[i - 2]) - i + h)
        top = max(lam[i - 1], mu[i - 1]) if i < k else lam[i - 1]
        betas.append(top - i + h)
    return alphas, betas


def multiplicity_product(family: str, lam: Sequence, mu: Sequence) -> int:
    """``prod (alpha_i - beta_i + 1)``, summed over the two B summands when present."""
    al, be = alpha_beta(family, lam, mu)
    rest = 1
    for a, b in zip(al[1:], be[1:]):
        d = a - b + 1
        if d <= 0:
            return 0
        rest *= int(d)
    if family == "C":
        d0 = al[0] - be[0] + 1
        return int(d0) * rest if d0 > 0 else 0
    if _is_int(Fraction(lam[0])):
        firsts = [Fraction(0), Fraction(-1)]
    else:
        firsts = [-HALF, -HALF]
    total = 0
    for a1 in firsts:
        d0 = a1 - be[0] + 1
        if d0 > 0:
            total += int(d0) * rest
    return total


# ---------------------------------------------------------------- export

def patterns_to_csv(patterns: Sequence[Pattern]) -> str:
    """One row per pattern; per level k (top first) the columns lambda_k, lambda'_k (and sigma_k for B).

    Row entries inside a cell are space separated.
    """
    buf = io.StringIO()
    w = csv.writer(buf)
    if not patterns:
        return ""
    first = patterns[0]
    header = []
    for k in range(first.rank, 0, -1):
        header += [f"lambda_{k}", f"lambda'_{k}"] + ([f"sigma_{k}"] if first.sigma is not None else [])
    w.writerow(header)
    for p in patterns:
        row = []
        for k in range(p.rank, 0, -1):
            lk, lp, _, sg = p.level(k)
            row += [" ".join(str(x) for x in lk), " ".join(str(x) for x in lp)]
            if sg is not None:
                row.append(str(sg))
        w.writerow(row)
    return buf.getvalue()


def patterns_to_json(patterns: Sequence[Pattern]) -> str:
    return json.dumps({"version": "v1", "patterns": [p.to_json() for p in patterns]}, indent=1)
