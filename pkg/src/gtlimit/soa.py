"""Classical shift-of-argument subalgebras of S(g) for g = sp_2n, o_2n+1.

Polynomials live on g* ~ g and are written in the generators ``F_p`` (p running over
the representative index pairs of :meth:`AlgebraKind.representative_pairs`).  The
matrix ``F`` has entry ``F_ij`` at (i, j), with ``F_ij = -theta_ij F_{-j,-i}`` for
non-representative pairs.  Evaluating at a point X of g means ``F_ij -> X_ij``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Sequence

import numpy as np

from . import exactnum as xn
from .liealg import AlgebraKind, decompose_in_F, f_generator, in_algebra, level_indices


class KindMismatchError(ValueError):
    pass


class PolyOnDual:
    """Sparse exact polynomial in the representative generators of g.

    Monomials are sorted tuples of variable indices (``(0, 0, 3)`` = x_0^2 x_3).
    """

    __slots__ = ("kind", "terms")

    def __init__(self, kind: AlgebraKind, terms: dict | None = None):
        self.kind = kind
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0}

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, kind, c) -> "PolyOnDual":
        return cls(kind, {(): Fraction(c)})

    @classmethod
    def var(cls, kind, index: int) -> "PolyOnDual":
        return cls(kind, {(index,): Fraction(1)})

    # arithmetic ---------------------------------------------------------
    def _check(self, other):
        if other.kind != self.kind:
            raise KindMismatchError(f"polynomials on {self.kind.name} and {other.kind.name}")

    def __add__(self, other):
        if not isinstance(other, PolyOnDual):
            other = PolyOnDual.const(self.kind, other)
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return PolyOnDual(self.kind, out)

    __radd__ = __add__

    def __neg__(self):
        return PolyOnDual(self.kind, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PolyOnDual):
            c = Fraction(other)
            return PolyOnDual(self.kind, {m: c * v for m, v in self.terms.items()})
        self._check(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(sorted(m1 + m2))
                out[m] = out.get(m, 0) + c1 * c2
        return PolyOnDual(self.kind, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, PolyOnDual):
            return self.kind == other.kind and self.terms == other.terms
        return self.terms == ({(): Fraction(other)} if other != 0 else {})

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "0"
        names = var_names(self.kind)
        parts = []
        for m, c in sorted(self.terms.items()):
            mon = "*".join(names[i] for i in m) or "1"
            parts.append(f"{c}*{mon}")
        return " + ".join(parts)

    # queries ------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({len(m) for m in self.terms}) <= 1

    def homogeneous_part(self, d: int) -> "PolyOnDual":
        return PolyOnDual(self.kind, {m: c for m, c in self.terms.items() if len(m) == d})

    def derivative(self, index: int) -> "PolyOnDual":
        out: dict = {}
        for m, c in self.terms.items():
            k = m.count(index)
            if k:
                lst = list(m)
                lst.remove(index)
                t = tuple(lst)
                out[t] = out.get(t, 0) + k * c
        return PolyOnDual(self.kind, out)

    def evaluate(self, point: Sequence):
        """Value at a coordinate vector (one entry per representative generator)."""
        acc = Fraction(0) if all(xn.scalar_kind(p) == xn.EXACT for p in point) else 0.0
        for m, c in self.terms.items():
            v = c
            for i in m:
                v = v * point[i]
            acc = acc + v
        return acc

    def gradient_at(self, point: Sequence) -> list:
        return [self.derivative(i).evaluate(point) for i in range(self.kind.dim)]

    def to_json(self) -> list:
        """Sorted list of ``[exponent-vector, "p/q"]`` pairs."""
        nv = self.kind.dim
        out = []
        for m, c in self.terms.items():
            e = [0] * nv
            for i in m:
                e[i] += 1
            out.append([e, xn.fraction_to_str(c)])
        out.sort()
        return out

    @classmethod
    def from_json(cls, kind: AlgebraKind, data: list) -> "PolyOnDual":
        terms = {}
        for e, c in data:
            m = tuple(i for i, k in enumerate(e) for _ in range(k))
            terms[m] = Fraction(c)
        return cls(kind, terms)


def var_names(kind: AlgebraKind) -> list[str]:
    return [f"F[{i},{j}]" for i, j in kind.representative_pairs()]


def var_index(kind: AlgebraKind, i: int, j: int) -> int:
    return kind.representative_pairs().index((i, j))


def coordinates_of(kind: AlgebraKind, m: np.ndarray) -> list[Fraction]:
    """The values ``F_p(X) = X_p`` of the representative generators at a matrix X in g."""
    if not in_algebra(kind, m):
        raise ValueError("point is not in the Lie algebra")
    return [m[kind.row(i), kind.row(j)] for i, j in kind.representative_pairs()]


@lru_cache(maxsize=None)
def _coordinate_matrix(kind: AlgebraKind):
    N = kind.N
    reps = kind.representative_pairs()
    pos = {p: k for k, p in enumerate(reps)}
    M = [[PolyOnDual(kind) for _ in range(N)] for _ in range(N)]
    for i in kind.indices:
        for j in kind.indices:
            if (i, j) in pos:
                M[kind.row(i)][kind.row(j)] = PolyOnDual.var(kind, pos[(i, j)])
            elif (-j, -i) in pos:
                M[kind.row(i)][kind.row(j)] = PolyOnDual.var(kind, pos[(-j, -i)]) * (-kind.theta(i, j))
    return M


def coordinate_matrix(kind: AlgebraKind, level: int | None = None) -> list[list[PolyOnDual]]:
    """The matrix F (or its level-k submatrix F^{(k)}) with polynomial entries."""
    M = _coordinate_matrix(kind)
    if level is None:
        return [row[:] for row in M]
    rows = [kind.row(i) for i in level_indices(kind, level)]
    return [[M[a][b] for b in rows] for a in rows]


def _matmul(A, B, kind):
    n, k, m = len(A), len(B), len(B[0])
    out = []
    for a in range(n):
        row = []
        for b in range(m):
            acc = PolyOnDual(kind)
            for c in range(k):
                if A[a][c].terms and B[c][b].terms:
                    acc = acc + A[a][c] * B[c][b]
            row.append(acc)
        out.append(row)
    return out


@lru_cache(maxsize=None)
def matrix_powers(kind: AlgebraKind, level: int, top: int) -> tuple:
    """``(F^{(level)})^p`` for p = 1..top."""
    F = coordinate_matrix(kind, level)
    pw = [F]
    for _ in range(top - 1):
        pw.append(_matmul(pw[-1], F, kind))
    return tuple(pw)


def trace(M) -> PolyOnDual:
    acc = PolyOnDual(M[0][0].kind)
    for i in range(len(M)):
        acc = acc + M[i][i]
    return acc


def invariant_phi(kind: AlgebraKind, r: int, level: int | None = None) -> PolyOnDual:
    """``Phi_r = Tr F^{2r}`` (of the level-k submatrix when ``level`` is given)."""
    k = kind.rank if level is None else level
    if not 1 <= r <= k:
        raise ValueError(f"r={r} out of range 1..{k}")
    return trace(matrix_powers(kind, k, 2 * r)[2 * r - 1])


def diagonal_power_entry(kind: AlgebraKind, k: int, m: int) -> PolyOnDual:
    """``[(F^{(k)})^m]_{kk}``."""
    pw = matrix_powers(kind, k, m)[m - 1]
    idx = level_indices(kind, k)
    a = idx.index(k)
    return pw[a][a]


# ---------------------------------------------------------------- Poisson bracket

@lru_cache(maxsize=None)
def structure_table(kind: AlgebraKind) -> dict:
    """``{F_p, F_q}`` as {(p, q): {r: coeff}} from brackets in the defining representation."""
    reps = kind.representative_pairs()
    pos = {p: k for k, p in enumerate(reps)}
    table = {}
    for a, p in enumerate(reps):
        for b, q in enumerate(reps):
            if b <= a:
                continue
            br = xn.commutator(f_generator(kind, *p), f_generator(kind, *q))
            dec = {pos[r]: c for r, c in decompose_in_F(kind, br).items()}
            table[(a, b)] = dec
    return table


def _bracket_vars(kind, a: int, b: int) -> PolyOnDual:
    if a == b:
        return PolyOnDual(kind)
    tab = structure_table(kind)
    if a < b:
        return PolyOnDual(kind, {(r,): c for r, c in tab[(a, b)].items()})
    return -_bracket_vars(kind, b, a)


def poisson_bracket(p: PolyOnDual, q: PolyOnDual) -> PolyOnDual:
    """Linear (Kirillov-Kostant) Poisson bracket, extended by the Leibniz rule."""
    if p.kind != q.kind:
        raise KindMismatchError(f"polynomials on {p.kind.name} and {q.kind.name}")
    kind = p.kind
    vp = sorted({i for m in p.terms for i in m})
    vq = sorted({i for m in q.terms for i in m})
    dq = {b: q.derivative(b) for b in vq}
    acc = PolyOnDual(kind)
    for a in vp:
        da = p.derivative(a)
        for b in vq:
            if a == b:
                continue
            br = _bracket_vars(kind, a, b)
            if br.is_zero():
                continue
            acc = acc + da * dq[b] * br
    return acc


# ---------------------------------------------------------------- shift of argument

def shift_expansion(kind: AlgebraKind, mu: np.ndarray, r: int, level: int | None = None) -> list[PolyOnDual]:
    """Coefficients c_a with ``Phi_r(F + s mu) = sum_a c_a s^a`` (a = 0..2r)."""
    if not in_algebra(kind, mu):
        raise ValueError("mu is not an element of the Lie algebra")
    k = kind.rank if level is None else level
    idx = [kind.row(i) for i in level_indices(kind, k)]
    F = coordinate_matrix(kind, k)
    size = len(idx)
    # matrix entries as polynomials in s: list of PolyOnDual coefficients
    base = [[[F[a][b], PolyOnDual.const(kind, mu[idx[a], idx[b]])] for b in range(size)] for a in range(size)]

    def mul(A, B):
        out = []
        for a in range(size):
            row = []
            for b in range(size):
                acc: list = []
                for c in range(size):
                    for i, x in enumerate(A[a][c]):
                        if x.is_zero():
                            continue
                        for j, y in enumerate(B[c][b]):
                            if y.is_zero():
                                continue
                            while len(acc) <= i + j:
                                acc.append(PolyOnDual(kind))
                            acc[i + j] = acc[i + j] + x * y
                row.append(acc or [PolyOnDual(kind)])
            out.append(row)
        return out

    P = base
    for _ in range(2 * r - 1):
        P = mul(P, base)
    coeffs = [PolyOnDual(kind) for _ in range(2 * r + 1)]
    for a in range(size):
        for i, x in enumerate(P[a][a]):
            coeffs[i] = coeffs[i] + x
    return coeffs


def shift_generators(kind: AlgebraKind, mu: np.ndarray, r: int, a: int, level: int | None = None) -> PolyOnDual:
    """``partial_mu^a Phi_r``: a! times the coefficient of s^a in ``Phi_r(F + s mu)``."""
    if a < 0:
        raise ValueError("a must be >= 0")
    coeffs = shift_expansion(kind, mu, r, level)
    if a >= len(coeffs):
        return PolyOnDual(kind)
    return coeffs[a] * factorial(a)


@dataclass
class ShiftFamily:
    kind: AlgebraKind
    mu: np.ndarray
    gens: list = field(default_factory=list)  # [((r, a), PolyOnDual)]

    @property
    def expected_count(self) -> int:
        return (self.kind.dim + self.kind.rank) // 2


def shift_family(kind: AlgebraKind, mu: np.ndarray) -> ShiftFamily:
    fam = ShiftFamily(kind, mu)
    for r in range(1, kind.rank + 1):
        coeffs = shift_expansion(kind, mu, r)
        for a in range(2 * r):
            fam.gens.append(((r, a), coeffs[a] * factorial(a)))
    return fam


def regular_diagonal(kind: AlgebraKind, values: Sequence | None = None) -> np.ndarray:
    """``sum_i c_i F_ii`` with default c = (1, 2, ..., n) (regular for both families)."""
    if values is None:
        values = range(1, kind.rank + 1)
    m = xn.zeros((kind.N, kind.N))
    for i, c in zip(range(1, kind.rank + 1), values):
        m = m + Fraction(c) * f_generator(kind, i, i)
    return m


def centralizer_basis(kind: AlgebraKind, elements: Iterable[np.ndarray]) -> list[np.ndarray]:
    """Exact basis (as matrices) of the common centralizer in g of the given elements."""
    reps = kind.representative_pairs()
    basis = [f_generator(kind, *p) for p in reps]
    elements = list(elements)
    if not elements:
        return basis
    rows = []
    for x in elements:
        cols = [xn.commutator(x, b).ravel() for b in basis]
        rows.append(np.stack(cols, axis=1))
    M = np.concatenate(rows, axis=0)
    ker = xn.nullspace(M)
    out = []
    for k in range(ker.shape[1]):
        acc = xn.zeros((kind.N, kind.N))
        for c, b in zip(ker[:, k], basis):
            if c != 0:
                acc = acc + c * b
        out.append(acc)
    return out


def is_regular(kind: AlgebraKind, mu: np.ndarray) -> bool:
    return len(centralizer_basis(kind, [mu])) == kind.rank


def centralizer_chain(kind: AlgebraKind) -> list[list[np.ndarray]]:
    """Bases of z_0 ⊃ z_1 ⊃ ... ⊃ z_{n-1} for mu_i = F_{n-i, n-i}."""
    chain = []
    mus = []
    for i in range(kind.rank):
        l = kind.rank - i
        mus.append(f_generator(kind, l, l))
        chain.append(centralizer_basis(kind, mus))
    return chain


def shuvalov_generators(kind: AlgebraKind) -> list:
    """Generators of the limit along mu(eps) = F_nn + F_{n-1,n-1} eps + ... + F_11 eps^{n-1}.

    Level l = n, n-1, ..., 1 contributes the derivatives ``partial^a_{F_ll} Tr (F^{(l)})^{2r}``
    (r = 1..l, a = 0..2r-1): for l = n these generate A_{mu_0}; for l < n, ``Tr (F^{(l)})^{2r}``
    are the invariants of the simple part of z_{n-l-1} (its gl_1 parts are Cartan
    coordinates).  The last stage adds the Cartan coordinates ``F_11, ..., F_nn``.
    Each entry is ``(label, PolyOnDual)``.
    """
    if kind.rank > 3:
        raise ValueError("rank cap for Shuvalov generators is 3")
    out = []
    for l in range(kind.rank, 0, -1):
        mu = f_generator(kind, l, l)
        for r in range(1, l + 1):
            coeffs = shift_expansion(kind, mu, r, level=l)
            for a in range(2 * r):
                p = coeffs[a] * factorial(a)
                if p.degree > 0:
                    out.append((("shift", l, r, a), p))
    for i in range(1, kind.rank + 1):
        out.append((("cartan", i), PolyOnDual.var(kind, var_index(kind, i, i))))
    return out


@dataclass
class CommutativityReport:
    count: int
    expected: int
    pairs_checked: int
    nonzero_pairs: list
    regular: bool | None = None

    @property
    def ok(self) -> bool:
        return not self.nonzero_pairs

    def to_json(self) -> dict:
        return {"count": self.count, "expected": self.expected, "pairs_checked": self.pairs_checked,
                "nonzero_pairs": [list(map(str, p)) for p in self.nonzero_pairs],
                "regular": self.regular, "ok": self.ok}


def verify_commutativity(fam) -> CommutativityReport:
    """All pairwise Poisson brackets of the generators, exactly.

    Accepts a :class:`ShiftFamily` or a list of ``(label, PolyOnDual)``.
    """
    if isinstance(fam, ShiftFamily):
        gens = [g for g in fam.gens if g[1].degree > 0]
        expected = fam.expected_count
        regular = is_regular(fam.kind, fam.mu)
    else:
        gens = list(fam)
        kind = gens[0][1].kind
        expected = (kind.dim + kind.rank) // 2
        regular = None
    bad = []
    checked = 0
    for a in range(len(gens)):
        for b in range(a + 1, len(gens)):
            checked += 1
            if not poisson_bracket(gens[a][1], gens[b][1]).is_zero():
                bad.append((gens[a][0], gens[b][0]))
    return CommutativityReport(len(gens), expected, checked, bad, regular)


def jacobian_rank(polys: Sequence[PolyOnDual], point: Sequence) -> int:
    """Exact rank of the differentials of polys at a coordinate point."""
    rows = [p.gradient_at(point) for p in polys]
    return xn.rank(xn.exact_array(rows))


def random_point(kind: AlgebraKind, seed: int = 0, span: int = 7) -> list[Fraction]:
    rng = random.Random(seed)
    return [Fraction(rng.randint(-span, span), rng.randint(1, 3)) for _ in range(kind.dim)]


def in_generated_span(target: PolyOnDual, gens: Sequence[PolyOnDual], max_factors: int = 4) -> bool:
    """Whether a homogeneous target lies in the span of products of homogeneous generators of its degree."""
    d = target.degree
    gens = [g for g in gens if g.degree > 0 and g.is_homogeneous()]
    prods: list[PolyOnDual] = []

    def rec(start, deg, cur, nfac):
        if deg == d:
            prods.append(cur)
            return
        if nfac == max_factors:
            return
        for i in range(start, len(gens)):
            g = gens[i]
            if deg + g.degree <= d:
                rec(i, deg + g.degree, cur * g, nfac + 1)

    rec(0, 0, PolyOnDual.const(target.kind, 1), 0)
    monos = sorted({m for p in prods + [target] for m in p.terms})
    pos = {m: k for k, m in enumerate(monos)}
    if not prods:
        return target.is_zero()
    M = xn.zeros((len(monos), len(prods)))
    for c, p in enumerate(prods):
        for m, v in p.terms.items():
            M[pos[m], c] = v
    t = xn.zeros((len(monos), 1))
    for m, v in target.terms.items():
        t[pos[m], 0] = v
    return xn.rank(np.concatenate([M, t], axis=1)) == xn.rank(M)
