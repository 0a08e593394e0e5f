"""The centralizer homomorphism phi_k : Y^-/+(2) -> U(g_k)^{g_{k-1}} realized on an Irrep.

Level k uses the submatrix ``F^{(k)}`` (indices |i| <= k) and the Y(2) indices -1, 1
are identified with -k, k.  On a representation,

    phi_k(S(u)) = chi_k(u) (1 - F^{(k)} / (u + c_k))^{-1},   c_k = k + 1/2 (C),  k (B),

where chi_k is central in U(g_k); on a g_k-isotypic component of highest weight nu it is the scalar

    chi(u) = prod_i ((u + 1/2)^2 - l_i^2) / ((u + 1/2)^2 - rho_i^2),   l = nu + rho.

The sp_2n images form the twisted Yangian Y^-(2) and the o_2n+1 images form Y^+(2).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import exactnum as xn
from .exactnum import TruncatedSeries
from .liealg import (AlgebraKind, Irrep, casimir_operator, f_generator, level_indices,
                     principal_nilpotent, singular_vectors, validate_hw)
from .yangian import IDX, MINUS, PLUS


# ---------------------------------------------------------------- conventions

@dataclass(frozen=True)
class RhoConvention:
    """Shift vector used in chi.  Defaults: rho_i = -i (C), -i + 1/2 (B)."""

    overrides: tuple = ()  # ((family, rank), rho-tuple) pairs

    def rho(self, kind: AlgebraKind) -> tuple[Fraction, ...]:
        for key, val in self.overrides:
            if key == (kind.family, kind.rank):
                return tuple(Fraction(v) for v in val)
        return kind.rho()


DEFAULT_RHO = RhoConvention()


def twist_of(kind: AlgebraKind) -> str:
    return MINUS if kind.family == "C" else PLUS


def shift_constant(kind: AlgebraKind, k: int | None = None) -> Fraction:
    k = kind.rank if k is None else k
    return Fraction(2 * k + 1, 2) if kind.family == "C" else Fraction(k)


# ---------------------------------------------------------------- chi

def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@dataclass
class ChiSeries:
    kind: AlgebraKind
    hw: tuple
    depth: int
    series: TruncatedSeries

    def coeff(self, r: int) -> Fraction:
        return self.series.coeff(r)


def chi_series(kind: AlgebraKind, hw, depth: int, rho: RhoConvention = DEFAULT_RHO) -> ChiSeries:
    """Expansion of chi at u = infinity for the g-irrep of highest weight hw."""
    hw = validate_hw(kind, hw)
    rh = rho.rho(kind)
    num, den = [Fraction(1)], [Fraction(1)]
    half = Fraction(1, 2)
    for lam, r in zip(hw, rh):
        l = lam + r
        # (u + 1/2)^2 - x^2 in ascending powers of u
        num = _poly_mul(num, [half * half - l * l, Fraction(1), Fraction(1)])
        den = _poly_mul(den, [half * half - r * r, Fraction(1), Fraction(1)])
    if all(c == 0 for c in den):  # pragma: no cover - cannot happen for monic denominators
        raise ZeroDivisionError("degenerate chi denominator")
    s = xn.rational_series(num, den, depth)
    return ChiSeries(kind, hw, depth, s)


# ---------------------------------------------------------------- operator helpers

def _idx_of(kind: AlgebraKind, k: int, a: int) -> int:
    """Y(2) index -1/1 -> level-k index -k/k."""
    if a not in IDX:
        raise IndexError(f"Y(2) index must be -1 or 1, got {a}")
    return a * k


def _check_level(rep: Irrep, k: int | None) -> int:
    k = rep.kind.rank if k is None else k
    if not 1 <= k <= rep.kind.rank:
        raise ValueError(f"level {k} out of range 1..{rep.kind.rank}")
    return k


def power_rows(rep: Irrep, k: int, top: int) -> list[dict]:
    """``[(F^{(k)})^p]_{ab}`` for a, b in {-k, k} and p = 0..top (operator entries)."""
    idx = level_indices(rep.kind, k)
    d = rep.dim
    gens = {(i, j): rep.gen(i, j) for i in idx for j in idx}
    out = [dict() for _ in range(top + 1)]
    for a in (-k, k):
        row = {j: (xn.identity(d) if j == a else xn.zeros((d, d))) for j in idx}
        for p in range(top + 1):
            for b in (-k, k):
                out[p][(a, b)] = row[b]
            if p < top:
                row = {j: sum((row[l] @ gens[(l, j)] for l in idx if not xn.is_zero(row[l])),
                              xn.zeros((d, d))) for j in idx}
    return out


def isotypic_decomposition(rep: Irrep, k: int, seed: int = 0) -> list[tuple[tuple, np.ndarray]]:
    """Projectors onto the g_k-isotypic components of rep: ``[(nu, P_nu)]``.

    Built by Lagrange interpolation in a random rational combination of the level-k
    Casimirs, whose eigenvalue on each component is read off a g_k-singular vector.
    """
    d = rep.dim
    if k == rep.kind.rank:
        return [(tuple(rep.hw), xn.identity(d))]
    rng = random.Random(seed)
    cas = [casimir_operator(rep, k, m) for m in range(1, k + 1)]
    coeffs = [Fraction(rng.randint(1, 97), rng.randint(1, 13)) for _ in cas]
    Z = sum((c * S for c, S in zip(coeffs, cas)), xn.zeros((d, d)))
    vals = {}
    for nu, basis in singular_vectors(rep, k).items():
        v = basis[:, 0]
        Zv = Z @ v
        piv = next(i for i in range(d) if v[i] != 0)
        vals[nu] = Zv[piv] / v[piv]
    if len(set(vals.values())) != len(vals):
        raise RuntimeError("Casimir combination does not separate isotypic components; change seed")
    out = []
    for nu, z in vals.items():
        P = xn.identity(d)
        for nu2, z2 in vals.items():
            if nu2 != nu:
                P = P @ ((Z - z2 * xn.identity(d)) * (1 / (z - z2)))
        out.append((nu, P))
    return out


def chi_operator(rep: Irrep, k: int, depth: int, rho: RhoConvention = DEFAULT_RHO) -> TruncatedSeries:
    """The central series chi_k(u) acting on rep (sum over g_k-isotypic components)."""
    sub = rep.kind.sub(k)
    d = rep.dim
    acc = None
    for nu, P in isotypic_decomposition(rep, k):
        chi = chi_series(sub, nu, depth, rho).series
        term = chi.map(lambda c, P=P: c * P)
        acc = term if acc is None else acc + term
    return acc


@lru_cache(maxsize=64)
def _phi_cached(rep: Irrep, k: int, depth: int, rho: RhoConvention):
    kind = rep.kind
    rows = power_rows(rep, k, depth)
    c = shift_constant(kind, k)
    chi = chi_operator(rep, k, depth, rho)
    out = {}
    for a in IDX:
        for b in IDX:
            key = (_idx_of(kind, k, a), _idx_of(kind, k, b))
            G = TruncatedSeries([rows[p][key] for p in range(depth + 1)]).shift_arg(c)
            out[(a, b)] = xn.series_mul(chi, G)
    return out


def phi_matrix(rep: Irrep, depth: int, k: int | None = None,
               rho: RhoConvention = DEFAULT_RHO) -> dict[tuple[int, int], TruncatedSeries]:
    """All four phi_k(s_ab(u)), a, b in {-1, 1}, as operator series on rep."""
    k = _check_level(rep, k)
    return _phi_cached(rep, k, depth, rho)


def phi_image(rep: Irrep, i: int, j: int, depth: int, k: int | None = None,
              rho: RhoConvention = DEFAULT_RHO) -> TruncatedSeries:
    if i not in IDX or j not in IDX:
        raise IndexError(f"Y(2) indices must be -1 or 1, got {(i, j)}")
    return phi_matrix(rep, depth, k, rho)[(i, j)]


def xi_evaluation(rep: Irrep, i: int, j: int, depth: int) -> TruncatedSeries:
    """``delta_ij + F_ij / (u -/+ 1/2)`` (minus sign for sp, plus for o) expanded in u^{-1}."""
    kind = rep.kind
    if i not in kind.indices or j not in kind.indices:
        raise IndexError(f"index pair {(i, j)} not valid for {kind.name}")
    c = Fraction(1, 2) if kind.family == "C" else Fraction(-1, 2)
    F = rep.gen(i, j)
    d = rep.dim
    coeffs = [xn.identity(d) if i == j else xn.zeros((d, d))]
    for p in range(1, depth + 1):
        coeffs.append(F * c ** (p - 1))
    return TruncatedSeries(coeffs)


# ---------------------------------------------------------------- Theorem A family

@dataclass
class CommutingFamily:
    rep: Irrep
    ops: dict = field(default_factory=dict)  # (k, m, 'bethe-odd'|'casimir') -> matrix

    @staticmethod
    def degree(label) -> int:
        k, m, what = label
        return 2 * m - 1 if what == "bethe-odd" else 2 * m

    def degrees(self) -> list[int]:
        return sorted(self.degree(lab) for lab in self.ops)

    def labels(self) -> list:
        return list(self.ops)

    def commutator_failures(self) -> list:
        labs = list(self.ops)
        bad = []
        for a in range(len(labs)):
            for b in range(a + 1, len(labs)):
                if not xn.is_zero(xn.commutator(self.ops[labs[a]], self.ops[labs[b]])):
                    bad.append((labs[a], labs[b]))
        return bad

    def float_ops(self) -> list[np.ndarray]:
        return [np.asarray(xn.to_float(m), dtype=complex) for m in self.ops.values()]

    def to_json(self) -> dict:
        return {"version": "v1", "kind": self.rep.kind.name, "hw": [str(x) for x in self.rep.hw],
                "ops": [{"label": list(lab), "matrix": xn.sparse_triplets(m)} for lab, m in self.ops.items()]}


def poincare_exponents(kind: AlgebraKind) -> list[int]:
    """Exponents d of the factors 1/(1-x^d) of the Poincare series of the limit subalgebra."""
    return sorted(d for k in range(1, kind.rank + 1) for m in range(1, k + 1) for d in (2 * m - 1, 2 * m))


def limit_family(rep: Irrep, rho: RhoConvention = DEFAULT_RHO) -> CommutingFamily:
    """``phi_k(s_11^{(2m-1)})`` and ``S_m^{(k)} = Tr (F^{(k)})^{2m}`` for k = 1..n, m = 1..k."""
    fam = CommutingFamily(rep)
    n = rep.kind.rank
    for k in range(1, n + 1):
        S = phi_matrix(rep, 2 * k - 1, k, rho)
        for m in range(1, k + 1):
            fam.ops[(k, m, "bethe-odd")] = S[(1, 1)].coeff(2 * m - 1)
            fam.ops[(k, m, "casimir")] = casimir_operator(rep, k, m)
    return fam


# ---------------------------------------------------------------- independence

@dataclass
class JacobianReport:
    kind: AlgebraKind
    variables: list
    row_labels: list
    rows: list
    rank: int

    @property
    def expected(self) -> int:
        n = self.kind.rank
        return n * (n + 1)

    @property
    def ok(self) -> bool:
        return self.rank == self.expected

    def to_json(self) -> dict:
        return {"version": "v1", "kind": self.kind.name, "rank": self.rank, "expected": self.expected,
                "ok": self.ok, "variables": [list(v) for v in self.variables],
                "rows": {str(lab): [xn.fraction_to_str(Fraction(x)) for x in r]
                         for lab, r in zip(self.row_labels, self.rows)}}


def coordinate_directions(kind: AlgebraKind) -> list[np.ndarray]:
    """Elements B_p of g with ``X_q(B_p) = delta_pq`` on the representative coordinates."""
    out = []
    for i, j in kind.representative_pairs():
        m = f_generator(kind, i, j)
        out.append(m * (1 / m[kind.row(i), kind.row(j)]))
    return out


def _sub(kind: AlgebraKind, m: np.ndarray, k: int) -> np.ndarray:
    rows = [kind.row(i) for i in level_indices(kind, k)]
    return m[np.ix_(rows, rows)]


def _matpow(m: np.ndarray, p: int) -> np.ndarray:
    out = xn.identity(m.shape[0])
    for _ in range(p):
        out = out @ m
    return out


def independence_jacobian(kind: AlgebraKind) -> JacobianReport:
    """Differentials of x_km = Tr (F^{(k)})^{2m} and y_km = [(F^{(k)})^{2m-1}]_{kk} at the principal nilpotent.

    The y generators are the leading symbols of the odd Bethe coefficients
    phi_k(s_11^{(2m-1)}), hence the odd power.  Each partial derivative is the
    exact directional derivative along a coordinate direction:
    ``d Tr X^{2m}(B) = 2m Tr(X^{2m-1} B)`` and
    ``d [X^p]_{kk}(B) = sum_j [X^j B X^{p-1-j}]_{kk}``.
    """
    if kind.rank > 4:
        raise ValueError("rank cap for the Jacobian check is 4")
    e = principal_nilpotent(kind)
    dirs = coordinate_directions(kind)
    labels, rows = [], []
    for k in range(1, kind.rank + 1):
        X = _sub(kind, e, k)
        pos = level_indices(kind, k).index(k)
        Bs = [_sub(kind, B, k) for B in dirs]
        pw = [_matpow(X, p) for p in range(2 * k + 1)]
        for m in range(1, k + 1):
            labels.append(("x", k, m))
            rows.append([2 * m * np.trace(pw[2 * m - 1] @ B) for B in Bs])
            labels.append(("y", k, m))
            p = 2 * m - 1
            rows.append([sum(((pw[j] @ B @ pw[p - 1 - j])[pos, pos] for j in range(p)), Fraction(0))
                         for B in Bs])
    rows = [[Fraction(x) for x in r] for r in rows]
    rk = xn.rank(xn.exact_array(rows))
    return JacobianReport(kind, kind.representative_pairs(), labels, rows, rk)
