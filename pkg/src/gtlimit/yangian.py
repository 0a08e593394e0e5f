"""Y(2) and the twisted Yangians Y^-(2), Y^+(2) on tensor products of gl_2 evaluation modules.

Indices of Y(2) are ``-1, 1``.  A factor ``L(z+alpha, z+beta)`` is realized on the
sl_2 weight basis ``v_0, ..., v_d`` (``d = alpha - beta``) with ``h v_j = (d-2j) v_j``,
``f v_j = v_{j+1}``, ``e v_j = j(d-j+1) v_{j-1}``, and

    E_11 = z + (alpha+beta)/2 + h/2,   E_{-1,-1} = z + (alpha+beta)/2 - h/2,
    E_{1,-1} = e,                      E_{-1,1} = f.

Each factor carries ``t_ij(u) = delta_ij + E_ij u^{-1}``; factors are combined with
the coproduct ``Delta t_ij = sum_a t_ia (x) t_aj`` (factor-major Kronecker basis).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import exactnum as xn
from .exactnum import EXACT, FLOAT, TruncatedSeries, frac

IDX = (-1, 1)
MINUS, PLUS = "minus", "plus"


def theta2(twist: str, i: int, j: int) -> int:
    if twist == MINUS:
        return (1 if i > 0 else -1) * (1 if j > 0 else -1)
    if twist == PLUS:
        return 1
    raise ValueError(f"unknown twist {twist!r}")


def _num(x):
    if isinstance(x, (complex, float)):
        return complex(x)
    return frac(x)


@dataclass(frozen=True)
class EvaluationFactor:
    alpha: Fraction
    beta: Fraction
    z: Fraction | complex = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "alpha", frac(self.alpha))
        object.__setattr__(self, "beta", frac(self.beta))
        object.__setattr__(self, "z", _num(self.z))
        d = self.alpha - self.beta
        if d.denominator != 1 or d < 0:
            raise ValueError(f"alpha - beta must be a non-negative integer, got {d}")

    @property
    def dim(self) -> int:
        return int(self.alpha - self.beta) + 1

    @property
    def kind(self) -> str:
        return FLOAT if isinstance(self.z, complex) else EXACT

    def with_z(self, z) -> "EvaluationFactor":
        return EvaluationFactor(self.alpha, self.beta, z)


@dataclass(frozen=True)
class OneDimFactor:
    delta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "delta", frac(self.delta))


@dataclass(frozen=True)
class TensorModule:
    twist: str
    factors: tuple
    tail: OneDimFactor | None = None

    def __post_init__(self):
        if self.twist not in (MINUS, PLUS):
            raise ValueError(f"twist must be 'minus' or 'plus', got {self.twist!r}")
        object.__setattr__(self, "factors", tuple(self.factors))
        if self.tail is not None and self.twist != PLUS:
            raise ValueError("a one-dimensional tail W(delta) is only defined for the plus twist")
        kinds = {f.kind for f in self.factors}
        if len(kinds) > 1:
            raise xn.KindMismatch("factors mix exact and float deformation parameters")

    @property
    def dim(self) -> int:
        d = 1
        for f in self.factors:
            d *= f.dim
        return d

    @property
    def kind(self) -> str:
        return self.factors[0].kind if self.factors else EXACT

    def with_z(self, zs: Sequence) -> "TensorModule":
        if len(zs) != len(self.factors):
            raise ValueError("one deformation parameter per factor expected")
        return TensorModule(self.twist, tuple(f.with_z(z) for f, z in zip(self.factors, zs)), self.tail)

    def to_json(self) -> dict:
        def enc(x):
            return xn.to_json_scalar(x)

        return {
            "twist": self.twist,
            "factors": [{"alpha": enc(f.alpha), "beta": enc(f.beta), "z": enc(f.z)} for f in self.factors],
            "tail": None if self.tail is None else {"delta": enc(self.tail.delta)},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TensorModule":
        dec = xn.from_json_scalar
        factors = tuple(EvaluationFactor(dec(f["alpha"]), dec(f["beta"]), dec(f.get("z", "0/1")))
                        for f in obj["factors"])
        tail = obj.get("tail")
        return cls(obj["twist"], factors, None if tail is None else OneDimFactor(dec(tail["delta"])))

    def weight_labels(self) -> list[tuple]:
        """sl_2 weights (h-eigenvalues) per factor for every basis vector, factor-major order."""
        labels = [()]
        for f in self.factors:
            d = f.dim - 1
            labels = [lab + (d - 2 * j,) for lab in labels for j in range(f.dim)]
        return labels


def sl2_matrices(d: int, kind: str = EXACT):
    """(h, e, f) on the (d+1)-dimensional irreducible module in the h-descending basis."""
    n = d + 1
    h, e, f = xn.zeros((n, n), kind), xn.zeros((n, n), kind), xn.zeros((n, n), kind)
    one = Fraction(1) if kind == EXACT else 1.0 + 0j
    for j in range(n):
        h[j, j] = (d - 2 * j) * one
        if j + 1 < n:
            f[j + 1, j] = one
        if j >= 1:
            e[j - 1, j] = j * (d - j + 1) * one
    return h, e, f


def gl2_action(factor: EvaluationFactor) -> dict[tuple[int, int], np.ndarray]:
    kind = factor.kind
    d = factor.dim - 1
    h, e, f = sl2_matrices(d, kind)
    one = xn.identity(factor.dim, kind)
    if kind == EXACT:
        c = factor.z + (factor.alpha + factor.beta) / 2
        half = Fraction(1, 2)
    else:
        c = factor.z + complex(factor.alpha + factor.beta) / 2
        half = 0.5
    return {(1, 1): c * one + half * h, (-1, -1): c * one - half * h, (1, -1): e, (-1, 1): f}


def _factor_t(factor: EvaluationFactor, depth: int) -> dict:
    E = gl2_action(factor)
    kind = factor.kind
    n = factor.dim
    out = {}
    for i in IDX:
        for j in IDX:
            c0 = xn.identity(n, kind) if i == j else xn.zeros((n, n), kind)
            coeffs = [c0, E[(i, j)]] + [xn.zeros((n, n), kind)] * (depth - 1)
            out[(i, j)] = TruncatedSeries(coeffs[: depth + 1])
    return out


def t_matrix(mod: TensorModule, depth: int) -> dict[tuple[int, int], TruncatedSeries]:
    """All four ``t_ij(u)`` on the evaluation factors of mod (the tail is ignored)."""
    if not mod.factors:
        raise ValueError("module has no evaluation factors")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    return _t_matrix_cached(mod.factors, depth)


@lru_cache(maxsize=64)
def _t_matrix_cached(factors: tuple, depth: int):
    T = _factor_t(factors[0], depth)
    for fac in factors[1:]:
        T2 = _factor_t(fac, depth)
        T = {(i, j): xn.series_kron(T[(i, 1)], T2[(1, j)]) + xn.series_kron(T[(i, -1)], T2[(-1, j)])
             for i in IDX for j in IDX}
    return T


def t_series(mod: TensorModule, i: int, j: int, depth: int) -> TruncatedSeries:
    _check_idx(i, j)
    return t_matrix(mod, depth)[(i, j)]


def _check_idx(*ids):
    for i in ids:
        if i not in IDX:
            raise IndexError(f"Y(2) index must be -1 or 1, got {i}")


def _tail_series(tail: OneDimFactor, depth: int):
    d = tail.delta
    w11 = xn.rational_series([d, Fraction(1)], [Fraction(1, 2), Fraction(1)], depth)
    wmm = xn.rational_series([1 - d, Fraction(1)], [Fraction(1, 2), Fraction(1)], depth)
    return w11, wmm


def s_matrix(mod: TensorModule, depth: int) -> dict[tuple[int, int], TruncatedSeries]:
    """All four ``s_ij(u)`` on mod, including the one-dimensional tail when present."""
    if not mod.factors:
        if mod.tail is None:
            raise ValueError("empty module")
        w11, wmm = _tail_series(mod.tail, depth)
        one = lambda s: s.map(lambda c: xn.exact_array([[c]]))
        zero = TruncatedSeries.zero(depth, (1, 1))
        return {(1, 1): one(w11), (-1, -1): one(wmm), (1, -1): zero, (-1, 1): zero}
    T = t_matrix(mod, depth)
    Tneg = {k: v.neg_arg() for k, v in T.items()}
    S = {}
    if mod.tail is None:
        for i in IDX:
            for j in IDX:
                acc = None
                for a in IDX:
                    term = (T[(i, a)] * Tneg[(-j, -a)]).scale(_unit(mod, theta2(mod.twist, a, j)))
                    acc = term if acc is None else acc + term
                S[(i, j)] = acc
        return S
    if mod.kind != EXACT:
        raise xn.KindMismatch("tail factors are only supported with exact parameters")
    w11, wmm = _tail_series(mod.tail, depth)
    for a in IDX:
        for b in IDX:
            S[(a, b)] = w11 * (T[(a, 1)] * Tneg[(-b, -1)]) + wmm * (T[(a, -1)] * Tneg[(-b, 1)])
    return S


def _unit(mod: TensorModule, c: int):
    return Fraction(c) if mod.kind == EXACT else complex(c)


def s_series(mod: TensorModule, i: int, j: int, depth: int) -> TruncatedSeries:
    _check_idx(i, j)
    return s_matrix(mod, depth)[(i, j)]


def bethe_generators(mod: TensorModule, max_m: int, depth: int | None = None) -> list[np.ndarray]:
    """``B_m`` = coefficient of ``u^{-(2m+1)}`` in ``s_11(u)``, m = 0..max_m."""
    if depth is None:
        depth = 2 * max_m + 1
    if depth < 2 * max_m + 1:
        raise ValueError(f"depth {depth} too small for m <= {max_m}")
    s11 = s_series(mod, 1, 1, depth)
    return [s11.coeff(2 * m + 1) for m in range(max_m + 1)]


# ---------------------------------------------------------------- sigma series

def _perm_tensor(twist: str | None):
    """4x4 matrices over W (x) W, rows indexed (a1, a2) with a in (-1, 1): P or P^t."""
    P = {}
    for i in IDX:
        for j in IDX:
            # E_ij (x) E_ji  or  E_ij^t (x) E_ji
            if twist is None:
                a, b, c = (i, j), (j, i), 1
            else:
                a, b, c = (-j, -i), (j, i), theta2(twist, i, j)
            P[(a, b)] = P.get((a, b), 0) + c
    m = xn.zeros((4, 4))
    pos = {(-1, -1): 0, (-1, 1): 1, (1, -1): 2, (1, 1): 3}
    for (a, b), c in P.items():
        # (E_a (x) E_b) maps e_{a1,?}: entry row (a0,b0), col (a1,b1)
        m[pos[(a[0], b[0])], pos[(a[1], b[1])]] += c
    return m, pos


def _antisymmetrizer():
    P, _ = _perm_tensor(None)
    return (xn.identity(4) - P) / 2


def f11_matrix(twist: str) -> np.ndarray:
    """``F_11 = E_11 - theta_11 E_{-1,-1}`` as a 2x2 matrix on W (rows -1, 1)."""
    return xn.exact_array([[-theta2(twist, 1, 1), 0], [0, 1]])


def _check_anti_selfadjoint(twist: str, C: np.ndarray):
    # (E_ij)^t = theta_ij E_{-j,-i}
    r = {-1: 0, 1: 1}
    Ct = xn.zeros((2, 2))
    for i in IDX:
        for j in IDX:
            Ct[r[-j], r[-i]] += theta2(twist, i, j) * C[r[i], r[j]]
    if not xn.is_zero(Ct + C):
        raise ValueError("C must satisfy C^t = -C for the form of the twist")


def sigma_series(mod: TensorModule, which: str, C: np.ndarray | None = None, depth: int = 8,
                 N: int = 2) -> TruncatedSeries:
    """The Bethe series sigma_1(u, C) or sigma_2(u) on mod, computed from the trace formulas over W (x) W."""
    if N != 2:
        raise NotImplementedError("only N = 2 is supported")
    if mod.kind != EXACT:
        raise xn.KindMismatch("sigma series are computed in exact mode")
    S = s_matrix(mod, depth)
    d = mod.dim
    A = _antisymmetrizer()
    Pt, pos = _perm_tensor(mod.twist)
    rev = {v: k for k, v in pos.items()}
    I4 = xn.identity(4)
    if which in ("sigma1", "1", 1):
        if C is None:
            C = f11_matrix(mod.twist)
        C = xn.exact_array(C)
        _check_anti_selfadjoint(mod.twist, C)
        r = xn.rational_series([1], [3, -2], depth)  # 1/(3-2u)
        # K = (1 - P^t r(u)) (1 (x) C)
        C2 = np.kron(xn.identity(2), C)
        K0 = I4 @ C2
        K1 = -(Pt @ C2)
        acc = TruncatedSeries.zero(depth, (d, d))
        # tr(A S1 K) = sum_{a,b,c} A[a,b] S1[b,c] K[c,a];  S1[b,c] = s_{b1 c1} delta_{b2 c2}
        for b in range(4):
            for c in range(4):
                b1, b2 = rev[b]
                c1, c2 = rev[c]
                if b2 != c2:
                    continue
                k0 = sum((K0[c, a] * A[a, b] for a in range(4)), Fraction(0))
                k1 = sum((K1[c, a] * A[a, b] for a in range(4)), Fraction(0))
                if k0 == 0 and k1 == 0:
                    continue
                coef = TruncatedSeries.monomial(k0, 0, depth) + r.scale(k1)
                acc = acc + coef * S[(b1, c1)]
        return acc
    if which in ("sigma2", "2", 2):
        r = xn.rational_series([1], [1, -2], depth)  # 1/(-2u+1)
        Sshift = {k: v.shift_arg(Fraction(-1)) for k, v in S.items()}
        acc = TruncatedSeries.zero(depth, (d, d))
        # R = 1 - P^t/(-2u+1); tr(A S1(u) R S2(u-1))
        for a in range(4):
            for b in range(4):
                if A[a, b] == 0:
                    continue
                b1, b2 = rev[b]
                for c in range(4):
                    c1, c2 = rev[c]
                    if b2 != c2:
                        continue
                    for dd in range(4):
                        r0 = I4[c, dd]
                        r1 = -Pt[c, dd]
                        if r0 == 0 and r1 == 0:
                            continue
                        d1, d2 = rev[dd]
                        a1, a2 = rev[a]
                        if d1 != a1:
                            continue
                        coef = (TruncatedSeries.monomial(r0, 0, depth) + r.scale(r1)).scale(A[a, b])
                        acc = acc + coef * (S[(b1, c1)] * Sshift[(d2, a2)])
        return acc
    raise ValueError(f"unknown sigma series {which!r}")


# ---------------------------------------------------------------- relation checks

@dataclass
class RelationReport:
    depth: int
    residuals: dict = field(default_factory=dict)  # relation name -> max |residual|

    @property
    def ok(self) -> bool:
        return all(v == 0 for v in self.residuals.values())

    def to_json(self) -> dict:
        return {"depth": self.depth, "ok": self.ok,
                "residuals": {k: xn.to_json_scalar(v) for k, v in self.residuals.items()}}


def yangian_relation_residual(T: dict, depth: int):
    """Max entry of ``[t_ij^(r+1), t_kl^(s)] - [t_ij^(r), t_kl^(s+1)] - t_kj^(r) t_il^(s) + t_kj^(s) t_il^(r)``."""
    worst = Fraction(0)
    for i in IDX:
        for j in IDX:
            for k in IDX:
                for l in IDX:
                    a, b = T[(i, j)], T[(k, l)]
                    c, e = T[(k, j)], T[(i, l)]
                    for r in range(depth):
                        for s in range(depth):
                            lhs = xn.commutator(a[r + 1], b[s]) - xn.commutator(a[r], b[s + 1])
                            rhs = c[r] @ e[s] - c[s] @ e[r]
                            worst = max(worst, xn.max_abs(lhs - rhs))
    return worst


def symmetry_residual(twist: str, S: dict, depth: int):
    """Max violation of ``theta_ij s_{-j,-i}(-u) = s_ij(u) -/+ (s_ij(u) - s_ij(-u))/(2u)``."""
    sign = 1 if twist == MINUS else -1
    worst = Fraction(0)
    for i in IDX:
        for j in IDX:
            lhs = S[(-j, -i)].neg_arg().scale(Fraction(theta2(twist, i, j)))
            s = S[(i, j)]
            for p in range(depth + 1):
                rhs = s[p]
                if p >= 2 and p % 2 == 0:
                    rhs = rhs - sign * s[p - 1]
                worst = max(worst, xn.max_abs(lhs[p] - rhs))
    return worst


def _grid(a: TruncatedSeries, b: TruncatedSeries, order: str):
    """Bivariate coefficient grid of a(u) b(v) (order 'uv') or a(v) b(u) (order 'vu'), operator product a then b."""
    D = a.depth
    if order == "uv":
        return [[a[r] @ b[s] for s in range(D + 1)] for r in range(D + 1)]
    return [[a[s] @ b[r] for s in range(D + 1)] for r in range(D + 1)]


def quaternary_residual(twist: str, S: dict, depth: int):
    """Max violation of the s-commutation relation multiplied through by (u^2 - v^2).

    Coefficients are compared on the window r, s <= depth - 2 where the cleared identity is
    fully determined by the truncated series.
    """
    D = depth
    th = lambda i, j: theta2(twist, i, j)

    def mul_u(g, p=1):
        return [[g[r + p][s] for s in range(D + 1)] for r in range(D + 1 - p)]

    def mul_v(g, p=1):
        return [[g[r][s + p] for s in range(D + 1 - p)] for r in range(len(g))]

    def add(*terms):
        W = D - 1  # window size r, s in 0..D-2
        out = [[None] * W for _ in range(W)]
        for c, g in terms:
            for r in range(W):
                for s in range(W):
                    v = c * g[r][s]
                    out[r][s] = v if out[r][s] is None else out[r][s] + v
        return out

    worst = Fraction(0)
    for i in IDX:
        for j in IDX:
            for k in IDX:
                for l in IDX:
                    sij, skl = S[(i, j)], S[(k, l)]
                    comm = [[x - y for x, y in zip(r1, r2)]
                            for r1, r2 in zip(_grid(sij, skl, "uv"), _grid(skl, sij, "vu"))]
                    g1 = [[x - y for x, y in zip(r1, r2)]
                          for r1, r2 in zip(_grid(S[(k, j)], S[(i, l)], "uv"), _grid(S[(k, j)], S[(i, l)], "vu"))]
                    g2 = [[th(k, -j) * x - th(i, -l) * y for x, y in zip(r1, r2)]
                          for r1, r2 in zip(_grid(S[(i, -k)], S[(-j, l)], "uv"), _grid(S[(k, -i)], S[(-l, j)], "vu"))]
                    g3 = [[th(i, -j) * (x - y) for x, y in zip(r1, r2)]
                          for r1, r2 in zip(_grid(S[(k, -i)], S[(-j, l)], "uv"), _grid(S[(k, -i)], S[(-j, l)], "vu"))]
                    lhs = add((1, mul_u(comm, 2)), (-1, mul_v(comm, 2)))
                    rhs = add((1, mul_u(g1)), (1, mul_v(g1)), (-1, mul_u(g2)), (1, mul_v(g2)), (1, g3))
                    for r in range(D - 1):
                        for s in range(D - 1):
                            worst = max(worst, xn.max_abs(lhs[r][s] - rhs[r][s]))
    return worst


def verify_relations(mod: TensorModule, depth: int) -> RelationReport:
    if depth < 2:
        raise ValueError("depth must be >= 2")
    if mod.kind != EXACT:
        raise xn.KindMismatch("relations are verified in exact mode")
    rep = RelationReport(depth)
    S = s_matrix(mod, depth)
    if mod.factors:
        rep.residuals["yangian"] = yangian_relation_residual(t_matrix(mod, depth), depth - 1)
    rep.residuals["symmetry"] = symmetry_residual(mod.twist, S, depth)
    rep.residuals["quaternary"] = quaternary_residual(mod.twist, S, depth)
    return rep


def sigma1_identity_residual(mod: TensorModule, depth: int = 8) -> Fraction:
    """Max residual of sigma_1(u, F_11) against its closed form in s_11, s_{-1,-1}.

    minus: ``sigma_1 = (s_{-1,-1} - s_11) / 2``;
    plus:  ``sigma_1 = (2u - 1)/(6 - 4u) (s_11 - s_{-1,-1})``.
    """
    sig = sigma_series(mod, "sigma1", depth=depth)
    S = s_matrix(mod, depth)
    if mod.twist == MINUS:
        rhs = (S[(-1, -1)] - S[(1, 1)]).scale(Fraction(1, 2))
    else:
        rhs = xn.rational_series([-1, 2], [6, -4], depth) * (S[(1, 1)] - S[(-1, -1)])
    return max((xn.max_abs(c) for c in (sig - rhs).coeffs), default=Fraction(0))
