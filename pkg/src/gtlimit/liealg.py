"""sp_2n and o_2n+1 in F-generators, irreducible representations and branching.

Conventions
-----------
Indices run over ``-n..-1, 1..n`` (type C) or ``-n..-1, 0, 1..n`` (type B) and are
stored as matrix rows ``0..N-1`` in that order.  ``F_ij = E_ij - theta_ij E_{-j,-i}``.

Highest weights are written with non-positive entries ``0 >= l_1 >= ... >= l_n``
(the eigenvalues of ``F_11, ..., F_nn`` on the highest vector).  The highest vector
is killed by every ``F_ij`` with ``i < j`` ("raising" operators).  In standard
coordinates the dominant weight is ``(-l_n, ..., -l_1)``: for instance
``C, (0,-1)`` is the defining representation of sp_4.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import exactnum as xn
from .exactnum import frac

DEFAULT_DIM_CAP = 400


class DimensionCapExceeded(ValueError):
    pass


class InvalidWeight(ValueError):
    pass


# ---------------------------------------------------------------- the algebra

@dataclass(frozen=True)
class AlgebraKind:
    family: str
    rank: int

    def __post_init__(self):
        if self.family not in ("C", "B"):
            raise ValueError(f"family must be 'C' or 'B', got {self.family!r}")
        if self.rank < 1:
            raise ValueError("rank must be >= 1")

    @property
    def N(self) -> int:
        return 2 * self.rank + (1 if self.family == "B" else 0)

    @property
    def indices(self) -> tuple[int, ...]:
        n = self.rank
        neg = tuple(range(-n, 0))
        pos = tuple(range(1, n + 1))
        return neg + ((0,) if self.family == "B" else ()) + pos

    @property
    def name(self) -> str:
        return f"sp{2 * self.rank}" if self.family == "C" else f"o{2 * self.rank + 1}"

    def row(self, i: int) -> int:
        n = self.rank
        if not -n <= i <= n or (i == 0 and self.family == "C"):
            raise IndexError(f"index {i} out of range for {self.name}")
        if self.family == "B" or i < 0:
            return i + n
        return i + n - 1

    def theta(self, i: int, j: int) -> int:
        if self.family == "B":
            return 1
        return (1 if i > 0 else -1) * (1 if j > 0 else -1)

    def sub(self, k: int) -> "AlgebraKind":
        return AlgebraKind(self.family, k)

    @property
    def dim(self) -> int:
        n = self.rank
        return n * (2 * n + 1)

    def rho(self) -> tuple[Fraction, ...]:
        """Half the sum of positive roots in the non-positive convention."""
        shift = Fraction(1, 2) if self.family == "B" else Fraction(0)
        return tuple(Fraction(-i) + shift for i in range(1, self.rank + 1))

    def positive_roots(self) -> list[tuple[Fraction, ...]]:
        n = self.rank
        roots = []
        for i in range(n):
            for j in range(i + 1, n):
                for si, sj in ((1, -1), (-1, -1)):
                    v = [Fraction(0)] * n
                    v[i], v[j] = Fraction(si), Fraction(sj)
                    roots.append(tuple(v))
            v = [Fraction(0)] * n
            v[i] = Fraction(-2 if self.family == "C" else -1)
            roots.append(tuple(v))
        return roots

    def representative_pairs(self) -> list[tuple[int, int]]:
        """One index pair per basis element of g: ``i + j > 0``, plus ``i = -j`` for type C.

        Every other F is ``-theta_ij F_{-j,-i}`` of a representative.  For type C the
        elements ``F_{i,-i} = 2 E_{i,-i}`` are their own partners.
        """
        pairs = [(i, j) for i in self.indices for j in self.indices
                 if i + j > 0 or (i + j == 0 and self.family == "C")]
        pairs.sort(key=lambda p: (self.row(p[0]), self.row(p[1])))
        return pairs


def eps(kind: AlgebraKind, i: int) -> tuple[Fraction, ...]:
    """Weight of the basis vector e_i of the defining representation."""
    v = [Fraction(0)] * kind.rank
    if i > 0:
        v[i - 1] = Fraction(1)
    elif i < 0:
        v[-i - 1] = Fraction(-1)
    return tuple(v)


def root_of(kind: AlgebraKind, i: int, j: int) -> tuple[Fraction, ...]:
    return tuple(a - b for a, b in zip(eps(kind, i), eps(kind, j)))


def matrix_unit(kind: AlgebraKind, i: int, j: int) -> np.ndarray:
    m = xn.zeros((kind.N, kind.N))
    m[kind.row(i), kind.row(j)] = Fraction(1)
    return m


def f_generator(kind: AlgebraKind, i: int, j: int) -> np.ndarray:
    """``F_ij = E_ij - theta_ij E_{-j,-i}`` in the defining representation."""
    return matrix_unit(kind, i, j) - kind.theta(i, j) * matrix_unit(kind, -j, -i)


def transpose_form(kind: AlgebraKind, m: np.ndarray) -> np.ndarray:
    """The transposition ``(E_ij)^t = theta_ij E_{-j,-i}`` applied to an N x N matrix."""
    out = xn.zeros(m.shape) if m.dtype == object else np.zeros(m.shape, dtype=m.dtype)
    for i in kind.indices:
        for j in kind.indices:
            v = m[kind.row(i), kind.row(j)]
            if v != 0:
                out[kind.row(-j), kind.row(-i)] += kind.theta(i, j) * v
    return out


def in_algebra(kind: AlgebraKind, m: np.ndarray) -> bool:
    return xn.is_zero(transpose_form(kind, m) + m)


def simple_pairs(kind: AlgebraKind) -> list[tuple[int, int]]:
    """Index pairs of the simple raising generators, ordered F_{-n,-n+1}, ..., F_{-2,-1}, last one."""
    n = kind.rank
    pairs = [(-k, -k + 1) for k in range(n, 1, -1)]
    pairs.append((-1, 1) if kind.family == "C" else (-1, 0))
    return pairs


def principal_nilpotent(kind: AlgebraKind) -> np.ndarray:
    """A principal nilpotent element of g (single Jordan block, anti-self-adjoint for the form)."""
    n = kind.rank
    e = xn.zeros((kind.N, kind.N))
    if kind.family == "C":
        for i in range(1, n):
            e += matrix_unit(kind, i, i + 1)
        for i in range(-n, -1):
            e -= matrix_unit(kind, i, i + 1)
        e += matrix_unit(kind, -1, 1)
    else:
        for i in range(0, n):
            e += matrix_unit(kind, i, i + 1)
        for i in range(-n, 0):
            e -= matrix_unit(kind, i, i + 1)
    return e


# ---------------------------------------------------------------- weights

def parse_weight(text: str | Sequence) -> tuple[Fraction, ...]:
    if isinstance(text, str):
        parts = [p for p in text.replace(" ", "").split(",") if p]
        return tuple(Fraction(p) for p in parts)
    return tuple(frac(x) for x in text)


def validate_hw(kind: AlgebraKind, hw: Sequence) -> tuple[Fraction, ...]:
    lam = tuple(frac(x) for x in hw)
    if len(lam) != kind.rank:
        raise InvalidWeight(f"{kind.name} needs {kind.rank} entries, got {len(lam)}")
    if any(lam[i] < lam[i + 1] for i in range(len(lam) - 1)):
        raise InvalidWeight(f"weight {fmt_weight(lam)} is not weakly decreasing")
    if lam and lam[0] > 0:
        raise InvalidWeight(f"weight {fmt_weight(lam)} has a positive entry")
    dens = {x.denominator for x in lam}
    if kind.family == "C":
        if dens - {1}:
            raise InvalidWeight("type C weights must be integers")
    else:
        if not (dens <= {1} or dens == {2}):
            raise InvalidWeight("type B weights must be all integers or all half-integers")
    return lam


def fmt_weight(w: Iterable[Fraction]) -> str:
    return "(" + ",".join(str(x) for x in w) + ")"


def weyl_dimension(kind: AlgebraKind, hw: Sequence) -> int:
    lam = validate_hw(kind, hw)
    rho = kind.rho()
    l = [a + b for a, b in zip(lam, rho)]
    num = Fraction(1)
    for r in kind.positive_roots():
        num *= Fraction(sum(a * b for a, b in zip(l, r))) / sum(a * b for a, b in zip(rho, r))
    assert num.denominator == 1
    return int(num)


def _wadd(a, b, sign=1):
    return tuple(x + sign * y for x, y in zip(a, b))


# ---------------------------------------------------------------- irreps

@dataclass
class _WeightSpace:
    weight: tuple
    mult: int
    offset: int = 0


class Irrep:
    """Irreducible representation with exact generator matrices.

    The basis is ordered by weight (lexicographically descending), ties by construction
    order.  Generator matrices are produced on first use and cached.
    """

    def __init__(self, kind: AlgebraKind, hw, weights, gens=None, blocks=None):
        self.kind = kind
        self.hw = tuple(hw)
        self.weights = [tuple(w) for w in weights]
        self.dim = len(self.weights)
        self._gens: dict[tuple[int, int], np.ndarray] = dict(gens or {})
        self._blocks = blocks  # (spaces, e_blocks, f_blocks, simple roots) from construction

    def __repr__(self):
        return f"Irrep({self.kind.name}, hw={fmt_weight(self.hw)}, dim={self.dim})"

    # weight bookkeeping ---------------------------------------------------
    @cached_property
    def weight_slices(self) -> dict[tuple, slice]:
        out = {}
        start = 0
        for idx in range(1, self.dim + 1):
            if idx == self.dim or self.weights[idx] != self.weights[start]:
                out[self.weights[start]] = slice(start, idx)
                start = idx
        return out

    @property
    def hw_index(self) -> int:
        return self.weight_slices[self.hw].start

    # generators -----------------------------------------------------------
    def gen(self, i: int, j: int) -> np.ndarray:
        if (i, j) not in self._gens:
            self._build_generators()
        return self._gens[(i, j)]

    @property
    def gens(self) -> dict[tuple[int, int], np.ndarray]:
        self._build_generators()
        return self._gens

    def _build_generators(self):
        kind = self.kind
        full = [(i, j) for i in kind.indices for j in kind.indices]
        if all(p in self._gens for p in full):
            return
        if self._blocks is None:
            raise ValueError("irrep has neither generator matrices nor construction data")
        spaces, e_blocks, f_blocks, sroots = self._blocks
        d = self.dim
        sl = self.weight_slices
        pairs = simple_pairs(kind)

        def assemble(blocks, sign):
            mats = []
            for s in range(kind.rank):
                m = xn.zeros((d, d))
                for w, blk in blocks[s].items():
                    tgt = _wadd(w, sroots[s], sign)
                    m[sl[tgt], sl[w]] = blk
                mats.append(m)
            return mats

        e_full = assemble(e_blocks, +1)
        f_full = assemble(f_blocks, -1)
        # root vectors by nested brackets, tracked alongside the defining matrices
        found: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}
        for sign, mats, prs in ((+1, e_full, pairs), (-1, f_full, [(j, i) for i, j in pairs])):
            frontier = []
            for s, (i, j) in enumerate(prs):
                dm = f_generator(kind, i, j)
                r = root_of(kind, i, j)
                found[r] = (dm, mats[s])
                frontier.append(r)
            while frontier:
                nxt = []
                for r in frontier:
                    dm, rm = found[r]
                    for s, (i, j) in enumerate(prs):
                        r2 = _wadd(r, root_of(kind, i, j))
                        if r2 in found:
                            continue
                        dm2 = xn.commutator(f_generator(kind, i, j), dm)
                        if xn.is_zero(dm2):
                            continue
                        found[r2] = (dm2, xn.commutator(mats[s], rm))
                        nxt.append(r2)
                frontier = nxt
        for i, j in full:
            dm = f_generator(kind, i, j)
            if xn.is_zero(dm):
                self._gens[(i, j)] = xn.zeros((d, d))
                continue
            if i == j:
                m = xn.zeros((d, d))
                for a, w in enumerate(self.weights):
                    m[a, a] = sum((c * x for c, x in zip(eps(kind, i), w)), Fraction(0))
                self._gens[(i, j)] = m
                continue
            r = root_of(kind, i, j)
            bd, bm = found[r]
            # dm = c * bd for a scalar c
            nz = next(idx for idx, v in np.ndenumerate(bd) if v != 0)
            c = dm[nz] / bd[nz]
            assert xn.is_zero(dm - c * bd)
            self._gens[(i, j)] = c * bm

    def cartan(self) -> list[np.ndarray]:
        return [self.gen(a, a) for a in range(1, self.kind.rank + 1)]

    def raising(self) -> list[np.ndarray]:
        return [self.gen(i, j) for i, j in simple_pairs(self.kind)]


def _simple_data(kind: AlgebraKind):
    pairs = simple_pairs(kind)
    sroots = [root_of(kind, i, j) for i, j in pairs]
    hco = []
    for i, j in pairs:
        h = xn.commutator(f_generator(kind, i, j), f_generator(kind, j, i))
        c = tuple(h[kind.row(a), kind.row(a)] for a in range(1, kind.rank + 1))
        check = sum((ca * f_generator(kind, a + 1, a + 1) for a, ca in enumerate(c)), xn.zeros(h.shape))
        assert xn.is_zero(check - h), "simple coroot not in the Cartan span"
        hco.append(c)
    return pairs, sroots, hco


def build_irrep(kind: AlgebraKind, hw, cap: int | None = DEFAULT_DIM_CAP) -> Irrep:
    """Construct V_hw weight space by weight space.

    A vector of weight below the highest one is determined by its images under the simple
    raising generators, so each weight space is spanned by ``f_s b`` (b in a higher space)
    and represented through ``e_t f_s b = f_s e_t b + delta_st <h_s, wt b> b``.
    """
    lam = validate_hw(kind, hw)
    expected = weyl_dimension(kind, lam)
    if cap is not None and expected > cap:
        raise DimensionCapExceeded(f"dim V{fmt_weight(lam)} = {expected} exceeds cap {cap}")
    n = kind.rank
    _, sroots, hco = _simple_data(kind)

    mult: dict[tuple, int] = {lam: 1}
    e_blocks = [dict() for _ in range(n)]  # e_blocks[t][w]: V(w) -> V(w + a_t)
    f_blocks = [dict() for _ in range(n)]  # f_blocks[s][w]: V(w) -> V(w - a_s)
    order = [lam]
    layer = [lam]
    while layer:
        cand_weights = sorted({_wadd(w, sroots[s], -1) for w in layer for s in range(n)}, reverse=True)
        new_layer = []
        for mu in cand_weights:
            ups = [t for t in range(n) if _wadd(mu, sroots[t]) in mult]
            cands = []  # (s, b)
            for s in ups:
                cands.extend((s, b) for b in range(mult[_wadd(mu, sroots[s])]))
            if not cands:
                continue
            rows = sum(mult[_wadd(mu, sroots[t])] for t in ups)
            img = xn.zeros((rows, len(cands)))
            for c, (s, b) in enumerate(cands):
                src = _wadd(mu, sroots[s])  # weight of b
                off = 0
                for t in ups:
                    tgt = _wadd(mu, sroots[t])
                    mt = mult[tgt]
                    mid = _wadd(src, sroots[t])
                    if mid in mult:
                        col = e_blocks[t][src][:, b]
                        img[off:off + mt, c] += f_blocks[s][mid] @ col
                    if t == s:
                        img[off + b, c] += sum((h * x for h, x in zip(hco[s], src)), Fraction(0))
                    off += mt
            piv = xn.independent_columns(img)
            if not piv:
                continue
            m = len(piv)
            mult[mu] = m
            basis_img = img[:, piv]
            off = 0
            for t in ups:
                mt = mult[_wadd(mu, sroots[t])]
                e_blocks[t][mu] = basis_img[off:off + mt, :]
                off += mt
            start = 0
            for s in ups:
                ms = mult[_wadd(mu, sroots[s])]
                cols = img[:, start:start + ms]
                f_blocks[s][_wadd(mu, sroots[s])] = xn.solve_columns(basis_img, cols)
                start += ms
            new_layer.append(mu)
        order.extend(new_layer)
        layer = new_layer
    # zero f-blocks out of weights whose lowered target does not occur
    weights_sorted = sorted(mult, reverse=True)
    weights = [w for w in weights_sorted for _ in range(mult[w])]
    if len(weights) != expected:
        raise AssertionError(f"constructed dim {len(weights)} != Weyl dimension {expected}")
    return Irrep(kind, lam, weights, blocks=(mult, e_blocks, f_blocks, sroots))


def trivial_irrep(kind: AlgebraKind) -> Irrep:
    return build_irrep(kind, (0,) * kind.rank)


# ---------------------------------------------------------------- branching

@dataclass
class BranchPiece:
    mu: tuple
    multiplicity: int
    basis: np.ndarray  # dim x multiplicity, columns = g_{n-1}-highest vectors of weight mu


@dataclass
class BranchingData:
    parent: Irrep
    pieces: list[BranchPiece] = field(default_factory=list)

    def as_dict(self) -> dict[tuple, int]:
        return {p.mu: p.multiplicity for p in self.pieces}


def singular_vectors(rep: Irrep, level: int) -> dict[tuple, np.ndarray]:
    """Vectors killed by the simple raising generators of g_level, grouped by their g_level weight."""
    kind = rep.kind
    pairs = simple_pairs(kind)[kind.rank - level:] if level > 0 else []
    ops = [rep.gen(i, j) for i, j in pairs]
    out: dict[tuple, list] = {}
    for w, sl in rep.weight_slices.items():
        cols = sl.stop - sl.start
        if ops:
            stacked = np.concatenate([op[:, sl] for op in ops], axis=0)
            ker = xn.nullspace(stacked)
        else:
            ker = xn.identity(cols)
        if ker.shape[1] == 0:
            continue
        full = xn.zeros((rep.dim, ker.shape[1]))
        full[sl, :] = ker
        mu = tuple(w[:level])
        out.setdefault(mu, []).append(full)
    return {mu: np.concatenate(blks, axis=1) for mu, blks in sorted(out.items(), reverse=True)}


def branch(parent: Irrep) -> BranchingData:
    """Restriction to g_{n-1} (indices |i| <= n-1); multiplicity-space bases are highest vectors."""
    kind = parent.kind
    if kind.family == "C" and kind.rank < 2:
        raise ValueError("sp_2 has no proper subalgebra in the chain; rank must be >= 2")
    level = kind.rank - 1
    data = BranchingData(parent)
    for mu, basis in singular_vectors(parent, level).items():
        data.pieces.append(BranchPiece(mu, basis.shape[1], basis))
    return data


# ---------------------------------------------------------------- Casimirs

def level_indices(kind: AlgebraKind, k: int) -> list[int]:
    return [i for i in kind.indices if abs(i) <= k]


def operator_matrix_power_diag(rep: Irrep, k: int, power: int) -> dict[int, np.ndarray]:
    """Diagonal entries ``[(F^{(k)})^power]_{ii}`` as operators on rep (F^{(k)} with operator entries)."""
    idx = level_indices(rep.kind, k)
    out = {}
    for i in idx:
        row = {j: rep.gen(i, j) for j in idx}
        for _ in range(power - 1):
            row = {j: sum((row[l] @ rep.gen(l, j) for l in idx), xn.zeros((rep.dim, rep.dim))) for j in idx}
        out[i] = row[i]
    return out


def operator_matrix_power(rep: Irrep, k: int, power: int) -> dict[tuple[int, int], np.ndarray]:
    """All entries of ``(F^{(k)})^power``; power 0 gives the identity."""
    idx = level_indices(rep.kind, k)
    d = rep.dim
    cur = {(i, j): (xn.identity(d) if i == j else xn.zeros((d, d))) for i in idx for j in idx}
    for _ in range(power):
        cur = {(i, j): sum((cur[(i, l)] @ rep.gen(l, j) for l in idx), xn.zeros((d, d)))
               for i in idx for j in idx}
    return cur


def casimir_operator(rep: Irrep, k: int, m: int) -> np.ndarray:
    """``Tr (F^{(k)})^{2m}`` acting on rep."""
    if not 1 <= k <= rep.kind.rank:
        raise ValueError(f"k={k} out of range 1..{rep.kind.rank}")
    if not 1 <= m <= k:
        raise ValueError(f"m={m} out of range 1..{k}")
    diag = operator_matrix_power_diag(rep, k, 2 * m)
    return sum(diag.values(), xn.zeros((rep.dim, rep.dim)))


def bracket_in_defining(kind: AlgebraKind, a: tuple[int, int], b: tuple[int, int]) -> np.ndarray:
    return xn.commutator(f_generator(kind, *a), f_generator(kind, *b))


def decompose_in_F(kind: AlgebraKind, m: np.ndarray) -> dict[tuple[int, int], Fraction]:
    """Coordinates of an element of g in the representative F basis."""
    if not in_algebra(kind, m):
        raise ValueError("matrix is not in the Lie algebra")
    out = {}
    for i, j in kind.representative_pairs():
        d = f_generator(kind, i, j)
        v = m[kind.row(i), kind.row(j)]
        if v != 0:
            out[(i, j)] = v / d[kind.row(i), kind.row(j)]
    return out


def rep_of_element(rep: Irrep, m: np.ndarray) -> np.ndarray:
    """Action on rep of an element of g given as a defining-representation matrix."""
    acc = xn.zeros((rep.dim, rep.dim))
    for (i, j), c in decompose_in_F(rep.kind, m).items():
        acc = acc + c * rep.gen(i, j)
    return acc


# ---------------------------------------------------------------- serialization

CACHE_VERSION = "v1"


class CacheError(ValueError):
    """Raised for an unreadable, corrupted or wrong-version irrep cache file."""


def irrep_to_json(rep: Irrep) -> dict:
    """Versioned JSON: generators as sparse triplets with exact ``"p/q"`` entries.

    Weights are stored in the non-positive convention of this module, i.e. as
    eigenvalues of ``F_11, ..., F_nn``.
    """
    gens = {f"{i},{j}": xn.sparse_triplets(m) for (i, j), m in sorted(rep.gens.items())}
    return {
        "version": CACHE_VERSION,
        "kind": rep.kind.family,
        "rank": rep.kind.rank,
        "hw": [xn.fraction_to_str(x) for x in rep.hw],
        "weight_convention": "F_ii eigenvalues, 0 >= l_1 >= ... >= l_n",
        "dim": rep.dim,
        "weights": [[xn.fraction_to_str(x) for x in w] for w in rep.weights],
        "gens": gens,
    }


def irrep_from_json(obj: dict) -> Irrep:
    if not isinstance(obj, dict):
        raise CacheError("irrep cache payload is not a JSON object")
    if obj.get("version") != CACHE_VERSION:
        raise CacheError(f"irrep cache version {obj.get('version')!r} != {CACHE_VERSION!r}")
    try:
        kind = AlgebraKind(obj["kind"], int(obj["rank"]))
        hw = tuple(Fraction(x) for x in obj["hw"])
        weights = [tuple(Fraction(x) for x in w) for w in obj["weights"]]
        d = int(obj["dim"])
        gens = {}
        for key, trip in obj["gens"].items():
            i, j = (int(x) for x in key.split(","))
            gens[(i, j)] = xn.from_sparse_triplets(trip, (d, d))
    except (KeyError, TypeError, ValueError, IndexError, ZeroDivisionError) as exc:
        raise CacheError(f"corrupted irrep cache: {exc}") from exc
    if len(weights) != d:
        raise CacheError("corrupted irrep cache: weight list length differs from dim")
    expected = {(i, j) for i in kind.indices for j in kind.indices}
    if set(gens) != expected:
        raise CacheError("corrupted irrep cache: generator set incomplete")
    return Irrep(kind, hw, weights, gens=gens)
