"""Exact rational and complex-float scalars, dense matrices and truncated series in 1/u.

Two scalar worlds are used throughout the package:

* ``exact``: :class:`fractions.Fraction` scalars and numpy ``object`` arrays of
  Fractions.  All constructions (generators, series, Yangian images) live here.
* ``float``: Python ``complex``/``float`` scalars and numpy ``complex128`` /
  ``float64`` arrays.  Only eigenproblems use this world.

The only way from the first world into the second is :func:`to_float`.  Mixing
the two in one operation raises :class:`KindMismatch`.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb
from numbers import Integral, Number
from typing import Iterable, Sequence

import numpy as np

EXACT = "exact"
FLOAT = "float"


class KindMismatch(TypeError):
    """Raised when exact and float values meet in one operation."""


class ShapeMismatch(ValueError):
    pass


class DepthMismatch(ValueError):
    pass


# ---------------------------------------------------------------- scalars

def frac(x) -> Fraction:
    """Parse ``x`` (int, Fraction, or a ``"p/q"`` string) into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Integral):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        if not x.is_integer() and Fraction(x).denominator > 2**20:
            raise KindMismatch(f"refusing to convert non-dyadic float {x!r} to an exact rational")
        return Fraction(x)
    raise KindMismatch(f"cannot interpret {x!r} as an exact rational")


def scalar_kind(x) -> str:
    if isinstance(x, (Fraction, Integral)) and not isinstance(x, bool):
        return EXACT
    if isinstance(x, (float, complex, np.floating, np.complexfloating)):
        return FLOAT
    raise TypeError(f"not a scalar: {x!r}")


def array_kind(a: np.ndarray) -> str:
    if a.dtype == object:
        return EXACT
    if np.issubdtype(a.dtype, np.inexact):
        return FLOAT
    raise TypeError(f"unsupported array dtype {a.dtype}")


def kind_of(x) -> str:
    if isinstance(x, np.ndarray):
        return array_kind(x)
    return scalar_kind(x)


def fraction_to_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def to_json_scalar(x):
    """``"p/q"`` for exact scalars, ``[re, im]`` for float scalars."""
    if scalar_kind(x) == EXACT:
        return fraction_to_str(Fraction(x))
    z = complex(x)
    return [z.real, z.imag]


def from_json_scalar(obj):
    if isinstance(obj, str):
        return Fraction(obj)
    re, im = obj
    return complex(re, im)


# ---------------------------------------------------------------- matrices

def exact_array(data) -> np.ndarray:
    """Object array of Fractions from nested sequences (ints, Fractions, "p/q")."""
    a = np.array(data, dtype=object)
    out = np.empty(a.shape, dtype=object)
    for idx, v in np.ndenumerate(a):
        out[idx] = frac(v)
    return out


def zeros(shape, kind: str = EXACT) -> np.ndarray:
    if kind == FLOAT:
        return np.zeros(shape, dtype=complex)
    out = np.empty(shape, dtype=object)
    out.fill(Fraction(0))
    return out


def identity(n: int, kind: str = EXACT) -> np.ndarray:
    if kind == FLOAT:
        return np.eye(n, dtype=complex)
    out = zeros((n, n))
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def to_float(a) -> np.ndarray | complex:
    """The single lossy conversion point from exact to float."""
    if isinstance(a, np.ndarray):
        if a.dtype == object:
            return np.array([complex(v) for v in a.ravel()], dtype=complex).reshape(a.shape)
        return a.astype(complex)
    return complex(a)


def is_zero(a) -> bool:
    if isinstance(a, np.ndarray):
        return bool(np.all(a == 0))
    return a == 0


def max_abs(a) -> Fraction | float:
    """Largest entry modulus; exact for exact input."""
    if isinstance(a, np.ndarray):
        if a.size == 0:
            return Fraction(0) if a.dtype == object else 0.0
        if a.dtype == object:
            return max(abs(v) for v in a.ravel())
        return float(np.max(np.abs(a)))
    return abs(a)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    _check_same_kind(a, b)
    return a @ b - b @ a


def _check_same_kind(*items):
    kinds = {kind_of(x) for x in items}
    if len(kinds) > 1:
        raise KindMismatch("mixing exact and float values")


def rref(m: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of an exact matrix and its pivot columns."""
    rows = [list(r) for r in m]
    nr = len(rows)
    nc = m.shape[1] if m.ndim == 2 else 0
    pivots: list[int] = []
    r = 0
    for c in range(nc):
        if r == nr:
            break
        p = next((i for i in range(r, nr) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        if piv != 1:
            rows[r] = [v / piv for v in rows[r]]
        for i in range(nr):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                ri = rows[i]
                rr = rows[r]
                rows[i] = [a - f * b for a, b in zip(ri, rr)]
        pivots.append(c)
        r += 1
    out = zeros((nr, nc))
    for i in range(nr):
        out[i, :] = rows[i]
    return out, pivots


def rank(m: np.ndarray) -> int:
    if m.size == 0:
        return 0
    return len(rref(m)[1])


def nullspace(m: np.ndarray) -> np.ndarray:
    """Exact basis of the right kernel, as the columns of the returned matrix."""
    nc = m.shape[1]
    if m.shape[0] == 0:
        return identity(nc)
    r, pivots = rref(m)
    free = [c for c in range(nc) if c not in pivots]
    basis = zeros((nc, len(free)))
    for k, f in enumerate(free):
        basis[f, k] = Fraction(1)
        for i, p in enumerate(pivots):
            basis[p, k] = -r[i, f]
    return basis


def independent_columns(m: np.ndarray) -> list[int]:
    """Indices of a maximal set of linearly independent columns (greedy, left to right)."""
    if m.size == 0:
        return []
    return rref(m)[1]


def solve_columns(basis: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Solve ``basis @ x = targets`` exactly; ``basis`` must have independent columns.

    Raises ValueError when some target column is not in the span.
    """
    nb = basis.shape[1]
    aug = np.concatenate([basis, targets], axis=1)
    r, pivots = rref(aug)
    if pivots[:nb] != list(range(nb)) or any(p >= nb for p in pivots):
        raise ValueError("target not in the column span of the basis")
    return r[:nb, nb:]


def inverse(m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    if m.shape != (n, n):
        raise ShapeMismatch("inverse of a non-square matrix")
    return solve_columns(m, identity(n))


def det(m: np.ndarray) -> Fraction:
    """Exact determinant by fraction-valued Gaussian elimination."""
    n = m.shape[0]
    if m.shape != (n, n):
        raise ShapeMismatch("determinant of a non-square matrix")
    rows = [[Fraction(x) for x in r] for r in m]
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            d = -d
        piv = rows[c][c]
        d *= piv
        for i in range(c + 1, n):
            f = rows[i][c] / piv
            if f:
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
    return d


def elementary_symmetric(vals: Sequence, m: int):
    """e_m of ``vals``; e_0 = 1."""
    if not 0 <= m <= len(vals):
        raise ValueError(f"m={m} out of range for {len(vals)} values")
    one = Fraction(1) if all(scalar_kind(v) == EXACT for v in vals) else 1.0
    e = [one] + [0 * one] * m
    for v in vals:
        for j in range(m, 0, -1):
            e[j] = e[j] + v * e[j - 1]
    return e[m]


# ---------------------------------------------------------------- series

def _coeff_kind(c) -> str:
    return kind_of(c)


def _coeff_shape(c):
    return c.shape if isinstance(c, np.ndarray) else None


class TruncatedSeries:
    """``sum_{r=0}^{D} c_r u^{-r}`` with scalar or matrix coefficients of one shape and kind.

    Products keep depth ``D`` and drop everything beyond it.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        cs = tuple(coeffs)
        if not cs:
            raise ValueError("a series needs at least the constant coefficient")
        shape = _coeff_shape(cs[0])
        kind = _coeff_kind(cs[0])
        for c in cs[1:]:
            if _coeff_shape(c) != shape:
                raise ShapeMismatch("series coefficients of different shapes")
            if _coeff_kind(c) != kind:
                raise KindMismatch("series coefficients of different kinds")
        self.coeffs = cs

    # construction ------------------------------------------------------
    @classmethod
    def identity(cls, depth: int, n: int | None = None, kind: str = EXACT) -> "TruncatedSeries":
        if n is None:
            one = Fraction(1) if kind == EXACT else 1.0 + 0j
            zero = one * 0
            return cls([one] + [zero] * depth)
        return cls([identity(n, kind)] + [zeros((n, n), kind)] * depth)

    @classmethod
    def zero(cls, depth: int, shape=None, kind: str = EXACT) -> "TruncatedSeries":
        if shape is None:
            z = Fraction(0) if kind == EXACT else 0j
            return cls([z] * (depth + 1))
        return cls([zeros(shape, kind) for _ in range(depth + 1)])

    @classmethod
    def monomial(cls, c, power: int, depth: int) -> "TruncatedSeries":
        """``c * u^{-power}`` truncated at ``depth``."""
        zero = c * 0
        return cls([c if r == power else zero for r in range(depth + 1)])

    # properties --------------------------------------------------------
    @property
    def depth(self) -> int:
        return len(self.coeffs) - 1

    @property
    def shape(self):
        return _coeff_shape(self.coeffs[0])

    @property
    def kind(self) -> str:
        return _coeff_kind(self.coeffs[0])

    def coeff(self, r: int):
        return self.coeffs[r]

    def __getitem__(self, r: int):
        return self.coeffs[r]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __repr__(self) -> str:
        if self.shape is None:
            terms = " + ".join(f"({c})u^-{r}" for r, c in enumerate(self.coeffs))
            return f"TruncatedSeries[{terms}]"
        return f"TruncatedSeries(depth={self.depth}, shape={self.shape}, kind={self.kind})"

    # arithmetic --------------------------------------------------------
    def _check_add(self, other: "TruncatedSeries"):
        if self.depth != other.depth:
            raise DepthMismatch(f"depths {self.depth} and {other.depth}")
        if self.shape != other.shape:
            raise ShapeMismatch(f"shapes {self.shape} and {other.shape}")
        if self.kind != other.kind:
            raise KindMismatch("mixing exact and float series")

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        self._check_add(other)
        return TruncatedSeries(a + b for a, b in zip(self.coeffs, other.coeffs))

    def __sub__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        self._check_add(other)
        return TruncatedSeries(a - b for a, b in zip(self.coeffs, other.coeffs))

    def __neg__(self):
        return TruncatedSeries(-a for a in self.coeffs)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return series_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, TruncatedSeries):
            return series_mul(other, self)
        return self.scale(other)

    def scale(self, c) -> "TruncatedSeries":
        if scalar_kind(c) != self.kind:
            raise KindMismatch("mixing exact and float values")
        return TruncatedSeries(c * a for a in self.coeffs)

    def neg_arg(self) -> "TruncatedSeries":
        """The series of ``f(-u)``."""
        return TruncatedSeries(a if r % 2 == 0 else -a for r, a in enumerate(self.coeffs))

    def shift_arg(self, a) -> "TruncatedSeries":
        """The series of ``f(u + a)`` re-expanded in powers of 1/u."""
        # (u+a)^{-k} = sum_j (-1)^j C(k+j-1, j) a^j u^{-(k+j)}
        out = [self.coeffs[0]] + [self.coeffs[0] * 0 for _ in range(self.depth)]
        for k in range(1, self.depth + 1):
            ck = self.coeffs[k]
            for j in range(0, self.depth - k + 1):
                out[k + j] = out[k + j] + ((-1) ** j * comb(k + j - 1, j) * a ** j) * ck
        return TruncatedSeries(out)

    def truncate(self, depth: int) -> "TruncatedSeries":
        if depth > self.depth:
            raise DepthMismatch("cannot extend a truncated series")
        return TruncatedSeries(self.coeffs[: depth + 1])

    def map(self, fn) -> "TruncatedSeries":
        return TruncatedSeries(fn(c) for c in self.coeffs)

    def equals(self, other: "TruncatedSeries") -> bool:
        """Exact coefficientwise equality (same depth required)."""
        self._check_add(other)
        return all(is_zero(a - b) for a, b in zip(self.coeffs, other.coeffs))

    def max_abs(self):
        return max(max_abs(c) for c in self.coeffs)


def _coeff_product(a, b):
    sa, sb = _coeff_shape(a), _coeff_shape(b)
    if sa is not None and sb is not None:
        if sa[1] != sb[0]:
            raise ShapeMismatch(f"cannot multiply {sa} by {sb}")
        return a @ b
    return a * b


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product truncated at the common depth."""
    if a.depth != b.depth:
        raise DepthMismatch(f"depths {a.depth} and {b.depth}")
    if a.kind != b.kind:
        raise KindMismatch("mixing exact and float series")
    sa, sb = a.shape, b.shape
    if sa is not None and sb is not None and sa[1] != sb[0]:
        raise ShapeMismatch(f"cannot multiply {sa} by {sb}")
    out = []
    for r in range(a.depth + 1):
        acc = _coeff_product(a.coeffs[0], b.coeffs[r])
        for s in range(1, r + 1):
            acc = acc + _coeff_product(a.coeffs[s], b.coeffs[r - s])
        out.append(acc)
    return TruncatedSeries(out)


def series_kron(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Series of Kronecker products ``a(u) (x) b(u)`` (operators on a tensor product)."""
    if a.depth != b.depth:
        raise DepthMismatch(f"depths {a.depth} and {b.depth}")
    if a.kind != b.kind:
        raise KindMismatch("mixing exact and float series")
    out = []
    for r in range(a.depth + 1):
        acc = None
        for s in range(r + 1):
            term = np.kron(a.coeffs[s], b.coeffs[r - s])
            acc = term if acc is None else acc + term
        out.append(acc)
    return TruncatedSeries(out)


def series_geom_inverse(a: np.ndarray, c, depth: int) -> TruncatedSeries:
    """Expansion of ``(1 - A/(u+c))^{-1} = sum_k A^k (u+c)^{-k}`` in powers of 1/u."""
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeMismatch("geometric inverse needs a square matrix")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if kind_of(a) != scalar_kind(c):
        raise KindMismatch("mixing exact and float values")
    n = a.shape[0]
    kind = kind_of(a)
    powers = [identity(n, kind)]
    for _ in range(depth):
        powers.append(powers[-1] @ a)
    coeffs = [identity(n, kind)]
    for r in range(1, depth + 1):
        acc = zeros((n, n), kind)
        for k in range(1, r + 1):
            # (u+c)^{-k} contributes (-c)^{r-k} C(r-1, r-k) at u^{-r}
            acc = acc + ((-c) ** (r - k) * comb(r - 1, r - k)) * powers[k]
        coeffs.append(acc)
    return TruncatedSeries(coeffs)


def rational_series(num: Sequence, den: Sequence, depth: int) -> TruncatedSeries:
    """Expansion at u = infinity of ``P(u)/Q(u)``; coefficients listed in ascending powers of u.

    Requires ``deg P <= deg Q`` and a nonzero leading coefficient of ``Q``.
    """
    num = list(num)
    den = list(den)
    while num and num[-1] == 0:
        num.pop()
    while den and den[-1] == 0:
        den.pop()
    if not den:
        raise ZeroDivisionError("zero denominator")
    dp, dq = len(num) - 1, len(den) - 1
    if dp > dq:
        raise ValueError("numerator degree exceeds denominator degree")
    kinds = {scalar_kind(v) for v in num + den}
    if len(kinds) > 1:
        raise KindMismatch("mixing exact and float coefficients")
    one = Fraction(1) if kinds == {EXACT} else 1.0 + 0j
    if not num:
        return TruncatedSeries([0 * one] * (depth + 1))
    # x = 1/u:  P(u)/Q(u) = x^(dq-dp) * Prev(x) / Qrev(x)
    prev = [num[dp - i] * one for i in range(dp + 1)]
    qrev = [den[dq - i] * one for i in range(dq + 1)]
    if qrev[0] == 0:
        raise ZeroDivisionError("denominator has a root at infinity")
    shift = dq - dp
    quot = [0 * one] * (depth + 1)
    rem = prev + [0 * one] * (depth + 1)
    for r in range(depth + 1 - shift):
        q = rem[r] / qrev[0]
        quot[r + shift] = q
        for j, qc in enumerate(qrev):
            if r + j < len(rem):
                rem[r + j] = rem[r + j] - q * qc
    return TruncatedSeries(quot)


def series_to_json(s: TruncatedSeries):
    def enc(c):
        if isinstance(c, np.ndarray):
            return sparse_triplets(c)
        return to_json_scalar(c)

    return {"depth": s.depth, "coeffs": [enc(c) for c in s.coeffs]}


def sparse_triplets(m: np.ndarray) -> list:
    """``[[i, j, value], ...]`` over nonzero entries; values encoded as in JSON scalars."""
    out = []
    for (i, j), v in np.ndenumerate(m):
        if v != 0:
            out.append([int(i), int(j), to_json_scalar(v)])
    return out


def from_sparse_triplets(triplets, shape, kind: str = EXACT) -> np.ndarray:
    m = zeros(shape, kind)
    for i, j, v in triplets:
        m[i, j] = from_json_scalar(v)
    return m
