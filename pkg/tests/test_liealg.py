from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from gtlimit import exactnum as xn
from gtlimit.liealg import (AlgebraKind, DimensionCapExceeded, InvalidWeight, branch, build_irrep,
                            casimir_operator, decompose_in_F, f_generator, in_algebra, matrix_unit,
                            principal_nilpotent, rep_of_element, singular_vectors, trivial_irrep,
                            validate_hw, weyl_dimension)

H = Fraction(1, 2)

# Dimensions of classical irreps from standard tables (standard dominant weight in brackets).
KNOWN_DIMS = [
    ("C", (-1,), 2), ("C", (-3,), 4),
    ("C", (0, -1), 4),     # [1,0]
    ("C", (-1, -1), 5),    # [1,1]
    ("C", (0, -2), 10),    # [2,0], adjoint
    ("C", (-1, -2), 16),   # [2,1]
    ("C", (-2, -2), 14),   # [2,2]
    ("C", (0, 0, -1), 6),
    ("C", (0, -1, -1), 14),
    ("B", (-1,), 3), ("B", (-H,), 2), ("B", (-2,), 5),
    ("B", (0, -1), 5),     # vector of o5
    ("B", (-H, -H), 4),    # spin of o5
    ("B", (-1, -1), 10),   # adjoint of o5
    ("B", (0, -2), 14),
    ("B", (-H, -3 * H), 16),
    ("B", (0, 0, -1), 7),
    ("B", (-H, -H, -H), 8),
]


@pytest.mark.parametrize("family, hw, dim", KNOWN_DIMS)
def test_weyl_dimension_table(family, hw, dim):
    assert weyl_dimension(AlgebraKind(family, len(hw)), hw) == dim


@pytest.mark.parametrize("family, hw, dim", [d for d in KNOWN_DIMS if d[2] <= 16])
def test_built_dimension(irrep, family, hw, dim):
    assert irrep(family, hw).dim == dim


def test_f_generator_examples():
    C1 = AlgebraKind("C", 1)
    assert xn.is_zero(f_generator(C1, 1, -1) - 2 * matrix_unit(C1, 1, -1))
    F11 = f_generator(C1, 1, 1)
    assert F11[C1.row(1), C1.row(1)] == 1 and F11[C1.row(-1), C1.row(-1)] == -1
    for n in (1, 2):
        assert xn.is_zero(f_generator(AlgebraKind("B", n), 0, 0))


@pytest.mark.parametrize("family, n", [("C", 1), ("C", 2), ("C", 3), ("B", 1), ("B", 2), ("B", 3)])
def test_generators_span_algebra(family, n):
    kind = AlgebraKind(family, n)
    pairs = kind.representative_pairs()
    assert len(pairs) == kind.dim == (n * (2 * n + 1))
    mats = np.stack([f_generator(kind, *p).ravel() for p in pairs], axis=1)
    assert xn.rank(mats) == kind.dim
    assert all(in_algebra(kind, f_generator(kind, *p)) for p in pairs)


@pytest.mark.parametrize("family, hw", [("C", (-1, -2)), ("B", (-H, -H)), ("B", (-1, -1)), ("C", (0, 0, -1))])
def test_representation_is_homomorphism(irrep, family, hw):
    rep = irrep(family, hw)
    kind = rep.kind
    pairs = kind.representative_pairs()
    for a, b in product(pairs, pairs):
        br = xn.commutator(f_generator(kind, *a), f_generator(kind, *b))
        lhs = xn.commutator(rep.gen(*a), rep.gen(*b))
        assert xn.is_zero(lhs - rep_of_element(rep, br)), (a, b)


@pytest.mark.parametrize("family, hw", [("C", (0, -2)), ("B", (0, -1)), ("B", (-H,))])
def test_symmetry_of_generators(irrep, family, hw):
    rep = irrep(family, hw)
    kind = rep.kind
    for i in kind.indices:
        for j in kind.indices:
            assert xn.is_zero(rep.gen(i, j) + kind.theta(i, j) * rep.gen(-j, -i))


def test_highest_vector_is_killed_by_raising(irrep):
    rep = irrep("C", (-1, -2))
    v = xn.zeros((rep.dim, 1))
    v[rep.hw_index, 0] = Fraction(1)
    for i, j in rep.kind.representative_pairs():
        if rep.kind.row(i) < rep.kind.row(j):
            assert xn.is_zero(rep.gen(i, j) @ v)
    for i in range(1, rep.kind.rank + 1):
        assert (rep.gen(i, i) @ v)[rep.hw_index, 0] == rep.hw[i - 1]


@pytest.mark.parametrize("bad", [(0, 1), (-1, 0), (1,)])
def test_invalid_c_weights(bad):
    with pytest.raises(InvalidWeight):
        validate_hw(AlgebraKind("C", len(bad)), bad)


def test_mixed_integrality_rejected():
    with pytest.raises(InvalidWeight):
        validate_hw(AlgebraKind("B", 2), (-H, -1))
    with pytest.raises(InvalidWeight):
        validate_hw(AlgebraKind("C", 1), (-H,))


def test_dimension_cap():
    with pytest.raises(DimensionCapExceeded):
        build_irrep(AlgebraKind("C", 3), (-3, -3, -3), cap=100)


def test_branch_defining_sp4(irrep):
    assert branch(irrep("C", (0, -1))).as_dict() == {(Fraction(0),): 2, (Fraction(-1),): 1}


def test_branch_adjoint_sp4_dimension_sum(irrep):
    data = branch(irrep("C", (0, -2))).as_dict()
    sub = AlgebraKind("C", 1)
    assert sum(m * weyl_dimension(sub, mu) for mu, m in data.items()) == 10


def test_branch_trivial():
    assert branch(trivial_irrep(AlgebraKind("B", 2))).as_dict() == {(Fraction(0),): 1}


def test_branch_sp2_rejected(irrep):
    with pytest.raises(ValueError):
        branch(irrep("C", (-1,)))


def test_singular_vectors_level_zero(irrep):
    rep = irrep("B", (-1,))
    sv = singular_vectors(rep, 0)
    assert list(sv) == [()] and sv[()].shape == (3, 3)


def test_casimir_sp2_defining(irrep):
    assert xn.is_zero(casimir_operator(irrep("C", (-1,)), 1, 1) - 6 * xn.identity(2))


def test_casimir_trivial_is_zero():
    rep = trivial_irrep(AlgebraKind("C", 2))
    for k, m in ((1, 1), (2, 1), (2, 2)):
        assert xn.is_zero(casimir_operator(rep, k, m))


@pytest.mark.parametrize("family, hw", [("C", (0, -1)), ("C", (-1, -2)), ("B", (-H, -H))])
def test_top_casimirs_are_scalar(irrep, family, hw):
    rep = irrep(family, hw)
    n = rep.kind.rank
    for m in range(1, n + 1):
        S = casimir_operator(rep, n, m)
        assert xn.is_zero(S - S[0, 0] * xn.identity(rep.dim))


def test_principal_nilpotent_c():
    C1 = AlgebraKind("C", 1)
    assert xn.is_zero(principal_nilpotent(C1) - matrix_unit(C1, -1, 1))
    C2 = AlgebraKind("C", 2)
    e = principal_nilpotent(C2)
    expect = matrix_unit(C2, 1, 2) - matrix_unit(C2, -2, -1) + matrix_unit(C2, -1, 1)
    assert xn.is_zero(e - expect)
    assert not xn.is_zero(e @ e)
    assert xn.is_zero(np.linalg.matrix_power(e, 4))


@pytest.mark.parametrize("family, n", [("C", 2), ("C", 3), ("B", 1), ("B", 2), ("B", 3)])
def test_principal_nilpotent_single_jordan_block(family, n):
    kind = AlgebraKind(family, n)
    e = principal_nilpotent(kind)
    assert in_algebra(kind, e)
    p = xn.identity(kind.N)
    for _ in range(kind.N - 1):
        p = p @ e
    assert not xn.is_zero(p)
    assert xn.is_zero(p @ e)


def test_decompose_in_F_roundtrip():
    kind = AlgebraKind("B", 2)
    m = 3 * f_generator(kind, 1, -2) - Fraction(1, 2) * f_generator(kind, 0, 2)
    coords = decompose_in_F(kind, m)
    back = sum((c * f_generator(kind, *p) for p, c in coords.items()), xn.zeros((5, 5)))
    assert xn.is_zero(back - m)
