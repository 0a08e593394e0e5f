from fractions import Fraction

import numpy as np
import pytest
import sympy

from gtlimit import exactnum as xn
from gtlimit import soa
from gtlimit.centralizer import (RhoConvention, chi_series, independence_jacobian, limit_family,
                                 phi_matrix, poincare_exponents, twist_of, xi_evaluation)
from gtlimit.liealg import AlgebraKind, principal_nilpotent, trivial_irrep
from gtlimit.yangian import quaternary_residual, symmetry_residual

H = Fraction(1, 2)


def _sympy_chi(kind, hw, depth):
    x = sympy.symbols("x")  # x = 1/u
    u = 1 / x
    expr = sympy.Integer(1)
    for lam, r in zip(hw, kind.rho()):
        l = sympy.Rational(lam + r)
        rr = sympy.Rational(r)
        expr *= ((u + sympy.Rational(1, 2)) ** 2 - l ** 2) / ((u + sympy.Rational(1, 2)) ** 2 - rr ** 2)
    ser = sympy.series(sympy.simplify(expr), x, 0, depth + 1).removeO()
    return [Fraction(int(ser.coeff(x, r).p), int(ser.coeff(x, r).q)) for r in range(depth + 1)]


@pytest.mark.parametrize("family, hw", [("C", (-1,)), ("C", (0, -2)), ("B", (-H,)), ("B", (-1, -1)),
                                        ("C", (-1, -1, -3))])
def test_chi_matches_symbolic_expansion(family, hw):
    kind = AlgebraKind(family, len(hw))
    chi = chi_series(kind, hw, 6)
    assert list(chi.series.coeffs) == _sympy_chi(kind, hw, 6)


@pytest.mark.parametrize("family, hw", [("C", (-2, -3)), ("B", (-H, -5 * H)), ("B", (0, -1, -2))])
def test_chi_low_coefficients(family, hw):
    kind = AlgebraKind(family, len(hw))
    chi = chi_series(kind, hw, 3)
    rho = kind.rho()
    assert chi.coeff(1) == 0
    assert chi.coeff(2) == -sum((Fraction(l) + r) ** 2 - r ** 2 for l, r in zip(hw, rho))


def test_chi_trivial_is_one():
    chi = chi_series(AlgebraKind("C", 2), (0, 0), 5)
    assert list(chi.series.coeffs) == [1, 0, 0, 0, 0, 0]


def test_phi_trivial_rep():
    rep = trivial_irrep(AlgebraKind("B", 2))
    S = phi_matrix(rep, 4)
    for (a, b), s in S.items():
        assert s.coeff(0)[0, 0] == (1 if a == b else 0)
        assert all(c[0, 0] == 0 for c in s.coeffs[1:])


@pytest.mark.parametrize("family, hw", [("C", (-1,)), ("C", (0, -1)), ("B", (0, -1)), ("B", (-H, -H))])
def test_phi_first_coefficient_is_F(irrep, family, hw):
    rep = irrep(family, hw)
    n = rep.kind.rank
    S = phi_matrix(rep, 2)
    for a in (-1, 1):
        for b in (-1, 1):
            assert xn.is_zero(S[(a, b)].coeff(1) - rep.gen(a * n, b * n))


def test_phi_sp2_spectrum(irrep):
    op = phi_matrix(irrep("C", (-1,)), 1)[(1, 1)].coeff(1)
    assert sorted(op[i, i] for i in range(2)) == [-1, 1]
    assert xn.is_zero(op - np.diag(np.diag(op)))


@pytest.mark.parametrize("family, hw, k", [
    ("C", (-1,), 1), ("C", (-2,), 1), ("C", (0, -1), 2), ("C", (0, -1), 1), ("C", (-1, -1), 2),
    ("B", (-1,), 1), ("B", (-H,), 1), ("B", (0, -1), 2), ("B", (0, -1), 1), ("B", (-H, -H), 2),
])
def test_phi_images_satisfy_twisted_relations(irrep, family, hw, k):
    rep = irrep(family, hw)
    depth = 5
    S = phi_matrix(rep, depth, k)
    tw = twist_of(rep.kind)
    assert symmetry_residual(tw, S, depth) == 0
    assert quaternary_residual(tw, S, depth) == 0


def test_wrong_rho_breaks_relations(irrep):
    rep = irrep("C", (0, -1))
    bad = RhoConvention(((("C", 2), (0, -1)),))
    S = phi_matrix(rep, 4, rho=bad)
    assert quaternary_residual("minus", S, 4) != 0 or symmetry_residual("minus", S, 4) != 0


@pytest.mark.parametrize("family, hw", [("C", (0, -1)), ("B", (-1,))])
def test_xi_evaluation_coefficients(irrep, family, hw):
    rep = irrep(family, hw)
    n = rep.kind.rank
    xi = xi_evaluation(rep, n, -n, 3)
    F = rep.gen(n, -n)
    assert xn.is_zero(xi.coeff(0))
    assert xn.is_zero(xi.coeff(1) - F)
    sign = 1 if family == "C" else -1
    assert xn.is_zero(xi.coeff(2) - sign * H * F)
    diag = xi_evaluation(rep, 1, 1, 2)
    assert xn.is_zero(diag.coeff(0) - xn.identity(rep.dim))


def test_xi_trivial_rep():
    rep = trivial_irrep(AlgebraKind("C", 1))
    assert xi_evaluation(rep, 1, 1, 3).coeff(0)[0, 0] == 1
    assert all(c[0, 0] == 0 for c in xi_evaluation(rep, 1, -1, 3).coeffs)


def test_limit_family_sp2(irrep):
    fam = limit_family(irrep("C", (-1,)))
    assert fam.degrees() == [1, 2]
    cas = fam.ops[(1, 1, "casimir")]
    assert xn.is_zero(cas - 6 * xn.identity(2))
    assert not fam.commutator_failures()


@pytest.mark.parametrize("family, hw", [("C", (0, -1)), ("C", (-1, -1)), ("B", (0, -1)), ("B", (-H, -H))])
def test_limit_family_commutes(irrep, family, hw):
    fam = limit_family(irrep(family, hw))
    assert len(fam.ops) == 6
    assert not fam.commutator_failures()
    assert fam.degrees() == poincare_exponents(fam.rep.kind)


def test_limit_family_trivial_scalars():
    fam = limit_family(trivial_irrep(AlgebraKind("C", 2)))
    assert all(m.shape == (1, 1) for m in fam.ops.values())


@pytest.mark.parametrize("family, n, exps", [("C", 1, [1, 2]), ("B", 2, [1, 1, 2, 2, 3, 4]),
                                             ("C", 3, [1, 1, 1, 2, 2, 2, 3, 3, 4, 4, 5, 6])])
def test_poincare_exponents(family, n, exps):
    assert poincare_exponents(AlgebraKind(family, n)) == exps


def test_jacobian_sp2_rows():
    rep = independence_jacobian(AlgebraKind("C", 1))
    rows = dict(zip(rep.row_labels, rep.rows))
    col = {v: i for i, v in enumerate(rep.variables)}
    x11 = rows[("x", 1, 1)]
    y11 = rows[("y", 1, 1)]
    assert [c for c, v in enumerate(x11) if v != 0] == [col[(1, -1)]] and x11[col[(1, -1)]] == 2
    assert [c for c, v in enumerate(y11) if v != 0] == [col[(1, 1)]] and y11[col[(1, 1)]] == 1
    assert rep.rank == 2


@pytest.mark.parametrize("family, n", [("C", 1), ("C", 2), ("C", 3), ("B", 1), ("B", 2), ("B", 3)])
def test_jacobian_full_rank(family, n):
    rep = independence_jacobian(AlgebraKind(family, n))
    assert rep.rank == n * (n + 1) and rep.ok


@pytest.mark.parametrize("family, n", [("C", 2), ("B", 2)])
def test_jacobian_agrees_with_symbolic_gradients(family, n):
    kind = AlgebraKind(family, n)
    point = soa.coordinates_of(kind, principal_nilpotent(kind))
    polys = []
    for k in range(1, n + 1):
        for m in range(1, k + 1):
            polys.append(soa.invariant_phi(kind, m, level=k))
            polys.append(soa.diagonal_power_entry(kind, k, 2 * m - 1))
    sym_rows = [p.gradient_at(point) for p in polys]
    rep = independence_jacobian(kind)
    assert [[Fraction(x) for x in r] for r in sym_rows] == rep.rows
