from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gtlimit.liealg import AlgebraKind, f_generator
from gtlimit.soa import (PolyOnDual, centralizer_basis, centralizer_chain, coordinates_of, diagonal_power_entry,
                         in_generated_span,
                         invariant_phi, is_regular, jacobian_rank, poisson_bracket, random_point,
                         regular_diagonal, shift_expansion, shift_family, shift_generators,
                         shuvalov_generators, var_index, verify_commutativity)

C1 = AlgebraKind("C", 1)
B1 = AlgebraKind("B", 1)


def v(kind, i, j):
    return PolyOnDual.var(kind, var_index(kind, i, j))


def test_sp2_basic_bracket():
    assert poisson_bracket(v(C1, 1, 1), v(C1, 1, -1)) == v(C1, 1, -1) * 2


def test_sp2_casimir_polynomial():
    a, b, c = v(C1, 1, 1), v(C1, 1, -1), v(C1, -1, 1)
    assert invariant_phi(C1, 1) == a * a * 2 + b * c * 2


@pytest.mark.parametrize("kind", [C1, B1, AlgebraKind("C", 2), AlgebraKind("B", 2)])
def test_quadratic_invariant_is_central(kind):
    phi = invariant_phi(kind, 1)
    for idx in range(kind.dim):
        assert poisson_bracket(phi, PolyOnDual.var(kind, idx)).is_zero()


@pytest.mark.parametrize("kind", [AlgebraKind("C", 2), AlgebraKind("B", 2)])
def test_quartic_invariant_is_central(kind):
    phi = invariant_phi(kind, 2)
    assert phi.degree == 4 and phi.is_homogeneous()
    for idx in range(kind.dim):
        assert poisson_bracket(phi, PolyOnDual.var(kind, idx)).is_zero()


polys = st.lists(st.tuples(st.lists(st.integers(0, 9), min_size=0, max_size=2),
                           st.fractions(min_value=-3, max_value=3, max_denominator=3)), max_size=4)


def _poly(kind, spec):
    terms = {}
    for mono, c in spec:
        m = tuple(sorted(x % kind.dim for x in mono))
        terms[m] = terms.get(m, 0) + c
    return PolyOnDual(kind, terms)


@settings(max_examples=25, deadline=None)
@given(polys, polys, polys)
def test_jacobi_and_antisymmetry(p, q, r):
    kind = AlgebraKind("C", 2)
    P, Q, R = _poly(kind, p), _poly(kind, q), _poly(kind, r)
    assert poisson_bracket(P, P).is_zero()
    assert (poisson_bracket(P, Q) + poisson_bracket(Q, P)).is_zero()
    jac = (poisson_bracket(P, poisson_bracket(Q, R)) + poisson_bracket(Q, poisson_bracket(R, P))
           + poisson_bracket(R, poisson_bracket(P, Q)))
    assert jac.is_zero()


@settings(max_examples=25, deadline=None)
@given(polys, polys, polys)
def test_leibniz(p, q, r):
    kind = B1
    P, Q, R = _poly(kind, p), _poly(kind, q), _poly(kind, r)
    assert (poisson_bracket(P, Q * R) - (poisson_bracket(P, Q) * R + Q * poisson_bracket(P, R))).is_zero()


def test_polynomial_json_roundtrip():
    p = invariant_phi(AlgebraKind("B", 2), 2)
    assert PolyOnDual.from_json(p.kind, p.to_json()) == p


def test_shift_expansion_a0_is_invariant():
    mu = f_generator(C1, 1, 1)
    assert shift_expansion(C1, mu, 1)[0] == invariant_phi(C1, 1)


def test_shift_generator_sp2_first_derivative():
    mu = f_generator(C1, 1, 1)
    assert shift_generators(C1, mu, 1, 1) == v(C1, 1, 1) * 4


def test_shift_top_derivative_is_constant():
    mu = f_generator(C1, 1, 1)
    assert shift_generators(C1, mu, 1, 2).degree == 0


@pytest.mark.parametrize("family, n", [("C", 1), ("C", 2), ("B", 1), ("B", 2)])
def test_shift_family_commutes(family, n):
    kind = AlgebraKind(family, n)
    fam = shift_family(kind, regular_diagonal(kind))
    rep = verify_commutativity(fam)
    assert rep.ok and rep.regular
    assert rep.count == rep.expected == (kind.dim + kind.rank) // 2
    assert rep.pairs_checked == rep.count * (rep.count - 1) // 2
    assert jacobian_rank([g for _, g in fam.gens], random_point(kind)) == rep.expected


def test_sp4_family_has_six_generators_and_fifteen_brackets():
    kind = AlgebraKind("C", 2)
    rep = verify_commutativity(shift_family(kind, regular_diagonal(kind)))
    assert (rep.count, rep.pairs_checked, rep.nonzero_pairs) == (6, 15, [])


def test_non_regular_mu_detected():
    kind = AlgebraKind("C", 2)
    assert not is_regular(kind, regular_diagonal(kind, (1, 1)))
    assert not is_regular(kind, regular_diagonal(kind, (0, 1)))
    assert is_regular(kind, regular_diagonal(kind, (1, 3)))


@pytest.mark.parametrize("family", ["C", "B"])
def test_centralizer_chain_rank2(family):
    kind = AlgebraKind(family, 2)
    chain = centralizer_chain(kind)
    assert [len(z) for z in chain] == [4, 2]
    # z_1 is the Cartan subalgebra
    cartan = [f_generator(kind, 1, 1), f_generator(kind, 2, 2)]
    assert len(centralizer_basis(kind, cartan)) == 2


@pytest.mark.parametrize("family, n", [("C", 1), ("C", 2), ("B", 1), ("B", 2)])
def test_shuvalov_generators_commute(family, n):
    kind = AlgebraKind(family, n)
    gens = shuvalov_generators(kind)
    assert verify_commutativity(gens).ok
    assert jacobian_rank([g for _, g in gens], random_point(kind, 3)) == (kind.dim + kind.rank) // 2
    assert [lab for lab, _ in gens][-n:] == [("cartan", i) for i in range(1, n + 1)]


def test_shuvalov_contains_cartan_generators():
    kind = AlgebraKind("C", 2)
    gens = [g for _, g in shuvalov_generators(kind)]
    assert in_generated_span(v(kind, 1, 1) * v(kind, 2, 2), gens, 2)


def test_coordinates_of():
    kind = AlgebraKind("B", 1)
    m = 3 * f_generator(kind, 1, 0)
    coords = coordinates_of(kind, m)
    assert coords[var_index(kind, 1, 0)] == 3
    assert sum(1 for c in coords if c != 0) == 1


def test_kind_mismatch():
    with pytest.raises(ValueError):
        v(C1, 1, 1) + v(B1, 1, 1)


def _limit_symbols(kind):
    """Top-degree symbols of the limit family: Tr (F^(k))^(2m) and [(F^(k))^(2m-1)]_kk."""
    out = []
    for k in range(1, kind.rank + 1):
        for m in range(1, k + 1):
            out.append((("casimir", k, m), invariant_phi(kind, m, k)))
            out.append((("bethe-odd", k, m), diagonal_power_entry(kind, k, 2 * m - 1)))
    return out


@pytest.mark.parametrize("kind", [C1, B1, AlgebraKind("C", 2), AlgebraKind("B", 2)])
def test_limit_symbols_commute_and_lie_in_shuvalov_algebra(kind):
    syms = _limit_symbols(kind)
    assert verify_commutativity(syms).ok
    gens = [g for _, g in shuvalov_generators(kind)]
    for label, p in syms:
        assert p.degree <= 4
        assert in_generated_span(p, gens, 4), label


@pytest.mark.parametrize("kind", [AlgebraKind("C", 2), AlgebraKind("B", 2)])
def test_off_diagonal_coordinate_not_in_shuvalov_algebra(kind):
    gens = [g for _, g in shuvalov_generators(kind)]
    assert not in_generated_span(v(kind, 1, 2), gens, 4)
