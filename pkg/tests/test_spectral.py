from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gtlimit import exactnum as xn
from gtlimit.liealg import AlgebraKind, trivial_irrep
from gtlimit.patterns import enumerate_patterns, primed_rows
from gtlimit.spectral import (DeformedFamily, PathSpec, SpectrumMismatch, asymptotic_family,
                              concrete_multiplicity_family, convergence_ratio, deformed_family,
                              joint_eigenlines, label_irrep, labels_agree, match_spectra,
                              module_family_at_zero, multiplicity_modules, primed_row_from_label,
                              sample_multiplicity_sector, sample_real_sector, spectrum_to_csv, track_path,
                              vandermonde_matrix, verify_theorem_a)
from gtlimit.yangian import MINUS, PLUS, EvaluationFactor, OneDimFactor, TensorModule, bethe_generators

H = Fraction(1, 2)
E = EvaluationFactor


def _h(mod, i):
    return np.diag([Fraction(lab[i]) for lab in mod.weight_labels()]).astype(object)


def test_family_at_zero_is_undeformed():
    mod = TensorModule(MINUS, (E(1, 0), E(2, 0)))
    fam = deformed_family(mod, 0)
    for a, b in zip(fam, bethe_generators(mod, 1)):
        assert xn.is_zero(a - b)


@pytest.mark.parametrize("t", [Fraction(1), Fraction(7, 3), Fraction(-5)])
def test_single_factor_family_is_constant(t):
    mod = TensorModule(MINUS, (E(2, 0),))
    (B0,) = deformed_family(mod, t, (Fraction(3),))
    assert xn.is_zero(B0 - _h(mod, 0))


@pytest.mark.parametrize("t", [Fraction(1, 2), Fraction(3), Fraction(-11, 4)])
def test_deformed_family_commutes_exactly(t):
    mod = TensorModule(PLUS, (E(1, 0), E(0, -1)), OneDimFactor(H))
    fam = DeformedFamily(mod, (1, 2))
    ops = fam.exact(t)
    assert xn.is_zero(xn.commutator(ops[0], ops[1]))


def test_interpolation_matches_direct_evaluation():
    mod = TensorModule(MINUS, (E(1, 0), E(H, -H), E(1, 0)))
    fam = DeformedFamily(mod, (1, 2, 3))
    t = Fraction(13, 2)
    for a, b in zip(fam.exact(t), deformed_family(mod, t, (1, 2, 3))):
        assert xn.is_zero(a - b)
    floats = fam(complex(13 / 2))
    for a, b in zip(floats, fam.exact(t)):
        assert np.allclose(a, np.asarray(xn.to_float(b), dtype=complex))


def test_asymptotic_k1():
    mod = TensorModule(MINUS, (E(2, 0),))
    assert xn.is_zero(asymptotic_family((1,), mod)[0] - _h(mod, 0))


def test_asymptotic_k2_first_operator():
    mod = TensorModule(MINUS, (E(1, 0), E(2, 0)))
    u = (Fraction(1), Fraction(2))
    A1 = asymptotic_family(u, mod)[1]
    # sign (-1)^m applied to u_2^2 h^(1) + u_1^2 h^(2)
    assert xn.is_zero(A1 + (u[1] ** 2 * _h(mod, 0) + u[0] ** 2 * _h(mod, 1)))


def test_asymptotic_with_tail_shift():
    mod = TensorModule(PLUS, (E(1, 0),), OneDimFactor(Fraction(3, 2)))
    assert xn.is_zero(asymptotic_family((1,), mod)[0] - (_h(mod, 0) + xn.identity(2)))


@pytest.mark.parametrize("u", [(1, 2), (1, 2, 3), (Fraction(1, 2), 3), (1, 2, 3, 5)])
def test_vandermonde_determinant(u):
    sq = [Fraction(x) ** 2 for x in u]
    expect = Fraction(1)
    for i in range(len(sq)):
        for j in range(i + 1, len(sq)):
            expect *= sq[i] - sq[j]
    assert xn.det(vandermonde_matrix(u)) == expect != 0


def test_vandermonde_frozen_values():
    assert xn.det(vandermonde_matrix((1, 2))) == -3
    assert xn.det(vandermonde_matrix((1, 2, 3))) == -120


@pytest.mark.parametrize("mod, u, m", [
    (TensorModule(MINUS, (E(1, 0), E(2, 0))), (1, 2), 1),
    (TensorModule(PLUS, (E(1, 0), E(1, 0), E(1, 0)), OneDimFactor(H)), (1, 2, 3), 1),
    (TensorModule(PLUS, (E(1, 0), E(1, 0), E(1, 0)), OneDimFactor(H)), (1, 2, 3), 2),
])
def test_convergence_is_first_order(mod, u, m):
    fam = DeformedFamily(mod, u)
    assert 8 <= convergence_ratio(fam, m) <= 12


def test_joint_eigenlines_diagonal():
    ops = [np.diag([1.0, 2.0, 3.0]), np.diag([0.0, 0.0, 1.0])]
    spec = joint_eigenlines(ops)
    basis = sorted(int(np.argmax(np.abs(ln.vector))) for ln in spec.lines)
    assert basis == [0, 1, 2]


def test_joint_eigenlines_sl2_h():
    spec = joint_eigenlines([np.diag([1.0, -1.0])])
    assert sorted(float(ln.values[0].real) for ln in spec.lines) == [-1.0, 1.0]


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.integers(0, 10 ** 6))
def test_joint_eigenlines_random_commuting(d, seed):
    rng = np.random.default_rng(seed)
    P = rng.normal(size=(d, d)) + np.eye(d) * d
    Pi = np.linalg.inv(P)
    diag1 = rng.permutation(d).astype(float)
    diag2 = rng.integers(0, 2, size=d).astype(float)
    ops = [P @ np.diag(diag1) @ Pi, P @ np.diag(diag2) @ Pi]
    spec = joint_eigenlines(ops, seed=seed)
    assert len(spec.lines) == d
    for ln in spec.lines:
        for o, val in zip(ops, ln.values):
            assert np.allclose(o @ ln.vector, val * ln.vector, atol=1e-8)


def test_match_spectra():
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert match_spectra(a, a[::-1]) == [1, 0]
    with pytest.raises(SpectrumMismatch):
        match_spectra(a, a + 1)


def test_sp4_multiplicity_module():
    mods = multiplicity_modules("C", (0, -1), (0,))
    assert len(mods) == 1
    sigma, mod = mods[0]
    assert sigma is None and mod.twist == MINUS
    assert [(f.alpha, f.beta) for f in mod.factors] == [(-H, -H), (Fraction(-3, 2), Fraction(-5, 2))]
    assert mod.dim == 2


def test_track_sp4_example():
    (_, mod), = multiplicity_modules("C", (0, -1), (0,))
    tr = track_path(mod)
    rows = sorted(primed_row_from_label("C", mod, lab) for lab in tr.end_labels)
    assert rows == sorted(primed_rows((0, -1), (0,))) == [(0, -1), (0, 0)]
    fine = track_path(mod, PathSpec().refined())
    assert fine.end_labels == tr.end_labels


def test_track_one_dimensional():
    mod = TensorModule(MINUS, (E(-H, -H), E(-1, -1)))
    tr = track_path(mod)
    assert tr.end_index == [0] and tr.steps == 0


@pytest.mark.parametrize("family, lam, mu", [("C", (0, -2), (0,)), ("C", (-1, -2), (-1,)),
                                             ("B", (0, -1), (0,)), ("B", (-H, -H), (-H,))])
def test_concrete_and_abstract_spectra_agree(irrep, family, lam, mu):
    """Traces of all monomials of degree <= 2 agree: same joint spectrum."""
    rep = irrep(family, lam)
    conc = concrete_multiplicity_family(rep, mu)
    k = rep.kind.rank
    blocks = [module_family_at_zero(family, mod, k) for _, mod in multiplicity_modules(family, lam, mu)]
    tr = lambda m: sum((m[i, i] for i in range(m.shape[0])), Fraction(0))
    for r in range(1, 3):
        for combo in combinations_with_replacement(range(k), r):
            c_prod = xn.identity(conc[0].shape[0])
            for a in combo:
                c_prod = c_prod @ conc[a]
            a_tr = Fraction(0)
            for fam in blocks:
                p = xn.identity(fam[0].shape[0])
                for a in combo:
                    p = p @ fam[a]
                a_tr += tr(p)
            assert tr(c_prod) == a_tr, combo


@pytest.mark.parametrize("family, hw", [("C", (-1,)), ("C", (0, -1)), ("B", (-1,)), ("B", (-H,))])
def test_theorem_a_report(irrep, family, hw):
    rep = verify_theorem_a(irrep(family, hw))
    assert rep.ok
    assert rep.to_json()["ok"] is True


def test_theorem_a_sp2_spectrum(irrep):
    assert verify_theorem_a(irrep("C", (-1,))).spectrum == [[-1, 6], [1, 6]]


@pytest.mark.parametrize("family, hw", [("C", (0, -1)), ("B", (-1,)), ("B", (-H,)), ("C", (-2,))])
def test_label_irrep_bijection(irrep, family, hw):
    gl = label_irrep(irrep(family, hw))
    assert gl.is_bijection()
    assert set(gl.patterns) == set(enumerate_patterns(AlgebraKind(family, len(hw)), hw))


def test_label_o3_includes_sigma_one(irrep):
    gl = label_irrep(irrep("B", (-1,)))
    assert any(p.sigma == (1,) and p.lamp[0][0] == -1 for p in gl.patterns)


def test_label_trivial():
    gl = label_irrep(trivial_irrep(AlgebraKind("C", 2)))
    assert gl.is_bijection() and len(gl.patterns) == 1


def test_label_stable_under_refinement_and_perturbation(irrep):
    rep = irrep("C", (0, -1))
    base = label_irrep(rep)
    assert labels_agree(base, label_irrep(rep, PathSpec().refined()))
    assert labels_agree(base, label_irrep(rep, PathSpec().perturbed(0.01, 7)))


def test_path_spec_validation():
    with pytest.raises(ValueError):
        PathSpec(u=(1, 1)).direction(2)
    with pytest.raises(ValueError):
        PathSpec(u=(1, 2)).direction(3)
    u = PathSpec().perturbed(0.01, 3).direction(3)
    assert all(abs(float(a - b)) <= 0.02 + 1e-12 for a, b in zip(u, (0, 1, 2)))


# ---------------------------------------------------------------- real-sector survey

def test_sector_survey_flags_doubled_module():
    # two identical summands give every eigenvalue vector twice: never simple
    mod = TensorModule(MINUS, (E(1, 0), E(1, 0)))
    survey = sample_real_sector([mod, mod], grid=(0, 1, 2))
    assert len(survey.points) == 3
    assert len(survey.counterexamples) == 3


def test_sector_survey_points_are_strictly_decreasing():
    survey = sample_real_sector(TensorModule(MINUS, (E(1, 0), E(2, 0), E(1, 0))), grid=(3, -1, 0, 1))
    assert len(survey.points) == 4  # C(4, 3)
    assert all(z[0] > z[1] > z[2] for z in survey.points)


def test_sector_survey_rejects_mismatched_summands():
    with pytest.raises(ValueError):
        sample_real_sector([TensorModule(PLUS, (E(1, 0),)), TensorModule(PLUS, (E(1, 0), E(1, 0)))])


@pytest.mark.parametrize("family,lam,mu", [
    ("C", (0, -1), (0,)), ("C", (0, -2), (-1,)), ("C", (-1, -3), (-2,)),
    ("B", (0, -1), (0,)), ("B", (0, -1), (-1,)), ("B", (-H, -3 * H), (-H,)), ("B", (-1, -2), (-1,)),
])
def test_multiplicity_spaces_simple_on_sector(family, lam, mu):
    survey = sample_multiplicity_sector(family, lam, mu)
    assert survey.points
    assert survey.counterexamples == []
    assert survey.to_json()["counterexamples"] == []


def test_spectrum_csv_layout():
    text = spectrum_to_csv([[1, [0.5, -2.0]], [-3, 0.25]], ["a", "b"])
    assert text.splitlines() == ["line,a_re,a_im,b_re,b_im", "0,1.0,0.0,0.5,-2.0", "1,-3.0,0.0,0.25,0.0"]


def test_track_log_records_steps():
    (_, mod), = multiplicity_modules("C", (0, -2), (-1,))
    tr = track_path(mod, PathSpec())
    assert len(tr.log) >= 1
    step = next(e for e in tr.log if "detour" not in e)
    assert len(step["eigenvalues"]) == mod.dim and len(step["overlaps"]) == mod.dim
    assert all(0.8 <= x <= 1 + 1e-9 for x in step["overlaps"])
    assert tr.log_jsonl(sigma=None).count("\n") == len(tr.log)
