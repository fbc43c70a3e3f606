"""Differential forms, X-complexes, small complexes, bar spaces, filtrations.

Dimension oracles: over the ground field the reduced calculus is the field
in degree 0 only; for k[Z/2] the formal model has dim 3 * 2^k in degree k
and its Hodge levels reproduce the cyclic homology of the unitalization
(3, 0, 3, 0) while the reduced model reproduces that of the algebra
itself (2, 0, 2, 0), both frozen in test_cyclic.  For a truncated tensor
algebra the reduced X-complex homology is concentrated in degree 0 with
one class per faithful word length.
"""

import pytest
from fractions import Fraction

from hopfcyc import cyclic as cy
from hopfcyc import forms as fo
from hopfcyc import library as lib
from hopfcyc.exactla import (DescentFailure, SparseMatrix, Subspace,
                             quotient, rank)

F = Fraction


@pytest.fixture(scope="module")
def k_reduced():
    h = lib.trivial_hopf()
    return fo.build_omega(lib.algebra_from_hopf(h), max_degree=4,
                          reduced=True)


@pytest.fixture(scope="module")
def z2_formal():
    h = lib.trivial_hopf()
    a = lib.algebra_z2(h, with_c_action=False)
    return fo.build_omega(a, max_degree=4)


@pytest.fixture(scope="module")
def z2_reduced():
    h = lib.trivial_hopf()
    a = lib.algebra_z2(h, with_c_action=False)
    return fo.build_omega(a, max_degree=4, reduced=True)


@pytest.fixture(scope="module")
def twisted_free():
    """Sign action of k[Z/2] on one generator, stable 1-dim coefficients."""
    hz = lib.group_algebra_z2()
    m = lib.sayd_z2_stable()
    a = lib.free_module_algebra(1, 2, hz, lib.sign_action_z2())
    return hz, m, a, fo.build_omega(a, hz, m, max_degree=3, reduced=True)


# ---------------------------------------------------------------------------
# bases and operator identities
# ---------------------------------------------------------------------------

def test_dimension_formulas(k_reduced, z2_formal, z2_reduced):
    assert [k_reduced.dim(k) for k in range(5)] == [1, 0, 0, 0, 0]
    assert [z2_formal.dim(k) for k in range(5)] == [3, 6, 12, 24, 48]
    assert [z2_reduced.dim(k) for k in range(5)] == [2, 2, 2, 2, 2]


def test_operator_identities_plain(z2_formal, z2_reduced):
    for b in (z2_formal, z2_reduced):
        for k in range(1, 4):
            assert (b.b_mat(k) @ b.b_mat(k + 1)).is_zero()
        for k in range(3):
            assert (b.d_mat(k + 1) @ b.d_mat(k)).is_zero()
        for k in range(2):
            bb = b.connes_b_mat(k + 1) @ b.connes_b_mat(k)
            assert bb.is_zero()
            anti = (b.b_mat(k + 1) @ b.connes_b_mat(k)
                    + (b.connes_b_mat(k - 1) @ b.b_mat(k)
                       if k > 0 else SparseMatrix.zero(b.dim(k), b.dim(k))))
            assert anti.is_zero()


def test_karoubi_power_identity(z2_formal):
    """kappa^{n+1} = id - d b on degree n (and kappa = id in degree 0)."""
    b = z2_formal
    assert b.kappa_mat(0) == SparseMatrix.identity(b.dim(0))
    for n in range(1, 4):
        power = SparseMatrix.identity(b.dim(n))
        for _ in range(n + 1):
            power = b.kappa_mat(n) @ power
        expect = (SparseMatrix.identity(b.dim(n))
                  - b.d_mat(n - 1) @ b.b_mat(n))
        assert power == expect


def test_operator_identities_descend_twisted(twisted_free):
    _, _, _, bundle = twisted_free
    quots = {k: quotient(bundle.dim(k), bundle.rel_coeff(k))
             for k in range(4)}
    b = {k: quots[k].induced_map_between(quots[k - 1], bundle.b_mat(k))
         for k in range(1, 4)}
    for k in (1, 2):
        assert (b[k] @ b[k + 1]).is_zero()
    big = {k: quots[k].induced_map_between(
        quots[k + 1], bundle.connes_b_mat(k)) for k in range(2)}
    assert (big[1] @ big[0]).is_zero()
    assert (b[1] @ big[0]).is_zero()          # degree 0: the d b term is absent
    assert (b[2] @ big[1] + big[0] @ b[1]).is_zero()


# ---------------------------------------------------------------------------
# Hodge levels against cyclic homology
# ---------------------------------------------------------------------------

def test_hodge_levels_ground_field(k_reduced):
    for n in range(4):
        level = fo.hodge_level(k_reduced, n)
        assert level.super.verify() == []
        assert level.super.homology() == {0: 1, 1: 0}


def test_hodge_levels_group_algebra(z2_reduced, z2_formal):
    hc_a = {0: 2, 1: 0, 2: 2, 3: 0}      # HC of k[Z/2], frozen in test_cyclic
    hc_tilde = {0: 3, 1: 0, 2: 3, 3: 0}  # plus HC of the adjoined unit
    for bundle, hc in ((z2_reduced, hc_a), (z2_formal, hc_tilde)):
        for n in range(4):
            level = fo.hodge_level(bundle, n)
            assert level.super.verify() == []
            assert level.super.homology()[n % 2] == hc[n], (n, bundle.reduced)


def test_hodge_levels_twisted_match_cyclic(twisted_free):
    hz, m, a, bundle = twisted_free
    data = cy.build_algebra_cyclic_homology(hz, a, m, 3)
    hc = cy.cohomology(data, "cyclic")
    for n in (0, 1, 2):
        level = fo.hodge_level(bundle, n)
        assert level.super.homology()[n % 2] == hc[n], (n, hc)


def test_hodge_level_one_is_the_x_complex():
    xc = fo.x_complex_free(1, 2)
    bundle = fo.build_omega(xc.bundle.algebra, max_degree=2, reduced=True)
    # boundaries of two-forms span exactly the twisted trace relations
    assert Subspace.from_vectors(bundle.dim(1),
                                 bundle.b_mat(2).columns()) == \
        bundle.rel_natural(1)
    level = fo.hodge_level(bundle, 1)
    assert level.quots[0].dim == xc.q0.dim
    assert level.quots[1].dim == xc.q1.dim
    assert level.super.d_eo == xc.nd
    assert level.super.d_oe == xc.bm


# ---------------------------------------------------------------------------
# the X-complex of free algebras
# ---------------------------------------------------------------------------

def test_x_complex_concentration_trivial():
    xc = fo.x_complex_free(1, 3)
    assert xc.homology() == {0: 3, 1: 0}      # one class per word length
    xc2 = fo.x_complex_free(2, 2)
    assert xc2.homology() == {0: 5, 1: 0}     # 2 + 3 cyclic words


def test_x_complex_degree_zero_is_the_trace_quotient():
    xc = fo.x_complex_free(2, 2)
    assert xc.homology()[0] == fo.natural_zero_form_dim(xc)


def test_x_complex_concentration_twisted():
    hz = lib.group_algebra_z2()
    xc = fo.x_complex_free(1, 3, hz, lib.sayd_z2_stable(),
                           lib.sign_action_z2())
    hom = xc.homology()
    assert hom[1] == 0
    assert hom[0] == fo.natural_zero_form_dim(xc)


def test_x_complex_lengths_match_cyclic_pieces():
    h = lib.trivial_hopf()
    a = lib.free_module_algebra(1, 3, h, None)
    data = cy.build_algebra_cyclic_homology(h, a, lib.sayd_trivial(h), 3)
    xc = fo.x_complex_free(1, 3)
    for ell in (1, 2, 3):
        piece = cy.cohomology(cy.graded_piece(data, ell), "cyclic")
        assert xc.homology_by_length(ell) == {0: piece[0], 1: piece[1]}


# ---------------------------------------------------------------------------
# the small complex
# ---------------------------------------------------------------------------

def test_small_complex_identities_trivial():
    sc = fo.free_small_complex(1, 3)
    assert (sc.b1 @ sc.b2).is_zero()
    assert sc.verify() == []


def test_small_complex_identities_twisted():
    hz = lib.group_algebra_z2()
    sc = fo.free_small_complex(1, 3, hz, lib.sayd_z2_stable(),
                               lib.sign_action_z2())
    assert (sc.b1 @ sc.b2).is_zero()
    assert sc.verify() == []


def test_small_complex_gamma_kills_the_unit():
    sc = fo.free_small_complex(2, 2)
    assert not any(c == 0 for (_, c) in sc.gamma.entries)


def test_small_complex_agrees_with_x_complex():
    sc = fo.free_small_complex(1, 3)
    xc = fo.x_complex_free(1, 3)
    assert fo.small_x_agreement(sc, xc) == []


def test_small_complex_agrees_with_x_complex_twisted():
    hz = lib.group_algebra_z2()
    args = (1, 3, hz, lib.sayd_z2_stable(), lib.sign_action_z2())
    assert fo.small_x_agreement(fo.free_small_complex(*args),
                                fo.x_complex_free(*args)) == []


# ---------------------------------------------------------------------------
# bar spaces and the cotrace
# ---------------------------------------------------------------------------

def test_bar_codifferential_squares_to_zero():
    h = lib.trivial_hopf()
    bb = fo.bar_and_cotrace(lib.algebra_z2(h, with_c_action=False), 4)
    for p in (3, 4):
        assert (bb.codiff(p - 1) @ bb.codiff(p)).is_zero()


def test_cotrace_lands_in_cyclic_invariants():
    h = lib.trivial_hopf()
    bb = fo.bar_and_cotrace(lib.algebra_z2(h, with_c_action=False), 3)
    assert bb.n_mat(1) == SparseMatrix.identity(2)
    for p in (2, 3):
        one = SparseMatrix.identity(bb.dim(p))
        invariants = Subspace.from_vectors(
            bb.dim(p), [v for v in _kernel_cols(one - bb.t_mat(p))])
        assert bb.nat(p) == invariants
    # signed shift in degree 2: a single invariant line
    assert bb.nat(2).dim == 1


def _kernel_cols(m):
    from hopfcyc.exactla import kernel_basis
    return kernel_basis(m).basis.columns()


# ---------------------------------------------------------------------------
# de Rham vanishing for free algebras
# ---------------------------------------------------------------------------

def test_de_rham_ground_field(k_reduced):
    assert fo.de_rham_homology(k_reduced) == {0: 1, 1: 0, 2: 0, 3: 0}


def test_de_rham_free_algebra_vanishes():
    h = lib.trivial_hopf()
    a = lib.free_module_algebra(1, 3, h, None)
    bundle = fo.build_omega(a, max_degree=3, reduced=True)
    for ell in (1, 2, 3):
        hom = fo.de_rham_homology(bundle, ell)
        assert all(v == 0 for v in hom.values()), (ell, hom)


def test_de_rham_free_algebra_vanishes_twisted(twisted_free):
    _, _, _, bundle = twisted_free
    for ell in (1, 2):
        hom = fo.de_rham_homology(bundle, ell)
        assert all(v == 0 for v in hom.values()), (ell, hom)


# ---------------------------------------------------------------------------
# the ideal filtration of the X-complex
# ---------------------------------------------------------------------------

def _word_ideal(a, letter=0):
    """Span of the basis words containing a given letter."""
    words = fo._word_list(_letters(a), a.degrees[-1])
    return Subspace.from_vectors(
        a.dim, [{i: F(1)} for i, w in enumerate(words) if letter in w])


def _letters(a):
    return sum(1 for d in a.degrees if d == 1)


def test_x_filtration_checks_pass():
    a = lib.free_module_algebra(2, 2)
    bundle = fo.build_omega(a, max_degree=1, reduced=True)
    ideal = _word_ideal(a)
    assert fo.check_x_filtration(bundle, ideal, 4) == []


def test_x_filtration_high_powers_vanish():
    a = lib.free_module_algebra(2, 2)
    bundle = fo.build_omega(a, max_degree=1, reduced=True)
    even, odd = fo.x_filtration(bundle, _word_ideal(a), 5)
    assert even.dim == 0          # the cube of the ideal is zero
    assert odd.dim > 0            # but I^2 dI still is not


def test_x_filtration_rejects_non_ideal():
    a = lib.free_module_algebra(2, 2)
    bundle = fo.build_omega(a, max_degree=1, reduced=True)
    not_ideal = Subspace.from_vectors(a.dim, [{1: F(1)}])  # the letter alone
    with pytest.raises(ValueError):
        fo.x_filtration(bundle, not_ideal, 1)


def test_x_filtration_rejects_unstable_ideal():
    hz = lib.group_algebra_z2()
    swap = [[[F(1), F(0)], [F(0), F(1)]], [[F(0), F(1)], [F(1), F(0)]]]
    a = lib.free_module_algebra(2, 2, hz, swap)
    bundle = fo.build_omega(a, hz, lib.sayd_z2_stable(),
                            max_degree=1, reduced=True)
    with pytest.raises(DescentFailure) as exc:
        fo.x_filtration(bundle, _word_ideal(a), 1)
    assert exc.value.witness
