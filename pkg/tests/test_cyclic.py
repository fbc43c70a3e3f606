"""Cyclic (co)homology of the shipped module coalgebras and module algebras.

Dimension oracles used below are classical: for the ground field k one has
HH = k in degree 0 only and HC = k in every even degree; for the group
algebra k[Z/2] over the rationals both double; for a (truncated) tensor
algebra the reduced cyclic homology is concentrated in degree 0, one class
per cyclic word length, and Hochschild homology of k[v] is k in degrees 0
and 1 for each positive word length.
"""

import pytest
from fractions import Fraction

from hopfcyc import library as lib
from hopfcyc import cyclic as cy
from hopfcyc.complexes import IdentityFailure
from hopfcyc.exactla import DescentFailure, rank

F = Fraction


# ---------------------------------------------------------------------------
# coalgebra side (cochain direction)
# ---------------------------------------------------------------------------

def test_point_coalgebra_cohomology():
    h = lib.trivial_hopf()
    d = cy.build_coalgebra_cocyclic(h, lib.point_coalgebra(h),
                                    lib.sayd_trivial(h), 5)
    assert d.dims == {n: 1 for n in range(6)}
    assert cy.cohomology(d, "hochschild") == {0: 1, 1: 0, 2: 0, 3: 0, 4: 0}
    assert cy.cohomology(d, "cyclic") == {0: 1, 1: 0, 2: 1, 3: 0, 4: 1}
    assert cy.lambda_complex_dims(d) == cy.cohomology(d, "cyclic")


def test_group_coalgebra_trivial_coefficients():
    h = lib.trivial_hopf()
    c = lib.coalgebra_z2(h)
    d = cy.build_coalgebra_cocyclic(h, c, lib.sayd_trivial(h), 5)
    assert d.dims == {n: 2 ** (n + 1) for n in range(6)}
    assert cy.cohomology(d, "hochschild") == {0: 2, 1: 0, 2: 0, 3: 0, 4: 0}
    assert cy.cohomology(d, "cyclic") == {0: 2, 1: 0, 2: 2, 3: 0, 4: 2}
    assert cy.lambda_complex_dims(d) == cy.cohomology(d, "cyclic")


def test_group_coalgebra_stable_coefficients_vanish():
    hz = lib.group_algebra_z2()
    d = cy.build_coalgebra_cocyclic(hz, lib.coalgebra_z2(hz),
                                    lib.sayd_z2_stable(), 4)
    assert d.dims == {n: 2 ** n for n in range(5)}
    hc = cy.cohomology(d, "cyclic")
    assert hc == {n: 0 for n in hc}
    assert cy.lambda_complex_dims(d) == hc


def test_stable_coefficients_satisfy_tau_power():
    hz = lib.group_algebra_z2()
    d = cy.build_coalgebra_cocyclic(hz, lib.coalgebra_z2(hz),
                                    lib.sayd_z2_stable(), 4)
    assert cy.verify_identities(d, check_tau_power=True) == []


def test_nonstable_coefficients_break_tau_power():
    hz = lib.group_algebra_z2()
    d = cy.build_coalgebra_cocyclic(hz, lib.coalgebra_z2(hz),
                                    lib.sayd_z2_nonstable(), 3)
    bad = cy.verify_identities(d, check_tau_power=True)
    assert bad == [f"tau_{n}^{n + 1} != id" for n in range(4)]
    # the simplicial/cyclic relations themselves still hold
    assert cy.verify_identities(d) == []


def test_nonstable_coefficients_have_no_mixed_complex():
    hz = lib.group_algebra_z2()
    d = cy.build_coalgebra_cocyclic(hz, lib.coalgebra_z2(hz),
                                    lib.sayd_z2_nonstable(), 3)
    with pytest.raises(IdentityFailure):
        cy.cohomology(d, "cyclic")
    # the Hochschild complex is still well defined
    assert set(cy.cohomology(d, "hochschild")) == {0, 1, 2}


def test_nonayd_coefficients_fail_descent_with_witness():
    hz = lib.group_algebra_z2()
    with pytest.raises(DescentFailure) as exc:
        cy.build_coalgebra_cocyclic(hz, lib.coalgebra_z2(hz),
                                    lib.sayd_z2_nonayd(), 2)
    assert exc.value.witness  # explicit offending relation vector


def test_verify_descent_reports_failures():
    hz = lib.group_algebra_z2()
    m = lib.sayd_z2_nonayd()
    c = lib.coalgebra_z2(hz)
    from hopfcyc.complexes import TensorSpace, build_operator
    space = TensorSpace([m.dim, c.coalgebra.dim])
    rel = cy.diagonal_h_relations(hz, m, c.act, c.coalgebra.dim, 1)

    def tau(multi):
        mi, leg = multi
        out = {}
        for (hm, m0), cm in m.coact({mi: F(1)}).items():
            for k, ca in c.act({hm: F(1)}, {leg: F(1)}).items():
                out[(m0, k)] = out.get((m0, k), F(0)) + cm * ca
        return out

    op = build_operator(space, space, tau)
    ok, failures = cy.verify_descent([("tau_0", op, rel, rel)])
    assert not ok and failures[0][0] == "tau_0"


# ---------------------------------------------------------------------------
# S-operation and periodicity
# ---------------------------------------------------------------------------

def test_s_operation_is_iso_on_stabilized_range():
    h = lib.trivial_hopf()
    d = cy.build_coalgebra_cocyclic(h, lib.coalgebra_z2(h),
                                    lib.sayd_trivial(h), 5)
    s = cy.s_matrix(d, 0)   # HC^0 -> HC^2
    assert (s.rows, s.cols) == (2, 2) and rank(s) == 2


def test_periodic_point_coalgebra():
    h = lib.trivial_hopf()
    d = cy.build_coalgebra_cocyclic(h, lib.point_coalgebra(h),
                                    lib.sayd_trivial(h), 7)
    assert cy.cohomology(d, "periodic") == {0: 1, 1: 0}


def test_periodic_unstabilized_at_low_degree():
    h = lib.trivial_hopf()
    d = cy.build_coalgebra_cocyclic(h, lib.point_coalgebra(h),
                                    lib.sayd_trivial(h), 3)
    with pytest.raises(cy.Unstabilized):
        cy.cohomology(d, "periodic")


# ---------------------------------------------------------------------------
# algebra side, cochain direction (functionals)
# ---------------------------------------------------------------------------

def test_group_algebra_cocyclic_cohomology():
    h = lib.trivial_hopf()
    a = lib.algebra_z2(h, with_c_action=False)
    d = cy.build_algebra_cocyclic(h, a, lib.sayd_trivial(h), 4)
    assert cy.cohomology(d, "hochschild") == {0: 2, 1: 0, 2: 0, 3: 0}
    assert cy.cohomology(d, "cyclic") == {0: 2, 1: 0, 2: 2, 3: 0}
    assert cy.lambda_complex_dims(d) == cy.cohomology(d, "cyclic")


def test_sweedler_adjoint_cocyclic():
    hs = lib.sweedler_hopf()
    a = lib.algebra_from_hopf(hs)
    d = cy.build_algebra_cocyclic(hs, a, lib.sayd_sweedler_modular_pair(), 3)
    assert d.dims == {0: 2, 1: 5, 2: 18, 3: 68}
    assert cy.cohomology(d, "hochschild") == {0: 2, 1: 0, 2: 1}


# ---------------------------------------------------------------------------
# algebra side, chain direction
# ---------------------------------------------------------------------------

def test_group_algebra_cyclic_homology():
    h = lib.trivial_hopf()
    a = lib.algebra_z2(h, with_c_action=False)
    d = cy.build_algebra_cyclic_homology(h, a, lib.sayd_trivial(h), 4)
    assert cy.cohomology(d, "hochschild") == {0: 2, 1: 0, 2: 0, 3: 0}
    assert cy.cohomology(d, "cyclic") == {0: 2, 1: 0, 2: 2, 3: 0}
    assert cy.lambda_complex_dims(d) == cy.cohomology(d, "cyclic")


def test_truncated_tensor_algebra_dimensions():
    h = lib.trivial_hopf()
    a = lib.free_module_algebra(1, 3, h, None)
    d = cy.build_algebra_cyclic_homology(h, a, lib.sayd_trivial(h), 3)
    # each leg independently runs over words of length 0..3
    assert d.dims == {n: 4 ** (n + 1) for n in range(4)}
    assert d.coord_degrees is not None


def test_truncated_tensor_algebra_graded_pieces():
    h = lib.trivial_hopf()
    a = lib.free_module_algebra(1, 3, h, None)
    d = cy.build_algebra_cyclic_homology(h, a, lib.sayd_trivial(h), 3)
    zero = cy.graded_piece(d, 0)
    assert cy.cohomology(zero, "cyclic") == {0: 1, 1: 0, 2: 1}
    # faithful lengths 1..cap: reduced HC concentrated in degree 0,
    # HH is that of the polynomial ring (degrees 0 and 1)
    for ell in (1, 2, 3):
        g = cy.graded_piece(d, ell)
        assert g.dims[0] == 1
        assert cy.cohomology(g, "hochschild") == {0: 1, 1: 1, 2: 0}
        assert cy.cohomology(g, "cyclic") == {0: 1, 1: 0, 2: 0}
        assert cy.lambda_complex_dims(g) == {0: 1, 1: 0, 2: 0}


def test_graded_piece_requires_grading():
    h = lib.trivial_hopf()
    a = lib.algebra_z2(h, with_c_action=False)
    d = cy.build_algebra_cyclic_homology(h, a, lib.sayd_trivial(h), 2)
    with pytest.raises(ValueError):
        cy.graded_piece(d, 1)


def test_sign_action_kills_odd_lengths():
    hz = lib.group_algebra_z2()
    a = lib.free_module_algebra(1, 3, hz, lib.sign_action_z2())
    d = cy.build_algebra_cyclic_homology(hz, a, lib.sayd_z2_stable(), 3)
    assert cy.graded_piece(d, 1).dims == {n: 0 for n in range(4)}
    assert cy.graded_piece(d, 3).dims == {n: 0 for n in range(4)}
