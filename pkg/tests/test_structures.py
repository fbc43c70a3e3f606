"""Validation tests for the shipped algebraic structures and the JSON loader."""

import json
from fractions import Fraction

import pytest

from hopfcyc import library as lib
from hopfcyc.structures import (
    Coalgebra,
    ParseError,
    antipode_antihomomorphism,
    load_structure,
    validate_coalgebra,
    validate_hopf,
    validate_module_actions,
    validate_sayd,
)

F = Fraction


# ---------------------------------------------------------------------------
# coalgebras
# ---------------------------------------------------------------------------

def test_point_coalgebra_valid():
    rep = validate_coalgebra(lib.point_coalgebra(lib.trivial_hopf()).coalgebra)
    assert rep.passed


def test_broken_coalgebra_coassociativity():
    c = Coalgebra(dim=2, delta=[[(0, 1, F(1))], [(1, 1, F(1))]],
                  counit=[F(1), F(1)])
    rep = validate_coalgebra(c)
    assert not rep.passed
    assert any("basis index 0" in v for v in rep.violations)


def test_comatrix_coalgebra_valid():
    rep = validate_coalgebra(lib.comatrix_coalgebra(lib.trivial_hopf()).coalgebra)
    assert rep.passed


# ---------------------------------------------------------------------------
# Hopf algebras
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("build", [lib.trivial_hopf, lib.group_algebra_z2,
                                   lib.sweedler_hopf])
def test_hopf_fixtures_valid(build):
    h = build()
    rep = validate_hopf(h)
    assert rep.passed, rep.violations
    assert antipode_antihomomorphism(h)


def test_hopf_zeroed_antipode_fails():
    h = lib.group_algebra_z2()
    h.antipode = [[F(0), F(0)], [F(0), F(0)]]
    h.antipode_inv = None
    rep = validate_hopf(h)
    assert not rep.passed
    assert any("antipode" in v for v in rep.violations)


def test_sweedler_antipode_order_four():
    h = lib.sweedler_hopf()
    s2 = [[sum(h.antipode[r][t] * h.antipode[t][c] for t in range(4))
           for c in range(4)] for r in range(4)]
    # S^2 = conjugation by g: fixes 1, g and negates x, gx
    assert s2[2][2] == -1 and s2[3][3] == -1 and s2[0][0] == 1 and s2[1][1] == 1


# ---------------------------------------------------------------------------
# SAYD modules
# ---------------------------------------------------------------------------

def test_sayd_trivial():
    h = lib.trivial_hopf()
    rep = validate_sayd(h, lib.sayd_trivial(h))
    assert rep.passed and rep.flags == {"ayd": True, "stable": True}


def test_sayd_z2_stable_and_nonstable():
    h = lib.group_algebra_z2()
    rep = validate_sayd(h, lib.sayd_z2_stable())
    assert rep.passed and rep.flags["ayd"] and rep.flags["stable"]
    rep = validate_sayd(h, lib.sayd_z2_nonstable())
    assert rep.passed and rep.flags["ayd"] and not rep.flags["stable"]


def test_sayd_broken_comodule():
    h = lib.group_algebra_z2()
    rep = validate_sayd(h, lib.sayd_z2_broken())
    assert not rep.passed


def test_sweedler_modular_pairs():
    h = lib.sweedler_hopf()
    good = {(1, 1), (-1, 0)}
    for ds in (1, -1):
        for si in (0, 1):
            rep = validate_sayd(h, lib.sayd_sweedler_modular_pair(ds, si))
            assert rep.flags["ayd"] == ((ds, si) in good)


# ---------------------------------------------------------------------------
# module actions
# ---------------------------------------------------------------------------

def test_trivial_actions_pass():
    h = lib.trivial_hopf()
    rep = validate_module_actions(h, lib.point_coalgebra(h),
                                  lib.algebra_z2(h, with_c_action=False))
    assert rep.passed


def test_conjugation_action_z2():
    h = lib.group_algebra_z2()
    rep = validate_module_actions(h, lib.coalgebra_z2(h), lib.algebra_z2(h))
    assert rep.passed, rep.violations


def test_conjugation_without_antipode_fails():
    h = lib.group_algebra_z2()
    rep = validate_module_actions(h, lib.coalgebra_z2(h),
                                  lib.algebra_z2(h, broken_action=True))
    assert not rep.passed
    assert any("breaks products" in v for v in rep.violations)


def test_free_algebra_with_sign_action():
    h = lib.group_algebra_z2()
    a = lib.free_module_algebra(1, 3, h, lib.sign_action_z2())
    rep = validate_module_actions(h, None, a)
    assert rep.passed, rep.violations
    assert a.dim == 4  # words of length 0..3 over one letter


# ---------------------------------------------------------------------------
# iterated coproduct
# ---------------------------------------------------------------------------

def test_iterated_coproduct_identity_at_zero():
    h = lib.sweedler_hopf()
    x = {2: F(1)}
    assert h.iterated_coproduct(x, 0) == {(2,): F(1)}


def test_iterated_coproduct_grouplike():
    h = lib.group_algebra_z2()
    assert h.iterated_coproduct({1: F(1)}, 3) == {(1, 1, 1, 1): F(1)}


def test_iterated_coproduct_order_independent():
    h = lib.sweedler_hopf()
    for k in range(4):
        x = {k: F(1)}
        assert h.iterated_coproduct(x, 2) == h.iterated_coproduct_right(x, 2)


# ---------------------------------------------------------------------------
# JSON loading
# ---------------------------------------------------------------------------

def test_load_point_document():
    bundle = load_structure(json.dumps(lib.document_point()))
    assert bundle.hopf.dim == 1
    assert "C" in bundle.coalgebras and "M" in bundle.sayd_modules
    assert validate_hopf(bundle.hopf).passed


def test_load_z2_document_roundtrip():
    bundle = load_structure(json.dumps(lib.document_z2()))
    assert validate_hopf(bundle.hopf).passed
    rep = validate_sayd(bundle.hopf, bundle.sayd_modules["M_sign"])
    assert rep.flags["ayd"] and not rep.flags["stable"]
    a = bundle.algebras["A"]
    assert a.c_action is not None  # cross-reference resolved
    rep = validate_module_actions(bundle.hopf, bundle.coalgebras["C"], a)
    assert rep.passed


def test_load_out_of_range_index():
    doc = lib.document_point()
    doc["hopf"]["delta"][0] = [[0, 5, "1"]]
    with pytest.raises(ParseError) as exc:
        load_structure(json.dumps(doc))
    assert "delta" in str(exc.value)


def test_load_bad_schema_version():
    doc = lib.document_point()
    doc["schema_version"] = 99
    with pytest.raises(ParseError):
        load_structure(json.dumps(doc))


def test_load_bad_scalar():
    doc = lib.document_point()
    doc["hopf"]["counit"] = ["1/0"]
    with pytest.raises(ParseError):
        load_structure(json.dumps(doc))


def test_load_unresolved_action_reference():
    doc = lib.document_z2()
    doc["actions"][0]["algebra"] = "nope"
    with pytest.raises(ParseError):
        load_structure(json.dumps(doc))


def test_sweedler_document():
    bundle = load_structure(json.dumps(lib.document_sweedler()))
    assert validate_hopf(bundle.hopf).passed
    rep = validate_sayd(bundle.hopf, bundle.sayd_modules["M"])
    assert rep.passed and rep.flags["ayd"]
