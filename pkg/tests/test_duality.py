"""
Tests for the dual Â, its pairing laws, dual integrals and biduality.
"""

import pytest

from duality import (
    DualityError,
    bidual,
    biduality_iso,
    build_dual,
    check_dual,
    check_dual_integrals,
    dual_integral_family,
    dual_multiplier,
    dual_to_cg_witness,
    gamma_s,
    is_dual_multiplier,
    single_faithful_dual_integral,
    source_target_dualities,
)
from exact_linalg import ONE, FinVec
from tests.conftest import GROUPOID_FILES, corpus_refs, settings_for
from wmha_core import check_axioms, check_isomorphism

SMALL = ["pair2", "z2", "z2_swap_action", "union_z2_z3"]

# generic duals over the groupoid corpus and the bijection separability data
DUALS = corpus_refs(sep=("bijection2", "bijection3"))


class TestDualOfFunctions:
    """The dual of K(G) is the groupoid algebra."""

    @pytest.mark.parametrize("name", GROUPOID_FILES)
    def test_witness_against_groupoid_algebra(self, groupoids, name):
        D, C, table, report = dual_to_cg_witness(groupoids[name])
        assert report.ok, report.failures()
        assert set(table) == set(groupoids[name].arrows)

    def test_dual_product_is_composition(self, dual_of_kg):
        D = dual_of_kg("pair2")
        assert D.product("(1,2)", "(2,1)") == FinVec.basis("(1,1)")
        assert D.product("(2,1)", "(2,1)") == FinVec()
        assert D.coproduct_basis("(1,2)") == FinVec.basis(("(1,2)", "(1,2)"))

    @pytest.mark.parametrize("ref", DUALS)
    def test_unit_is_the_primal_counit(self, instance, dual_of, ref):
        W, D = instance(ref), dual_of(ref)
        assert D.unit() == FinVec((k, W.counit_basis(k)) for k in W.basis)
        for k in D.basis:
            assert D.multiply(D.unit(), D.element(k)) == D.element(k)
            assert D.multiply(D.element(k), D.unit()) == D.element(k)

    def test_counit_is_the_dual_unit(self, dual_of_kg):
        D = dual_of_kg("pair2")
        assert D.unit() == FinVec({"(1,1)": 1, "(2,2)": 1})
        assert all(D.counit_basis(k) == ONE for k in D.basis)

    def test_single_integral_is_the_unit_indicator(self, groupoids, dual_of_kg):
        D = dual_of_kg("union_z2_z3")
        hat = single_faithful_dual_integral(D)
        assert hat.values == FinVec((e, ONE) for e in groupoids["union_z2_z3"].units)


# ============================================================================
# Pairing laws
# ============================================================================


class TestPairingLaws:
    @pytest.mark.parametrize("name", SMALL)
    def test_dual_of_functions(self, dual_of_kg, name):
        report = check_dual(dual_of_kg(name))
        assert report.ok, report.failures()

    def test_dual_of_groupoid_algebra(self, cg):
        D = build_dual(cg["pair2"])
        assert check_dual(D).ok
        assert check_axioms(D).ok

    @pytest.mark.parametrize("ref", DUALS)
    def test_source_target_dualities(self, instance, dual_of, ref):
        report = source_target_dualities(instance(ref), dual_of(ref), settings_for(ref))
        assert report.ok, report.failures()

    def test_dual_elements_act_as_multipliers(self, dual_of_kg):
        D = dual_of_kg("pair2")
        for k in D.basis:
            omega = D.element(k)
            assert is_dual_multiplier(D, omega)
            acting = dual_multiplier(D, omega)
            for j in D.basis:
                assert acting.left_act(D.element(j)) == D.multiply(omega, D.element(j))
                assert acting.right_act(D.element(j)) == D.multiply(D.element(j), omega)

    def test_gamma_s_of_the_unit(self, kg, dual_of_kg):
        W, D = kg["pair2"], dual_of_kg("pair2")
        assert gamma_s(W, D, W.unit()) == D.unit()


# ============================================================================
# Dual integrals
# ============================================================================


class TestDualIntegrals:
    @pytest.mark.parametrize("ref", DUALS)
    def test_family_and_single_integral(self, dual_of, ref):
        verdicts = check_dual_integrals(dual_of(ref))
        assert all(verdicts.values()), verdicts
        assert "single_faithful" in verdicts

    def test_family_without_a_single_integral(self, kg):
        W = kg["pair2"]
        fibres = [
            W.left_integral({"(1,1)": 1, "(2,1)": 1}),
            W.left_integral({"(1,2)": 1, "(2,2)": 1}),
        ]
        D = build_dual(W, fibres)
        assert D.designated is None
        verdicts = check_dual_integrals(D)
        assert verdicts["family_right_invariant"]
        assert verdicts["family_faithful"]
        assert any(dual_integral_family(D))
        with pytest.raises(DualityError):
            single_faithful_dual_integral(D)

    def test_non_faithful_set_is_refused(self, kg):
        W = kg["pair2"]
        with pytest.raises(DualityError):
            build_dual(W, [W.left_integral({"(1,1)": 1, "(2,1)": 1})])

    def test_unknown_form(self, dual_of_kg):
        with pytest.raises(ValueError):
            dual_of_kg("z2").represent(FinVec.basis("e"), "χ(·a)")


# ============================================================================
# Biduality
# ============================================================================


class TestBiduality:
    @pytest.mark.parametrize("ref", DUALS)
    def test_isomorphic_to_the_primal(self, instance, ref):
        W = instance(ref)
        DD = bidual(W)
        report = check_isomorphism(W, DD, biduality_iso(W, DD), settings_for(ref))
        assert report.ok, report.failures()
