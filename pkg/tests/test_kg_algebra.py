"""
Tests for K(G), the algebra of functions on a finite groupoid.
"""

import pytest

from exact_linalg import ONE, FinVec, scalar
from groupoid import Groupoid, GroupoidError, pair_groupoid
from integrals import enumerate_left_integrals, enumerate_right_integrals, is_left_invariant, is_right_invariant
from kg_algebra import build_kg
from tests.conftest import GROUPOID_FILES
from wmha_core import WmhaError


class TestStructure:
    def test_pointwise_product(self, kg):
        W = kg["pair2"]
        assert W.product("(1,2)", "(1,2)") == FinVec.basis("(1,2)")
        assert W.product("(1,2)", "(2,1)") == FinVec()
        assert W.unit() == FinVec((p, ONE) for p in W.basis)

    def test_coproduct_sums_over_factorisations(self, kg):
        W = kg["pair2"]
        # (1,2) = (1,1)(1,2) = (1,2)(2,2)
        assert W.coproduct_basis("(1,2)") == FinVec({
            ("(1,1)", "(1,2)"): 1,
            ("(1,2)", "(2,2)"): 1,
        })

    def test_counit_on_units(self, kg):
        W = kg["z2_swap_action"]
        assert W.counit(W.unit()) == scalar(2)
        assert W.counit_basis("a|x") == scalar(0)

    def test_canonical_idempotent_is_composable_pairs(self, groupoids, kg):
        G = groupoids["pair2"]
        E = kg["pair2"].idempotent_element()
        assert E == FinVec((pair, ONE) for pair in G.table)
        assert len(E) == 8

    def test_group_case_has_unit_idempotent(self, kg):
        W = kg["z2"]
        assert W.idempotent_element() == W.tensor_unit()

    def test_invalid_groupoid_is_refused(self):
        G = pair_groupoid(2)
        table = dict(G.table)
        del table[("(1,2)", "(2,1)")]
        with pytest.raises(GroupoidError):
            build_kg(Groupoid(G.arrows, G.units, G.source, G.target, G.inverse, table, "broken"))


# ============================================================================
# Integrals
# ============================================================================


class TestIntegrals:
    """Left integrals are weights constant on source fibres."""

    @pytest.mark.parametrize("name", GROUPOID_FILES)
    def test_integral_space_has_one_dimension_per_unit(self, groupoids, kg, name):
        units = len(groupoids[name].units)
        assert len(enumerate_left_integrals(kg[name])) == units
        assert len(enumerate_right_integrals(kg[name])) == units

    def test_fibre_weights_give_left_integrals(self, kg):
        W = kg["pair3"]
        weights = W.weights_on_fibres({"(1,1)": 1, "(2,2)": 2, "(3,3)": "1/2"})
        phi = W.left_integral(weights)
        assert phi.at("(2,1)") == ONE
        assert phi.at("(1,3)") == scalar("1/2")
        assert is_left_invariant(phi, W)

    def test_target_weights_give_right_integrals(self, kg):
        W = kg["pair3"]
        weights = W.weights_on_fibres({"(1,1)": 4, "(2,2)": 5, "(3,3)": 6}, side="target")
        psi = W.right_integral(weights)
        assert is_right_invariant(psi, W)
        assert not is_left_invariant(psi, W)

    def test_weights_must_be_constant_on_fibres(self, kg):
        W = kg["pair2"]
        with pytest.raises(WmhaError):
            W.left_integral({"(1,1)": 1, "(2,1)": 2, "(1,2)": 1, "(2,2)": 1})

    def test_unknown_arrows_are_refused(self, kg):
        with pytest.raises(WmhaError):
            kg["pair2"].left_integral({"(7,7)": 1})

    @pytest.mark.parametrize("name", GROUPOID_FILES)
    def test_uniform_integral_is_two_sided(self, kg, name):
        W = kg[name]
        phi = W.designated_integral()
        assert phi.values == W.unit()
        assert is_left_invariant(phi, W)
        assert is_right_invariant(phi, W)
