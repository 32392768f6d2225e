"""
Tests for CG, the groupoid algebra.
"""

import pytest

from exact_linalg import ONE, ZERO, FinVec, scalar
from integrals import enumerate_left_integrals, is_left_invariant, is_right_invariant, kernel_faithful
from cg_algebra import smallest_idempotent_check
from tests.conftest import GROUPOID_FILES
from wmha_core import WmhaError


class TestStructure:
    def test_composition_product(self, cg):
        W = cg["pair2"]
        assert W.product("(1,2)", "(2,1)") == FinVec.basis("(1,1)")
        assert W.product("(1,2)", "(1,2)") == FinVec()
        assert W.unit() == FinVec({"(1,1)": 1, "(2,2)": 1})

    def test_grouplike_coproduct(self, cg):
        W = cg["z2_swap_action"]
        assert W.coproduct_basis("a|x") == FinVec.basis(("a|x", "a|x"))
        assert W.counit_basis("a|x") == ONE
        assert W.antipode_basis("a|x") == FinVec.basis("a|y")

    def test_canonical_idempotent_sums_over_units(self, groupoids, cg):
        G = groupoids["union_z2_z3"]
        E = cg["union_z2_z3"].idempotent_element()
        assert E == FinVec(((e, e), ONE) for e in G.units)

    @pytest.mark.parametrize("name", GROUPOID_FILES)
    def test_E_is_the_smallest_idempotent(self, cg, name):
        assert smallest_idempotent_check(cg[name])


class TestIntegrals:
    @pytest.mark.parametrize("name", GROUPOID_FILES)
    def test_unit_integral(self, cg, name):
        W = cg[name]
        phi = W.designated_integral()
        assert is_left_invariant(phi, W)
        assert is_right_invariant(phi, W)
        assert kernel_faithful([phi], W)

    def test_integral_space_matches_units(self, groupoids, cg):
        assert len(enumerate_left_integrals(cg["bundle_z2_z2"])) == len(groupoids["bundle_z2_z2"].units)

    def test_weighted_unit_integral(self, cg):
        W = cg["pair2"]
        phi = W.unit_integral({"(1,1)": 2, "(2,2)": 3})
        assert phi.at("(2,2)") == scalar(3)
        assert phi.at("(1,2)") == ZERO

    def test_weights_off_the_units(self, cg):
        with pytest.raises(WmhaError):
            cg["pair2"].unit_integral({"(1,2)": 1})
