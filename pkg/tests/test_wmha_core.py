"""
Tests for the Wmha core: algebras, derived maps and the law runner.
"""

import pytest

from exact_linalg import ONE, FinVec, LinMap
from kg_algebra import KgAlgebra
from tests.conftest import GROUPOID_FILES
from wmha_core import (
    CheckSettings,
    StructureAlgebra,
    WmhaError,
    check_axioms,
    check_isomorphism,
    law_tuples,
)


def indicator(*keys) -> FinVec:
    return FinVec((k, ONE) for k in keys)


MATRIX_TABLE = {
    (f"e{i}{j}", f"e{j}{k}"): {f"e{i}{k}": 1}
    for i in "12" for j in "12" for k in "12"
}


class IdentityAntipode(KgAlgebra):
    """K(G) with S replaced by the identity map."""

    def antipode_basis(self, key):
        return FinVec.basis(key)

    def antipode_inverse_basis(self, key):
        return FinVec.basis(key)


# ============================================================================
# Algebras
# ============================================================================


class TestStructureAlgebra:
    def test_matrix_unit(self):
        M = StructureAlgebra(["e11", "e12", "e21", "e22"], MATRIX_TABLE, name="M2")
        assert M.unit() == indicator("e11", "e22")
        assert M.multiply(FinVec.basis("e12"), FinVec.basis("e21")) == FinVec.basis("e11")
        assert M.multiply(FinVec.basis("e21"), FinVec.basis("e21")) == FinVec()

    def test_local_unit_of_a_corner(self):
        M = StructureAlgebra(["e11", "e12", "e21", "e22"], MATRIX_TABLE)
        assert M.local_unit([FinVec.basis("e11")]) == FinVec.basis("e11")

    def test_nilpotent_algebra_has_no_unit(self):
        N = StructureAlgebra(["n"], {}, name="nil")
        with pytest.raises(WmhaError):
            N.unit()


# ============================================================================
# Axioms
# ============================================================================


class TestAxioms:
    """Every law holds on the corpus; broken structure is caught."""

    @pytest.mark.parametrize("name", GROUPOID_FILES)
    def test_function_algebras(self, kg, name):
        report = check_axioms(kg[name])
        assert report.ok, report.failures()

    @pytest.mark.parametrize("name", GROUPOID_FILES)
    def test_groupoid_algebras(self, cg, name):
        report = check_axioms(cg[name])
        assert report.ok, report.failures()

    def test_identity_antipode_fails(self, groupoids):
        broken = IdentityAntipode(groupoids["pair2"])
        report = check_axioms(broken, names=["antipode identity", "antipode anti-coalgebra"])
        failed = report.result("antipode identity")
        assert failed.status == "fail"
        assert failed.witness is not None
        assert failed.detail == "Σ a1 S(a2) a3 != a"

    def test_named_subset_keeps_registry_order(self, kg):
        report = check_axioms(kg["z2"], names=["counit", "associativity"])
        assert [r.name for r in report.results] == ["associativity", "counit"]

    def test_parallel_run_matches_serial(self, kg):
        serial = check_axioms(kg["pair2"])
        parallel = check_axioms(kg["pair2"], CheckSettings(jobs=2))
        assert serial.results == parallel.results


# ============================================================================
# Source and target maps
# ============================================================================


class TestSourceTarget:
    """ε_s and ε_t on K of the pair groupoid on two points."""

    def test_source_of_a_unit(self, kg):
        W = kg["pair2"]
        assert W.source_element(FinVec.basis("(2,2)")) == indicator("(1,2)", "(2,2)")

    def test_source_of_a_non_unit_vanishes(self, kg):
        W = kg["pair2"]
        assert W.source_element(FinVec.basis("(1,2)")) == FinVec()

    def test_target_of_a_unit(self, kg):
        W = kg["pair2"]
        assert W.target_element(FinVec.basis("(1,1)")) == indicator("(1,1)", "(1,2)")

    def test_describe(self, kg):
        info = kg["pair2"].describe()
        assert info["dimension"] == 4
        assert info["source_dimension"] == 2
        assert info["target_dimension"] == 2

    def test_multiplier_composition(self, kg):
        W = kg["pair2"]
        left = W.eps_s(FinVec.basis("(2,2)"))
        right = W.eps_t(FinVec.basis("(1,1)"))
        both = left.then(right)
        # indicator product picks out (1,2)
        assert both.left_act(W.unit()) == FinVec.basis("(1,2)")


# ============================================================================
# Covering elements
# ============================================================================


class TestCoveringElement:
    """Δ(e_k) is read off Δ(e_k)(1⊗u) with u local to e_k."""

    def test_function_algebra_cover_is_a_source_fibre(self, kg):
        W = kg["pair2"]
        assert W.covering_element("(1,2)") == indicator("(1,2)", "(2,2)")
        assert W.coproduct_basis("(1,2)") == FinVec({("(1,1)", "(1,2)"): 1, ("(1,2)", "(2,2)"): 1})

    def test_groupoid_algebra_cover_is_a_sum_of_units(self, cg):
        W = cg["pair2"]
        assert W.covering_element("(1,2)") == indicator("(1,1)", "(2,2)")
        assert W.coproduct_basis("(1,2)") == FinVec.basis(("(1,2)", "(1,2)"))

    def test_cover_of_a_disjoint_part_stays_in_that_part(self, groupoids, kg):
        G = groupoids["union_z2_z3"]
        W = kg["union_z2_z3"]
        p = next(p for p in G.arrows if p.startswith("1:"))
        assert all(k.startswith("1:") for k in W.covering_element(p))

    @pytest.mark.parametrize("name", GROUPOID_FILES)
    def test_agrees_with_the_full_unit(self, kg, cg, name):
        for W in (kg[name], cg[name]):
            report = check_axioms(W, names=["coproduct covering"])
            assert report.ok, report.failures()

    @pytest.mark.parametrize("name", ["pair2", "z2_swap_action", "union_z2_z3"])
    def test_dual_coproduct_agrees_with_the_full_unit(self, dual_of_kg, name):
        D = dual_of_kg(name)
        for k in D.basis:
            assert D.coproduct_basis(k) == D.full_coproduct_basis(k)

    def test_separability_algebra(self, sep_wmha):
        report = check_axioms(sep_wmha["bijection2"], names=["coproduct covering"])
        assert report.ok, report.failures()


# ============================================================================
# Law runner
# ============================================================================


class TestLawTuples:
    def test_exhaustive_below_threshold(self):
        tuples, exhaustive = law_tuples(["a", "b", "c"], 2, "law", CheckSettings())
        assert exhaustive
        assert len(tuples) == 9

    def test_sampling_is_seeded(self):
        basis = [str(i) for i in range(10)]
        settings = CheckSettings(max_exhaustive_dim=4, sample_size=5, seed=3)
        first, exhaustive = law_tuples(basis, 2, "law", settings)
        second, _ = law_tuples(basis, 2, "law", settings)
        assert not exhaustive
        assert first == second
        assert len(first) == 5

    def test_arity_zero(self):
        assert law_tuples(["a"], 0, "law", CheckSettings()) == ([()], True)


class TestIsomorphism:
    def test_identity_map(self, kg):
        W = kg["union_z2_z3"]
        assert check_isomorphism(W, W, LinMap.identity(W.basis)).ok

    def test_collapsing_map_is_rejected(self, kg):
        W = kg["z2"]
        collapse = LinMap.from_function(W.basis, lambda k: FinVec.basis("e"))
        report = check_isomorphism(W, W, collapse)
        assert report.failed_names() == {"iso bijective"}
