"""
Tests for integrals: invariance oracles, faithfulness, modular data and the
transfer relations.
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exact_linalg import FinVec, LinMap, scalar
from integrals import (
    Functional,
    IntegralCertificate,
    IntegralError,
    NotFaithfulError,
    check_invariance_oracles,
    check_transfer_relations,
    compose_antipode,
    distinguished_square_element,
    enumerate_left_integrals,
    faithful_set_check,
    integral_status,
    modular_automorphism,
    modular_element,
    radon_nikodym,
    single_faithfulness_criterion,
    spanning_forms_check,
    transfer_pair,
)
from tests.conftest import corpus_refs, settings_for

PAIR2_ARROWS = ["(1,1)", "(1,2)", "(2,1)", "(2,2)"]

# constant on source fibres: {(1,1),(2,1)} and {(1,2),(2,2)}
G_WEIGHTS = {"(1,1)": 1, "(2,1)": 1, "(1,2)": 2, "(2,2)": 2}
# constant on target fibres: {(1,1),(1,2)} and {(2,1),(2,2)}
H_WEIGHTS = {"(1,1)": 3, "(1,2)": 3, "(2,1)": 5, "(2,2)": 5}

weights = st.lists(st.integers(-3, 3), min_size=4, max_size=4)


def functional(values: dict, label: str = "") -> Functional:
    return Functional(FinVec(values), label)


# ============================================================================
# Invariance
# ============================================================================


class TestInvarianceOracles:
    """Membership, the Sweedler formula and the E formula always agree."""

    @settings(max_examples=25, deadline=None)
    @given(weights)
    def test_left_oracles_agree(self, kg, values):
        W = kg["pair2"]
        phi = functional(dict(zip(PAIR2_ARROWS, values)))
        verdict = check_invariance_oracles(phi, W, "left")
        assert verdict.agree
        by_fibre = values[0] == values[2] and values[1] == values[3]
        assert verdict.invariant == by_fibre

    @settings(max_examples=25, deadline=None)
    @given(weights)
    def test_right_oracles_agree(self, kg, values):
        W = kg["pair2"]
        psi = functional(dict(zip(PAIR2_ARROWS, values)))
        verdict = check_invariance_oracles(psi, W, "right")
        assert verdict.agree
        by_fibre = values[0] == values[1] and values[2] == values[3]
        assert verdict.invariant == by_fibre

    @pytest.mark.parametrize("name", ["z2_swap_action", "union_z2_z3"])
    def test_enumerated_integrals_pass_every_oracle(self, cg, name):
        W = cg[name]
        for phi in enumerate_left_integrals(W):
            verdict = check_invariance_oracles(phi, W, "left")
            assert verdict.agree and verdict.invariant

    def test_status_labels(self, kg):
        W = kg["pair2"]
        assert integral_status(W.uniform_integral(), W) == "integral"
        assert integral_status(functional({}), W) == "invariant, not an integral"
        assert integral_status(functional({"(1,2)": 1}), W) == "not invariant"


# ============================================================================
# Faithfulness
# ============================================================================


class TestFaithfulness:
    def test_uniform_integral_is_faithful(self, kg):
        W = kg["pair2"]
        comparison = single_faithfulness_criterion(W.uniform_integral(), W)
        assert comparison.kernel and comparison.agree

    def test_integral_on_one_fibre_is_not_faithful(self, kg):
        W = kg["pair2"]
        phi = W.left_integral({"(1,1)": 1, "(2,1)": 1})
        assert not faithful_set_check([phi], W)

    def test_fibrewise_set_is_faithful(self, kg):
        W = kg["pair2"]
        first = W.left_integral({"(1,1)": 1, "(2,1)": 1})
        second = W.left_integral({"(1,2)": 1, "(2,2)": 1})
        assert faithful_set_check([first, second], W)

    def test_right_side_set(self, kg):
        W = kg["pair3"]
        psi = W.right_integral(W.weights_on_fibres({"(1,1)": 1, "(2,2)": 1, "(3,3)": 1}, side="target"))
        assert faithful_set_check([psi], W, side="right")

    def test_non_invariant_member(self, kg):
        W = kg["pair2"]
        with pytest.raises(IntegralError):
            faithful_set_check([functional({"(1,2)": 1})], W)

    def test_certificate_rejects_zero_and_wrong_side(self, kg):
        W = kg["pair2"]
        with pytest.raises(IntegralError):
            IntegralCertificate.build(functional({}), W)
        with pytest.raises(IntegralError):
            IntegralCertificate.build(W.left_integral(G_WEIGHTS), W, side="right")

    def test_certificate_of_the_uniform_integral(self, kg):
        W = kg["pair2"]
        cert = IntegralCertificate.build(W.uniform_integral(), W, side="two-sided")
        assert cert.faithful
        assert cert.modular_automorphism == LinMap.identity(W.basis)
        assert cert.modular_element.element == W.unit()


# ============================================================================
# Modular data
# ============================================================================


class TestModularData:
    def test_modular_element_is_h_over_g(self, kg):
        W = kg["pair2"]
        phi = W.left_integral(G_WEIGHTS)
        psi = W.right_integral(H_WEIGHTS)
        delta = modular_element(phi, psi, W)
        assert delta.element == FinVec({
            "(1,1)": 3,
            "(2,1)": 5,
            "(1,2)": scalar("3/2"),
            "(2,2)": scalar("5/2"),
        })

    def test_radon_nikodym_is_a_fibre_ratio(self, kg):
        W = kg["pair2"]
        phi = W.left_integral(G_WEIGHTS)
        phi1 = W.left_integral({"(1,1)": 4, "(2,1)": 4, "(1,2)": 1, "(2,2)": 1})
        y = radon_nikodym(phi, phi1, W)
        assert y.element == FinVec({"(1,1)": 4, "(2,1)": 4, "(1,2)": scalar("1/2"), "(2,2)": scalar("1/2")})

    @pytest.mark.parametrize("name", ["pair2", "union_z2_z3", "z2_swap_action"])
    def test_commutative_instances_have_trivial_modular_automorphism(self, kg, name):
        W = kg[name]
        assert modular_automorphism(W.uniform_integral(), W) == LinMap.identity(W.basis)

    def test_square_density_is_the_unit(self, kg):
        W = kg["pair3"]
        y = distinguished_square_element(W.uniform_integral(), W)
        assert y.element == W.unit()

    def test_modular_data_needs_a_faithful_integral(self, kg):
        W = kg["pair2"]
        phi = W.left_integral({"(1,1)": 1, "(2,1)": 1})
        with pytest.raises(NotFaithfulError):
            modular_automorphism(phi, W)

    def test_antipode_twice_is_identity(self, kg):
        W = kg["pair2"]
        phi = W.left_integral(G_WEIGHTS)
        assert compose_antipode(phi, W, 2) == phi
        assert compose_antipode(phi, W, -1) == compose_antipode(phi, W, 1)


# ============================================================================
# Spanning forms and transfer
# ============================================================================


class TestSpanningForms:
    @pytest.mark.parametrize("name", ["pair2", "z2_swap_action"])
    def test_four_forms_span_one_space(self, kg, name):
        W = kg[name]
        assert spanning_forms_check(W, [W.uniform_integral()])

    def test_groupoid_algebra(self, cg):
        W = cg["pair2"]
        assert spanning_forms_check(W, [W.designated_integral()])


class TestTransfer:
    def test_uniform_integrals(self, kg):
        W = kg["pair2"]
        phi = W.uniform_integral()
        report = check_transfer_relations(phi, phi, W)
        assert report.ok
        assert all(r.checked == 64 and r.exhaustive for r in report.results)

    def test_weighted_integrals(self, kg):
        W = kg["pair2"]
        report = check_transfer_relations(W.left_integral(G_WEIGHTS), W.right_integral(H_WEIGHTS), W)
        assert report.ok, report.failures()

    def test_transfer_pairs_balance(self, kg):
        W = kg["pair2"]
        phi, psi = W.left_integral(G_WEIGHTS), W.right_integral(H_WEIGHTS)
        x = W.element("(1,1)")
        for item in ("i", "iv"):
            a, b = transfer_pair(item, phi, psi, W, "(1,2)", "(2,1)")
            assert psi(W.multiply(x, a)) == phi(W.multiply(x, b))

    @pytest.mark.parametrize("ref", corpus_refs())
    def test_designated_integrals_across_the_corpus(self, instance, ref):
        W = instance(ref)
        phi = W.designated_integral()
        report = check_transfer_relations(phi, compose_antipode(phi, W), W, settings_for(ref))
        assert report.ok, report.failures()

    def test_right_integral_must_be_right_invariant(self, kg):
        W = kg["pair2"]
        with pytest.raises(IntegralError):
            check_transfer_relations(W.left_integral(G_WEIGHTS), W.left_integral(G_WEIGHTS), W)
