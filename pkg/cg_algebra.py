"""
CG: the groupoid algebra.
λ_pλ_q = λ_pq when defined (0 otherwise), Δ(λ_p) = λ_p⊗λ_p, ε(λ_p) = 1,
S(λ_p) = λ_p⁻¹ and E = Σ_e λ_e⊗λ_e over the units.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping

from exact_linalg import ONE, FinVec, InconsistentSystem, Key, Scalar, scalar, solve_linear, tensor
from groupoid import Groupoid, require_valid
from integrals import Functional
from wmha_core import Multiplier, Wmha, WmhaError

logger = logging.getLogger(__name__)


class CgAlgebra(Wmha):
    """Basis λ_p for the arrows p of G."""

    def __init__(self, G: Groupoid):
        self.groupoid = require_valid(G)
        super().__init__(G.arrows, name=f"C({G.name or 'G'})")
        logger.info("built %r", self)

    def basis_product(self, left: Key, right: Key) -> FinVec:
        composite = self.groupoid.compose(left, right)
        return FinVec.basis(composite) if composite is not None else FinVec()

    def local_unit(self, elements) -> FinVec:
        """Sum of the source and target units touched by the elements."""
        G = self.groupoid
        units = {G.source[p] for x in elements for p in x} | {G.target[p] for x in elements for p in x}
        return FinVec((e, ONE) for e in units)

    def delta_right_basis(self, a: Key, b: Key) -> FinVec:
        return tensor(FinVec.basis(a), self.product(a, b))

    def delta_left_basis(self, c: Key, a: Key) -> FinVec:
        return tensor(self.product(c, a), FinVec.basis(a))

    def counit_basis(self, key: Key) -> Scalar:
        return ONE

    def antipode_basis(self, key: Key) -> FinVec:
        return FinVec.basis(self.groupoid.inverse[key])

    def antipode_inverse_basis(self, key: Key) -> FinVec:
        return FinVec.basis(self.groupoid.inverse[key])

    def canonical_idempotent(self) -> Multiplier:
        # Σ_e λ_e⊗λ_e keeps λ_p⊗λ_q on the left iff t(p) = t(q), on the right iff s(p) = s(q)
        G = self.groupoid

        def left(x: FinVec) -> FinVec:
            return FinVec((k, v) for k, v in x.items() if G.target[k[0]] == G.target[k[1]])

        def right(x: FinVec) -> FinVec:
            return FinVec((k, v) for k, v in x.items() if G.source[k[0]] == G.source[k[1]])

        return Multiplier(left_act=left, right_act=right, label="E")

    def unit_integral(self, weights: Mapping[Key, object] | None = None) -> Functional:
        """λ_p ↦ weight of p on units, 0 elsewhere (all weights 1 by default)."""
        G = self.groupoid
        if weights is None:
            weights = {e: 1 for e in G.units}
        outside = [p for p in weights if p not in G.units]
        if outside:
            raise WmhaError(f"unit integral weights must sit on units, got {outside}")
        return Functional(FinVec((e, scalar(v)) for e, v in weights.items()), label="unit")

    def designated_integral(self) -> Functional:
        return self.unit_integral()


def smallest_idempotent_check(W: CgAlgebra) -> bool:
    """Every X with XΔ(λ_p) = Δ(λ_p) = Δ(λ_p)X for all p satisfies XE = E = EX."""
    pairs = [(p, q) for p in W.basis for q in W.basis]
    constraints = []
    for p in W.basis:
        delta = W.coproduct_basis(p)
        for side in ("left", "right"):
            images = {
                pair: W.multiply_tensor(FinVec.basis(pair), delta) if side == "left"
                else W.multiply_tensor(delta, FinVec.basis(pair))
                for pair in pairs
            }
            for out in pairs:
                constraints.append((FinVec((pair, img[out]) for pair, img in images.items()), delta[out]))
    try:
        space = solve_linear(constraints, pairs)
    except InconsistentSystem:
        return False
    E = W.idempotent_element()
    candidates = [space.particular] + [space.particular + v for v in space.basis]
    return all(
        W.multiply_tensor(X, E) == E == W.multiply_tensor(E, X) for X in candidates
    )


def build_cg(G: Groupoid) -> CgAlgebra:
    return CgAlgebra(G)
