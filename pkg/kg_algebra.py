"""
K(G): functions on a finite groupoid.
Pointwise product, Δ(f)(p,q) = f(pq) when pq is defined, ε(f) = sum over the
units, S(f)(p) = f(p⁻¹), and E the indicator of composable pairs.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping

from exact_linalg import ONE, ZERO, FinVec, Key, Scalar, scalar
from groupoid import Groupoid, require_valid
from integrals import Functional
from wmha_core import Multiplier, Wmha, WmhaError

logger = logging.getLogger(__name__)


class KgAlgebra(Wmha):
    """Basis δ_p for the arrows p of G."""

    def __init__(self, G: Groupoid):
        self.groupoid = require_valid(G)
        super().__init__(G.arrows, name=f"K({G.name or 'G'})")
        self._composable = {
            (p, q) for p in G.arrows for q in G.arrows if G.composable(p, q)
        }
        logger.info("built %r with %d composable pairs", self, len(self._composable))

    def basis_product(self, left: Key, right: Key) -> FinVec:
        return FinVec.basis(left) if left == right else FinVec()

    def local_unit(self, elements) -> FinVec:
        """Indicator of the joint support."""
        return FinVec((k, ONE) for k in {k for x in elements for k in x})

    def delta_right_basis(self, a: Key, b: Key) -> FinVec:
        # the only factorisation a = pb has p = ab⁻¹
        G = self.groupoid
        if G.source[a] != G.source[b]:
            return FinVec()
        return FinVec.basis((G.compose(a, G.inverse[b]), b))

    def delta_left_basis(self, c: Key, a: Key) -> FinVec:
        G = self.groupoid
        if G.target[c] != G.target[a]:
            return FinVec()
        return FinVec.basis((c, G.compose(G.inverse[c], a)))

    def counit_basis(self, key: Key) -> Scalar:
        return ONE if self.groupoid.is_unit(key) else ZERO

    def antipode_basis(self, key: Key) -> FinVec:
        return FinVec.basis(self.groupoid.inverse[key])

    def antipode_inverse_basis(self, key: Key) -> FinVec:
        return FinVec.basis(self.groupoid.inverse[key])

    def canonical_idempotent(self) -> Multiplier:
        composable = self._composable

        def restrict(x: FinVec) -> FinVec:
            return FinVec((k, v) for k, v in x.items() if k in composable)

        return Multiplier(left_act=restrict, right_act=restrict, label="E")

    # integrals

    def _weights(self, weights: Mapping[Key, object], fibre: Mapping[str, str], side: str) -> FinVec:
        g = FinVec((p, scalar(v)) for p, v in weights.items())
        unknown = set(g) - set(self.basis)
        if unknown:
            raise WmhaError(f"weights name unknown arrows: {sorted(unknown)}")
        for p in self.basis:
            for q in self.basis:
                if fibre[p] == fibre[q] and g[p] != g[q]:
                    raise WmhaError(f"weights must be constant on {side} fibres: {p}, {q}")
        return g

    def left_integral(self, weights: Mapping[Key, object]) -> Functional:
        """f ↦ Σ_p g(p) f(p) with g constant on source fibres."""
        g = self._weights(weights, self.groupoid.source, "source")
        return Functional(g, label="left")

    def right_integral(self, weights: Mapping[Key, object]) -> Functional:
        """f ↦ Σ_p h(p) f(p) with h constant on target fibres."""
        h = self._weights(weights, self.groupoid.target, "target")
        return Functional(h, label="right")

    def uniform_integral(self) -> Functional:
        """Σ_p f(p): a faithful left integral that is also a right integral."""
        return Functional(FinVec((p, ONE) for p in self.basis), label="uniform")

    def designated_integral(self) -> Functional:
        return self.uniform_integral()

    def weights_on_fibres(self, per_unit: Mapping[str, object], side: str = "source") -> dict:
        """Spread a value per unit over its source (or target) fibre."""
        fibre = self.groupoid.source if side == "source" else self.groupoid.target
        return {p: per_unit[fibre[p]] for p in self.basis if fibre[p] in per_unit}


def build_kg(G: Groupoid) -> KgAlgebra:
    return KgAlgebra(G)
